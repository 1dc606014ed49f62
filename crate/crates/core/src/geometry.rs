//! Regular simplex embeddings and the coefficient → distance → point mapping.
//!
//! A coefficient vector `a` with `n + 1` non-negative entries is placed inside a
//! regular `n`-simplex so that the perpendicular distances `h_i` to the faces are
//! proportional to `a_i`. The sum of the distances from any interior point to the
//! faces is the simplex height `H`, which fixes the scale: `h_i = H / Σa · a_i`.
//!
//! Everything here is generic over [`Scalar`]; the rest of the crate uses the
//! `f64` aliases exported from the crate root.

use serde::Serialize;
use thiserror::Error;

use crate::scalar::{close, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("unsupported simplex dimension {0} (expected 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("simplex edge must be positive and finite, got {0}")]
    NonPositiveEdge(f64),
    #[error("coefficient vector must have 3 or 4 entries, got {0}")]
    BadArity(usize),
    #[error("arity mismatch: simplex expects {expected} values, got {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("coefficient {index} is negative ({value})")]
    NegativeCoefficient { index: usize, value: f64 },
    #[error("coefficient {0} is not a finite number")]
    NonFinite(usize),
    #[error("all-zero coefficient vector")]
    AllZero,
    #[error("distance total {total} does not match simplex height {height}")]
    InconsistentTotal { total: f64, height: f64 },
    #[error("point lies outside the simplex (signed distance {distance} to face {face})")]
    OutsideSimplex { face: usize, distance: f64 },
    #[error("invalid time axis [{t_min}, {t_max}] with length {length}")]
    InvalidTimeAxis { t_min: f64, t_max: f64, length: f64 },
    #[error("timestamp {t} outside the time axis [{t_min}, {t_max}]")]
    TimestampOutOfRange { t: f64, t_min: f64, t_max: f64 },
    #[error("saturation reference sum must be positive, got {0}")]
    NonPositiveReference(f64),
    #[error("coefficient sum must be non-negative, got {0}")]
    NegativeSum(f64),
}

pub type Result<T> = std::result::Result<T, GeometryError>;

/// A point in 2- or 3-space. Two-dimensional points keep `z = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point<T> {
    xyz: [T; 3],
    #[serde(skip)]
    dim: usize,
}

impl<T: Scalar> Point<T> {
    pub fn new2(x: T, y: T) -> Self {
        Self { xyz: [x, y, T::zero()], dim: 2 }
    }

    pub fn new3(x: T, y: T, z: T) -> Self {
        Self { xyz: [x, y, z], dim: 3 }
    }

    pub fn from_slice(coords: &[T]) -> Option<Self> {
        match *coords {
            [x, y] => Some(Self::new2(x, y)),
            [x, y, z] => Some(Self::new3(x, y, z)),
            _ => None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[T] {
        &self.xyz[..self.dim]
    }

    /// Coordinates padded to three components.
    pub fn xyz(&self) -> [T; 3] {
        self.xyz
    }

    pub fn x(&self) -> T {
        self.xyz[0]
    }

    pub fn y(&self) -> T {
        self.xyz[1]
    }

    pub fn z(&self) -> T {
        self.xyz[2]
    }

    pub fn distance(&self, other: &Self) -> T {
        sub(self.xyz, other.xyz).iter().fold(T::zero(), |acc, &c| acc + c * c).sqrt()
    }

    fn from_xyz(xyz: [T; 3], dim: usize) -> Self {
        Self { xyz, dim }
    }
}

fn sub<T: Scalar>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot<T: Scalar>(a: [T; 3], b: [T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross<T: Scalar>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalized<T: Scalar>(v: [T; 3]) -> [T; 3] {
    let len = dot(v, v).sqrt();
    [v[0] / len, v[1] / len, v[2] / len]
}

/// Oriented hyperplane: `signed_distance(p) = normal · p + offset`, positive on
/// the side of the opposite vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Face<T> {
    normal: [T; 3],
    offset: T,
}

impl<T: Scalar> Face<T> {
    pub fn signed_distance(&self, p: &Point<T>) -> T {
        dot(self.normal, p.xyz) + self.offset
    }

    /// Unit normal pointing into the simplex.
    pub fn normal(&self) -> [T; 3] {
        self.normal
    }

    /// Orthogonal projection of `p` onto the face plane.
    pub fn foot(&self, p: &Point<T>) -> Point<T> {
        let d = self.signed_distance(p);
        let n = self.normal;
        Point::from_xyz([p.xyz[0] - d * n[0], p.xyz[1] - d * n[1], p.xyz[2] - d * n[2]], p.dim)
    }
}

/// Simplex dimension. Only triangles and tetrahedra are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Dim {
    Triangle,
    Tetrahedron,
}

impl Dim {
    pub fn from_n(n: usize) -> Result<Self> {
        match n {
            2 => Ok(Dim::Triangle),
            3 => Ok(Dim::Tetrahedron),
            other => Err(GeometryError::UnsupportedDimension(other)),
        }
    }

    pub fn from_arity(arity: usize) -> Result<Self> {
        match arity {
            3 => Ok(Dim::Triangle),
            4 => Ok(Dim::Tetrahedron),
            other => Err(GeometryError::BadArity(other)),
        }
    }

    pub fn n(self) -> usize {
        match self {
            Dim::Triangle => 2,
            Dim::Tetrahedron => 3,
        }
    }

    /// Number of vertices (and faces, and coefficients).
    pub fn arity(self) -> usize {
        self.n() + 1
    }
}

/// A regular `n`-simplex in canonical position.
///
/// Triangle: `V1 = (0,0)`, `V2 = (s,0)`, `V3 = (s/2, s√3/2)`.
/// Tetrahedron: the triangle in `z = 0` plus `V4 = (s/2, s√3/6, s√(2/3))`.
/// Face `i` is opposite vertex `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexFrame<T> {
    dim: Dim,
    edge: T,
    vertices: Vec<Point<T>>,
    faces: Vec<Face<T>>,
    height: T,
}

impl<T: Scalar> SimplexFrame<T> {
    pub fn new(n: usize, edge: T) -> Result<Self> {
        let dim = Dim::from_n(n)?;
        if !(edge.is_finite() && edge > T::zero()) {
            return Err(GeometryError::NonPositiveEdge(edge.as_f64()));
        }
        let half = edge / T::lit(2.0);
        let three = T::lit(3.0);
        let vertices = match dim {
            Dim::Triangle => vec![
                Point::new2(T::zero(), T::zero()),
                Point::new2(edge, T::zero()),
                Point::new2(half, edge * three.sqrt() / T::lit(2.0)),
            ],
            Dim::Tetrahedron => vec![
                Point::new3(T::zero(), T::zero(), T::zero()),
                Point::new3(edge, T::zero(), T::zero()),
                Point::new3(half, edge * three.sqrt() / T::lit(2.0), T::zero()),
                Point::new3(half, edge * three.sqrt() / T::lit(6.0), edge * (T::lit(2.0) / three).sqrt()),
            ],
        };
        let faces = (0..vertices.len()).map(|i| face_opposite(&vertices, i, dim)).collect();
        let height = match dim {
            Dim::Triangle => edge * three.sqrt() / T::lit(2.0),
            Dim::Tetrahedron => edge * (T::lit(2.0) / three).sqrt(),
        };
        Ok(Self { dim, edge, vertices, faces, height })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.dim.n()
    }

    pub fn arity(&self) -> usize {
        self.dim.arity()
    }

    pub fn edge(&self) -> T {
        self.edge
    }

    pub fn height(&self) -> T {
        self.height
    }

    pub fn vertices(&self) -> &[Point<T>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Face<T>] {
        &self.faces
    }

    pub fn centroid(&self) -> Point<T> {
        let k = T::from_usize(self.vertices.len()).unwrap_or_else(T::one);
        let mut acc = [T::zero(); 3];
        for v in &self.vertices {
            for (a, c) in acc.iter_mut().zip(v.xyz) {
                *a = *a + c;
            }
        }
        Point::from_xyz([acc[0] / k, acc[1] / k, acc[2] / k], self.n())
    }

    /// Places a coefficient vector: `coefficients_to_distances` then `distances_to_point`.
    pub fn place(&self, a: &CoefficientVector<T>) -> Result<Point<T>> {
        let h = coefficients_to_distances(a, self)?;
        distances_to_point(&h, self)
    }

    fn check_arity(&self, found: usize) -> Result<()> {
        if found != self.arity() {
            return Err(GeometryError::ArityMismatch { expected: self.arity(), found });
        }
        Ok(())
    }
}

impl<T: Scalar + Serialize> Serialize for SimplexFrame<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SimplexFrame", 3)?;
        st.serialize_field("n", &self.n())?;
        st.serialize_field("edge", &self.edge)?;
        st.serialize_field("height", &self.height)?;
        st.end()
    }
}

fn face_opposite<T: Scalar>(vertices: &[Point<T>], i: usize, dim: Dim) -> Face<T> {
    let others: Vec<[T; 3]> = vertices.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v.xyz).collect();
    let raw = match dim {
        Dim::Triangle => {
            let d = sub(others[1], others[0]);
            [-d[1], d[0], T::zero()]
        }
        Dim::Tetrahedron => cross(sub(others[1], others[0]), sub(others[2], others[0])),
    };
    let mut normal = normalized(raw);
    if dot(normal, sub(vertices[i].xyz, others[0])) < T::zero() {
        normal = [-normal[0], -normal[1], -normal[2]];
    }
    Face { normal, offset: -dot(normal, others[0]) }
}

/// Canonical regular simplex of dimension `n` with edge `edge`.
pub fn simplex_frame<T: Scalar>(n: usize, edge: T) -> Result<SimplexFrame<T>> {
    SimplexFrame::new(n, edge)
}

/// Proximity coefficients of one observation: `n + 1` non-negative values, not all zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct CoefficientVector<T> {
    values: Vec<T>,
}

impl<T: Scalar> CoefficientVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        Dim::from_arity(values.len())?;
        for (index, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(GeometryError::NonFinite(index));
            }
            if v < T::zero() {
                return Err(GeometryError::NegativeCoefficient { index, value: v.as_f64() });
            }
        }
        if values.iter().all(|v| v.is_zero()) {
            return Err(GeometryError::AllZero);
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn arity(&self) -> usize {
        self.values.len()
    }

    pub fn sum(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, &v| acc + v)
    }

    /// Index of the largest coefficient; ties resolve to the highest index.
    pub fn dominant(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v >= self.values[best] {
                best = i;
            }
        }
        best
    }

    /// Coefficients with entries below `1e-12 · max` forced to zero.
    fn snapped(&self) -> Vec<T> {
        let max = self.values.iter().fold(T::zero(), |m, &v| m.max(v));
        let floor = max * T::lit(1e-12);
        self.values.iter().map(|&v| if v < floor { T::zero() } else { v }).collect()
    }
}

/// Perpendicular distances from a point to each simplex face, with their total.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceVector<T> {
    values: Vec<T>,
    total: T,
}

impl<T: Scalar> DistanceVector<T> {
    /// Builds a distance vector, checking non-negativity and that the values sum to `total`.
    pub fn new(values: Vec<T>, total: T) -> Result<Self> {
        Dim::from_arity(values.len())?;
        for (index, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(GeometryError::NonFinite(index));
            }
            if v < T::zero() {
                return Err(GeometryError::NegativeCoefficient { index, value: v.as_f64() });
            }
        }
        let sum = values.iter().fold(T::zero(), |acc, &v| acc + v);
        if !close(sum, total, T::tolerance(), T::zero()) {
            return Err(GeometryError::InconsistentTotal { total: sum.as_f64(), height: total.as_f64() });
        }
        Ok(Self { values, total })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn total(&self) -> T {
        self.total
    }
}

/// `h_i = (H / Σa) · a_i`, so that `Σh = H` and `h_i : h_j = a_i : a_j`.
pub fn coefficients_to_distances<T: Scalar>(
    a: &CoefficientVector<T>,
    frame: &SimplexFrame<T>,
) -> Result<DistanceVector<T>> {
    frame.check_arity(a.arity())?;
    let snapped = a.snapped();
    let sum = snapped.iter().fold(T::zero(), |acc, &v| acc + v);
    let scale = frame.height / sum;
    let values = snapped.into_iter().map(|v| scale * v).collect();
    Ok(DistanceVector { values, total: frame.height })
}

/// The unique point whose distance to face `i` is `h_i`: `P = Σ (h_i / H) · V_i`.
pub fn distances_to_point<T: Scalar>(h: &DistanceVector<T>, frame: &SimplexFrame<T>) -> Result<Point<T>> {
    frame.check_arity(h.values.len())?;
    if !close(h.total, frame.height, T::tolerance(), T::zero()) {
        return Err(GeometryError::InconsistentTotal { total: h.total.as_f64(), height: frame.height.as_f64() });
    }
    let mut acc = [T::zero(); 3];
    for (&hi, v) in h.values.iter().zip(&frame.vertices) {
        let w = hi / frame.height;
        for (a, c) in acc.iter_mut().zip(v.xyz) {
            *a = *a + w * c;
        }
    }
    Ok(Point::from_xyz(acc, frame.n()))
}

/// Inverse of [`distances_to_point`]: perpendicular distances of `p` to every face.
///
/// Points up to `tolerance · edge` outside a face are accepted and clamped onto it.
pub fn point_to_distances<T: Scalar>(p: &Point<T>, frame: &SimplexFrame<T>) -> Result<DistanceVector<T>> {
    if p.dim() != frame.n() {
        return Err(GeometryError::ArityMismatch { expected: frame.n(), found: p.dim() });
    }
    let slack = T::tolerance() * frame.edge;
    let mut values = Vec::with_capacity(frame.arity());
    for (face_idx, face) in frame.faces.iter().enumerate() {
        let d = face.signed_distance(p);
        if d < -slack {
            return Err(GeometryError::OutsideSimplex { face: face_idx, distance: d.as_f64() });
        }
        values.push(d.max(T::zero()));
    }
    Ok(DistanceVector { values, total: frame.height })
}

/// Time span of a simplex prism and its axial length `H'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeAxis<T> {
    t_min: T,
    t_max: T,
    length: T,
}

impl<T: Scalar> TimeAxis<T> {
    pub fn new(t_min: T, t_max: T, length: T) -> Result<Self> {
        let ok = t_min.is_finite() && t_max.is_finite() && length.is_finite() && t_max >= t_min && length > T::zero();
        if !ok {
            return Err(GeometryError::InvalidTimeAxis {
                t_min: t_min.as_f64(),
                t_max: t_max.as_f64(),
                length: length.as_f64(),
            });
        }
        Ok(Self { t_min, t_max, length })
    }

    pub fn t_min(&self) -> T {
        self.t_min
    }

    pub fn t_max(&self) -> T {
        self.t_max
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn contains(&self, t: T) -> bool {
        t >= self.t_min && t <= self.t_max
    }
}

/// Axial offset of the slice taken at `t`: `H' · (t − T_min) / (T_max − T_min)`.
///
/// A degenerate axis (`T_max = T_min`) maps every admissible `t` to 0.
pub fn prism_offset<T: Scalar>(t: T, axis: &TimeAxis<T>) -> Result<T> {
    if !axis.contains(t) {
        return Err(GeometryError::TimestampOutOfRange {
            t: t.as_f64(),
            t_min: axis.t_min.as_f64(),
            t_max: axis.t_max.as_f64(),
        });
    }
    let span = axis.t_max - axis.t_min;
    if span.is_zero() {
        return Ok(T::zero());
    }
    Ok(axis.length * (t - axis.t_min) / span)
}

/// Colour saturation scale for a point whose coefficients sum to `sum_a`.
pub fn saturation_factor<T: Scalar>(sum_a: T, ref_sum: T) -> Result<T> {
    if !(ref_sum > T::zero()) {
        return Err(GeometryError::NonPositiveReference(ref_sum.as_f64()));
    }
    if !(sum_a >= T::zero()) {
        return Err(GeometryError::NegativeSum(sum_a.as_f64()));
    }
    Ok((sum_a / ref_sum).min(T::one()))
}
