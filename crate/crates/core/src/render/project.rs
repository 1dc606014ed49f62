//! Scene → depth-sorted planar primitives.

use serde::Serialize;

use super::color::Color;
use super::RenderError;
use crate::geometry::{prism_offset, saturation_factor};
use crate::scene::{Item, Scene, Style, ViewSettings};
use crate::{Frame, Point};

/// Focal factor used for perspective views when none is given.
pub const DEFAULT_FOCAL: f64 = 3.0;
/// Fraction of each viewport dimension left empty on every side.
pub const FIT_MARGIN: f64 = 0.05;
/// Smallest accepted viewport side, px.
pub const MIN_VIEWPORT: u32 = 64;
/// Font size of side digits, px.
pub const LABEL_SIZE: f64 = 14.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Projection {
    Orthographic,
    /// Camera distance is `(1 + focal)` times the scene radius.
    Perspective {
        focal: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Camera {
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
    pub mode: Projection,
}

impl Camera {
    pub fn orthographic(azimuth_deg: f64, elevation_deg: f64) -> Self {
        Self { azimuth_deg, elevation_deg, mode: Projection::Orthographic }
    }

    pub fn from_view(view: &ViewSettings) -> Self {
        let mode = if view.transform_mode == 1 {
            Projection::Perspective { focal: DEFAULT_FOCAL }
        } else {
            Projection::Orthographic
        };
        Self { azimuth_deg: view.azimuth_deg, elevation_deg: view.elevation_deg, mode }
    }

    /// Rotation about z by the azimuth, then about x by the elevation.
    /// Returns `(screen_x, screen_y, toward_viewer)`.
    pub fn rotate(&self, p: [f64; 3]) -> [f64; 3] {
        let (sa, ca) = self.azimuth_deg.to_radians().sin_cos();
        let (se, ce) = self.elevation_deg.to_radians().sin_cos();
        let x1 = p[0] * ca - p[1] * sa;
        let y1 = p[0] * sa + p[1] * ca;
        let y2 = y1 * ce + p[2] * se;
        let z2 = -y1 * se + p[2] * ce;
        [x1, y2, z2]
    }
}

/// What part of the figure a primitive draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Role {
    Wire,
    Slice,
    SliceOutline,
    Marker,
    Fan,
    Path,
    Label,
}

impl Role {
    pub fn class(self) -> &'static str {
        match self {
            Role::Wire => "wire",
            Role::Slice => "slice",
            Role::SliceOutline => "slice-outline",
            Role::Marker => "marker",
            Role::Fan => "fan",
            Role::Path => "path",
            Role::Label => "label",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Shape {
    Segment { from: [f64; 2], to: [f64; 2], style: Style },
    PolyLine { points: Vec<[f64; 2]>, style: Style },
    Disc { center: [f64; 2], radius: f64, fill: Color },
    Polygon { points: Vec<[f64; 2]>, fill: Color, opacity: f64 },
    Label { anchor: [f64; 2], text: String, color: Color, size: f64 },
}

impl Shape {
    pub fn points(&self) -> Vec<[f64; 2]> {
        match self {
            Shape::Segment { from, to, .. } => vec![*from, *to],
            Shape::PolyLine { points, .. } | Shape::Polygon { points, .. } => points.clone(),
            Shape::Disc { center, .. } => vec![*center],
            Shape::Label { anchor, .. } => vec![*anchor],
        }
    }

    fn map_points(&mut self, f: impl Fn([f64; 2]) -> [f64; 2]) {
        match self {
            Shape::Segment { from, to, .. } => {
                *from = f(*from);
                *to = f(*to);
            }
            Shape::PolyLine { points, .. } | Shape::Polygon { points, .. } => {
                points.iter_mut().for_each(|p| *p = f(*p));
            }
            Shape::Disc { center, .. } => *center = f(*center),
            Shape::Label { anchor, .. } => *anchor = f(*anchor),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenderPrimitive {
    pub shape: Shape,
    pub role: Role,
    /// Mean distance from the viewer; larger is farther.
    pub depth: f64,
    /// Index of the scene item that produced it; `None` for side digits.
    pub item: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenderPlan {
    pub width: u32,
    pub height: u32,
    /// Farthest first; equal depths keep scene order.
    pub primitives: Vec<RenderPrimitive>,
}

impl RenderPlan {
    pub fn count(&self, role: Role) -> usize {
        self.primitives.iter().filter(|p| p.role == role).count()
    }

    pub fn is_depth_sorted(&self) -> bool {
        self.primitives.windows(2).all(|w| w[0].depth >= w[1].depth)
    }
}

/// World-space primitive before the camera is applied.
enum Proto {
    Segment([f64; 3], [f64; 3], Style),
    PolyLine(Vec<[f64; 3]>, Style),
    Disc([f64; 3], f64, Color),
    Polygon(Vec<[f64; 3]>, Color, f64),
    Label([f64; 3], String, Color),
}

struct Builder<'a> {
    scene: &'a Scene,
    out: Vec<(Proto, Role, Option<usize>)>,
}

impl Builder<'_> {
    fn frame(&self) -> &Frame {
        &self.scene.frame
    }

    fn lift(&self, p: &Point, z: f64) -> [f64; 3] {
        let [x, y, pz] = p.xyz();
        if self.scene.prism.is_some() {
            [x, y, z]
        } else {
            [x, y, pz]
        }
    }

    fn offset(&self, t: Option<f64>) -> Result<f64, RenderError> {
        match (t, &self.scene.prism) {
            (Some(t), Some(axis)) => Ok(prism_offset(t, axis)?),
            _ => Ok(0.0),
        }
    }

    fn push(&mut self, p: Proto, role: Role, item: Option<usize>) {
        self.out.push((p, role, item));
    }

    fn edges(&self, z: f64) -> Vec<([f64; 3], [f64; 3])> {
        let vs = self.frame().vertices();
        let mut out = Vec::new();
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                out.push((self.lift(&vs[i], z), self.lift(&vs[j], z)));
            }
        }
        out
    }

    fn item(&mut self, idx: usize, item: &Item) -> Result<(), RenderError> {
        let frame = self.scene.frame.clone();
        match item {
            Item::WireSimplex(w) => {
                let mut segs = self.edges(0.0);
                if let Some(axis) = &self.scene.prism {
                    let top = axis.length();
                    segs.extend(self.edges(top));
                    for v in frame.vertices() {
                        segs.push((self.lift(v, 0.0), self.lift(v, top)));
                    }
                }
                for (a, b) in segs {
                    self.push(Proto::Segment(a, b, w.style.clone()), Role::Wire, Some(idx));
                }
            }
            Item::SliceTriangle(s) => {
                let z = self.offset(Some(s.timestamp))?;
                let pts: Vec<[f64; 3]> = frame.vertices().iter().map(|v| self.lift(v, z)).collect();
                self.push(Proto::Polygon(pts.clone(), s.style.color, s.opacity), Role::Slice, Some(idx));
                let mut ring = pts;
                ring.push(ring[0]);
                self.push(Proto::PolyLine(ring, s.style.clone()), Role::SliceOutline, Some(idx));
            }
            Item::Marker(m) => {
                let z = self.offset(m.timestamp)?;
                let p = frame.place(&m.coefficients)?;
                let reference = self.scene.effective_saturation_reference();
                let factor = if reference > 0.0 { saturation_factor(m.saturation_sum(), reference)? } else { 1.0 };
                let fill = m.style.color.desaturate(factor);
                self.push(Proto::Disc(self.lift(&p, z), m.radius, fill), Role::Marker, Some(idx));
            }
            Item::PerpendicularFan(f) => {
                let z = self.offset(f.timestamp)?;
                let p = frame.place(&f.coefficients)?;
                for (face, color) in frame.faces().iter().zip(&f.side_colors) {
                    let foot = face.foot(&p);
                    let style = Style { color: *color, ..f.style.clone() };
                    self.push(Proto::Segment(self.lift(&p, z), self.lift(&foot, z), style), Role::Fan, Some(idx));
                }
            }
            Item::Trajectory(t) => {
                let mut pts = Vec::with_capacity(t.waypoints.len());
                for w in &t.waypoints {
                    let z = self.offset(w.timestamp)?;
                    pts.push(self.lift(&frame.place(&w.coefficients)?, z));
                }
                for pair in pts.windows(2) {
                    self.push(Proto::Segment(pair[0], pair[1], t.style.clone()), Role::Path, Some(idx));
                }
            }
            Item::SideLabels(_) => {}
        }
        Ok(())
    }

    /// Pattern digits (or custom side labels) just outside each face.
    fn digits(&mut self) {
        let frame = self.scene.frame.clone();
        let custom = self.scene.items.iter().rev().find_map(|i| match i {
            Item::SideLabels(l) => Some(l.labels.clone()),
            _ => None,
        });
        let vs = frame.vertices();
        let push_out = frame.edge() * 0.08;
        for (i, face) in frame.faces().iter().enumerate() {
            let others: Vec<&Point> = vs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v).collect();
            let k = others.len() as f64;
            let mut c = [0.0; 3];
            for v in &others {
                for (a, b) in c.iter_mut().zip(v.xyz()) {
                    *a += b / k;
                }
            }
            let n = face.normal();
            let anchor = [c[0] - n[0] * push_out, c[1] - n[1] * push_out, c[2] - n[2] * push_out];
            let text = custom.as_ref().and_then(|l| l.get(i).cloned()).unwrap_or_else(|| (i + 1).to_string());
            self.push(Proto::Label(anchor, text, Color::BLACK), Role::Label, None);
        }
    }
}

/// Projects `scene` through `camera` into a `width × height` plan.
///
/// Three-dimensional scenes (tetrahedra and prisms) are rotated about their
/// centroid; planar scenes skip the camera. Every primitive is then scaled
/// uniformly and centred so the drawing fills the viewport minus a 5% margin.
pub fn project(scene: &Scene, camera: &Camera, width: u32, height: u32) -> Result<RenderPlan, RenderError> {
    if width < MIN_VIEWPORT || height < MIN_VIEWPORT {
        return Err(RenderError::DegenerateViewport { width, height });
    }
    if scene.items.is_empty() {
        return Err(RenderError::EmptyScene);
    }
    if let Projection::Perspective { focal } = camera.mode {
        if !(focal > 0.0 && focal.is_finite()) {
            return Err(RenderError::BadCamera(format!("focal factor must be positive, got {focal}")));
        }
    }
    let mut b = Builder { scene, out: Vec::new() };
    for (idx, item) in scene.items.iter().enumerate() {
        b.item(idx, item)?;
    }
    if scene.show_digits {
        b.digits();
    }
    let protos = b.out;

    let is_3d = scene.frame.n() == 3 || scene.prism.is_some();
    let all: Vec<[f64; 3]> = protos.iter().flat_map(|(p, _, _)| proto_points(p)).collect();
    let centroid = if all.is_empty() {
        [0.0; 3]
    } else {
        let k = all.len() as f64;
        all.iter().fold([0.0; 3], |acc, p| [acc[0] + p[0] / k, acc[1] + p[1] / k, acc[2] + p[2] / k])
    };
    let radius = all
        .iter()
        .map(|p| ((p[0] - centroid[0]).powi(2) + (p[1] - centroid[1]).powi(2) + (p[2] - centroid[2]).powi(2)).sqrt())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);

    // camera space: (x, y, depth)
    let to_camera = |p: [f64; 3]| -> [f64; 3] {
        if !is_3d {
            return [p[0], p[1], 0.0];
        }
        let r = camera.rotate([p[0] - centroid[0], p[1] - centroid[1], p[2] - centroid[2]]);
        match camera.mode {
            Projection::Orthographic => [r[0], r[1], -r[2]],
            Projection::Perspective { focal } => {
                let dist = radius * (1.0 + focal);
                let s = dist / (dist - r[2]);
                [r[0] * s, r[1] * s, -r[2]]
            }
        }
    };

    let mut prims: Vec<RenderPrimitive> = protos
        .into_iter()
        .map(|(proto, role, item)| {
            let cam: Vec<[f64; 3]> = proto_points(&proto).into_iter().map(to_camera).collect();
            let depth = cam.iter().map(|c| c[2]).sum::<f64>() / cam.len() as f64;
            let xy: Vec<[f64; 2]> = cam.iter().map(|c| [c[0], c[1]]).collect();
            let shape = match proto {
                Proto::Segment(_, _, style) => Shape::Segment { from: xy[0], to: xy[1], style },
                Proto::PolyLine(_, style) => Shape::PolyLine { points: xy, style },
                Proto::Disc(_, radius, fill) => Shape::Disc { center: xy[0], radius, fill },
                Proto::Polygon(_, fill, opacity) => Shape::Polygon { points: xy, fill, opacity },
                Proto::Label(_, text, color) => Shape::Label { anchor: xy[0], text, color, size: LABEL_SIZE },
            };
            RenderPrimitive { shape, role, depth, item }
        })
        .collect();

    if prims.iter().any(|p| !p.depth.is_finite() || p.shape.points().iter().flatten().any(|c| !c.is_finite())) {
        return Err(RenderError::NonFinite);
    }

    // stable: equal depths keep generation (scene) order
    prims.sort_by(|a, b| b.depth.total_cmp(&a.depth));

    let fit = FitTransform::new(prims.iter().flat_map(|p| p.shape.points()), width, height);
    for p in &mut prims {
        p.shape.map_points(|q| fit.apply(q));
    }
    Ok(RenderPlan { width, height, primitives: prims })
}

fn proto_points(p: &Proto) -> Vec<[f64; 3]> {
    match p {
        Proto::Segment(a, b, _) => vec![*a, *b],
        Proto::PolyLine(pts, _) | Proto::Polygon(pts, _, _) => pts.clone(),
        Proto::Disc(c, _, _) | Proto::Label(c, _, _) => vec![*c],
    }
}

/// Uniform scale + translation taking a bounding box into the viewport minus
/// [`FIT_MARGIN`], centred, with the y axis pointing down.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitTransform {
    pub scale: f64,
    mid: [f64; 2],
    center: [f64; 2],
}

impl FitTransform {
    pub fn new(points: impl IntoIterator<Item = [f64; 2]>, width: u32, height: u32) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        if !lo[0].is_finite() {
            lo = [0.0; 2];
            hi = [0.0; 2];
        }
        let (w, h) = (f64::from(width), f64::from(height));
        let avail = [w * (1.0 - 2.0 * FIT_MARGIN), h * (1.0 - 2.0 * FIT_MARGIN)];
        let span = [hi[0] - lo[0], hi[1] - lo[1]];
        let scale = match (span[0] > 0.0, span[1] > 0.0) {
            (true, true) => (avail[0] / span[0]).min(avail[1] / span[1]),
            (true, false) => avail[0] / span[0],
            (false, true) => avail[1] / span[1],
            (false, false) => 1.0,
        };
        Self { scale, mid: [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0], center: [w / 2.0, h / 2.0] }
    }

    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        [self.center[0] + (p[0] - self.mid[0]) * self.scale, self.center[1] - (p[1] - self.mid[1]) * self.scale]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{simplex_frame, CoefficientVector, TimeAxis};
    use crate::lns::load;
    use crate::scene::{build_prism_scene, PrismSample};

    #[test]
    fn identity_camera_drops_z() {
        let cam = Camera::orthographic(0.0, 0.0);
        assert_eq!(cam.rotate([1.5, -2.0, 7.0]), [1.5, -2.0, 7.0]);
    }

    #[test]
    fn top_slice_is_nearer_at_high_elevation() {
        // hand-computed: toward-viewer z of (x, y, z) at az 0, el 80 is -y·sin80 + z·cos80,
        // so raising z by 100 brings the slice 100·cos80 ≈ 17.36 closer
        let cam = Camera::orthographic(0.0, 80.0);
        let base = cam.rotate([0.0, 0.0, 0.0])[2];
        let top = cam.rotate([0.0, 0.0, 100.0])[2];
        assert!((top - base - 100.0 * 80f64.to_radians().cos()).abs() < 1e-12);

        let axis = TimeAxis::new(0.0, 1.0, 100.0).unwrap();
        let samples: Vec<_> = [0.0, 1.0]
            .into_iter()
            .map(|t| PrismSample {
                timestamp: t,
                coefficients: CoefficientVector::new(vec![1.0, 1.0, 1.0]).unwrap(),
                style: Style::solid(Color::BLACK, 1.0),
            })
            .collect();
        let scene = build_prism_scene(&samples, axis, simplex_frame(2, 100.0).unwrap()).unwrap();
        let plan = project(&scene, &cam, 200, 200).unwrap();
        let slices: Vec<(usize, &RenderPrimitive)> =
            plan.primitives.iter().enumerate().filter(|(_, p)| p.role == Role::Slice).collect();
        assert_eq!(slices.len(), 2);
        // the base slice (item 1) is drawn first and is deeper
        assert_eq!(slices[0].1.item, Some(1));
        assert_eq!(slices[1].1.item, Some(2));
        assert!(slices[0].1.depth > slices[1].1.depth);
        assert!(slices[0].0 < slices[1].0);
    }

    fn planar_scene() -> Scene {
        load(concat!(
            "addTriangle(\"#000\", 1.5, [1], 200);\n",
            "addIJK(\"#000\", 2, [4, 2], 200, [5, 3, 2], [\"#E01B1B\", \"#F7F307\", \"#07F70B\"]);\n",
            "addPoint(\"#E01B1B\", 6, \"Circle\", 200, [5, 3, 2]);\n",
            "addSamplePoint(\"#F7F307\", 3, \"Circle\", 200, [1, 4, 2]);\n",
            "addSamplePoint(\"#07F70B\", 3, \"Circle\", 200, [1, 1, 5]);\n",
        ))
        .unwrap()
    }

    #[test]
    fn planar_plan_structure() {
        let scene = planar_scene();
        let plan = project(&scene, &Camera::from_view(&scene.view), 400, 400).unwrap();
        assert_eq!(plan.count(Role::Wire), 3);
        assert_eq!(plan.count(Role::Fan), 3);
        assert_eq!(plan.count(Role::Marker), 3);
        assert_eq!(plan.count(Role::Label), 0);
        // planar scene: all depths zero, order equals generation order
        let items: Vec<_> = plan.primitives.iter().map(|p| p.item.unwrap()).collect();
        let mut sorted = items.clone();
        sorted.sort();
        assert_eq!(items, sorted);
    }

    #[test]
    fn fan_segments_are_perpendicular_and_sized() {
        let scene = planar_scene();
        let plan = project(&scene, &Camera::from_view(&scene.view), 400, 400).unwrap();
        let frame = &scene.frame;
        let scale = {
            let Shape::Segment { from, to, .. } = &plan.primitives[0].shape else { panic!() };
            ((to[0] - from[0]).powi(2) + (to[1] - from[1]).powi(2)).sqrt() / frame.edge()
        };
        let h =
            crate::geometry::coefficients_to_distances(&CoefficientVector::new(vec![5.0, 3.0, 2.0]).unwrap(), frame)
                .unwrap();
        for (p, hi) in plan.primitives.iter().filter(|p| p.role == Role::Fan).zip(h.values()) {
            let Shape::Segment { from, to, .. } = &p.shape else { panic!() };
            let len = ((to[0] - from[0]).powi(2) + (to[1] - from[1]).powi(2)).sqrt();
            assert!((len - hi * scale).abs() < 1e-9, "{len} vs {}", hi * scale);
        }
    }

    #[test]
    fn digits_follow_flag() {
        let mut scene = planar_scene();
        scene.show_digits = true;
        let plan = project(&scene, &Camera::from_view(&scene.view), 400, 400).unwrap();
        let labels: Vec<_> = plan
            .primitives
            .iter()
            .filter_map(|p| match &p.shape {
                Shape::Label { text, .. } => Some(text.as_str()),
                _ => None,
            })
            .collect();
        assert_eq!(labels, vec!["1", "2", "3"]);
    }

    #[test]
    fn rejects_small_viewport_and_empty_scene() {
        let scene = planar_scene();
        let cam = Camera::orthographic(0.0, 0.0);
        assert_eq!(
            project(&scene, &cam, 63, 100).unwrap_err(),
            RenderError::DegenerateViewport { width: 63, height: 100 }
        );
        let empty = Scene::new(simplex_frame(2, 1.0).unwrap());
        assert_eq!(project(&empty, &cam, 100, 100).unwrap_err(), RenderError::EmptyScene);
    }

    #[test]
    fn perspective_tetrahedron_is_finite_and_sorted() {
        let scene = load("setTransform(1); setViewPort(15, 80);\naddTetraedron(\"#000\", 3, [1], 200);\naddPoint(\"#E01B1B\", 6, \"Circle\", 200, [1,2,4,8]);").unwrap();
        let plan = project(&scene, &Camera::from_view(&scene.view), 300, 300).unwrap();
        assert_eq!(plan.count(Role::Wire), 6);
        assert!(plan.is_depth_sorted());
    }
}
