//! Script evaluation against a registry of builtins.

use std::collections::BTreeMap;
use std::fmt;

use super::lexer::Pos;
use super::parser::{Call, Expr, Script, Statement};
use super::LnsError;
use crate::geometry::{simplex_frame, CoefficientVector, GeometryError, TimeAxis};
use crate::render::color::{parse_color, Color};
use crate::scene::{
    Item, Marker, MarkerRole, MarkerShape, PerpendicularFan, Scene, SceneError, SideLabels, SliceTriangle, Style,
    Trajectory, TrajectoryKind, ViewSettings, Waypoint, WireSimplex, SLICE_OPACITY,
};
use crate::Coefficients;

/// Runtime value of an argument or variable.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Text(String),
    Color(String),
    Array(Vec<Value>),
}

impl Value {
    fn type_name(&self) -> &'static str {
        match self {
            Value::Number(_) => "number",
            Value::Text(_) => "string",
            Value::Color(_) => "color",
            Value::Array(_) => "array",
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(n) => write!(f, "{n}"),
            Value::Text(s) | Value::Color(s) => write!(f, "\"{s}\""),
            Value::Array(items) => {
                f.write_str("[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// Failure inside a builtin, before the evaluator attaches name and position.
#[derive(Debug, Clone, PartialEq)]
pub enum BuiltinError {
    Type { index: usize, expected: &'static str, found: String },
    Scene(SceneError),
    Conflict(String),
}

impl From<SceneError> for BuiltinError {
    fn from(e: SceneError) -> Self {
        BuiltinError::Scene(e)
    }
}

impl From<GeometryError> for BuiltinError {
    fn from(e: GeometryError) -> Self {
        BuiltinError::Scene(e.into())
    }
}

pub type BuiltinFn = fn(&mut SceneBuilder, &[Value]) -> Result<(), BuiltinError>;

#[derive(Clone, Copy)]
pub struct Builtin {
    pub min_args: usize,
    pub max_args: usize,
    pub run: BuiltinFn,
}

impl fmt::Debug for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Builtin").field("min_args", &self.min_args).field("max_args", &self.max_args).finish()
    }
}

/// Builtin name → argument count range and effect.
#[derive(Debug, Clone, Default)]
pub struct BuiltinRegistry {
    entries: BTreeMap<String, Builtin>,
}

impl BuiltinRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Every builtin this crate knows about.
    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.insert("setView", 1, 1, set_view);
        r.insert("setTransform", 1, 1, set_transform);
        r.insert("setViewPort", 2, 2, set_view_port);
        r.insert("showDigits", 1, 1, show_digits);
        r.insert("setSideLabels", 1, 1, set_side_labels);
        r.insert("setSaturationReference", 1, 1, set_saturation_reference);
        r.insert("addTriangle", 4, 4, add_triangle);
        r.insert("addTetraedron", 4, 4, add_tetrahedron);
        r.insert("addPrism", 7, 7, add_prism);
        r.insert("addSlice", 5, 6, add_slice);
        r.insert("addPoint", 5, 6, add_point);
        r.insert("addSamplePoint", 5, 6, add_sample_point);
        r.insert("addIJK", 6, 7, add_ijk);
        r.insert("addPath", 5, 7, add_path);
        r
    }

    pub fn insert(&mut self, name: &str, min_args: usize, max_args: usize, run: BuiltinFn) {
        self.entries.insert(name.to_string(), Builtin { min_args, max_args, run });
    }

    pub fn remove(&mut self, name: &str) -> Option<Builtin> {
        self.entries.remove(name)
    }

    /// Copy of the registry without `name`.
    pub fn without(mut self, name: &str) -> Self {
        self.remove(name);
        self
    }

    pub fn get(&self, name: &str) -> Option<&Builtin> {
        self.entries.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

/// Mutable evaluation target. The simplex frame is fixed by the first object added.
#[derive(Debug, Clone, Default)]
pub struct SceneBuilder {
    scene: Option<Scene>,
    view: ViewSettings,
    show_digits: bool,
    saturation_reference: Option<f64>,
}

impl SceneBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn finish(self) -> Option<Scene> {
        let mut scene = self.scene?;
        scene.view = self.view;
        scene.show_digits = self.show_digits;
        scene.saturation_reference = self.saturation_reference;
        Some(scene)
    }

    /// Adds `item` to the scene over an `n`-simplex of edge `size`, creating
    /// the scene on first use. Leaves the builder unchanged on error.
    fn add(&mut self, n: usize, size: f64, item: Item) -> Result<(), BuiltinError> {
        match &mut self.scene {
            Some(scene) => {
                if scene.frame.n() != n {
                    return Err(BuiltinError::Conflict(format!(
                        "{n}-simplex object in a {}-simplex scene",
                        scene.frame.n()
                    )));
                }
                if (scene.frame.edge() - size).abs() > 1e-9 * size.abs().max(scene.frame.edge()) {
                    return Err(BuiltinError::Conflict(format!(
                        "size {size} differs from the declared simplex size {}",
                        scene.frame.edge()
                    )));
                }
                scene.push(item)?;
            }
            None => {
                let mut scene = Scene::new(simplex_frame(n, size)?);
                scene.push(item)?;
                self.scene = Some(scene);
            }
        }
        Ok(())
    }

    fn scene_mut(&mut self) -> Result<&mut Scene, BuiltinError> {
        self.scene.as_mut().ok_or_else(|| BuiltinError::Conflict("no simplex declared yet".into()))
    }
}

fn type_err(index: usize, expected: &'static str, v: &Value) -> BuiltinError {
    BuiltinError::Type { index, expected, found: v.type_name().to_string() }
}

fn num(args: &[Value], i: usize) -> Result<f64, BuiltinError> {
    match &args[i] {
        Value::Number(n) => Ok(*n),
        other => Err(type_err(i, "number", other)),
    }
}

fn int(args: &[Value], i: usize) -> Result<i64, BuiltinError> {
    let n = num(args, i)?;
    if n.fract() != 0.0 || !n.is_finite() {
        return Err(BuiltinError::Type { index: i, expected: "integer", found: n.to_string() });
    }
    Ok(n as i64)
}

fn text(args: &[Value], i: usize) -> Result<&str, BuiltinError> {
    match &args[i] {
        Value::Text(s) => Ok(s),
        other => Err(type_err(i, "string", other)),
    }
}

fn color_of(v: &Value, i: usize) -> Result<Color, BuiltinError> {
    match v {
        Value::Color(s) => Ok(parse_color(s).map_err(SceneError::from)?),
        other => Err(type_err(i, "color", other)),
    }
}

fn numbers(v: &Value, i: usize, expected: &'static str) -> Result<Vec<f64>, BuiltinError> {
    match v {
        Value::Array(items) => items
            .iter()
            .map(|x| match x {
                Value::Number(n) => Ok(*n),
                other => Err(type_err(i, expected, other)),
            })
            .collect(),
        other => Err(type_err(i, expected, other)),
    }
}

fn coefficients(v: &Value, i: usize) -> Result<Coefficients, BuiltinError> {
    Ok(CoefficientVector::new(numbers(v, i, "array of numbers")?)?)
}

fn style(args: &[Value]) -> Result<Style, BuiltinError> {
    let color = color_of(&args[0], 0)?;
    Ok(Style::new(color, num(args, 1)?, numbers(&args[2], 2, "dash pattern")?)?)
}

fn optional_time(args: &[Value], i: usize) -> Result<Option<f64>, BuiltinError> {
    (i < args.len()).then(|| num(args, i)).transpose()
}

fn set_view(b: &mut SceneBuilder, args: &[Value]) -> Result<(), BuiltinError> {
    b.view.view_preset = int(args, 0)?;
    Ok(())
}

fn set_transform(b: &mut SceneBuilder, args: &[Value]) -> Result<(), BuiltinError> {
    b.view.transform_mode = match int(args, 0)? {
        0 => 0,
        // 2 is accepted as a perspective alias
        1 | 2 => 1,
        other => {
            return Err(BuiltinError::Type { index: 0, expected: "transform code 0, 1 or 2", found: other.to_string() })
        }
    };
    Ok(())
}

fn set_view_port(b: &mut SceneBuilder, args: &[Value]) -> Result<(), BuiltinError> {
    let (az, el) = (num(args, 0)?, num(args, 1)?);
    b.view.azimuth_deg = az;
    b.view.elevation_deg = el;
    Ok(())
}

fn show_digits(b: &mut SceneBuilder, args: &[Value]) -> Result<(), BuiltinError> {
    b.show_digits = match int(args, 0)? {
        0 => false,
        1 => true,
        other => return Err(BuiltinError::Type { index: 0, expected: "0 or 1", found: other.to_string() }),
    };
    Ok(())
}

fn set_saturation_reference(b: &mut SceneBuilder, args: &[Value]) -> Result<(), BuiltinError> {
    let r = num(args, 0)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(GeometryError::NonPositiveReference(r).into());
    }
    b.saturation_reference = Some(r);
    Ok(())
}

fn set_side_labels(b: &mut SceneBuilder, args: &[Value]) -> Result<(), BuiltinError> {
    let labels = match &args[0] {
        Value::Array(items) => items
            .iter()
            .map(|v| match v {
                Value::Text(s) | Value::Color(s) => Ok(s.clone()),
                Value::Number(n) => Ok(n.to_string()),
                other => Err(type_err(0, "array of labels", other)),
            })
            .collect::<Result<Vec<_>, _>>()?,
        other => return Err(type_err(0, "array of labels", other)),
    };
    b.scene_mut()?.push(Item::SideLabels(SideLabels { labels }))?;
    Ok(())
}

fn add_triangle(b: &mut SceneBuilder, args: &[Value]) -> Result<(), BuiltinError> {
    let style = style(args)?;
    b.add(2, num(args, 3)?, Item::WireSimplex(WireSimplex { style }))
}

fn add_tetrahedron(b: &mut SceneBuilder, args: &[Value]) -> Result<(), BuiltinError> {
    let style = style(args)?;
    b.add(3, num(args, 3)?, Item::WireSimplex(WireSimplex { style }))
}

fn add_prism(b: &mut SceneBuilder, args: &[Value]) -> Result<(), BuiltinError> {
    if b.scene.is_some() {
        return Err(BuiltinError::Conflict("addPrism must come before any other object".into()));
    }
    let style = style(args)?;
    let size = num(args, 3)?;
    let axis = TimeAxis::new(num(args, 5)?, num(args, 6)?, num(args, 4)?)?;
    let mut scene = Scene::with_prism(simplex_frame(2, size)?, axis)?;
    scene.push(Item::WireSimplex(WireSimplex { style }))?;
    b.scene = Some(scene);
    Ok(())
}

fn add_slice(b: &mut SceneBuilder, args: &[Value]) -> Result<(), BuiltinError> {
    let style = style(args)?;
    let opacity = if args.len() > 5 { num(args, 5)? } else { SLICE_OPACITY };
    let item = Item::SliceTriangle(SliceTriangle { timestamp: num(args, 4)?, style, opacity });
    b.add(2, num(args, 3)?, item)
}

fn marker(b: &mut SceneBuilder, args: &[Value], role: MarkerRole) -> Result<(), BuiltinError> {
    let color = color_of(&args[0], 0)?;
    let radius = num(args, 1)?;
    let shape_name = text(args, 2)?;
    let shape = MarkerShape::parse(shape_name).ok_or_else(|| BuiltinError::Type {
        index: 2,
        expected: "marker shape \"Circle\"",
        found: format!("\"{shape_name}\""),
    })?;
    let size = num(args, 3)?;
    let coefficients = coefficients(&args[4], 4)?;
    let timestamp = optional_time(args, 5)?;
    let n = coefficients.arity() - 1;
    let item = Item::Marker(Marker {
        coefficients,
        radius,
        shape,
        style: Style::solid(color, 1.0),
        role,
        timestamp,
        saturation_sum: None,
    });
    b.add(n, size, item)
}

fn add_point(b: &mut SceneBuilder, args: &[Value]) -> Result<(), BuiltinError> {
    marker(b, args, MarkerRole::ObjectUnderStudy)
}

fn add_sample_point(b: &mut SceneBuilder, args: &[Value]) -> Result<(), BuiltinError> {
    marker(b, args, MarkerRole::LearningSample)
}

fn add_ijk(b: &mut SceneBuilder, args: &[Value]) -> Result<(), BuiltinError> {
    let style = style(args)?;
    let size = num(args, 3)?;
    let coefficients = coefficients(&args[4], 4)?;
    let side_colors = match &args[5] {
        Value::Array(items) => items.iter().map(|v| color_of(v, 5)).collect::<Result<Vec<_>, _>>()?,
        other => return Err(type_err(5, "array of colors", other)),
    };
    let timestamp = optional_time(args, 6)?;
    let n = coefficients.arity() - 1;
    b.add(n, size, Item::PerpendicularFan(PerpendicularFan { coefficients, side_colors, style, timestamp }))
}

fn add_path(b: &mut SceneBuilder, args: &[Value]) -> Result<(), BuiltinError> {
    let style = style(args)?;
    let size = num(args, 3)?;
    let points = match &args[4] {
        Value::Array(items) => items.iter().map(|v| coefficients(v, 4)).collect::<Result<Vec<_>, _>>()?,
        other => return Err(type_err(4, "array of coefficient arrays", other)),
    };
    let times = if args.len() > 5 { numbers(&args[5], 5, "array of timestamps")? } else { Vec::new() };
    if !times.is_empty() && times.len() != points.len() {
        return Err(BuiltinError::Conflict(format!("{} timestamps for {} waypoints", times.len(), points.len())));
    }
    let kind = if args.len() > 6 {
        let name = text(args, 6)?;
        TrajectoryKind::parse(name).ok_or_else(|| BuiltinError::Type {
            index: 6,
            expected: "Observed, Predicted or Candidate",
            found: format!("\"{name}\""),
        })?
    } else {
        TrajectoryKind::Observed
    };
    let n = points.first().map_or(2, |p| p.arity() - 1);
    let waypoints = points
        .into_iter()
        .enumerate()
        .map(|(i, coefficients)| Waypoint { coefficients, timestamp: times.get(i).copied() })
        .collect();
    b.add(n, size, Item::Trajectory(Trajectory { waypoints, style, kind }))
}

type Env = BTreeMap<String, Value>;

fn resolve(expr: &Expr, env: &Env, local: &[(String, Value)], pos: Pos) -> Result<Value, LnsError> {
    let lookup = |name: &str| {
        local
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
            .or_else(|| env.get(name))
            .cloned()
            .ok_or_else(|| LnsError::UnboundVariable { name: name.to_string(), pos })
    };
    Ok(match expr {
        Expr::Number(n) => Value::Number(*n),
        Expr::Text(s) => Value::Text(s.clone()),
        Expr::Color(s) => Value::Color(s.clone()),
        Expr::Array(items) => {
            Value::Array(items.iter().map(|e| resolve(e, env, local, pos)).collect::<Result<_, _>>()?)
        }
        Expr::VarRef(name) => lookup(name)?,
        Expr::IndexedRef(name, index) => match lookup(name)? {
            Value::Array(items) => items.get(*index).cloned().ok_or(LnsError::IndexOutOfRange {
                name: name.clone(),
                index: *index,
                len: items.len(),
                pos,
            })?,
            other => {
                return Err(LnsError::Type {
                    builtin: format!("{name}[{index}]"),
                    index: 0,
                    expected: "array",
                    found: other.type_name().to_string(),
                    pos,
                })
            }
        },
    })
}

fn run_call(call: &Call, env: &Env, registry: &BuiltinRegistry, builder: &mut SceneBuilder) -> Result<(), LnsError> {
    let builtin =
        registry.get(&call.name).ok_or_else(|| LnsError::UnknownBuiltin { name: call.name.clone(), pos: call.pos })?;
    let args = call.args.iter().map(|e| resolve(e, env, &[], call.pos)).collect::<Result<Vec<_>, _>>()?;
    if args.len() < builtin.min_args || args.len() > builtin.max_args {
        let expected = if builtin.min_args == builtin.max_args {
            builtin.min_args.to_string()
        } else {
            format!("{}..={}", builtin.min_args, builtin.max_args)
        };
        return Err(LnsError::Arity { builtin: call.name.clone(), expected, found: args.len(), pos: call.pos });
    }
    (builtin.run)(builder, &args).map_err(|e| match e {
        BuiltinError::Type { index, expected, found } => {
            LnsError::Type { builtin: call.name.clone(), index, expected, found, pos: call.pos }
        }
        BuiltinError::Scene(source) => LnsError::Scene { builtin: call.name.clone(), source, pos: call.pos },
        BuiltinError::Conflict(message) => LnsError::Conflict { builtin: call.name.clone(), message, pos: call.pos },
    })
}

/// Runs `script` statement by statement and returns the resulting scene.
///
/// Any failure of a call wrapped in `try { } catch (e) { }` turns that
/// statement into a no-op; failures elsewhere abort evaluation.
pub fn evaluate(script: &Script, registry: &BuiltinRegistry) -> Result<Scene, LnsError> {
    let mut env = Env::new();
    let mut builder = SceneBuilder::new();
    for stmt in &script.statements {
        match stmt {
            Statement::VarDecl(bindings) => {
                let mut local: Vec<(String, Value)> = Vec::with_capacity(bindings.len());
                for b in bindings {
                    let v = resolve(&b.value, &env, &local, b.pos)?;
                    local.push((b.name.clone(), v));
                }
                env.extend(local);
            }
            Statement::Call(call) => run_call(call, &env, registry, &mut builder)?,
            Statement::TryCatch { call, .. } => {
                // builtins leave the builder untouched when they fail
                let _ = run_call(call, &env, registry, &mut builder);
            }
        }
    }
    builder.finish().ok_or(LnsError::NoSimplex)
}
