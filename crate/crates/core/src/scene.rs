//! Typed scene model: wireframes, markers, perpendicular fans, trajectories,
//! prism slices and side labels, plus the two-prism split for four-stage series.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::GeometryError;
use crate::render::color::{parse_color, Color, ColorError};
use crate::{Axis, Coefficients, Frame};

/// Default radius of an object-under-study marker, px.
pub const STUDY_RADIUS: f64 = 6.0;
/// Default radius of a learning-sample marker, px.
pub const SAMPLE_RADIUS: f64 = 3.0;
/// Default fill opacity of prism slices.
pub const SLICE_OPACITY: f64 = 0.15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SceneError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Color(#[from] ColorError),
    #[error("invalid style: {0}")]
    Style(String),
    #[error("{}", join_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("no samples")]
    NoSamples,
    #[error("prism scenes need a 2-simplex frame")]
    PrismNeedsTriangle,
    #[error("stage rises at sample index {0}; a recovering series must have non-increasing stages")]
    NotRecovering(usize),
}

fn join_diagnostics(d: &[Diagnostic]) -> String {
    d.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Style {
    pub color: Color,
    pub stroke_width: f64,
    /// Dash lengths in px; empty or `[1]` draws a solid line.
    pub dash: Vec<f64>,
}

impl Style {
    pub fn new(color: Color, stroke_width: f64, dash: Vec<f64>) -> Result<Self, SceneError> {
        let style = Self { color, stroke_width, dash };
        match style.problem() {
            Some(msg) => Err(SceneError::Style(msg)),
            None => Ok(style),
        }
    }

    pub fn parse(color: &str, stroke_width: f64, dash: Vec<f64>) -> Result<Self, SceneError> {
        Self::new(parse_color(color)?, stroke_width, dash)
    }

    pub fn solid(color: Color, stroke_width: f64) -> Self {
        Self { color, stroke_width, dash: Vec::new() }
    }

    pub fn is_solid(&self) -> bool {
        self.dash.is_empty() || self.dash == [1.0]
    }

    fn problem(&self) -> Option<String> {
        if !(self.stroke_width.is_finite() && self.stroke_width > 0.0) {
            return Some(format!("stroke width must be positive, got {}", self.stroke_width));
        }
        if let Some(d) = self.dash.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
            return Some(format!("dash entries must be positive, got {d}"));
        }
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MarkerShape {
    Circle,
}

impl MarkerShape {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "Circle" => Some(MarkerShape::Circle),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MarkerShape::Circle => "Circle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MarkerRole {
    ObjectUnderStudy,
    LearningSample,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Marker {
    pub coefficients: Coefficients,
    pub radius: f64,
    pub shape: MarkerShape,
    pub style: Style,
    pub role: MarkerRole,
    pub timestamp: Option<f64>,
    /// Overrides Σa when computing the fill saturation.
    pub saturation_sum: Option<f64>,
}

impl Marker {
    pub fn study(coefficients: Coefficients, color: Color) -> Self {
        Self {
            coefficients,
            radius: STUDY_RADIUS,
            shape: MarkerShape::Circle,
            style: Style::solid(color, 1.0),
            role: MarkerRole::ObjectUnderStudy,
            timestamp: None,
            saturation_sum: None,
        }
    }

    pub fn sample(coefficients: Coefficients, color: Color) -> Self {
        Self { radius: SAMPLE_RADIUS, role: MarkerRole::LearningSample, ..Self::study(coefficients, color) }
    }

    pub fn saturation_sum(&self) -> f64 {
        self.saturation_sum.unwrap_or_else(|| self.coefficients.sum())
    }
}

/// Coloured perpendiculars from a placed point to every face.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerpendicularFan {
    pub coefficients: Coefficients,
    pub side_colors: Vec<Color>,
    pub style: Style,
    pub timestamp: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TrajectoryKind {
    Observed,
    Predicted,
    CandidateStrategy,
}

impl TrajectoryKind {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "Observed" => Some(Self::Observed),
            "Predicted" => Some(Self::Predicted),
            "Candidate" | "CandidateStrategy" => Some(Self::CandidateStrategy),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Observed => "Observed",
            Self::Predicted => "Predicted",
            Self::CandidateStrategy => "Candidate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Waypoint {
    pub coefficients: Coefficients,
    pub timestamp: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub waypoints: Vec<Waypoint>,
    pub style: Style,
    pub kind: TrajectoryKind,
}

/// Cross-section of a prism at one examination time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceTriangle {
    pub timestamp: f64,
    pub style: Style,
    pub opacity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WireSimplex {
    pub style: Style,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SideLabels {
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Item {
    WireSimplex(WireSimplex),
    SliceTriangle(SliceTriangle),
    Marker(Marker),
    PerpendicularFan(PerpendicularFan),
    Trajectory(Trajectory),
    SideLabels(SideLabels),
}

impl Item {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Item::WireSimplex(_) => "wire simplex",
            Item::SliceTriangle(_) => "slice",
            Item::Marker(_) => "marker",
            Item::PerpendicularFan(_) => "perpendicular fan",
            Item::Trajectory(_) => "trajectory",
            Item::SideLabels(_) => "side labels",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViewSettings {
    pub view_preset: i64,
    /// 0 orthographic, 1 perspective.
    pub transform_mode: i64,
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
}

impl Default for ViewSettings {
    fn default() -> Self {
        Self { view_preset: 0, transform_mode: 0, azimuth_deg: 30.0, elevation_deg: 20.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scene {
    pub frame: Frame,
    pub prism: Option<Axis>,
    pub items: Vec<Item>,
    pub view: ViewSettings,
    pub show_digits: bool,
    /// Σa that maps to full saturation; defaults to the largest marker sum.
    pub saturation_reference: Option<f64>,
}

impl Scene {
    pub fn new(frame: Frame) -> Self {
        Self {
            frame,
            prism: None,
            items: Vec::new(),
            view: ViewSettings::default(),
            show_digits: false,
            saturation_reference: None,
        }
    }

    pub fn with_prism(frame: Frame, axis: Axis) -> Result<Self, SceneError> {
        if frame.n() != 2 {
            return Err(SceneError::PrismNeedsTriangle);
        }
        Ok(Self { prism: Some(axis), ..Self::new(frame) })
    }

    /// Appends `item` if it satisfies every scene invariant; otherwise leaves the scene untouched.
    pub fn push(&mut self, item: Item) -> Result<(), SceneError> {
        let diags = check_item(self, &self.items, self.items.len(), &item);
        if !diags.is_empty() {
            return Err(SceneError::Invalid(diags));
        }
        self.items.push(item);
        Ok(())
    }

    pub fn markers(&self) -> impl Iterator<Item = &Marker> {
        self.items.iter().filter_map(|i| match i {
            Item::Marker(m) => Some(m),
            _ => None,
        })
    }

    /// Reference sum for saturation: explicit override, else the largest marker Σa.
    pub fn effective_saturation_reference(&self) -> f64 {
        self.saturation_reference.unwrap_or_else(|| self.markers().map(Marker::saturation_sum).fold(0.0, f64::max))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rule {
    Arity,
    Ordering,
    Timestamp,
    PrismOnly,
    Style,
    MarkerRadius,
    WaypointCount,
    SideColors,
    LabelCount,
    Opacity,
    Saturation,
    View,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    /// Offending item index; `None` for scene-level problems.
    pub item: Option<usize>,
    pub rule: Rule,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.item {
            Some(i) => write!(f, "item {i}: {:?}: {}", self.rule, self.message),
            None => write!(f, "scene: {:?}: {}", self.rule, self.message),
        }
    }
}

/// Checks every scene invariant. Empty result means the scene is well formed.
pub fn validate_scene(scene: &Scene) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if !matches!(scene.view.transform_mode, 0 | 1) {
        out.push(Diagnostic {
            item: None,
            rule: Rule::View,
            message: format!("transform mode {} is not 0 or 1", scene.view.transform_mode),
        });
    }
    if scene.prism.is_some() && scene.frame.n() != 2 {
        out.push(Diagnostic { item: None, rule: Rule::PrismOnly, message: "prism over a 3-simplex".into() });
    }
    if let Some(r) = scene.saturation_reference {
        if !(r > 0.0) {
            out.push(Diagnostic {
                item: None,
                rule: Rule::Saturation,
                message: format!("saturation reference must be positive, got {r}"),
            });
        }
    }
    for (idx, item) in scene.items.iter().enumerate() {
        out.extend(check_item(scene, &scene.items[..idx], idx, item));
    }
    out
}

/// Rules for one item, given the items inserted before it.
fn check_item(scene: &Scene, earlier: &[Item], idx: usize, item: &Item) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut diag = |rule: Rule, message: String| out.push(Diagnostic { item: Some(idx), rule, message });
    let arity = scene.frame.arity();
    let check_arity = |diag: &mut dyn FnMut(Rule, String), found: usize| {
        if found != arity {
            diag(Rule::Arity, format!("{found} coefficients in a {}-simplex scene", arity - 1));
        }
    };
    let check_style = |diag: &mut dyn FnMut(Rule, String), style: &Style| {
        if let Some(msg) = style.problem() {
            diag(Rule::Style, msg);
        }
    };
    let check_time = |diag: &mut dyn FnMut(Rule, String), t: Option<f64>| match (t, &scene.prism) {
        (Some(t), None) => diag(Rule::PrismOnly, format!("timestamp {t} in a scene without a prism")),
        (Some(t), Some(axis)) if !axis.contains(t) => {
            diag(Rule::Timestamp, format!("timestamp {t} outside [{}, {}]", axis.t_min(), axis.t_max()))
        }
        _ => {}
    };

    match item {
        Item::WireSimplex(w) => check_style(&mut diag, &w.style),
        Item::SliceTriangle(s) => {
            check_style(&mut diag, &s.style);
            check_time(&mut diag, Some(s.timestamp));
            if !(0.0..=1.0).contains(&s.opacity) {
                diag(Rule::Opacity, format!("opacity {} outside [0, 1]", s.opacity));
            }
        }
        Item::Marker(m) => {
            check_arity(&mut diag, m.coefficients.arity());
            check_style(&mut diag, &m.style);
            check_time(&mut diag, m.timestamp);
            if !(m.radius.is_finite() && m.radius > 0.0) {
                diag(Rule::MarkerRadius, format!("radius must be positive, got {}", m.radius));
            }
            if let Some(s) = m.saturation_sum {
                if !(s >= 0.0) {
                    diag(Rule::Saturation, format!("saturation sum must be non-negative, got {s}"));
                }
            }
            let clash = earlier.iter().find_map(|other| match other {
                Item::Marker(o) if o.role != m.role => {
                    let (study, sample) = match m.role {
                        MarkerRole::ObjectUnderStudy => (m.radius, o.radius),
                        MarkerRole::LearningSample => (o.radius, m.radius),
                    };
                    (study <= sample).then_some((study, sample))
                }
                _ => None,
            });
            if let Some((study, sample)) = clash {
                diag(
                    Rule::MarkerRadius,
                    format!("study-object radius {study} must exceed learning-sample radius {sample}"),
                );
            }
        }
        Item::PerpendicularFan(f) => {
            check_arity(&mut diag, f.coefficients.arity());
            check_style(&mut diag, &f.style);
            check_time(&mut diag, f.timestamp);
            if f.side_colors.len() != arity {
                diag(Rule::SideColors, format!("{} side colors for {arity} faces", f.side_colors.len()));
            }
        }
        Item::Trajectory(t) => {
            check_style(&mut diag, &t.style);
            if t.waypoints.len() < 2 {
                diag(Rule::WaypointCount, format!("{} waypoint(s); a path needs at least 2", t.waypoints.len()));
            }
            if let Some(w) = t.waypoints.iter().find(|w| w.coefficients.arity() != arity) {
                check_arity(&mut diag, w.coefficients.arity());
            }
            if scene.prism.is_some() {
                if t.waypoints.iter().any(|w| w.timestamp.is_none()) {
                    diag(Rule::Timestamp, "waypoint without timestamp in a prism scene".into());
                }
                if let Some(w) =
                    t.waypoints.iter().find(|w| w.timestamp.is_some_and(|ts| !scene.prism.unwrap().contains(ts)))
                {
                    check_time(&mut diag, w.timestamp);
                }
                let times: Vec<f64> = t.waypoints.iter().filter_map(|w| w.timestamp).collect();
                if let Some(k) = times.windows(2).position(|p| p[1] < p[0]) {
                    diag(Rule::Ordering, format!("timestamps decrease after waypoint {k}"));
                }
            } else if t.waypoints.iter().any(|w| w.timestamp.is_some()) {
                diag(Rule::PrismOnly, "timestamped waypoints in a scene without a prism".into());
            }
        }
        Item::SideLabels(l) => {
            if l.labels.len() != arity {
                diag(Rule::LabelCount, format!("{} labels for {arity} sides", l.labels.len()));
            }
        }
    }
    out
}

pub fn default_wire_style() -> Style {
    Style::solid(Color::BLACK, 1.5)
}

pub fn default_slice_style() -> Style {
    Style::solid(Color::from_rgb8(0x80, 0x80, 0x80), 1.0)
}

pub fn default_path_style() -> Style {
    Style::solid(Color::BLACK, 2.0)
}

/// One examination in a prism series.
#[derive(Debug, Clone, PartialEq)]
pub struct PrismSample {
    pub timestamp: f64,
    pub coefficients: Coefficients,
    pub style: Style,
}

/// Lays a time series out in a 2-simplex prism.
///
/// Item order: the prism wireframe, one slice per distinct timestamp (ascending),
/// one study marker per sample in time order, then the observed trajectory when
/// there are at least two samples.
pub fn build_prism_scene(samples: &[PrismSample], axis: Axis, frame: Frame) -> Result<Scene, SceneError> {
    if samples.is_empty() {
        return Err(SceneError::NoSamples);
    }
    let mut scene = Scene::with_prism(frame, axis)?;
    let mut ordered: Vec<&PrismSample> = samples.iter().collect();
    ordered.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
    if let Some(bad) = ordered.iter().find(|s| !axis.contains(s.timestamp)) {
        return Err(
            GeometryError::TimestampOutOfRange { t: bad.timestamp, t_min: axis.t_min(), t_max: axis.t_max() }.into()
        );
    }

    scene.push(Item::WireSimplex(WireSimplex { style: default_wire_style() }))?;
    let mut times: Vec<f64> = ordered.iter().map(|s| s.timestamp).collect();
    times.dedup();
    for t in times {
        scene.push(Item::SliceTriangle(SliceTriangle {
            timestamp: t,
            style: default_slice_style(),
            opacity: SLICE_OPACITY,
        }))?;
    }
    for s in &ordered {
        scene.push(Item::Marker(Marker {
            style: s.style.clone(),
            timestamp: Some(s.timestamp),
            ..Marker::study(s.coefficients.clone(), s.style.color)
        }))?;
    }
    if ordered.len() >= 2 {
        scene.push(Item::Trajectory(Trajectory {
            waypoints: ordered
                .iter()
                .map(|s| Waypoint { coefficients: s.coefficients.clone(), timestamp: Some(s.timestamp) })
                .collect(),
            style: default_path_style(),
            kind: TrajectoryKind::Observed,
        }))?;
    }
    Ok(scene)
}

/// Organization-stress stage; coefficient `k` of a four-pattern vector belongs to stage `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Stage {
    Absence = 0,
    Alarm = 1,
    Resistance = 2,
    Exhaustion = 3,
}

impl Stage {
    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            0 => Some(Stage::Absence),
            1 => Some(Stage::Alarm),
            2 => Some(Stage::Resistance),
            3 => Some(Stage::Exhaustion),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Argmax of a four-pattern vector; ties go to the more severe stage.
    pub fn dominant(a: &Coefficients) -> Option<Self> {
        (a.arity() == 4).then(|| a.dominant()).and_then(Self::from_index)
    }
}

/// Sample indices shown in each of the two prisms.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Partition {
    /// Prism over stages 3, 2, 1.
    pub first: Vec<usize>,
    /// Prism over stages 2, 1, 0.
    pub second: Vec<usize>,
}

impl Partition {
    /// Stages drawn on the sides of the first prism.
    pub const FIRST_STAGES: [Stage; 3] = [Stage::Alarm, Stage::Resistance, Stage::Exhaustion];
    /// Stages drawn on the sides of the second prism.
    pub const SECOND_STAGES: [Stage; 3] = [Stage::Absence, Stage::Alarm, Stage::Resistance];
}

/// Splits a recovering four-stage series over two 2-simplex prisms.
///
/// The first prism takes the longest prefix with stages in {3, 2, 1}, the second
/// the longest suffix with stages in {2, 1, 0}. Samples at the transition land in
/// both. When one prism already holds the whole series the other stays empty,
/// with the first prism preferred.
pub fn partition_four_pattern_series(stages: &[(f64, Stage)]) -> Result<Partition, SceneError> {
    if stages.is_empty() {
        return Err(SceneError::NoSamples);
    }
    if let Some(k) = stages.windows(2).position(|w| w[1].1 > w[0].1) {
        return Err(SceneError::NotRecovering(k + 1));
    }
    let n = stages.len();
    let prefix = stages.iter().take_while(|(_, s)| *s != Stage::Absence).count();
    let suffix = stages.iter().rev().take_while(|(_, s)| *s != Stage::Exhaustion).count();
    if prefix == n {
        return Ok(Partition { first: (0..n).collect(), second: Vec::new() });
    }
    if suffix == n {
        return Ok(Partition { first: Vec::new(), second: (0..n).collect() });
    }
    Ok(Partition { first: (0..prefix).collect(), second: (n - suffix..n).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{simplex_frame, CoefficientVector, TimeAxis};

    fn a(v: &[f64]) -> Coefficients {
        CoefficientVector::new(v.to_vec()).unwrap()
    }

    fn tri() -> Frame {
        simplex_frame(2, 200.0).unwrap()
    }

    fn sample(t: f64) -> PrismSample {
        PrismSample { timestamp: t, coefficients: a(&[1.0, 2.0, 3.0]), style: Style::solid(Color::BLACK, 1.0) }
    }

    fn count(scene: &Scene, f: fn(&Item) -> bool) -> usize {
        scene.items.iter().filter(|i| f(i)).count()
    }

    #[test]
    fn single_sample_prism() {
        let axis = TimeAxis::new(0.0, 10.0, 100.0).unwrap();
        let scene = build_prism_scene(&[sample(0.0)], axis, tri()).unwrap();
        assert_eq!(count(&scene, |i| matches!(i, Item::SliceTriangle(_))), 1);
        assert_eq!(count(&scene, |i| matches!(i, Item::Marker(_))), 1);
        assert_eq!(count(&scene, |i| matches!(i, Item::Trajectory(_))), 0);
    }

    #[test]
    fn four_sample_prism() {
        let axis = TimeAxis::new(1.0, 4.0, 100.0).unwrap();
        let samples: Vec<_> = [4.0, 2.0, 1.0, 3.0].into_iter().map(sample).collect();
        let scene = build_prism_scene(&samples, axis, tri()).unwrap();
        assert_eq!(count(&scene, |i| matches!(i, Item::SliceTriangle(_))), 4);
        assert_eq!(count(&scene, |i| matches!(i, Item::Marker(_))), 4);
        let path = scene.items.iter().find_map(|i| match i {
            Item::Trajectory(t) => Some(t),
            _ => None,
        });
        let times: Vec<_> = path.unwrap().waypoints.iter().map(|w| w.timestamp.unwrap()).collect();
        assert_eq!(times, vec![1.0, 2.0, 3.0, 4.0]);
        assert!(validate_scene(&scene).is_empty());
    }

    #[test]
    fn shared_timestamp_gives_one_slice() {
        let axis = TimeAxis::new(0.0, 10.0, 100.0).unwrap();
        let scene = build_prism_scene(&[sample(5.0), sample(5.0)], axis, tri()).unwrap();
        assert_eq!(count(&scene, |i| matches!(i, Item::SliceTriangle(_))), 1);
        let ts: Vec<_> = scene.markers().map(|m| m.timestamp).collect();
        assert_eq!(ts, vec![Some(5.0), Some(5.0)]);
    }

    #[test]
    fn prism_scene_errors() {
        let axis = TimeAxis::new(0.0, 10.0, 100.0).unwrap();
        assert_eq!(build_prism_scene(&[], axis, tri()).unwrap_err(), SceneError::NoSamples);
        assert!(matches!(
            build_prism_scene(&[sample(11.0)], axis, tri()),
            Err(SceneError::Geometry(GeometryError::TimestampOutOfRange { .. }))
        ));
        let tet = simplex_frame(3, 1.0).unwrap();
        assert_eq!(build_prism_scene(&[sample(1.0)], axis, tet).unwrap_err(), SceneError::PrismNeedsTriangle);
    }

    #[test]
    fn partition_examples() {
        let series = |s: &[usize]| -> Vec<(f64, Stage)> {
            s.iter().enumerate().map(|(i, &k)| (i as f64, Stage::from_index(k).unwrap())).collect()
        };
        let p = partition_four_pattern_series(&series(&[3, 3, 2, 1, 0])).unwrap();
        assert_eq!(p.first, vec![0, 1, 2, 3]);
        assert_eq!(p.second, vec![2, 3, 4]);
        let p = partition_four_pattern_series(&series(&[3, 2, 1])).unwrap();
        assert_eq!(p, Partition { first: vec![0, 1, 2], second: vec![] });
        let p = partition_four_pattern_series(&series(&[1, 0])).unwrap();
        assert_eq!(p, Partition { first: vec![], second: vec![0, 1] });
        let p = partition_four_pattern_series(&series(&[3, 0])).unwrap();
        assert_eq!(p, Partition { first: vec![0], second: vec![1] });
        assert_eq!(partition_four_pattern_series(&[]).unwrap_err(), SceneError::NoSamples);
        assert_eq!(partition_four_pattern_series(&series(&[1, 2])).unwrap_err(), SceneError::NotRecovering(1));
    }

    #[test]
    fn dominant_stage_tie_goes_to_severe() {
        assert_eq!(Stage::dominant(&a(&[0.1, 0.5, 0.5, 0.2])), Some(Stage::Resistance));
        assert_eq!(Stage::dominant(&a(&[1.0, 0.0, 0.0, 0.0])), Some(Stage::Absence));
        assert_eq!(Stage::dominant(&a(&[1.0, 0.0, 0.0])), None);
    }

    fn planar_scene() -> Scene {
        let mut s = Scene::new(tri());
        s.push(Item::WireSimplex(WireSimplex { style: default_wire_style() })).unwrap();
        s.push(Item::Marker(Marker::sample(a(&[1.0, 1.0, 2.0]), Color::BLACK))).unwrap();
        s.push(Item::Marker(Marker::study(a(&[3.0, 1.0, 1.0]), Color::BLACK))).unwrap();
        s
    }

    #[test]
    fn well_formed_scene_has_no_diagnostics() {
        assert!(validate_scene(&planar_scene()).is_empty());
    }

    #[test]
    fn arity_diagnostic() {
        let mut s = planar_scene();
        s.items.push(Item::Marker(Marker::study(a(&[1.0, 1.0, 1.0, 1.0]), Color::BLACK)));
        let d = validate_scene(&s);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].rule, Rule::Arity);
        assert_eq!(d[0].item, Some(3));
    }

    #[test]
    fn ordering_diagnostic() {
        let axis = TimeAxis::new(0.0, 10.0, 100.0).unwrap();
        let mut s = Scene::with_prism(tri(), axis).unwrap();
        s.items.push(Item::Trajectory(Trajectory {
            waypoints: vec![
                Waypoint { coefficients: a(&[1.0, 0.0, 0.0]), timestamp: Some(5.0) },
                Waypoint { coefficients: a(&[0.0, 1.0, 0.0]), timestamp: Some(2.0) },
            ],
            style: default_path_style(),
            kind: TrajectoryKind::Observed,
        }));
        let d = validate_scene(&s);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].rule, Rule::Ordering);
    }

    #[test]
    fn push_rejects_small_study_marker_atomically() {
        let mut s = planar_scene();
        let before = s.items.len();
        let mut m = Marker::study(a(&[1.0, 1.0, 1.0]), Color::BLACK);
        m.radius = 2.0;
        let err = s.push(Item::Marker(m)).unwrap_err();
        assert!(matches!(err, SceneError::Invalid(ref d) if d[0].rule == Rule::MarkerRadius));
        assert_eq!(s.items.len(), before);
    }

    #[test]
    fn timestamps_need_a_prism() {
        let mut s = planar_scene();
        let mut m = Marker::study(a(&[1.0, 1.0, 1.0]), Color::BLACK);
        m.timestamp = Some(1.0);
        assert!(s.push(Item::Marker(m)).is_err());
        let bad_slice =
            Item::SliceTriangle(SliceTriangle { timestamp: 0.0, style: default_slice_style(), opacity: 0.1 });
        assert!(s.push(bad_slice).is_err());
    }

    #[test]
    fn style_checks() {
        assert!(Style::parse("#000", 0.0, vec![]).is_err());
        assert!(Style::parse("#000", 1.0, vec![2.0, -1.0]).is_err());
        assert!(Style::parse("black", 1.0, vec![]).is_err());
        assert!(Style::parse("#000", 1.0, vec![1.0]).unwrap().is_solid());
    }

    #[test]
    fn saturation_reference_defaults_to_max_sum() {
        let s = planar_scene();
        assert_eq!(s.effective_saturation_reference(), 5.0);
    }
}
