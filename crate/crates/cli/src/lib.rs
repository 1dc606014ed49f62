//! Command implementations behind the `cogsimplex` binary.
//!
//! Every command returns `Ok(())` or a [`CliError`] whose [`CliError::exit_code`]
//! is 1 for bad input (syntax, evaluation, schema) and 2 for I/O failures.
//! Output files are written to a temporary file first and renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use serde::Serialize;
use thiserror::Error;

use cogsimplex::geometry::{coefficients_to_distances, prism_offset, simplex_frame, CoefficientVector, TimeAxis};
use cogsimplex::lns::{load, print, scene_to_script};
use cogsimplex::render::{emit_raster, emit_vector, project, Camera, Color, MIN_VIEWPORT};
use cogsimplex::scene::{
    build_prism_scene, partition_four_pattern_series, validate_scene, MarkerRole, PrismSample, Scene, Stage, Style,
};

/// Edge length of the triangle used for generated prism scenes.
pub const CSV_SCENE_EDGE: f64 = 200.0;

/// Marker colours indexed by stage, from absence (green) to exhaustion (red).
pub const STAGE_PALETTE: [&str; 4] = ["#07f70b", "#f7f307", "#e0841b", "#e01b1b"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Render,
    Validate,
    Inspect,
    FromCsv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Svg,
    Png,
}

impl Format {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "svg" => Some(Format::Svg),
            "png" => Some(Format::Png),
            _ => None,
        }
    }

    fn extension(self) -> &'static str {
        match self {
            Format::Svg => "svg",
            Format::Png => "png",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input: PathBuf,
    pub output: Option<PathBuf>,
    pub width: u32,
    pub height: u32,
    /// Overrides the format implied by the output extension.
    pub format: Option<Format>,
    pub azimuth: Option<f64>,
    pub elevation: Option<f64>,
    pub prism_length: f64,
}

impl RunConfig {
    pub fn new(command: Command, input: impl Into<PathBuf>) -> Self {
        Self {
            command,
            input: input.into(),
            output: None,
            width: 800,
            height: 600,
            format: None,
            azimuth: None,
            elevation: None,
            prism_length: 100.0,
        }
    }

    fn check(&self) -> Result<(), CliError> {
        if self.width < MIN_VIEWPORT || self.height < MIN_VIEWPORT {
            return Err(CliError::Config(format!(
                "viewport {}x{} is below the {MIN_VIEWPORT}x{MIN_VIEWPORT} minimum",
                self.width, self.height
            )));
        }
        if !(self.prism_length > 0.0 && self.prism_length.is_finite()) {
            return Err(CliError::Config(format!("prism length must be positive, got {}", self.prism_length)));
        }
        for (name, v) in [("azimuth", self.azimuth), ("elevation", self.elevation)] {
            if v.is_some_and(|v| !v.is_finite()) {
                return Err(CliError::Config(format!("{name} must be finite")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    /// Syntax or evaluation error; the message already carries `line:col`.
    #[error("{path}:{message}")]
    Script { path: String, message: String },
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 2,
            _ => 1,
        }
    }
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: display(path), source }
}

fn input_err(path: &Path, message: impl ToString) -> CliError {
    CliError::Input { path: display(path), message: message.to_string() }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(io_err(path))
}

fn load_scene(path: &Path) -> Result<Scene, CliError> {
    let source = read_input(path)?;
    load(&source).map_err(|e| {
        let message = match e.pos() {
            Some(_) => e.to_string(),
            None => format!(" {e}"),
        };
        CliError::Script { path: display(path), message }
    })
}

/// Writes every `(path, bytes)` pair to a sibling temporary file, then renames
/// them all into place, so a failure leaves no partial output behind.
pub fn write_atomically(files: &[(PathBuf, Vec<u8>)]) -> Result<(), CliError> {
    let mut staged = Vec::with_capacity(files.len());
    for (path, bytes) in files {
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(path))?;
        tmp.write_all(bytes).map_err(io_err(path))?;
        tmp.as_file().sync_all().map_err(io_err(path))?;
        staged.push((tmp, path));
    }
    for (tmp, path) in staged {
        tmp.persist(path).map_err(|e| CliError::Io { path: display(path), source: e.error })?;
    }
    Ok(())
}

/// Dispatches `config.command`, writing any report to `out`.
pub fn run(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    config.check()?;
    match config.command {
        Command::Render => cmd_render(config),
        Command::Validate => cmd_validate(config, out),
        Command::Inspect => cmd_inspect(config, out),
        Command::FromCsv => cmd_from_csv(config, out),
    }
}

fn render_target(config: &RunConfig) -> Result<(PathBuf, Format), CliError> {
    match (&config.output, config.format) {
        (Some(path), Some(f)) => Ok((path.clone(), f)),
        (Some(path), None) => Format::from_path(path).map(|f| (path.clone(), f)).ok_or_else(|| {
            CliError::Config(format!("{}: cannot infer format from extension; pass --format", display(path)))
        }),
        (None, f) => {
            let f = f.unwrap_or(Format::Svg);
            Ok((config.input.with_extension(f.extension()), f))
        }
    }
}

/// Renders the scene in `config.input` to SVG or PNG.
pub fn render_bytes(scene: &Scene, config: &RunConfig, format: Format) -> Result<Vec<u8>, CliError> {
    let mut camera = Camera::from_view(&scene.view);
    if let Some(a) = config.azimuth {
        camera.azimuth_deg = a;
    }
    if let Some(e) = config.elevation {
        camera.elevation_deg = e;
    }
    let fail = |e: cogsimplex::render::RenderError| input_err(&config.input, e);
    let plan = project(scene, &camera, config.width, config.height).map_err(fail)?;
    match format {
        Format::Svg => Ok(emit_vector(&plan).into_bytes()),
        Format::Png => emit_raster(&plan).to_png().map_err(fail),
    }
}

pub fn cmd_render(config: &RunConfig) -> Result<(), CliError> {
    let (path, format) = render_target(config)?;
    let scene = load_scene(&config.input)?;
    let bytes = render_bytes(&scene, config, format)?;
    write_atomically(&[(path, bytes)])
}

pub fn cmd_validate(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let scene = load_scene(&config.input)?;
    let diags = validate_scene(&scene);
    if !diags.is_empty() {
        let text: Vec<String> = diags.iter().map(ToString::to_string).collect();
        return Err(input_err(&config.input, text.join("; ")));
    }
    writeln!(out, "{}: ok ({} items)", display(&config.input), scene.items.len()).map_err(io_err(Path::new("<stdout>")))
}

/// Rounds to 9 significant digits so reports are stable across platforms.
pub fn round_sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

fn round_all(v: &[f64]) -> Vec<f64> {
    v.iter().copied().map(round_sig9).collect()
}

#[derive(Debug, Serialize)]
pub struct SimplexReport {
    pub dimension: usize,
    pub edge: f64,
    pub height: f64,
}

#[derive(Debug, Serialize)]
pub struct PrismReport {
    pub t_min: f64,
    pub t_max: f64,
    pub length: f64,
}

#[derive(Debug, Serialize)]
pub struct PointReport {
    pub item: usize,
    pub role: &'static str,
    pub coefficients: Vec<f64>,
    pub sum: f64,
    pub distances: Vec<f64>,
    pub position: Vec<f64>,
    pub timestamp: Option<f64>,
    pub prism_offset: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct InspectReport {
    pub simplex: SimplexReport,
    pub prism: Option<PrismReport>,
    pub points: Vec<PointReport>,
}

/// Geometry computed for every marker of `scene`.
pub fn inspect_scene(scene: &Scene) -> Result<InspectReport, String> {
    let frame = &scene.frame;
    let mut points = Vec::new();
    for (item, it) in scene.items.iter().enumerate() {
        let cogsimplex::scene::Item::Marker(m) = it else { continue };
        let h = coefficients_to_distances(&m.coefficients, frame).map_err(|e| e.to_string())?;
        let p = frame.place(&m.coefficients).map_err(|e| e.to_string())?;
        let offset = match &scene.prism {
            Some(axis) => Some(prism_offset(m.timestamp.unwrap_or(axis.t_min()), axis).map_err(|e| e.to_string())?),
            None => None,
        };
        points.push(PointReport {
            item,
            role: match m.role {
                MarkerRole::ObjectUnderStudy => "object",
                MarkerRole::LearningSample => "sample",
            },
            coefficients: round_all(m.coefficients.values()),
            sum: round_sig9(m.coefficients.sum()),
            distances: round_all(h.values()),
            position: round_all(p.coords()),
            timestamp: m.timestamp.map(round_sig9),
            prism_offset: offset.map(round_sig9),
        });
    }
    Ok(InspectReport {
        simplex: SimplexReport {
            dimension: frame.n(),
            edge: round_sig9(frame.edge()),
            height: round_sig9(frame.height()),
        },
        prism: scene.prism.map(|a| PrismReport {
            t_min: round_sig9(a.t_min()),
            t_max: round_sig9(a.t_max()),
            length: round_sig9(a.length()),
        }),
        points,
    })
}

pub fn cmd_inspect(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let scene = load_scene(&config.input)?;
    let report = inspect_scene(&scene).map_err(|e| input_err(&config.input, e))?;
    let stdout = Path::new("<stdout>");
    serde_json::to_writer_pretty(&mut *out, &report)
        .map_err(|e| CliError::Io { path: display(stdout), source: e.into() })?;
    writeln!(out).map_err(io_err(stdout))
}

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRow {
    pub object_id: String,
    pub timestamp: f64,
    pub coefficients: Vec<f64>,
    pub stage: Option<Stage>,
}

/// Real number, RFC 3339 / ISO-8601 date-time, or plain date, as epoch seconds.
pub fn parse_timestamp(text: &str) -> Option<f64> {
    let text = text.trim();
    if let Ok(v) = text.parse::<f64>() {
        return v.is_finite().then_some(v);
    }
    let secs = |dt: NaiveDateTime| {
        let utc = dt.and_utc();
        utc.timestamp() as f64 + f64::from(utc.timestamp_subsec_nanos()) * 1e-9
    };
    if let Ok(dt) = DateTime::parse_from_rfc3339(text) {
        return Some(secs(dt.naive_utc()));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(text, fmt) {
            return Some(secs(dt));
        }
    }
    NaiveDate::parse_from_str(text, "%Y-%m-%d").ok().and_then(|d| d.and_hms_opt(0, 0, 0)).map(secs)
}

/// Parses a sample table with header `object_id,timestamp,a1,a2,a3[,a4][,stage]`.
pub fn parse_samples(text: &str) -> Result<Vec<SampleRow>, String> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().map_err(|e| e.to_string())?.iter().map(str::to_string).collect();
    let allowed: [&[&str]; 4] = [
        &["object_id", "timestamp", "a1", "a2", "a3"],
        &["object_id", "timestamp", "a1", "a2", "a3", "a4"],
        &["object_id", "timestamp", "a1", "a2", "a3", "stage"],
        &["object_id", "timestamp", "a1", "a2", "a3", "a4", "stage"],
    ];
    if !allowed.iter().any(|h| h.iter().eq(header.iter())) {
        return Err(format!("header must be object_id,timestamp,a1,a2,a3[,a4][,stage], got {}", header.join(",")));
    }
    let arity = if header.iter().any(|h| h == "a4") { 4 } else { 3 };
    let has_stage = header.last().is_some_and(|h| h == "stage");
    if has_stage && arity == 3 {
        return Err("a stage column requires four coefficients".into());
    }
    let mut rows = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| format!("line {line}: {e}"))?;
        let timestamp = parse_timestamp(&rec[1]).ok_or_else(|| format!("line {line}: bad timestamp `{}`", &rec[1]))?;
        let coefficients = (2..2 + arity)
            .map(|i| rec[i].parse::<f64>().map_err(|_| format!("line {line}: bad coefficient `{}`", &rec[i])))
            .collect::<Result<Vec<f64>, String>>()?;
        let stage = if has_stage {
            let s = &rec[header.len() - 1];
            let idx = s.parse::<usize>().ok().and_then(Stage::from_index);
            Some(idx.ok_or_else(|| format!("line {line}: stage must be 0, 1, 2 or 3, got `{s}`"))?)
        } else {
            None
        };
        rows.push(SampleRow { object_id: rec[0].to_string(), timestamp, coefficients, stage });
    }
    if rows.is_empty() {
        return Err("no samples".into());
    }
    if let Some(other) = rows.iter().find(|r| r.object_id != rows[0].object_id) {
        return Err(format!("one object per file expected, found `{}` and `{}`", rows[0].object_id, other.object_id));
    }
    Ok(rows)
}

/// A generated prism scene and the file-name suffix it is written under.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvScene {
    /// `None` for a single prism, `Some("A")` / `Some("B")` for a split series.
    pub suffix: Option<&'static str>,
    /// Zero-based indices into the time-ordered rows.
    pub rows: Vec<usize>,
    pub scene: Scene,
}

fn prism_for(rows: &[&SampleRow], pick: &[usize], colors: &[usize], prism_length: f64) -> Result<Scene, String> {
    let samples = rows
        .iter()
        .zip(colors)
        .map(|(r, &c)| {
            let values = pick.iter().map(|&i| r.coefficients[i]).collect();
            let coefficients = CoefficientVector::new(values).map_err(|e| format!("t = {}: {e}", r.timestamp))?;
            let color: Color = STAGE_PALETTE[c].parse().map_err(|e: cogsimplex::render::ColorError| e.to_string())?;
            Ok(PrismSample { timestamp: r.timestamp, coefficients, style: Style::solid(color, 1.0) })
        })
        .collect::<Result<Vec<_>, String>>()?;
    let t_min = rows.iter().map(|r| r.timestamp).fold(f64::INFINITY, f64::min);
    let t_max = rows.iter().map(|r| r.timestamp).fold(f64::NEG_INFINITY, f64::max);
    let axis = TimeAxis::new(t_min, t_max, prism_length).map_err(|e| e.to_string())?;
    let frame = simplex_frame(2, CSV_SCENE_EDGE).map_err(|e| e.to_string())?;
    build_prism_scene(&samples, axis, frame).map_err(|e| e.to_string())
}

/// Lays a sample series out as one prism scene, or two when each row carries four
/// coefficients: prism A over stages 1–3 and prism B over stages 0–2.
pub fn csv_scenes(rows: &[SampleRow], prism_length: f64) -> Result<Vec<CsvScene>, String> {
    let mut ordered: Vec<&SampleRow> = rows.iter().collect();
    ordered.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
    if let Some(r) = ordered.iter().find(|r| r.coefficients.len() != ordered[0].coefficients.len()) {
        return Err(format!("t = {}: inconsistent coefficient count", r.timestamp));
    }
    let dominant = |r: &SampleRow| {
        CoefficientVector::new(r.coefficients.clone())
            .map(|a| a.dominant())
            .map_err(|e| format!("t = {}: {e}", r.timestamp))
    };
    if ordered[0].coefficients.len() == 3 {
        let colors = ordered.iter().map(|r| dominant(r)).collect::<Result<Vec<_>, _>>()?;
        let scene = prism_for(&ordered, &[0, 1, 2], &colors, prism_length)?;
        return Ok(vec![CsvScene { suffix: None, rows: (0..ordered.len()).collect(), scene }]);
    }
    let stages = ordered
        .iter()
        .map(|r| match r.stage {
            Some(s) => Ok(s),
            None => dominant(r).map(|i| Stage::from_index(i).expect("four coefficients")),
        })
        .collect::<Result<Vec<Stage>, String>>()?;
    let series: Vec<(f64, Stage)> = ordered.iter().zip(&stages).map(|(r, &s)| (r.timestamp, s)).collect();
    let partition = partition_four_pattern_series(&series).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for (suffix, idx, pick) in [("A", &partition.first, [1, 2, 3]), ("B", &partition.second, [0, 1, 2])] {
        if idx.is_empty() {
            continue;
        }
        let subset: Vec<&SampleRow> = idx.iter().map(|&i| ordered[i]).collect();
        let colors: Vec<usize> = idx.iter().map(|&i| stages[i].index()).collect();
        let scene = prism_for(&subset, &pick, &colors, prism_length)?;
        out.push(CsvScene { suffix: Some(suffix), rows: idx.clone(), scene });
    }
    Ok(out)
}

fn csv_target(config: &RunConfig, suffix: Option<&str>) -> PathBuf {
    let base = config.output.clone().unwrap_or_else(|| config.input.with_extension("lns"));
    match suffix {
        None => base,
        Some(s) => {
            let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            base.with_file_name(format!("{stem}_{s}.lns"))
        }
    }
}

pub fn cmd_from_csv(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let text = read_input(&config.input)?;
    let rows = parse_samples(&text).map_err(|e| input_err(&config.input, e))?;
    let scenes = csv_scenes(&rows, config.prism_length).map_err(|e| input_err(&config.input, e))?;
    let mut files = Vec::new();
    for s in &scenes {
        let script = scene_to_script(&s.scene).map_err(|e| input_err(&config.input, e))?;
        files.push((csv_target(config, s.suffix), print(&script).into_bytes()));
    }
    write_atomically(&files)?;
    for ((path, _), s) in files.iter().zip(&scenes) {
        let rows: Vec<String> = s.rows.iter().map(|i| (i + 1).to_string()).collect();
        writeln!(out, "{}: rows {}", display(path), rows.join(",")).map_err(io_err(Path::new("<stdout>")))?;
    }
    Ok(())
}
