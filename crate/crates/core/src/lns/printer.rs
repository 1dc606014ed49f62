//! Script pretty-printer and the scene → script writer.

use std::fmt::Write;

use thiserror::Error;

use super::lexer::Pos;
use super::parser::{Call, Expr, Script, Statement};
use crate::scene::{Item, MarkerRole, Scene, Style, TrajectoryKind, ViewSettings};
use crate::Coefficients;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("scene cannot be written as LNS: {0}")]
pub struct WriteError(pub String);

fn expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Number(n) => {
            let _ = write!(out, "{n}");
        }
        Expr::Text(s) | Expr::Color(s) => {
            out.push('"');
            // string literals have no escapes
            out.extend(s.chars().map(|c| if c == '"' || c == '\n' || c == '\r' { '\'' } else { c }));
            out.push('"');
        }
        Expr::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                expr(out, item);
            }
            out.push(']');
        }
        Expr::VarRef(name) => out.push_str(name),
        Expr::IndexedRef(name, index) => {
            let _ = write!(out, "{name}[{index}]");
        }
    }
}

fn call(out: &mut String, c: &Call) {
    out.push_str(&c.name);
    out.push('(');
    for (i, a) in c.args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        expr(out, a);
    }
    out.push(')');
}

/// Renders a script as LNS source, one statement per line.
pub fn print(script: &Script) -> String {
    let mut out = String::new();
    for stmt in &script.statements {
        match stmt {
            Statement::Call(c) => {
                call(&mut out, c);
                out.push_str(";\n");
            }
            Statement::TryCatch { call: c, catch_var } => {
                out.push_str("try { ");
                call(&mut out, c);
                let _ = writeln!(out, "; }} catch ({catch_var}) {{ }}");
            }
            Statement::VarDecl(bindings) => {
                out.push_str("var ");
                for (i, b) in bindings.iter().enumerate() {
                    if i > 0 {
                        out.push_str(",\n    ");
                    }
                    let _ = write!(out, "{} = ", b.name);
                    expr(&mut out, &b.value);
                }
                out.push_str(";\n");
            }
        }
    }
    out
}

fn mk_call(name: &str, args: Vec<Expr>) -> Call {
    Call { name: name.to_string(), args, pos: Pos::default() }
}

fn num(n: f64) -> Expr {
    Expr::Number(n)
}

fn coeffs(a: &Coefficients) -> Expr {
    Expr::Array(a.values().iter().copied().map(num).collect())
}

fn style_args(style: &Style, size: f64) -> Vec<Expr> {
    vec![
        Expr::Color(style.color.to_hex()),
        num(style.stroke_width),
        Expr::Array(style.dash.iter().copied().map(num).collect()),
        num(size),
    ]
}

/// Builds a script that evaluates back to `scene`.
///
/// View settings are wrapped in `try`/`catch` so the script stays loadable by
/// renderers that lack those calls.
pub fn scene_to_script(scene: &Scene) -> Result<Script, WriteError> {
    let mut stmts = Vec::new();
    let size = scene.frame.edge();
    let view = &scene.view;
    let defaults = ViewSettings::default();
    let guarded = |c: Call| Statement::TryCatch { call: c, catch_var: "ex".into() };
    if view.view_preset != defaults.view_preset {
        stmts.push(guarded(mk_call("setView", vec![num(view.view_preset as f64)])));
    }
    if view.transform_mode != defaults.transform_mode {
        stmts.push(guarded(mk_call("setTransform", vec![num(view.transform_mode as f64)])));
    }
    if (view.azimuth_deg, view.elevation_deg) != (defaults.azimuth_deg, defaults.elevation_deg) {
        stmts.push(guarded(mk_call("setViewPort", vec![num(view.azimuth_deg), num(view.elevation_deg)])));
    }
    if scene.show_digits {
        stmts.push(Statement::Call(mk_call("showDigits", vec![num(1.0)])));
    }
    if let Some(r) = scene.saturation_reference {
        stmts.push(Statement::Call(mk_call("setSaturationReference", vec![num(r)])));
    }

    if scene.items.is_empty() {
        return Err(WriteError("scene has no items".into()));
    }
    if scene.prism.is_some() && !matches!(scene.items.first(), Some(Item::WireSimplex(_))) {
        return Err(WriteError("prism scene must start with its wireframe".into()));
    }
    if matches!(scene.items.first(), Some(Item::SideLabels(_))) {
        return Err(WriteError("side labels cannot precede every simplex object".into()));
    }

    for (idx, item) in scene.items.iter().enumerate() {
        let c = match item {
            Item::WireSimplex(w) => {
                let mut args = style_args(&w.style, size);
                match (&scene.prism, idx) {
                    (Some(axis), 0) => {
                        args.extend([num(axis.length()), num(axis.t_min()), num(axis.t_max())]);
                        mk_call("addPrism", args)
                    }
                    _ if scene.frame.n() == 2 => mk_call("addTriangle", args),
                    _ => mk_call("addTetraedron", args),
                }
            }
            Item::SliceTriangle(s) => {
                let mut args = style_args(&s.style, size);
                args.extend([num(s.timestamp), num(s.opacity)]);
                mk_call("addSlice", args)
            }
            Item::Marker(m) => {
                if m.style != Style::solid(m.style.color, 1.0) {
                    return Err(WriteError(format!("item {idx}: marker stroke style is not expressible")));
                }
                if m.saturation_sum.is_some() {
                    return Err(WriteError(format!("item {idx}: per-marker saturation sum is not expressible")));
                }
                let mut args = vec![
                    Expr::Color(m.style.color.to_hex()),
                    num(m.radius),
                    Expr::Text(m.shape.name().into()),
                    num(size),
                    coeffs(&m.coefficients),
                ];
                args.extend(m.timestamp.map(num));
                let name = match m.role {
                    MarkerRole::ObjectUnderStudy => "addPoint",
                    MarkerRole::LearningSample => "addSamplePoint",
                };
                mk_call(name, args)
            }
            Item::PerpendicularFan(f) => {
                let mut args = style_args(&f.style, size);
                args.push(coeffs(&f.coefficients));
                args.push(Expr::Array(f.side_colors.iter().map(|c| Expr::Color(c.to_hex())).collect()));
                args.extend(f.timestamp.map(num));
                mk_call("addIJK", args)
            }
            Item::Trajectory(t) => {
                let mut args = style_args(&t.style, size);
                args.push(Expr::Array(t.waypoints.iter().map(|w| coeffs(&w.coefficients)).collect()));
                let times: Vec<f64> = t.waypoints.iter().filter_map(|w| w.timestamp).collect();
                if !times.is_empty() && times.len() != t.waypoints.len() {
                    return Err(WriteError(format!("item {idx}: some waypoints lack timestamps")));
                }
                if !times.is_empty() || t.kind != TrajectoryKind::Observed {
                    args.push(Expr::Array(times.into_iter().map(num).collect()));
                }
                if t.kind != TrajectoryKind::Observed {
                    args.push(Expr::Text(t.kind.name().into()));
                }
                mk_call("addPath", args)
            }
            Item::SideLabels(l) => {
                mk_call("setSideLabels", vec![Expr::Array(l.labels.iter().map(|s| Expr::Text(s.clone())).collect())])
            }
        };
        stmts.push(Statement::Call(c));
    }
    Ok(Script { statements: stmts })
}
