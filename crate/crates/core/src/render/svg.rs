//! Deterministic SVG 1.1 emitter.

use std::fmt::Write;

use super::project::{RenderPlan, Shape};
use crate::scene::Style;

fn f(v: f64) -> String {
    // avoid "-0.000000"
    let s = format!("{v:.6}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0.000000".to_string()
    } else {
        s
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn stroke(style: &Style) -> String {
    let mut s = format!(
        r#" stroke="{}" stroke-width="{}" stroke-linecap="round" stroke-linejoin="round""#,
        style.color.to_hex(),
        f(style.stroke_width)
    );
    if !style.is_solid() {
        let dash: Vec<String> = style.dash.iter().map(|d| f(*d)).collect();
        let _ = write!(s, r#" stroke-dasharray="{}""#, dash.join(" "));
    }
    s
}

fn points(pts: &[[f64; 2]]) -> String {
    pts.iter().map(|p| format!("{},{}", f(p[0]), f(p[1]))).collect::<Vec<_>>().join(" ")
}

/// One element per primitive, in plan order, on a white background.
pub fn emit_vector(plan: &RenderPlan) -> String {
    let (w, h) = (plan.width, plan.height);
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" style="background-color:#ffffff">"#
    );
    for p in &plan.primitives {
        let class = p.role.class();
        match &p.shape {
            Shape::Segment { from, to, style } => {
                let _ = writeln!(
                    out,
                    r#"  <line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}"{}/>"#,
                    f(from[0]),
                    f(from[1]),
                    f(to[0]),
                    f(to[1]),
                    stroke(style)
                );
            }
            Shape::PolyLine { points: pts, style } => {
                let _ = writeln!(
                    out,
                    r#"  <polyline class="{class}" points="{}" fill="none"{}/>"#,
                    points(pts),
                    stroke(style)
                );
            }
            Shape::Disc { center, radius, fill } => {
                let _ = writeln!(
                    out,
                    r#"  <circle class="{class}" cx="{}" cy="{}" r="{}" fill="{}"/>"#,
                    f(center[0]),
                    f(center[1]),
                    f(*radius),
                    fill.to_hex()
                );
            }
            Shape::Polygon { points: pts, fill, opacity } => {
                let _ = writeln!(
                    out,
                    r#"  <polygon class="{class}" points="{}" fill="{}" fill-opacity="{}" stroke="none"/>"#,
                    points(pts),
                    fill.to_hex(),
                    f(*opacity)
                );
            }
            Shape::Label { anchor, text, color, size } => {
                let _ = writeln!(
                    out,
                    r#"  <text class="{class}" x="{}" y="{}" font-family="sans-serif" font-size="{}" fill="{}" text-anchor="middle" dominant-baseline="central">{}</text>"#,
                    f(anchor[0]),
                    f(anchor[1]),
                    f(*size),
                    color.to_hex(),
                    escape(text)
                );
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::render::color::parse_color;
    use crate::render::project::{RenderPrimitive, Role};

    fn disc_plan() -> RenderPlan {
        RenderPlan {
            width: 100,
            height: 80,
            primitives: vec![RenderPrimitive {
                shape: Shape::Disc { center: [50.0, 40.0], radius: 6.0, fill: parse_color("#E01B1B").unwrap() },
                role: Role::Marker,
                depth: 0.0,
                item: Some(0),
            }],
        }
    }

    #[test]
    fn single_disc_document() {
        let doc = emit_vector(&disc_plan());
        assert_eq!(doc.matches("<circle").count(), 1);
        assert!(doc.contains(r##"cx="50.000000" cy="40.000000" r="6.000000" fill="#e01b1b""##));
        assert!(doc.starts_with("<?xml"));
        assert!(doc.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn dashes_and_escaping() {
        let mut plan = disc_plan();
        plan.primitives.push(RenderPrimitive {
            shape: Shape::Segment {
                from: [0.0, -0.0000001],
                to: [10.0, 10.0],
                style: Style::parse("#000", 2.0, vec![4.0, 2.0]).unwrap(),
            },
            role: Role::Path,
            depth: 0.0,
            item: Some(1),
        });
        plan.primitives.push(RenderPrimitive {
            shape: Shape::Label {
                anchor: [1.0, 1.0],
                text: "a<b".into(),
                color: parse_color("#000").unwrap(),
                size: 12.0,
            },
            role: Role::Label,
            depth: 0.0,
            item: None,
        });
        let doc = emit_vector(&plan);
        assert!(doc.contains(r#"stroke-dasharray="4.000000 2.000000""#));
        assert!(doc.contains(r#"y1="0.000000""#));
        assert!(doc.contains(">a&lt;b</text>"));
    }
}
