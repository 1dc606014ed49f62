//! Software rasterizer: paints a plan onto a white RGBA canvas with 4×4
//! supersampling per pixel, then encodes it as PNG.

use std::io::Write;

use super::color::Color;
use super::project::{RenderPlan, Shape};
use super::RenderError;
use crate::scene::Style;

/// Subsamples per pixel along each axis.
pub const SUPERSAMPLE: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    pub width: u32,
    pub height: u32,
    /// Row-major RGBA, 8 bits per channel.
    pub rgba: Vec<u8>,
}

impl RasterImage {
    pub fn pixel(&self, x: u32, y: u32) -> [u8; 4] {
        let i = (y as usize * self.width as usize + x as usize) * 4;
        [self.rgba[i], self.rgba[i + 1], self.rgba[i + 2], self.rgba[i + 3]]
    }

    /// Channels of pixel `(x, y)` scaled to `[0, 1]`.
    pub fn pixel_rgb(&self, x: u32, y: u32) -> Color {
        let [r, g, b, _] = self.pixel(x, y);
        Color::from_rgb8(r, g, b)
    }

    pub fn write_png<W: Write>(&self, w: W) -> Result<(), RenderError> {
        let mut enc = png::Encoder::new(w, self.width, self.height);
        enc.set_color(png::ColorType::Rgba);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header().map_err(|e| RenderError::Encode(e.to_string()))?;
        writer.write_image_data(&self.rgba).map_err(|e| RenderError::Encode(e.to_string()))?;
        writer.finish().map_err(|e| RenderError::Encode(e.to_string()))?;
        Ok(())
    }

    pub fn to_png(&self) -> Result<Vec<u8>, RenderError> {
        let mut buf = Vec::new();
        self.write_png(&mut buf)?;
        Ok(buf)
    }
}

struct Canvas {
    width: usize,
    height: usize,
    rgb: Vec<[f64; 3]>,
}

impl Canvas {
    /// Blends `color` over every pixel of the box according to the fraction of
    /// subsamples for which `inside` holds.
    fn paint(&mut self, bbox: [f64; 4], color: Color, opacity: f64, inside: impl Fn(f64, f64) -> bool) {
        let x0 = bbox[0].floor().max(0.0) as usize;
        let y0 = bbox[1].floor().max(0.0) as usize;
        let x1 = (bbox[2].ceil().max(0.0) as usize).min(self.width);
        let y1 = (bbox[3].ceil().max(0.0) as usize).min(self.height);
        let n = SUPERSAMPLE;
        let total = (n * n) as f64;
        for py in y0..y1 {
            for px in x0..x1 {
                let mut hits = 0usize;
                for sy in 0..n {
                    for sx in 0..n {
                        let x = px as f64 + (sx as f64 + 0.5) / n as f64;
                        let y = py as f64 + (sy as f64 + 0.5) / n as f64;
                        if inside(x, y) {
                            hits += 1;
                        }
                    }
                }
                if hits == 0 {
                    continue;
                }
                let a = opacity * hits as f64 / total;
                let dst = &mut self.rgb[py * self.width + px];
                dst[0] = dst[0] * (1.0 - a) + color.r * a;
                dst[1] = dst[1] * (1.0 - a) + color.g * a;
                dst[2] = dst[2] * (1.0 - a) + color.b * a;
            }
        }
    }
}

/// Dash-aware segment list for a stroked polyline. Each entry is
/// `(from, to, dash offset at from)`.
fn stroke_runs(points: &[[f64; 2]]) -> Vec<([f64; 2], [f64; 2], f64)> {
    let mut out = Vec::new();
    let mut offset = 0.0;
    for w in points.windows(2) {
        out.push((w[0], w[1], offset));
        offset += ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2)).sqrt();
    }
    out
}

fn dash_on(style: &Style, along: f64) -> bool {
    if style.is_solid() {
        return true;
    }
    // odd-length patterns repeat twice, as in SVG
    let pattern: Vec<f64> = if style.dash.len() % 2 == 1 {
        style.dash.iter().chain(&style.dash).copied().collect()
    } else {
        style.dash.clone()
    };
    let period: f64 = pattern.iter().sum();
    let mut t = along.rem_euclid(period);
    for (i, d) in pattern.iter().enumerate() {
        if t < *d {
            return i % 2 == 0;
        }
        t -= d;
    }
    true
}

fn stroke_hit(runs: &[([f64; 2], [f64; 2], f64)], style: &Style, x: f64, y: f64) -> bool {
    let hw = style.stroke_width / 2.0;
    runs.iter().any(|&(a, b, offset)| {
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let len2 = dx * dx + dy * dy;
        let t = if len2 > 0.0 { (((x - a[0]) * dx + (y - a[1]) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
        let (cx, cy) = (a[0] + t * dx, a[1] + t * dy);
        let d2 = (x - cx).powi(2) + (y - cy).powi(2);
        d2 <= hw * hw && dash_on(style, offset + t * len2.sqrt())
    })
}

fn bbox(points: &[[f64; 2]], pad: f64) -> [f64; 4] {
    let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
    for p in points {
        b[0] = b[0].min(p[0]);
        b[1] = b[1].min(p[1]);
        b[2] = b[2].max(p[0]);
        b[3] = b[3].max(p[1]);
    }
    [b[0] - pad, b[1] - pad, b[2] + pad, b[3] + pad]
}

fn in_polygon(points: &[[f64; 2]], x: f64, y: f64) -> bool {
    let mut inside = false;
    let n = points.len();
    for i in 0..n {
        let (a, b) = (points[i], points[(i + n - 1) % n]);
        if (a[1] > y) != (b[1] > y) && x < (b[0] - a[0]) * (y - a[1]) / (b[1] - a[1]) + a[0] {
            inside = !inside;
        }
    }
    inside
}

/// Paints every primitive in plan order onto a white canvas.
pub fn emit_raster(plan: &RenderPlan) -> RasterImage {
    let (w, h) = (plan.width as usize, plan.height as usize);
    let mut canvas = Canvas { width: w, height: h, rgb: vec![[1.0; 3]; w * h] };
    for p in &plan.primitives {
        match &p.shape {
            Shape::Segment { from, to, style } => {
                let runs = stroke_runs(&[*from, *to]);
                let b = bbox(&[*from, *to], style.stroke_width / 2.0 + 1.0);
                canvas.paint(b, style.color, 1.0, |x, y| stroke_hit(&runs, style, x, y));
            }
            Shape::PolyLine { points, style } => {
                let runs = stroke_runs(points);
                let b = bbox(points, style.stroke_width / 2.0 + 1.0);
                canvas.paint(b, style.color, 1.0, |x, y| stroke_hit(&runs, style, x, y));
            }
            Shape::Disc { center, radius, fill } => {
                let b = bbox(&[*center], radius + 1.0);
                let r2 = radius * radius;
                canvas.paint(b, *fill, 1.0, |x, y| (x - center[0]).powi(2) + (y - center[1]).powi(2) <= r2);
            }
            Shape::Polygon { points, fill, opacity } => {
                canvas.paint(bbox(points, 1.0), *fill, *opacity, |x, y| in_polygon(points, x, y));
            }
            Shape::Label { anchor, text, color, size } => {
                let glyphs: Vec<[u8; 7]> = text.chars().map(glyph).collect();
                // 5×7 cells plus one column of spacing
                let cell = size / 7.0;
                let text_w = glyphs.len() as f64 * 6.0 * cell - cell;
                let left = anchor[0] - text_w / 2.0;
                let top = anchor[1] - size / 2.0;
                let b = [left - 1.0, top - 1.0, left + text_w + 1.0, top + size + 1.0];
                canvas.paint(b, *color, 1.0, |x, y| {
                    let col = ((x - left) / cell).floor();
                    let row = ((y - top) / cell).floor();
                    if col < 0.0 || !(0.0..7.0).contains(&row) {
                        return false;
                    }
                    let (gi, gx) = ((col as usize) / 6, (col as usize) % 6);
                    gx < 5 && glyphs.get(gi).is_some_and(|g| g[row as usize] & (0x10 >> gx) != 0)
                });
            }
        }
    }
    let mut rgba = Vec::with_capacity(w * h * 4);
    for px in &canvas.rgb {
        let [r, g, b] = Color { r: px[0], g: px[1], b: px[2] }.to_rgb8();
        rgba.extend_from_slice(&[r, g, b, 255]);
    }
    RasterImage { width: plan.width, height: plan.height, rgba }
}

/// 5×7 glyph rows, most significant of the low five bits on the left.
fn glyph(c: char) -> [u8; 7] {
    match c.to_ascii_uppercase() {
        '0' => [0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E],
        '1' => [0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E],
        '2' => [0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F],
        '3' => [0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E],
        '4' => [0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02],
        '5' => [0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E],
        '6' => [0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E],
        '7' => [0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08],
        '8' => [0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E],
        '9' => [0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C],
        'A' => [0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11],
        'B' => [0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E],
        'C' => [0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E],
        'D' => [0x1C, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1C],
        'E' => [0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F],
        'F' => [0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10],
        'G' => [0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F],
        'H' => [0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11],
        'I' => [0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E],
        'J' => [0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C],
        'K' => [0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11],
        'L' => [0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F],
        'M' => [0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11],
        'N' => [0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11],
        'O' => [0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E],
        'P' => [0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10],
        'Q' => [0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D],
        'R' => [0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11],
        'S' => [0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E],
        'T' => [0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04],
        'U' => [0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E],
        'V' => [0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04],
        'W' => [0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A],
        'X' => [0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11],
        'Y' => [0x11, 0x11, 0x11, 0x0A, 0x04, 0x04, 0x04],
        'Z' => [0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F],
        '-' => [0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00],
        '.' => [0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C],
        ' ' => [0x00; 7],
        _ => [0x1F, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1F],
    }
}
