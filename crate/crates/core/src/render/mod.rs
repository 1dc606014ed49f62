//! Projection of scenes to depth-ordered 2D primitives and their SVG / PNG emission.

pub mod color;
mod project;
mod raster;
mod svg;

use thiserror::Error;

use crate::geometry::GeometryError;

pub use color::{parse_color, Color, ColorError};
pub use project::{
    project, Camera, FitTransform, Projection, RenderPlan, RenderPrimitive, Role, Shape, DEFAULT_FOCAL, FIT_MARGIN,
    LABEL_SIZE, MIN_VIEWPORT,
};
pub use raster::{emit_raster, RasterImage, SUPERSAMPLE};
pub use svg::emit_vector;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("viewport {width}x{height} is too small (minimum {MIN_VIEWPORT}x{MIN_VIEWPORT})")]
    DegenerateViewport { width: u32, height: u32 },
    #[error("scene is empty")]
    EmptyScene,
    #[error("invalid camera: {0}")]
    BadCamera(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("projection produced non-finite coordinates")]
    NonFinite,
    #[error("PNG encoding failed: {0}")]
    Encode(String),
}
