//! Cognitive-graphics toolkit for proximity coefficients.
//!
//! An observation's proximity to `n + 1` patterns is drawn as a point inside a
//! regular `n`-simplex (triangle or tetrahedron) whose distance to each face is
//! proportional to the matching coefficient. Time series are stacked along the
//! axis of a triangular prism. Scenes are described in the small LNS language,
//! projected with a painter's-algorithm camera and written as SVG or PNG.
//!
//! The geometry layer is generic over [`Scalar`] (`f32` / `f64`); scenes and
//! rendering work in `f64` through the aliases below.

// `!(x > 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod geometry;
pub mod lns;
pub mod render;
mod scalar;
pub mod scene;

pub use scalar::Scalar;

pub type Frame = geometry::SimplexFrame<f64>;
pub type Coefficients = geometry::CoefficientVector<f64>;
pub type Distances = geometry::DistanceVector<f64>;
pub type Point = geometry::Point<f64>;
pub type Axis = geometry::TimeAxis<f64>;

pub type Frame32 = geometry::SimplexFrame<f32>;
pub type Coefficients32 = geometry::CoefficientVector<f32>;
