//! Scalar abstraction shared by the geometry routines.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the geometry engine can run on (`f32` or `f64`).
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Relative tolerance used by invariant checks for this precision.
    fn tolerance() -> Self;

    /// Converts an `f64` literal. Infallible for the supported types.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn tolerance() -> Self {
        // 64 ulps at 1.0; f32 cannot carry 1e-9
        64.0 * f32::EPSILON
    }
}

/// `|a - b| <= tol * max(|a|, |b|)`, with an absolute floor of `tol * scale`.
pub(crate) fn close<T: Scalar>(a: T, b: T, tol: T, scale: T) -> bool {
    let mag = a.abs().max(b.abs()).max(scale.abs());
    (a - b).abs() <= tol * mag
}
