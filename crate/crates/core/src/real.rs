//! Scalar abstraction for the analytic core.
//!
//! All closed-form bound computations are generic over [`Real`], so they work
//! with `f32` or `f64` (the crate root fixes `f64` aliases for the common
//! case). Monte-Carlo sampling, trace handling, and the simulator are
//! deliberately concrete `f64`.

use std::fmt::{Debug, Display};

use num_traits::Float;

/// Floating-point scalar used by the bound computations.
pub trait Real: Float + Debug + Display + 'static {
    /// Convert an `f64` constant into the scalar type.
    fn of(x: f64) -> Self {
        num_traits::NumCast::from(x).expect("constant representable in scalar type")
    }

    /// Widen to `f64` (used for reporting and fitting).
    fn into_f64(self) -> f64 {
        num_traits::NumCast::from(self).expect("scalar convertible to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}
