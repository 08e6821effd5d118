//! Scalar abstraction for the numeric core.
//!
//! All matrix and decomposition code is generic over [`Scalar`], which is
//! satisfied by `f32` and `f64`. The pipeline runs everything in `f64`
//! (see the crate-root aliases); `f32` instantiations exist for embedding
//! storage and for callers that accept the precision trade-off.

use num_traits::{Float, FromPrimitive, NumAssignOps};

pub trait Scalar:
    Float + FromPrimitive + NumAssignOps + std::iter::Sum + std::fmt::Debug + std::fmt::Display + Default + 'static
{
    /// Converts from `f64`, rounding to the nearest representable value.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 conversion")
    }

    /// Widens to `f64`.
    fn widen(self) -> f64 {
        self.to_f64().expect("f64 conversion")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
