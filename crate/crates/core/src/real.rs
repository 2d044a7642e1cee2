//! Scalar abstraction shared by every pricer in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar the valuation code is generic over (`f32` or `f64`).
///
/// All tolerances quoted in the documentation assume `f64`; `f32` is supported
/// for throughput-oriented work where ~1e-6 relative accuracy is enough.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + FromStr
    + Default
    + Debug
    + Display
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into the scalar type.
    fn lit(v: f64) -> Self;

    /// Widens (or keeps) the value as `f64`, for diagnostics and error reports.
    fn as_f64(self) -> f64;

    fn from_count(n: usize) -> Self {
        Self::lit(n as f64)
    }

    /// Positive part `max(x, 0)`.
    fn pos(self) -> Self {
        self.max(Self::zero())
    }

    /// Negative part `min(x, 0)`.
    fn neg_part(self) -> Self {
        self.min(Self::zero())
    }
}

impl Real for f32 {
    #[inline]
    fn lit(v: f64) -> Self {
        v as f32
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    #[inline]
    fn lit(v: f64) -> Self {
        v
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}
