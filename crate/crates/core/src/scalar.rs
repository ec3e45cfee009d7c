//! Scalar abstraction shared by every module.
//!
//! All routines are written once against [`Real`] and instantiated for `f64`
//! (the production precision) and `f32` (for cheap smoke runs).

use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;

/// Real floating-point scalar.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + FftNum
    + Default
    + Send
    + Sync
    + Debug
    + Display
    + LowerExp
    + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts an index or count.
    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex scalar over `T`.
pub type Cx<T> = Complex<T>;

#[inline]
pub(crate) fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn real<T: Real>(re: T) -> Cx<T> {
    Complex::new(re, T::zero())
}

/// `-log(1 - t) / t`, continuously extended by `1` at `t = 0`.
///
/// This is the exact norm of `C_t` on bounded analytic functions and the
/// universal upper bound on every weighted space.
pub fn log_ratio<T: Real>(t: T) -> T {
    if t == T::zero() {
        T::one()
    } else {
        -(-t).ln_1p() / t
    }
}
