//! Scalar abstraction shared by every numerical kernel in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point type the simulator can run on (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Panics only if the target type cannot
    /// represent finite `f64` values at all, which never happens for f32/f64.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Converts a count or index.
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("index fits in float")
    }

    /// A tolerance no tighter than what this precision can resolve.
    ///
    /// For `f64` the requested tolerance is returned unchanged for anything
    /// above ~1e-14; for `f32` it is clamped to `64 * EPSILON`.
    fn tol(x: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(64.0);
        Self::lit(x).max(floor)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex amplitude over a [`Real`] scalar.
pub type Amp<T> = Complex<T>;

pub(crate) fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

pub(crate) fn cre<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// `-i * x` for real `x`.
pub(crate) fn minus_i<T: Real>(x: T) -> Complex<T> {
    Complex::new(T::zero(), -x)
}

/// Sum of squared moduli in index order.
pub(crate) fn norm_sqr_sum<'a, T: Real, I>(it: I) -> T
where
    I: IntoIterator<Item = &'a Complex<T>>,
{
    it.into_iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
}
