//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar the kernels are written against (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Panics only if the conversion is impossible,
    /// which cannot happen for the implementing float types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// sin(πx) with argument reduction so exact zeros land on the integers.
pub fn sin_pi<T: Real>(x: T) -> T {
    let k = x.round();
    let r = x - k;
    let s = (T::PI() * r).sin();
    if is_odd(k) {
        -s
    } else {
        s
    }
}

/// cos(πx) with argument reduction; exact zeros at the half-integers.
pub fn cos_pi<T: Real>(x: T) -> T {
    let k = x.round();
    let r = x - k;
    let half = T::lit(0.5);
    let c = if r.abs() == half {
        T::zero()
    } else {
        (T::PI() * r).cos()
    };
    if is_odd(k) {
        -c
    } else {
        c
    }
}

fn is_odd<T: Real>(k: T) -> bool {
    let two = T::lit(2.0);
    (k - two * (k / two).floor()) != T::zero()
}

/// Distance from `x` to the nearest integer, together with that integer.
pub fn nearest_integer<T: Real>(x: T) -> (T, T) {
    let k = x.round();
    (k, (x - k).abs())
}

/// True when `x` is a nonpositive integer (0, -1, -2, ...).
pub fn is_nonpositive_integer<T: Real>(x: T) -> bool {
    x <= T::zero() && x == x.round()
}

/// (-1)^n as a scalar.
#[inline]
pub fn sign_pow<T: Real>(n: usize) -> T {
    if n.is_multiple_of(2) {
        T::one()
    } else {
        -T::one()
    }
}
