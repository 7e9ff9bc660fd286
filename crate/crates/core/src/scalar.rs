//! Scalar abstractions shared by the exact and floating code paths.
//!
//! [`Scalar`] covers every field the polynomial families are evaluated in
//! (`f32`, `f64` and [`Rational`]); [`Real`] narrows it to the IEEE floats
//! for the analytic pieces that need `exp`, `ln` and friends.

use std::fmt::Debug;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

use crate::Rational;

/// A field element the polynomial machinery can be evaluated in.
pub trait Scalar: Num + Signed + Clone + PartialOrd + Debug + Send + Sync + 'static {
    /// Nearest representable value of an exact rational.
    fn from_rational(q: &Rational) -> Self;

    fn as_f64(&self) -> f64;

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(v)))
    }

    fn from_bigint(v: &BigInt) -> Self {
        Self::from_rational(&Rational::from_integer(v.clone()))
    }
}

impl Scalar for f64 {
    fn from_rational(q: &Rational) -> Self {
        rational_to_f64(q)
    }
    fn as_f64(&self) -> f64 {
        *self
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

impl Scalar for f32 {
    fn from_rational(q: &Rational) -> Self {
        rational_to_f64(q) as f32
    }
    fn as_f64(&self) -> f64 {
        f64::from(*self)
    }
    fn from_i64(v: i64) -> Self {
        v as f32
    }
}

impl Scalar for BigRational {
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn as_f64(&self) -> f64 {
        rational_to_f64(self)
    }
}

/// IEEE float scalar: `f32` or `f64`.
pub trait Real: Scalar + Float + FromPrimitive + Copy {
    /// Lossy conversion from an `f64` literal or intermediate.
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).unwrap_or_else(Self::nan)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Top 64 significant bits of |v| as an f64 together with the binary exponent
/// that restores the magnitude: |v| ≈ mant · 2^shift.
pub(crate) fn bigint_top(v: &BigInt) -> (f64, i64) {
    let bits = v.bits();
    if bits <= 64 {
        return (v.magnitude().to_u64().unwrap_or(0) as f64, 0);
    }
    let shift = bits - 64;
    let top = (v.magnitude() >> shift).to_u64().unwrap_or(u64::MAX);
    (top as f64, shift as i64)
}

/// Correctly signed, faithfully rounded conversion that never overflows on
/// the intermediate numerator and denominator.
pub fn rational_to_f64(q: &Rational) -> f64 {
    if q.numer().is_zero() {
        return 0.0;
    }
    let (n, ns) = bigint_top(q.numer());
    let (d, ds) = bigint_top(q.denom());
    let mag = crate::ExtFloat::from_f64(n / d).ldexp(ns - ds).to_f64();
    if q.numer().sign() == Sign::Minus {
        -mag
    } else {
        mag
    }
}

/// Exact rational value of a finite float.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    BigRational::from_float(x)
}

/// Parses `p/q`, an integer, or a terminating decimal such as `2.5` into an
/// exact rational. Exponent notation is rejected here; callers treat it as a
/// floating literal instead.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    if s.contains(['e', 'E']) {
        return None;
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if !int_digits.chars().all(|c| c.is_ascii_digit())
            || !frac.chars().all(|c| c.is_ascii_digit())
            || (int_digits.is_empty() && frac.is_empty())
        {
            return None;
        }
        let digits = format!("{int_digits}{frac}");
        let mut numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
        if neg {
            numer = -numer;
        }
        let denom = num_traits::pow(BigInt::from(10u32), frac.len());
        return Some(Rational::new(numer, denom));
    }
    let v: BigInt = s.parse().ok()?;
    Some(Rational::from_integer(v))
}

pub(crate) fn rational_pow(q: &Rational, e: usize) -> Rational {
    if e == 0 {
        return Rational::one();
    }
    Rational::new_raw(num_traits::pow(q.numer().clone(), e), num_traits::pow(q.denom().clone(), e))
}
