//! Binary floating point with an `i64` exponent.
//!
//! Poisson weights and transforms at large `r` routinely leave the `f64`
//! exponent range (e^{-2048}, n!·e^R/R^n, ...). `ExtFloat` keeps an `f64`
//! mantissa in [0.5, 1) and a separate exponent, so products and quotients
//! never overflow and sums lose nothing beyond ordinary `f64` rounding.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::{BigInt, Sign};

use crate::scalar::bigint_top;
use crate::Rational;

const LN2_HI: f64 = 6.931_471_803_691_238e-1;
const LN2_LO: f64 = 1.908_214_929_270_587_7e-10;

#[derive(Clone, Copy, Debug)]
pub struct ExtFloat {
    mant: f64,
    exp: i64,
}

/// Splits a finite nonzero float into m·2^e with |m| in [0.5, 1).
fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    if biased == 0 {
        let (m, e) = frexp(x * 2f64.powi(64));
        return (m, e - 64);
    }
    let m = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1022u64 << 52));
    (m, biased - 1022)
}

pub(crate) fn ldexp_f64(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

/// (hi + lo)^n in double-double arithmetic, so the result keeps full f64
/// precision even for n in the millions.
pub(crate) fn pow_double_double(hi: f64, lo: f64, mut n: u64) -> ExtFloat {
    fn mul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
        let p = a.0 * b.0;
        let e = a.0.mul_add(b.0, -p) + (a.0 * b.1 + a.1 * b.0);
        let h = p + e;
        (h, e - (h - p))
    }
    fn norm(v: (f64, f64), exp: &mut i64) -> (f64, f64) {
        let (_, k) = frexp(v.0);
        *exp += k;
        (ldexp_f64(v.0, -k), ldexp_f64(v.1, -k))
    }
    if hi == 0.0 {
        return if n == 0 { ExtFloat::ONE } else { ExtFloat::ZERO };
    }
    let mut base_exp = 0i64;
    let mut base = norm((hi, lo), &mut base_exp);
    let mut acc_exp = 0i64;
    let mut acc = (1.0, 0.0);
    while n > 0 {
        if n & 1 == 1 {
            acc = norm(mul(acc, base), &mut acc_exp);
            acc_exp += base_exp;
        }
        n >>= 1;
        if n > 0 {
            base_exp *= 2;
            base = norm(mul(base, base), &mut base_exp);
        }
    }
    ExtFloat::from_f64(acc.0 + acc.1).ldexp(acc_exp)
}

impl ExtFloat {
    pub const ZERO: ExtFloat = ExtFloat { mant: 0.0, exp: 0 };
    pub const ONE: ExtFloat = ExtFloat { mant: 0.5, exp: 1 };

    fn norm(mant: f64, exp: i64) -> Self {
        if mant == 0.0 || !mant.is_finite() {
            return ExtFloat { mant, exp: 0 };
        }
        let (m, e) = frexp(mant);
        ExtFloat { mant: m, exp: exp + e }
    }

    pub fn from_f64(x: f64) -> Self {
        Self::norm(x, 0)
    }

    pub fn infinity() -> Self {
        ExtFloat { mant: f64::INFINITY, exp: 0 }
    }

    pub fn nan() -> Self {
        ExtFloat { mant: f64::NAN, exp: 0 }
    }

    /// e^l for any finite `l`, without overflow.
    pub fn exp(l: f64) -> Self {
        if l.is_nan() {
            return Self::nan();
        }
        if l == f64::INFINITY {
            return Self::infinity();
        }
        if l == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        let k = (l / std::f64::consts::LN_2).round();
        let rem = (l - k * LN2_HI) - k * LN2_LO;
        Self::norm(rem.exp(), k as i64)
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        let (m, e) = bigint_top(v);
        let r = Self::norm(m, e);
        if v.sign() == Sign::Minus {
            -r
        } else {
            r
        }
    }

    pub fn from_rational(q: &Rational) -> Self {
        if q.numer().sign() == Sign::NoSign {
            return Self::ZERO;
        }
        let (n, ns) = bigint_top(q.numer());
        let (d, ds) = bigint_top(q.denom());
        let r = Self::norm(n / d, ns - ds);
        if q.numer().sign() == Sign::Minus {
            -r
        } else {
            r
        }
    }

    /// Saturates to ±inf or 0 outside the `f64` range.
    pub fn to_f64(self) -> f64 {
        if self.mant == 0.0 || !self.mant.is_finite() {
            return self.mant;
        }
        if self.exp > 1100 {
            return self.mant.signum() * f64::INFINITY;
        }
        if self.exp < -1200 {
            return 0.0 * self.mant.signum();
        }
        ldexp_f64(self.mant, self.exp)
    }

    pub fn ldexp(self, e: i64) -> Self {
        if self.mant == 0.0 || !self.mant.is_finite() {
            return self;
        }
        ExtFloat { mant: self.mant, exp: self.exp + e }
    }

    pub fn is_zero(&self) -> bool {
        self.mant == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.mant.is_finite()
    }

    pub fn is_nan(&self) -> bool {
        self.mant.is_nan()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.mant < 0.0
    }

    /// -1, 0 or 1 (NaN for NaN).
    pub fn signum(&self) -> f64 {
        if self.mant == 0.0 {
            0.0
        } else {
            self.mant.signum()
        }
    }

    pub fn abs(self) -> Self {
        ExtFloat { mant: self.mant.abs(), exp: self.exp }
    }

    /// Natural log of the magnitude; -inf for zero.
    pub fn ln_abs(self) -> f64 {
        if self.mant == 0.0 {
            return f64::NEG_INFINITY;
        }
        self.mant.abs().ln() + self.exp as f64 * std::f64::consts::LN_2
    }

    pub fn log10_abs(self) -> f64 {
        self.ln_abs() / std::f64::consts::LN_10
    }

    pub fn sqrt(self) -> Self {
        if self.mant <= 0.0 || !self.mant.is_finite() {
            return Self::from_f64(self.mant.sqrt());
        }
        if self.exp % 2 == 0 {
            Self::norm(self.mant.sqrt(), self.exp / 2)
        } else {
            Self::norm((2.0 * self.mant).sqrt(), (self.exp - 1) / 2)
        }
    }

    pub fn recip(self) -> Self {
        Self::ONE / self
    }

    /// Integer power by repeated squaring.
    pub fn powi(self, n: i64) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        let mut base = if n < 0 { self.recip() } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            e >>= 1;
            if e > 0 {
                base *= base;
            }
        }
        acc
    }

    pub fn max_abs(self, other: Self) -> Self {
        if self.abs() >= other.abs() {
            self.abs()
        } else {
            other.abs()
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Binary exponent e with |x| = m·2^e, m in [0.5, 1). Zero maps to i64::MIN.
    pub fn exponent(&self) -> i64 {
        if self.mant == 0.0 {
            i64::MIN
        } else {
            self.exp
        }
    }

    /// Mantissa scaled by 2^(exp - base), as a plain f64.
    pub(crate) fn scaled_to(self, base: i64) -> f64 {
        if self.mant == 0.0 || !self.mant.is_finite() {
            return self.mant;
        }
        let d = self.exp - base;
        if d < -1200 {
            return 0.0;
        }
        ldexp_f64(self.mant, d)
    }
}

impl Default for ExtFloat {
    fn default() -> Self {
        Self::ZERO
    }
}

impl From<f64> for ExtFloat {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl Neg for ExtFloat {
    type Output = Self;
    fn neg(self) -> Self {
        ExtFloat { mant: -self.mant, exp: self.exp }
    }
}

impl Mul for ExtFloat {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::norm(self.mant * rhs.mant, self.exp + rhs.exp)
    }
}

impl Div for ExtFloat {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        Self::norm(self.mant / rhs.mant, self.exp - rhs.exp)
    }
}

impl Add for ExtFloat {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if !self.mant.is_finite() || !rhs.mant.is_finite() {
            return Self::from_f64(self.mant + rhs.mant);
        }
        if self.mant == 0.0 {
            return rhs;
        }
        if rhs.mant == 0.0 {
            return self;
        }
        let (big, small) = if self.exp >= rhs.exp { (self, rhs) } else { (rhs, self) };
        let d = small.exp - big.exp;
        if d < -60 {
            return big;
        }
        Self::norm(big.mant + ldexp_f64(small.mant, d), big.exp)
    }
}

impl Sub for ExtFloat {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul<f64> for ExtFloat {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self * Self::from_f64(rhs)
    }
}

impl Div<f64> for ExtFloat {
    type Output = Self;
    fn div(self, rhs: f64) -> Self {
        self / Self::from_f64(rhs)
    }
}

impl AddAssign for ExtFloat {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for ExtFloat {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl MulAssign for ExtFloat {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl Sum for ExtFloat {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

impl PartialEq for ExtFloat {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for ExtFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.is_nan() || other.is_nan() {
            return None;
        }
        if !self.is_finite() || !other.is_finite() {
            return self.mant.partial_cmp(&other.mant);
        }
        let sa = self.signum();
        let sb = other.signum();
        if sa != sb {
            return sa.partial_cmp(&sb);
        }
        if sa == 0.0 {
            return Some(Ordering::Equal);
        }
        let mag = match self.exp.cmp(&other.exp) {
            Ordering::Equal => self.mant.abs().partial_cmp(&other.mant.abs())?,
            o => o,
        };
        Some(if sa > 0.0 { mag } else { mag.reverse() })
    }
}

impl fmt::Display for ExtFloat {
    /// Scientific notation; values outside the `f64` range keep their
    /// decimal exponent instead of printing `inf` or `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_f64();
        if self.mant == 0.0 || !self.mant.is_finite() || (v.is_normal() && v.is_finite()) {
            return match f.precision() {
                Some(p) => write!(f, "{:.*e}", p, v),
                None => write!(f, "{:e}", v),
            };
        }
        let l = self.log10_abs();
        let mut k = l.floor();
        let mut m = 10f64.powf(l - k);
        if m >= 9.999_999_999_999_5 {
            m /= 10.0;
            k += 1.0;
        }
        let sign = if self.mant < 0.0 { "-" } else { "" };
        let p = f.precision().unwrap_or(12);
        write!(f, "{sign}{:.*}e{}", p, m, k as i64)
    }
}

/// Neumaier-compensated accumulator for `f64`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Accurate sum of `ExtFloat` terms: scales everything to the largest
/// exponent and runs a compensated `f64` sum.
pub fn ext_sum(terms: &[ExtFloat]) -> ExtFloat {
    let base = terms.iter().filter(|t| !t.is_zero() && t.is_finite()).map(|t| t.exp).max();
    if terms.iter().any(|t| !t.is_finite()) {
        return terms.iter().copied().sum();
    }
    let Some(base) = base else {
        return ExtFloat::ZERO;
    };
    let mut acc = Compensated::new();
    for t in terms {
        acc.add(t.scaled_to(base));
    }
    ExtFloat::norm(acc.value(), base)
}
