//! Coefficient sequences A_m with exactness metadata.
//!
//! A [`SequenceProvider`] hands out A_m, its forward differences Δ^k A_m and,
//! when known, a real-argument extension φ and the closed-form Poisson
//! transform. Exact providers answer in [`Rational`]; everything else is `f64`
//! or [`ExtFloat`] with a condition number for the cancellation in Δ^k.

mod file;
mod mixture;
mod trie;

use std::fmt::Debug;

use num_traits::{Signed, Zero};

pub use file::{load_sequence, parse_sequence, FiniteSequence};
pub use mixture::{constant_sequence, exp_mixture, geometric_mixture, signed_mixture, GeometricMixture};
pub use trie::{trie_expectation, trie_g, trie_g_derivative, trie_h, trie_h_derivative, TrieExpectation};

use crate::error::Result;
use crate::extfloat::{Compensated, ExtFloat};
use crate::polyfam::binomial_row;
use crate::Rational;

/// One coefficient value.
#[derive(Clone, Debug, PartialEq)]
pub enum Coeff {
    Exact(Rational),
    Float(f64),
}

impl Coeff {
    pub fn to_f64(&self) -> f64 {
        match self {
            Coeff::Exact(q) => crate::rational_to_f64(q),
            Coeff::Float(x) => *x,
        }
    }

    pub fn to_ext(&self) -> ExtFloat {
        match self {
            Coeff::Exact(q) => ExtFloat::from_rational(q),
            Coeff::Float(x) => ExtFloat::from_f64(*x),
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Coeff::Exact(q) => Some(q),
            Coeff::Float(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coeff::Exact(_))
    }
}

/// How far the values handed out by a provider can be trusted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exactness {
    /// Every A_m is an exact rational.
    Exact,
    /// Fixed-point values with a uniform absolute error bound.
    Dyadic { abs_error: f64 },
    /// Ordinary floating point.
    Floating,
}

impl Exactness {
    pub fn is_exact(&self) -> bool {
        matches!(self, Exactness::Exact)
    }
}

/// Δ^k value plus Σ C(k,i)|A_{m+i}| / |Δ^k A_m|; 1 means no cancellation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiffValue {
    pub value: ExtFloat,
    pub condition: f64,
}

impl DiffValue {
    pub fn exact(value: ExtFloat) -> Self {
        DiffValue { value, condition: 1.0 }
    }
}

/// Condition numbers above this mark a floating difference as degraded.
pub const DEGRADED_CONDITION: f64 = 1e8;

pub trait SequenceProvider: Send + Sync + Debug {
    /// Short tag such as `geometric-mixture` or `trie`.
    fn kind(&self) -> &str;

    fn exactness(&self) -> Exactness;

    /// One past the last available index, for finite providers.
    fn available(&self) -> Option<usize> {
        None
    }

    fn term(&self, m: usize) -> Result<Coeff>;

    fn term_ext(&self, m: usize) -> Result<ExtFloat> {
        Ok(self.term(m)?.to_ext())
    }

    /// Δ^k A_m = Σ_i (-1)^{k-i} C(k,i) A_{m+i}; exact when every term is.
    fn difference(&self, k: usize, m: usize) -> Result<Coeff> {
        alternating_difference(self, k, m)
    }

    fn difference_ext(&self, k: usize, m: usize) -> Result<DiffValue> {
        match self.difference(k, m)? {
            Coeff::Exact(q) => Ok(DiffValue::exact(ExtFloat::from_rational(&q))),
            Coeff::Float(_) => float_difference(self, k, m),
        }
    }

    fn extension(&self) -> Option<&dyn RealExtension> {
        None
    }

    /// f^{(k)}(r) in closed form, when known.
    fn closed_transform(&self, _k: usize, _r: f64) -> Option<ExtFloat> {
        None
    }
}

/// Real-argument extension φ with φ(m) = A_m.
pub trait RealExtension: Send + Sync + Debug {
    fn phi(&self, x: f64) -> ExtFloat;

    /// Δ^s φ(x) by the alternating binomial sum over φ(x), ..., φ(x+s).
    fn phi_difference(&self, s: usize, x: f64) -> DiffValue {
        let binom = binomial_row(s);
        let terms: Vec<ExtFloat> = (0..=s)
            .map(|i| {
                let v = self.phi(x + i as f64) * ExtFloat::from_bigint(&binom[i]);
                if (s - i) % 2 == 1 {
                    -v
                } else {
                    v
                }
            })
            .collect();
        with_condition(&terms)
    }

    /// φ^{(j)}(x), when the extension is smooth and the derivative is known.
    fn phi_derivative(&self, _j: usize, _x: f64) -> Option<ExtFloat> {
        None
    }

    /// e^{-r} Σ φ(m) r^m/m! in closed form, when known.
    fn poisson_average(&self, _r: f64) -> Option<ExtFloat> {
        None
    }
}

pub(crate) fn with_condition(terms: &[ExtFloat]) -> DiffValue {
    let value = crate::extfloat::ext_sum(terms);
    let mass = crate::extfloat::ext_sum(&terms.iter().map(|t| t.abs()).collect::<Vec<_>>());
    let condition = if mass.is_zero() {
        1.0
    } else if value.is_zero() {
        f64::INFINITY
    } else {
        (mass / value.abs()).to_f64()
    };
    DiffValue { value, condition }
}

/// Alternating binomial sum over the provider's terms.
pub fn alternating_difference<S: SequenceProvider + ?Sized>(seq: &S, k: usize, m: usize) -> Result<Coeff> {
    let binom = binomial_row(k);
    let terms = (0..=k).map(|i| seq.term(m + i)).collect::<Result<Vec<_>>>()?;
    if terms.iter().all(Coeff::is_exact) {
        let mut acc = Rational::zero();
        for (i, t) in terms.iter().enumerate() {
            let c = Rational::from_integer(binom[i].clone()) * t.as_exact().expect("checked exact");
            if (k - i) % 2 == 1 {
                acc -= c;
            } else {
                acc += c;
            }
        }
        return Ok(Coeff::Exact(acc));
    }
    let mut acc = Compensated::new();
    for (i, t) in terms.iter().enumerate() {
        let c = ExtFloat::from_bigint(&binom[i]).to_f64() * t.to_f64();
        acc.add(if (k - i) % 2 == 1 { -c } else { c });
    }
    Ok(Coeff::Float(acc.value()))
}

fn float_difference<S: SequenceProvider + ?Sized>(seq: &S, k: usize, m: usize) -> Result<DiffValue> {
    let binom = binomial_row(k);
    let terms = (0..=k)
        .map(|i| {
            let v = seq.term_ext(m + i)? * ExtFloat::from_bigint(&binom[i]);
            Ok(if (k - i) % 2 == 1 { -v } else { v })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(with_condition(&terms))
}

/// Δ^k A_m of any provider.
pub fn finite_difference(seq: &dyn SequenceProvider, k: usize, m: usize) -> Result<Coeff> {
    seq.difference(k, m)
}

/// Checks that ΔA_m keeps one sign for m in 0..=upto. Returns the first index
/// where the sign flips.
pub fn first_sign_change(seq: &dyn SequenceProvider, upto: usize) -> Result<Option<usize>> {
    let mut sign = 0.0;
    for m in 0..=upto {
        let d = match seq.difference(1, m)? {
            Coeff::Exact(q) => {
                if q.is_zero() {
                    0.0
                } else if q.is_negative() {
                    -1.0
                } else {
                    1.0
                }
            }
            Coeff::Float(x) => {
                if x == 0.0 {
                    0.0
                } else {
                    x.signum()
                }
            }
        };
        if d != 0.0 {
            if sign != 0.0 && d != sign {
                return Ok(Some(m));
            }
            sign = d;
        }
    }
    Ok(None)
}
