use std::sync::{Arc, LazyLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Coeff, DiffValue, Exactness, SequenceProvider};
use crate::error::{invalid, Error, Result};
use crate::extfloat::ExtFloat;
use crate::polyfam::binomial_row;
use crate::Rational;

/// Fraction bits of the fixed-point table.
const FRAC_BITS: u64 = 320;
/// Largest index for which exact rationals are kept.
const EXACT_LIMIT: usize = 256;

#[derive(Debug)]
struct TrieTable {
    // ES_n for n ≤ min(max_n, EXACT_LIMIT)
    exact: Vec<Rational>,
    // ΔES_n = ES_{n+1} - ES_n over the same range
    exact_delta: Vec<Rational>,
    // round(ES_n · 2^FRAC_BITS)
    fixed: Vec<BigInt>,
}

impl TrieTable {
    fn build(max_n: usize) -> Self {
        let (exact, exact_delta) = exact_table(max_n.min(EXACT_LIMIT));
        TrieTable { exact, exact_delta, fixed: fixed_table(max_n) }
    }

    fn max_n(&self) -> usize {
        self.fixed.len() - 1
    }
}

// With L_n = Π_{i=2}^{n} (2^i - 1), every ΔES_j·L_{n-1} (j < n) is an integer,
// so the recurrence runs on integers scaled by the running denominator.
fn exact_table(max_n: usize) -> (Vec<Rational>, Vec<Rational>) {
    let mut scaled: Vec<BigInt> = vec![BigInt::zero()];
    let mut denom = BigInt::one();
    let mut es = vec![Rational::zero()];
    for n in 1..=max_n {
        let total: BigInt = scaled.iter().sum();
        es.push(Rational::new(total, denom.clone()));
        if n == max_n {
            break;
        }
        let binom = binomial_row(n);
        let mut x: BigInt = scaled.iter().zip(&binom).map(|(s, c)| s * c).sum();
        if n == 1 {
            x += &denom * 2u32;
        }
        let factor = (BigInt::one() << n) - 1u32;
        for s in scaled.iter_mut() {
            *s *= &factor;
        }
        scaled.push(x);
        denom *= factor;
    }
    es.truncate(max_n + 1);
    let deltas = scaled.into_iter().take(max_n).map(|s| Rational::new(s, denom.clone())).collect();
    (es, deltas)
}

fn fixed_table(max_n: usize) -> Vec<BigInt> {
    let one = BigInt::one() << FRAC_BITS;
    let mut delta: Vec<BigInt> = vec![BigInt::zero()];
    let mut es = vec![BigInt::zero()];
    let mut row = vec![BigInt::one()];
    for n in 1..=max_n {
        let next_es = &es[n - 1] + &delta[n - 1];
        es.push(next_es);
        if n == max_n {
            break;
        }
        // row becomes C(n, ·)
        row.push(BigInt::one());
        for j in (1..n).rev() {
            let prev = row[j - 1].clone();
            row[j] += prev;
        }
        let mut x: BigInt = delta.iter().zip(&row).map(|(d, c)| d * c).sum();
        if n == 1 {
            x += &one * 2u32;
        }
        let den = (BigInt::one() << n) - 1u32;
        let q = (&x * 2u32 + &den) / (&den * 2u32);
        delta.push(q);
    }
    es
}

static CACHE: LazyLock<RwLock<Option<Arc<TrieTable>>>> = LazyLock::new(|| RwLock::new(None));

fn table(max_n: usize) -> Arc<TrieTable> {
    if let Some(t) = CACHE.read().unwrap_or_else(|e| e.into_inner()).as_ref() {
        if t.max_n() >= max_n {
            return Arc::clone(t);
        }
    }
    let mut slot = CACHE.write().unwrap_or_else(|e| e.into_inner());
    if let Some(t) = slot.as_ref() {
        if t.max_n() >= max_n {
            return Arc::clone(t);
        }
    }
    let size = slot.as_ref().map_or(max_n, |t| max_n.max(t.max_n() + t.max_n() / 2));
    let t = Arc::new(TrieTable::build(size.max(64)));
    *slot = Some(Arc::clone(&t));
    t
}

/// Expected external path length of a symmetric trie on n keys.
///
/// ES_n is exact for n ≤ 256 and a 320-bit fixed-point value beyond; the
/// provider reports `Dyadic` exactness when it hands out the latter.
#[derive(Clone, Debug)]
pub struct TrieExpectation {
    max_n: usize,
    table: Arc<TrieTable>,
}

pub fn trie_expectation(max_n: usize) -> Result<TrieExpectation> {
    if max_n < 1 {
        return Err(invalid("trie_expectation needs max_n >= 1"));
    }
    Ok(TrieExpectation { max_n, table: table(max_n) })
}

impl TrieExpectation {
    pub fn max_n(&self) -> usize {
        self.max_n
    }

    fn check(&self, m: usize) -> Result<()> {
        if m > self.max_n {
            return Err(Error::OutOfRange { index: m, start: 0, end: self.max_n + 1 });
        }
        Ok(())
    }

    fn exact_upto(&self) -> usize {
        self.table.exact.len() - 1
    }

    /// Exact ES_n, when n is inside the exact part of the table.
    pub fn exact_value(&self, n: usize) -> Option<Rational> {
        if n > self.max_n {
            return None;
        }
        self.table.exact.get(n).cloned()
    }

    fn fixed_difference(&self, k: usize, m: usize) -> Result<DiffValue> {
        self.check(m + k)?;
        let binom = binomial_row(k);
        let mut acc = BigInt::zero();
        for (i, c) in binom.iter().enumerate() {
            let t = c * &self.table.fixed[m + i];
            if (k - i) % 2 == 1 {
                acc -= t;
            } else {
                acc += t;
            }
        }
        // Integer arithmetic: the only error is the table's own rounding.
        let value = ExtFloat::from_bigint(&acc).ldexp(-(FRAC_BITS as i64));
        Ok(DiffValue::exact(value))
    }
}

impl SequenceProvider for TrieExpectation {
    fn kind(&self) -> &str {
        "trie"
    }

    fn exactness(&self) -> Exactness {
        if self.max_n <= self.exact_upto() {
            Exactness::Exact
        } else {
            let n = self.max_n as f64;
            Exactness::Dyadic { abs_error: n * n * 2f64.powi(-(FRAC_BITS as i32) - 1) }
        }
    }

    fn available(&self) -> Option<usize> {
        Some(self.max_n + 1)
    }

    fn term(&self, m: usize) -> Result<Coeff> {
        self.check(m)?;
        Ok(match self.table.exact.get(m) {
            Some(q) => Coeff::Exact(q.clone()),
            None => Coeff::Float(self.term_ext(m)?.to_f64()),
        })
    }

    fn term_ext(&self, m: usize) -> Result<ExtFloat> {
        self.check(m)?;
        Ok(ExtFloat::from_bigint(&self.table.fixed[m]).ldexp(-(FRAC_BITS as i64)))
    }

    fn difference(&self, k: usize, m: usize) -> Result<Coeff> {
        self.check(m + k)?;
        if m + k <= self.exact_upto() {
            if k == 1 {
                return Ok(Coeff::Exact(self.table.exact_delta[m].clone()));
            }
            return super::alternating_difference(self, k, m);
        }
        Ok(Coeff::Float(self.fixed_difference(k, m)?.value.to_f64()))
    }

    fn difference_ext(&self, k: usize, m: usize) -> Result<DiffValue> {
        self.fixed_difference(k, m)
    }

    fn closed_transform(&self, k: usize, r: f64) -> Option<ExtFloat> {
        (r > 0.0).then(|| ExtFloat::from_f64(trie_h_derivative(k, r)))
    }
}

/// g(u) = 1 - e^{-u}(1+u), the Poisson transform of [m ≥ 2].
pub fn trie_g(u: f64) -> f64 {
    if u.abs() < 0.5 {
        // Σ_{k≥2} (-1)^k (k-1) u^k / k!
        let mut term = u * u / 2.0;
        let mut sum = 0.0;
        for k in 2..40 {
            let t = (k - 1) as f64 * term;
            sum += t;
            if t.abs() < 1e-18 * sum.abs() {
                break;
            }
            term *= -u / (k + 1) as f64;
        }
        sum
    } else {
        -(-u).exp_m1() - u * (-u).exp()
    }
}

/// g^{(k)}(u); for k ≥ 1 this is (-1)^{k+1} e^{-u}(u - k + 1).
pub fn trie_g_derivative(k: usize, u: f64) -> f64 {
    if k == 0 {
        return trie_g(u);
    }
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    sign * (-u).exp() * (u - k as f64 + 1.0)
}

/// h(r) = Σ_{j≥0} 2^j g(r/2^j), the solution of h(r) = 2h(r/2) + g(r).
pub fn trie_h(r: f64) -> f64 {
    trie_h_derivative(0, r)
}

/// h^{(k)}(r) = Σ_{j≥0} 2^{j(1-k)} g^{(k)}(r/2^j), differentiated termwise.
pub fn trie_h_derivative(k: usize, r: f64) -> f64 {
    let mut sum = crate::extfloat::Compensated::new();
    let mut scale = 1.0f64;
    let step = 2f64.powi(1 - k as i32);
    let mut u = r;
    for _ in 0..4000 {
        let t = scale * trie_g_derivative(k, u);
        sum.add(t);
        // g^{(k)} vanishes at u = k - 1, so only stop once u is below every such zero
        if u < 0.5 && t.abs() <= 1e-18 * sum.value().abs() {
            break;
        }
        scale *= step;
        u *= 0.5;
        if scale == 0.0 {
            break;
        }
    }
    sum.value()
}
