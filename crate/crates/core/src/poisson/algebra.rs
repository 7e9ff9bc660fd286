use super::transform::{e_op, window_sum};
use crate::error::{invalid, Result};
use crate::extfloat::{ext_sum, ExtFloat};
use crate::sequences::SequenceProvider;

/// Both sides of the product and scaling inequalities for E.
#[derive(Clone, Debug, PartialEq)]
pub struct EAlgebraReport {
    pub p: f64,
    pub r: f64,
    /// E_x(f(px)g(qx); r)
    pub product_lhs: f64,
    /// E(f; rp)·E(g; rq)
    pub product_rhs: f64,
    /// E_x(f(px); r)
    pub scaling_lhs: f64,
    /// E(f; rp)
    pub scaling_rhs: f64,
}

impl EAlgebraReport {
    /// Both inequalities hold up to relative slack `tol`.
    pub fn holds(&self, tol: f64) -> bool {
        self.product_lhs <= self.product_rhs * (1.0 + tol) && self.scaling_lhs <= self.scaling_rhs * (1.0 + tol)
    }
}

fn e_at(seq: &dyn SequenceProvider, r: f64) -> Result<f64> {
    if r == 0.0 {
        return Ok(seq.term_ext(0)?.abs().to_f64());
    }
    Ok(e_op(seq, 0, r)?.value)
}

/// Binomial(n, p) probabilities in extended range.
fn binomial_pmf(n: usize, p: f64) -> Vec<ExtFloat> {
    let q = 1.0 - p;
    let mut out = vec![ExtFloat::ZERO; n + 1];
    if p == 0.0 {
        out[0] = ExtFloat::ONE;
        return out;
    }
    if q == 0.0 {
        out[n] = ExtFloat::ONE;
        return out;
    }
    let ratio = ExtFloat::from_f64(p / q);
    let mut w = ExtFloat::from_f64(q).powi(n as i64);
    for (j, slot) in out.iter_mut().enumerate() {
        *slot = w;
        w = w * ratio * ExtFloat::from_f64((n - j) as f64 / (j + 1) as f64);
    }
    out
}

struct Cache<'a> {
    seq: &'a dyn SequenceProvider,
    values: Vec<ExtFloat>,
}

impl Cache<'_> {
    fn get(&mut self, m: usize) -> Result<ExtFloat> {
        while self.values.len() <= m {
            let v = self.seq.term_ext(self.values.len())?;
            self.values.push(v);
        }
        Ok(self.values[m])
    }
}

/// Checks E_x(f(px)g(qx); r) ≤ E(f; rp)·E(g; rq) and E_x(f(px); r) ≤ E(f; rp)
/// with q = 1 - p.
///
/// f(px)g(qx) is the Poisson transform of C_n = Σ_j C(n,j) A_j p^j B_{n-j} q^{n-j},
/// and f(px) that of the same sum with B ≡ 1.
pub fn e_algebra_check(f: &dyn SequenceProvider, g: &dyn SequenceProvider, p: f64, r: f64) -> Result<EAlgebraReport> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid("p must lie in [0,1]"));
    }
    if !(r > 0.0) {
        return Err(invalid("r must be positive"));
    }
    let q = 1.0 - p;
    let mut a = Cache { seq: f, values: Vec::new() };
    let mut b = Cache { seq: g, values: Vec::new() };
    let product = window_sum(r, |n| {
        let pmf = binomial_pmf(n, p);
        let mut terms = Vec::with_capacity(n + 1);
        for (j, w) in pmf.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            terms.push(*w * a.get(j)? * b.get(n - j)?);
        }
        Ok(ext_sum(&terms).abs())
    })?;
    let scaling = window_sum(r, |n| {
        let pmf = binomial_pmf(n, p);
        let mut terms = Vec::with_capacity(n + 1);
        for (j, w) in pmf.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            terms.push(*w * a.get(j)?);
        }
        Ok(ext_sum(&terms).abs())
    })?;
    let ef = e_at(f, r * p)?;
    let eg = e_at(g, r * q)?;
    Ok(EAlgebraReport {
        p,
        r,
        product_lhs: product.value.to_f64(),
        product_rhs: ef * eg,
        scaling_lhs: scaling.value.to_f64(),
        scaling_rhs: ef,
    })
}

/// Head and tail of the split E-bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitBound {
    /// Σ_{j=0}^{depth} 2^{-jN} g_bound(r/2^j)
    pub head: f64,
    /// Majorant for the terms j > depth.
    pub tail: f64,
}

impl SplitBound {
    pub fn total(&self) -> f64 {
        self.head + self.tail
    }
}

/// Σ_{j≥0} 2^{-jN} g_bound(r/2^j), the bound on E(f^{(N+1)}; r) obtained by
/// iterating f^{(N+1)}(x) = 2^{-N} f^{(N+1)}(x/2) + g^{(N+1)}(x).
///
/// Terms past `depth` are bounded by max(g_bound(0), g_bound(r/2^{depth+1}))
/// times the geometric sum of 2^{-jN}, which assumes `g_bound` is monotone on
/// [0, r/2^{depth+1}]. For N = 0 the series does not contract, so the tail is
/// infinite unless `g_bound` vanishes there.
pub fn e_bound_split_parts(g_bound: &dyn Fn(f64) -> f64, n: usize, r: f64, depth: usize) -> SplitBound {
    let decay = 2f64.powi(-(n as i32));
    let mut head = crate::extfloat::Compensated::new();
    let mut scale = 1.0;
    let mut u = r;
    for _ in 0..=depth {
        head.add(scale * g_bound(u));
        scale *= decay;
        u *= 0.5;
    }
    let edge = g_bound(0.0).abs().max(g_bound(u).abs());
    let tail = if edge == 0.0 {
        0.0
    } else if n == 0 {
        f64::INFINITY
    } else {
        edge * scale / (1.0 - decay)
    };
    SplitBound { head: head.value(), tail }
}

pub fn e_bound_split(g_bound: &dyn Fn(f64) -> f64, n: usize, r: f64, depth: usize) -> f64 {
    e_bound_split_parts(g_bound, n, r, depth).total()
}
