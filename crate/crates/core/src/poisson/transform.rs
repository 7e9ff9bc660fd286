use num_traits::{One, Zero};

use super::gamma::{ln_factorial, poisson_pmf};
use crate::error::{invalid, Error, Result};
use crate::extfloat::{ext_sum, ExtFloat};
use crate::sequences::{Coeff, SequenceProvider, DEGRADED_CONDITION};
use crate::Rational;

/// Hard cap on the number of summed terms.
pub const WINDOW_CAP: usize = 1_000_000;
/// Half-width of the initial window in standard deviations.
const WINDOW_K: f64 = 12.0;
const WINDOW_C: f64 = 30.0;
/// Edge terms below this fraction of the largest term stop the extension.
const EDGE_RATIO: f64 = 1e-18;

/// Value of a Poisson-weighted sum and how it was truncated.
#[derive(Clone, Debug, PartialEq)]
pub struct PoissonEvalReport {
    pub value: f64,
    /// The same value without the `f64` exponent limits.
    pub value_ext: ExtFloat,
    pub m_lo: usize,
    pub m_hi: usize,
    /// Estimate of the neglected terms outside [m_lo, m_hi].
    pub tail_bound: f64,
    /// Exact-arithmetic evaluation, when requested on an exact provider.
    pub exact: Option<Rational>,
    /// Largest cancellation factor met in floating differences.
    pub condition: f64,
    pub degraded: bool,
}

/// Terms w_m·a_m summed over an adaptive window.
pub(crate) struct WindowSum {
    pub value: ExtFloat,
    pub m_lo: usize,
    pub m_hi: usize,
    pub tail: ExtFloat,
}

/// e^{-r} Σ a_m r^m/m! for an arbitrary coefficient function.
///
/// Starts from [r - 12√r - 30, r + 12√r + 30] and keeps extending each end
/// while the edge term is at least 1e-18 of the largest term seen. Mass of
/// sequences like q^m or c^m sits near rq or rc, far outside the Poisson
/// bulk, and is picked up by this extension.
pub(crate) fn window_sum(r: f64, mut coeff: impl FnMut(usize) -> Result<ExtFloat>) -> Result<WindowSum> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(invalid("Poisson transforms need r > 0"));
    }
    let sd = r.sqrt();
    let lo0 = (r - WINDOW_K * sd - WINDOW_C).floor().max(0.0) as usize;
    let hi0 = (r + WINDOW_K * sd + WINDOW_C).ceil() as usize;
    let mode = (r.floor() as usize).clamp(lo0, hi0);

    // Ratio recurrence from the mode, normalized over the initial window;
    // the mass outside it is far below f64 resolution.
    let n0 = hi0 - lo0 + 1;
    if n0 > WINDOW_CAP {
        return Err(Error::WindowOverflow { r, cap: WINDOW_CAP });
    }
    let mut u = vec![ExtFloat::ZERO; n0];
    u[mode - lo0] = ExtFloat::ONE;
    for m in mode + 1..=hi0 {
        u[m - lo0] = u[m - 1 - lo0] * ExtFloat::from_f64(r / m as f64);
    }
    for m in (lo0..mode).rev() {
        u[m - lo0] = u[m + 1 - lo0] * ExtFloat::from_f64((m + 1) as f64 / r);
    }
    let total = ext_sum(&u);
    let w: Vec<ExtFloat> = u.iter().map(|&x| x / total).collect();

    let mut terms: Vec<ExtFloat> = Vec::with_capacity(n0);
    let mut biggest = ExtFloat::ZERO;
    for m in lo0..=hi0 {
        let t = w[m - lo0] * coeff(m)?;
        biggest = biggest.max_abs(t);
        terms.push(t);
    }
    let mut lo = lo0;
    let mut hi = hi0;
    let mut w_lo = w[0];
    let mut w_hi = w[n0 - 1];
    let mut low_terms: Vec<ExtFloat> = Vec::new();
    let threshold = |big: ExtFloat| big * ExtFloat::from_f64(EDGE_RATIO);

    let mut edge_lo = terms[0].abs();
    while lo > 0 && (edge_lo >= threshold(biggest) && !edge_lo.is_zero()) {
        w_lo *= ExtFloat::from_f64(lo as f64 / r);
        lo -= 1;
        let t = w_lo * coeff(lo)?;
        biggest = biggest.max_abs(t);
        edge_lo = t.abs();
        low_terms.push(t);
        if terms.len() + low_terms.len() > WINDOW_CAP {
            return Err(Error::WindowOverflow { r, cap: WINDOW_CAP });
        }
    }
    let mut edge_hi = terms[n0 - 1].abs();
    let mut prev_hi = if n0 > 1 { terms[n0 - 2].abs() } else { edge_hi };
    while edge_hi >= threshold(biggest) && !edge_hi.is_zero() {
        hi += 1;
        w_hi *= ExtFloat::from_f64(r / hi as f64);
        let t = w_hi * coeff(hi)?;
        biggest = biggest.max_abs(t);
        prev_hi = edge_hi;
        edge_hi = t.abs();
        terms.push(t);
        if terms.len() + low_terms.len() > WINDOW_CAP {
            return Err(Error::WindowOverflow { r, cap: WINDOW_CAP });
        }
    }
    // Geometric estimate of the remainder beyond the upper edge.
    let tail_hi = if prev_hi.is_zero() {
        ExtFloat::ZERO
    } else {
        let rho = (edge_hi / prev_hi).to_f64().min(0.5);
        edge_hi * ExtFloat::from_f64(rho / (1.0 - rho))
    };
    let tail_lo = if lo > 0 { edge_lo * ExtFloat::from_f64(lo as f64 / r) } else { ExtFloat::ZERO };
    terms.extend(low_terms);
    let value = ext_sum(&terms);
    Ok(WindowSum { value, m_lo: lo, m_hi: hi, tail: tail_hi + tail_lo })
}

fn report(sum: WindowSum, condition: f64) -> PoissonEvalReport {
    PoissonEvalReport {
        value: sum.value.to_f64(),
        value_ext: sum.value,
        m_lo: sum.m_lo,
        m_hi: sum.m_hi,
        tail_bound: sum.tail.to_f64(),
        exact: None,
        condition,
        degraded: condition > DEGRADED_CONDITION,
    }
}

fn transform(seq: &dyn SequenceProvider, k: usize, r: f64, absolute: bool) -> Result<PoissonEvalReport> {
    let mut condition = 1.0f64;
    let sum = window_sum(r, |m| {
        let d = seq.difference_ext(k, m)?;
        condition = condition.max(d.condition);
        Ok(if absolute { d.value.abs() } else { d.value })
    })?;
    Ok(report(sum, condition))
}

/// f^{(k)}(r) = e^{-r} Σ Δ^k A_m r^m/m!.
pub fn eval_poisson_transform(seq: &dyn SequenceProvider, k: usize, r: f64) -> Result<PoissonEvalReport> {
    transform(seq, k, r, false)
}

/// E(f^{(k)}; r) = e^{-r} Σ |Δ^k A_m| r^m/m!.
pub fn e_op(seq: &dyn SequenceProvider, k: usize, r: f64) -> Result<PoissonEvalReport> {
    transform(seq, k, r, true)
}

/// e^{-r} Σ a(m) r^m/m! for any coefficient function, e.g. φ(m).
pub fn poisson_average(r: f64, a: impl FnMut(usize) -> Result<ExtFloat>) -> Result<PoissonEvalReport> {
    Ok(report(window_sum(r, a)?, 1.0))
}

/// Like [`eval_poisson_transform`] at a rational point, additionally filling
/// `exact` with S/T, where S = Σ_{m≤M} Δ^k A_m r^m/m! and T = Σ_{j≤J} r^j/j!
/// are evaluated in exact arithmetic. T stands in for e^r and is truncated
/// below 1e-40 relative; M is the upper end of the floating window. Only
/// exact providers get the exact field.
pub fn eval_poisson_transform_exact(seq: &dyn SequenceProvider, k: usize, r: &Rational) -> Result<PoissonEvalReport> {
    let rf = crate::rational_to_f64(r);
    let mut rep = eval_poisson_transform(seq, k, rf)?;
    if !seq.exactness().is_exact() {
        return Ok(rep);
    }
    let mut s = Rational::zero();
    let mut pow = Rational::one();
    for m in 0..=rep.m_hi {
        match seq.difference(k, m)? {
            Coeff::Exact(d) => s += d * &pow,
            Coeff::Float(_) => return Ok(rep),
        }
        pow = pow * r / Rational::from_integer((m + 1).into());
    }
    let mut t = Rational::zero();
    let mut term = Rational::one();
    let mut j = 0usize;
    loop {
        t += &term;
        j += 1;
        term = term * r / Rational::from_integer(j.into());
        // r^j/j! relative to e^r
        let rel = j as f64 * rf.ln() - ln_factorial(j as u64) - rf;
        if j as f64 > rf && rel < -92.0 {
            break;
        }
    }
    rep.exact = Some(s / t);
    Ok(rep)
}

/// e^{-r} r^m / m! as a plain probability.
pub fn poisson_probability(m: usize, r: f64) -> f64 {
    poisson_pmf(m as u64, r).to_f64()
}
