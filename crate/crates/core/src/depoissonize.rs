//! Recovering A_n from the Poisson transform f.
//!
//! The Charlier–Poisson partial sum
//!
//! ```text
//! A_n ≈ Σ_{m≤N} f^{(m)}(R)/m! · R^m C_m(R, n)
//! ```
//!
//! reduces to Σ f^{(m)}(n)/m! · τ_m(n) at R = n. Each partial sum comes with
//! a certified bound on |A_n - partial sum|:
//!
//! * at R = n: 17·n^{(N+1)/2}·E(f^{(N+1)}; n);
//! * at any R > 0: 6·n!e^R/R^n·E(f^{(N+1)}; R)·n^{N/2};
//! * for N = 0 and one-signed ΔA_m: 2√n|f'(n)| at R = n and
//!   n!e^R/R^n·|f'(R)| in general.

use std::fmt;

use num_bigint::BigInt;

use crate::error::{invalid, Error, Result};
use crate::extfloat::{ext_sum, ExtFloat};
use crate::poisson::{e_op, eval_poisson_transform, ln_factorial, poisson_cdf_split};
use crate::polyfam::{scaled_charlier_value, tau_at_integer};
use crate::sequences::{first_sign_change, SequenceProvider};
use crate::{rational_from_f64, Rational};

/// Which bound a certificate carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Theorem {
    GeneralR,
    AtN,
    MonotoneGeneralR,
    MonotoneAtN,
}

impl Theorem {
    pub fn tag(&self) -> &'static str {
        match self {
            Theorem::GeneralR => "general-R",
            Theorem::AtN => "at-n",
            Theorem::MonotoneGeneralR => "monotone-general-R",
            Theorem::MonotoneAtN => "monotone-at-n",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general-R" => Ok(Theorem::GeneralR),
            "at-n" => Ok(Theorem::AtN),
            "monotone-general-R" => Ok(Theorem::MonotoneGeneralR),
            "monotone-at-n" => Ok(Theorem::MonotoneAtN),
            _ => Err(invalid(format!("unknown theorem tag `{s}`"))),
        }
    }
}

/// One term f^{(m)}(R)/m! · R^m C_m(R, n) of the partial sum.
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub m: usize,
    /// f^{(m)}(R)
    pub derivative: ExtFloat,
    /// R^m C_m(R, n), which is τ_m(n) at R = n.
    pub poly_value: ExtFloat,
    pub term: ExtFloat,
}

/// A partial sum for A_n together with its certified error bound.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionCertificate {
    pub n: usize,
    pub order: usize,
    pub r: f64,
    pub partial_sum: ExtFloat,
    pub bound: ExtFloat,
    pub theorem: Theorem,
    pub components: Vec<Component>,
    /// A_n was read off the provider because n < 2; the bound is 0.
    pub direct: bool,
    /// Index range on which ΔA_m was checked to be one-signed.
    pub verified_range: Option<(usize, usize)>,
    /// Largest cancellation factor met while forming f^{(m)}(R).
    pub condition: f64,
}

impl ExpansionCertificate {
    /// |a_n - partial sum|
    pub fn error_against(&self, a_n: ExtFloat) -> ExtFloat {
        (a_n - self.partial_sum).abs()
    }

    /// Whether the bound covers the error against a known A_n.
    pub fn covers(&self, a_n: ExtFloat) -> bool {
        self.error_against(a_n) <= self.bound
    }
}

fn check_r(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(invalid("the expansion center R must be positive and finite"));
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(invalid("certified bounds need n >= 2"));
    }
    Ok(())
}

/// ln(n!·e^R/R^n)
pub(crate) fn ln_prefactor(n: usize, r: f64) -> f64 {
    ln_factorial(n as u64) + r - n as f64 * r.ln()
}

/// R^m C_m(R, n) exactly, as τ_m(n) when R = n.
fn poly_value(n: usize, m: usize, r: f64) -> ExtFloat {
    if r == n as f64 {
        return ExtFloat::from_bigint(&tau_at_integer(m, &BigInt::from(n)));
    }
    let rr = rational_from_f64(r).expect("finite R");
    let x = Rational::from_integer(n.into());
    ExtFloat::from_rational(&scaled_charlier_value(&rr, m, &x))
}

fn direct(
    seq: &dyn SequenceProvider,
    n: usize,
    order: usize,
    r: f64,
    theorem: Theorem,
) -> Result<ExpansionCertificate> {
    Ok(ExpansionCertificate {
        n,
        order,
        r,
        partial_sum: seq.term_ext(n)?,
        bound: ExtFloat::ZERO,
        theorem,
        components: Vec::new(),
        direct: true,
        verified_range: None,
        condition: 1.0,
    })
}

fn partial_sum(seq: &dyn SequenceProvider, n: usize, order: usize, r: f64) -> Result<(Vec<Component>, ExtFloat, f64)> {
    let mut components = Vec::with_capacity(order + 1);
    let mut condition = 1.0f64;
    let mut fact = ExtFloat::ONE;
    for m in 0..=order {
        if m > 0 {
            fact = fact * m as f64;
        }
        let rep = eval_poisson_transform(seq, m, r)?;
        condition = condition.max(rep.condition);
        let pv = poly_value(n, m, r);
        let term = rep.value_ext * pv / fact;
        components.push(Component { m, derivative: rep.value_ext, poly_value: pv, term });
    }
    let sum = ext_sum(&components.iter().map(|c| c.term).collect::<Vec<_>>());
    Ok((components, sum, condition))
}

/// Σ_{m≤N} f^{(m)}(R)/m! · R^m C_m(R, n) with the bound of the matching
/// theorem: the 17-form at R = n, the 6-form otherwise.
///
/// For n < 2 neither theorem applies and A_n is returned directly with a zero
/// bound.
pub fn charlier_poisson_sum(
    seq: &dyn SequenceProvider,
    n: usize,
    order: usize,
    r: f64,
) -> Result<ExpansionCertificate> {
    let theorem = if r == n as f64 { Theorem::AtN } else { Theorem::GeneralR };
    certify(seq, n, order, r, theorem)
}

/// Partial sum at center R with the bound of the requested theorem.
///
/// `AtN` and `MonotoneAtN` need R = n; the monotone forms only exist for
/// order 0.
pub fn certify(
    seq: &dyn SequenceProvider,
    n: usize,
    order: usize,
    r: f64,
    theorem: Theorem,
) -> Result<ExpansionCertificate> {
    check_r(r)?;
    let at_n = r == n as f64;
    if matches!(theorem, Theorem::AtN | Theorem::MonotoneAtN) && !at_n {
        return Err(invalid(format!("the {theorem} bound needs R = n")));
    }
    if matches!(theorem, Theorem::MonotoneAtN | Theorem::MonotoneGeneralR) {
        if order != 0 {
            return Err(invalid("monotone certificates have order 0"));
        }
        return monotone_certificate(seq, n, (theorem == Theorem::MonotoneGeneralR).then_some(r));
    }
    if n < 2 {
        return direct(seq, n, order, r, theorem);
    }
    let (components, sum, condition) = partial_sum(seq, n, order, r)?;
    let bound = match theorem {
        Theorem::AtN => error_bound_at_n(seq, n, order)?,
        _ => error_bound_general_r(seq, n, order, r)?,
    };
    Ok(ExpansionCertificate {
        n,
        order,
        r,
        partial_sum: sum,
        bound,
        theorem,
        components,
        direct: false,
        verified_range: None,
        condition,
    })
}

/// 6·n!·e^R/R^n·E(f^{(N+1)}; R)·n^{N/2}, with the prefactor in log space.
pub fn error_bound_general_r(seq: &dyn SequenceProvider, n: usize, order: usize, r: f64) -> Result<ExtFloat> {
    check_n(n)?;
    check_r(r)?;
    let e = e_op(seq, order + 1, r)?.value_ext;
    let scale = ExtFloat::exp(ln_prefactor(n, r) + 0.5 * order as f64 * (n as f64).ln());
    Ok(e * scale * 6.0)
}

/// 17·n^{(N+1)/2}·E(f^{(N+1)}; n).
pub fn error_bound_at_n(seq: &dyn SequenceProvider, n: usize, order: usize) -> Result<ExtFloat> {
    check_n(n)?;
    let e = e_op(seq, order + 1, n as f64)?.value_ext;
    let scale = ExtFloat::exp(0.5 * (order + 1) as f64 * (n as f64).ln());
    Ok(e * scale * 17.0)
}

/// The monotone bound together with the range on which ΔA_m was checked.
fn monotone_parts(seq: &dyn SequenceProvider, n: usize, r: Option<f64>) -> Result<(ExtFloat, (usize, usize))> {
    if n < 1 {
        return Err(invalid("the monotone bound needs n >= 1"));
    }
    let center = r.unwrap_or(n as f64);
    check_r(center)?;
    let rep = eval_poisson_transform(seq, 1, center)?;
    let upto = rep.m_hi.max(n);
    if let Some(at) = first_sign_change(seq, upto)? {
        return Err(Error::NotMonotone { checked: upto, at });
    }
    let d = rep.value_ext.abs();
    let bound = match r {
        None => d * (2.0 * (n as f64).sqrt()),
        Some(r) => d * ExtFloat::exp(ln_prefactor(n, r)),
    };
    Ok((bound, (0, upto)))
}

/// 2√n·|f'(n)| when R is omitted, n!·e^R/R^n·|f'(R)| otherwise. Refuses with
/// [`Error::NotMonotone`] unless ΔA_m keeps one sign on 0..=M, where M is
/// the top of the summation window used for f'(R).
pub fn monotone_bound(seq: &dyn SequenceProvider, n: usize, r: Option<f64>) -> Result<ExtFloat> {
    Ok(monotone_parts(seq, n, r)?.0)
}

/// f(R) as an approximation of A_n with the monotone bound.
pub fn monotone_certificate(seq: &dyn SequenceProvider, n: usize, r: Option<f64>) -> Result<ExpansionCertificate> {
    let center = r.unwrap_or(n as f64);
    check_r(center)?;
    let theorem = if r.is_none() { Theorem::MonotoneAtN } else { Theorem::MonotoneGeneralR };
    if n < 2 {
        return direct(seq, n, 0, center, theorem);
    }
    let (bound, range) = monotone_parts(seq, n, r)?;
    let (components, sum, condition) = partial_sum(seq, n, 0, center)?;
    Ok(ExpansionCertificate {
        n,
        order: 0,
        r: center,
        partial_sum: sum,
        bound,
        theorem,
        components,
        direct: false,
        verified_range: Some(range),
        condition,
    })
}

/// Residual of the first-order identity
///
/// ```text
/// A_n - f(R) = Σ_{m<n} ΔA_m/m!·Γ(m+1,R) - Σ_{m≥n} ΔA_m/m!·γ(m+1,R)
/// ```
///
/// with the second sum cut at M. The neglected part is estimated from the
/// first omitted term, assuming |ΔA_m| does not grow past M, and added to
/// the returned value.
pub fn first_order_identity_residual(seq: &dyn SequenceProvider, n: usize, r: f64, m_max: usize) -> Result<f64> {
    check_r(r)?;
    if m_max < n {
        return Err(invalid("the truncation point M must be at least n"));
    }
    let mut terms = vec![seq.term_ext(n)?, -eval_poisson_transform(seq, 0, r)?.value_ext];
    for m in 0..=m_max {
        let d = seq.difference_ext(1, m)?.value;
        let (le, gt) = poisson_cdf_split(m as u64, r);
        // Γ(m+1,R)/m! = P(X ≤ m) and γ(m+1,R)/m! = P(X > m)
        if m < n {
            terms.push(-(d * le));
        } else {
            terms.push(d * gt);
        }
    }
    let residual = ext_sum(&terms).abs().to_f64();
    let next = seq.difference_ext(1, m_max + 1)?.value.abs();
    let (_, gt) = poisson_cdf_split(m_max as u64 + 1, r);
    let ratio = r / (m_max + 2) as f64;
    let tail = if ratio < 1.0 { (next * gt).to_f64() / (1.0 - ratio) } else { f64::INFINITY };
    Ok(residual + tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{constant_sequence, geometric_mixture, trie_expectation};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn constant_is_reproduced() {
        let c = constant_sequence(q(5, 3));
        for order in 0..4 {
            let cert = charlier_poisson_sum(&c, 12, order, 12.0).unwrap();
            assert!(((cert.partial_sum.to_f64() * 3.0) - 5.0).abs() < 1e-14);
            assert!(cert.bound.is_zero());
        }
        assert!(error_bound_general_r(&c, 12, 2, 7.0).unwrap().is_zero());
        assert!(monotone_bound(&c, 9, None).unwrap().is_zero());
    }

    #[test]
    fn geometric_bound_at_n() {
        let g = geometric_mixture(&[(q(1, 1), q(1, 2))]).unwrap();
        let b = error_bound_at_n(&g, 10, 0).unwrap().to_f64();
        let want = 17.0 * 10f64.sqrt() * 0.5 * (-5.0f64).exp();
        assert!((b / want - 1.0).abs() < 1e-12);
        let exact = ExtFloat::from_f64(2f64.powi(-10));
        for order in 0..4 {
            assert!(charlier_poisson_sum(&g, 10, order, 10.0).unwrap().covers(exact));
            assert!(charlier_poisson_sum(&g, 10, order, 8.0).unwrap().covers(exact));
        }
        let m = monotone_bound(&g, 10, None).unwrap().to_f64();
        assert!((m / (2.0 * 10f64.sqrt() * 0.5 * (-5.0f64).exp()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_n_is_direct() {
        let g = geometric_mixture(&[(q(1, 1), q(1, 3))]).unwrap();
        let cert = charlier_poisson_sum(&g, 1, 3, 4.0).unwrap();
        assert!(cert.direct && cert.bound.is_zero());
        assert!((cert.partial_sum.to_f64() - 1.0 / 3.0).abs() < 1e-16);
        assert!(error_bound_at_n(&g, 1, 0).is_err());
    }

    #[test]
    fn first_order_identity() {
        let g = geometric_mixture(&[(q(1, 1), q(1, 2))]).unwrap();
        assert!(first_order_identity_residual(&g, 5, 3.0, 200).unwrap() < 1e-9);
        let t = trie_expectation(300).unwrap();
        assert!(first_order_identity_residual(&t, 8, 8.0, 256).unwrap() < 1e-9);
        assert!(first_order_identity_residual(&constant_sequence(q(2, 1)), 4, 2.0, 10).unwrap() < 1e-15);
    }

    #[test]
    fn trie_is_monotone() {
        let t = trie_expectation(400).unwrap();
        let cert = monotone_certificate(&t, 100, None).unwrap();
        let want = 20.0 * crate::sequences::trie_h_derivative(1, 100.0).abs();
        assert!((cert.bound.to_f64() / want - 1.0).abs() < 1e-9);
        assert!(cert.verified_range.unwrap().1 >= 100);
    }
}
