//! The inverse direction: f(R) from the coefficients.
//!
//! * integer center: f(n) ≈ Σ_{m≤N} Δ^m A_n/m! · τ_m(-n);
//! * real center: f(R) ≈ Σ_{m≤N} Δ^m A_n/m! · (-R)^m C_m(-R,-n);
//! * for a real extension φ of A: e^{-R} Σ φ(m) R^m/m! is approximated by
//!   Σ_{s≤N} Δ^s φ(R)/s! · τ_s(-R) or Σ_{j≤N} φ^{(j)}(R)/j! · ρ_j(-R).

use num_bigint::BigInt;

use crate::depoissonize::ln_prefactor;
use crate::error::{invalid, Error, Result};
use crate::extfloat::{ext_sum, ExtFloat};
use crate::poisson::{e_op, poisson_average};
use crate::polyfam::{rho_poly, scaled_charlier_value, tau_at_integer, tau_poly};
use crate::sequences::{RealExtension, SequenceProvider};
use crate::{rational_from_f64, Rational};

/// One term of an inverse expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct InverseTerm {
    pub s: usize,
    /// Δ^s A_n, Δ^s φ(R) or φ^{(s)}(R)
    pub difference: ExtFloat,
    /// τ_s(-n), (-R)^s C_s(-R,-n), τ_s(-R) or ρ_s(-R)
    pub poly_value: ExtFloat,
    pub term: ExtFloat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InverseExpansionReport {
    pub r: f64,
    /// Integer center, absent for the real-argument forms.
    pub n: Option<usize>,
    pub order: usize,
    pub partial_sum: ExtFloat,
    pub certified_bound: Option<ExtFloat>,
    pub oracle_value: Option<ExtFloat>,
    pub terms: Vec<InverseTerm>,
}

impl InverseExpansionReport {
    /// |oracle - partial sum|, when there is an oracle.
    pub fn actual_error(&self) -> Option<ExtFloat> {
        self.oracle_value.map(|o| (o - self.partial_sum).abs())
    }

    /// Error relative to |oracle|.
    pub fn relative_error(&self) -> Option<f64> {
        let o = self.oracle_value?;
        Some(((o - self.partial_sum).abs() / o.abs()).to_f64())
    }

    /// False only when both an oracle and a bound exist and the error exceeds
    /// the bound.
    pub fn bound_holds(&self) -> bool {
        match (self.actual_error(), self.certified_bound) {
            (Some(e), Some(b)) => e <= b,
            _ => true,
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(invalid("inverse expansions need n >= 2"));
    }
    Ok(())
}

fn check_r(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(invalid("R must be positive and finite"));
    }
    Ok(())
}

fn sum_terms(
    order: usize,
    mut diff: impl FnMut(usize) -> Result<ExtFloat>,
    mut poly: impl FnMut(usize) -> ExtFloat,
) -> Result<(Vec<InverseTerm>, ExtFloat)> {
    let mut terms = Vec::with_capacity(order + 1);
    let mut fact = ExtFloat::ONE;
    for s in 0..=order {
        if s > 0 {
            fact = fact * s as f64;
        }
        let d = diff(s)?;
        let p = poly(s);
        terms.push(InverseTerm { s, difference: d, poly_value: p, term: d * p / fact });
    }
    let sum = ext_sum(&terms.iter().map(|t| t.term).collect::<Vec<_>>());
    Ok((terms, sum))
}

fn extension(seq: &dyn SequenceProvider) -> Result<&dyn RealExtension> {
    seq.extension().ok_or_else(|| Error::MissingExtension(seq.kind().to_string()))
}

/// Σ_{m≤N} Δ^m A_n/m! · τ_m(-n) with bound 9(N+1)·n^{(N+1)/2}·E(f^{(N+1)}; n).
/// The oracle is the provider's closed-form f(n), when it has one.
pub fn inverse_findiff_at_integer(
    seq: &dyn SequenceProvider,
    n: usize,
    order: usize,
) -> Result<InverseExpansionReport> {
    check_n(n)?;
    let neg_n = -BigInt::from(n);
    let (terms, sum) = sum_terms(
        order,
        |m| Ok(seq.difference_ext(m, n)?.value),
        |m| ExtFloat::from_bigint(&tau_at_integer(m, &neg_n)),
    )?;
    let r = n as f64;
    let e = e_op(seq, order + 1, r)?.value_ext;
    let bound = e * ExtFloat::exp(0.5 * (order + 1) as f64 * r.ln()) * (9.0 * (order + 1) as f64);
    Ok(InverseExpansionReport {
        r,
        n: Some(n),
        order,
        partial_sum: sum,
        certified_bound: Some(bound),
        oracle_value: seq.closed_transform(0, r),
        terms,
    })
}

/// Σ_{m≤N} Δ^m A_n/m! · (-R)^m C_m(-R,-n) with bound
/// 3(N+1)·n!e^R/R^n·E(f^{(N+1)}; R)·n^{N/2}·e^{|R-n|/√n}.
pub fn inverse_findiff_general_r(
    seq: &dyn SequenceProvider,
    n: usize,
    order: usize,
    r: f64,
) -> Result<InverseExpansionReport> {
    check_n(n)?;
    check_r(r)?;
    let neg_r = -rational_from_f64(r).expect("finite R");
    let neg_n = Rational::from_integer(-BigInt::from(n));
    let (terms, sum) = sum_terms(
        order,
        |m| Ok(seq.difference_ext(m, n)?.value),
        |m| ExtFloat::from_rational(&scaled_charlier_value(&neg_r, m, &neg_n)),
    )?;
    let nf = n as f64;
    let e = e_op(seq, order + 1, r)?.value_ext;
    let log_scale = ln_prefactor(n, r) + 0.5 * order as f64 * nf.ln() + (r - nf).abs() / nf.sqrt();
    let bound = e * ExtFloat::exp(log_scale) * (3.0 * (order + 1) as f64);
    Ok(InverseExpansionReport {
        r,
        n: Some(n),
        order,
        partial_sum: sum,
        certified_bound: Some(bound),
        oracle_value: seq.closed_transform(0, r),
        terms,
    })
}

/// e^{-R} Σ φ(m) R^m/m! by windowed summation of the extension.
fn windowed_oracle(ext: &dyn RealExtension, r: f64) -> Result<ExtFloat> {
    Ok(poisson_average(r, |m| Ok(ext.phi(m as f64)))?.value_ext)
}

fn poly_at_neg_r(p: &crate::IntPolynomial, r: f64) -> ExtFloat {
    let x = -rational_from_f64(r).expect("finite R");
    ExtFloat::from_rational(&p.eval(&x))
}

/// Σ_{s≤N} Δ^s φ(R)/s! · τ_s(-R); the oracle is the windowed Poisson average
/// of φ.
pub fn ramanujan_findiff_real(seq: &dyn SequenceProvider, r: f64, order: usize) -> Result<InverseExpansionReport> {
    check_r(r)?;
    let ext = extension(seq)?;
    let (terms, sum) = sum_terms(order, |s| Ok(ext.phi_difference(s, r).value), |s| poly_at_neg_r(&tau_poly(s), r))?;
    Ok(InverseExpansionReport {
        r,
        n: None,
        order,
        partial_sum: sum,
        certified_bound: None,
        oracle_value: Some(windowed_oracle(ext, r)?),
        terms,
    })
}

/// Σ_{j≤N} φ^{(j)}(R)/j! · ρ_j(-R); the oracle is the windowed Poisson
/// average of φ.
pub fn ramanujan_derivative_form(seq: &dyn SequenceProvider, r: f64, order: usize) -> Result<InverseExpansionReport> {
    check_r(r)?;
    let ext = extension(seq)?;
    let (terms, sum) = sum_terms(
        order,
        |j| ext.phi_derivative(j, r).ok_or_else(|| Error::MissingDerivatives(seq.kind().to_string())),
        |j| poly_at_neg_r(&rho_poly(j), r),
    )?;
    Ok(InverseExpansionReport {
        r,
        n: None,
        order,
        partial_sum: sum,
        certified_bound: None,
        oracle_value: Some(windowed_oracle(ext, r)?),
        terms,
    })
}

/// Outcome of a log-log fit of the error against R.
#[derive(Clone, Debug, PartialEq)]
pub enum RateFit {
    Slope {
        slope: f64,
        /// (ln R, ln relative error) of the points kept in the fit.
        points: Vec<(f64, f64)>,
    },
    /// Fewer than two points stayed clear of the rounding floor.
    Saturated,
}

impl RateFit {
    pub fn slope(&self) -> Option<f64> {
        match self {
            RateFit::Slope { slope, .. } => Some(*slope),
            RateFit::Saturated => None,
        }
    }
}

/// Least-squares slope of ln(|oracle - partial|/|oracle|) against ln R for
/// [`ramanujan_findiff_real`] at order N.
///
/// The rounding floor at each R is 2^{-52} times the larger of |oracle| and
/// Σ|terms|; points within a factor 10 of it are dropped.
pub fn rate_probe(seq: &dyn SequenceProvider, order: usize, r_grid: &[f64]) -> Result<RateFit> {
    let mut points = Vec::new();
    for &r in r_grid {
        let rep = ramanujan_findiff_real(seq, r, order)?;
        let oracle = rep.oracle_value.expect("windowed oracle");
        if oracle.is_zero() {
            continue;
        }
        let mass = ext_sum(&rep.terms.iter().map(|t| t.term.abs()).collect::<Vec<_>>());
        let floor = (mass.max(oracle.abs()) / oracle.abs()).to_f64() * f64::EPSILON;
        let err = rep.relative_error().expect("oracle present");
        if err > 10.0 * floor && err.is_finite() {
            points.push((r.ln(), err.ln()));
        }
    }
    if points.len() < 2 {
        return Ok(RateFit::Saturated);
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return Ok(RateFit::Saturated);
    }
    Ok(RateFit::Slope { slope: sxy / sxx, points })
}
