use num_traits::{One, Signed, Zero};

use super::{Coeff, DiffValue, Exactness, RealExtension, SequenceProvider};
use crate::error::{invalid, Result};
use crate::extfloat::{ext_sum, pow_double_double, ExtFloat};
use crate::scalar::{rational_pow, rational_to_f64};
use crate::Rational;

#[derive(Clone, Debug)]
struct Atom {
    w: Rational,
    q: Rational,
    w_ext: ExtFloat,
    // q = q_hi + q_lo with q_hi the nearest f64.
    q_hi: f64,
    q_lo: f64,
    ln_q: f64,
    q_minus_1: f64,
}

impl Atom {
    fn new(w: Rational, q: Rational) -> Self {
        let q_hi_f = rational_to_f64(&q);
        let q_hi_exact = crate::rational_from_f64(q_hi_f).expect("finite ratio");
        let q_lo = rational_to_f64(&(&q - &q_hi_exact));
        let ln1p_delta = (q_lo / q_hi_f).ln_1p();
        Atom {
            w_ext: ExtFloat::from_rational(&w),
            q_hi: q_hi_f,
            q_lo,
            ln_q: q_hi_f.ln() + ln1p_delta,
            q_minus_1: rational_to_f64(&(&q - Rational::one())),
            w,
            q,
        }
    }

    /// q^m to full f64 precision.
    fn pow(&self, m: usize) -> ExtFloat {
        pow_double_double(self.q_hi, self.q_lo, m as u64)
    }
}

/// A_m = Σ_k w_k q_k^m for finitely many atoms.
///
/// Ratios in (0,1) are the decreasing Laplace-transform sequences; ratios
/// c ≥ 1 are the growing ones e^{t m}. Everything about these sequences has
/// a closed form, which is what makes them oracles.
#[derive(Clone, Debug)]
pub struct GeometricMixture {
    kind: &'static str,
    atoms: Vec<Atom>,
}

fn build(kind: &'static str, atoms: &[(Rational, Rational)]) -> GeometricMixture {
    GeometricMixture { kind, atoms: atoms.iter().map(|(w, q)| Atom::new(w.clone(), q.clone())).collect() }
}

/// Mixture with positive weights and ratios in (0,1).
pub fn geometric_mixture(atoms: &[(Rational, Rational)]) -> Result<GeometricMixture> {
    if atoms.is_empty() {
        return Err(invalid("a geometric mixture needs at least one atom"));
    }
    for (w, q) in atoms {
        if !w.is_positive() {
            return Err(invalid(format!("mixture weight {w} must be positive")));
        }
        if !q.is_positive() || *q >= Rational::one() {
            return Err(invalid(format!("geometric ratio {q} must lie in (0,1)")));
        }
    }
    Ok(build("geometric-mixture", atoms))
}

/// Mixture φ(x) = Σ w_k c_k^x with positive weights and c_k ≥ 1.
pub fn exp_mixture(atoms: &[(Rational, Rational)]) -> Result<GeometricMixture> {
    if atoms.is_empty() {
        return Err(invalid("an exponential mixture needs at least one atom"));
    }
    for (w, c) in atoms {
        if !w.is_positive() {
            return Err(invalid(format!("mixture weight {w} must be positive")));
        }
        if *c < Rational::one() {
            return Err(invalid(format!("exponential base {c} must be at least 1")));
        }
    }
    Ok(build("exp-mixture", atoms))
}

/// Any nonzero weights, any positive ratios.
pub fn signed_mixture(atoms: &[(Rational, Rational)]) -> Result<GeometricMixture> {
    if atoms.is_empty() {
        return Err(invalid("a mixture needs at least one atom"));
    }
    for (w, q) in atoms {
        if w.is_zero() || !q.is_positive() {
            return Err(invalid(format!("atom ({w}, {q}) needs a nonzero weight and positive ratio")));
        }
    }
    Ok(build("signed-mixture", atoms))
}

/// A_m ≡ c.
pub fn constant_sequence(c: Rational) -> GeometricMixture {
    build("constant", &[(c, Rational::one())])
}

impl GeometricMixture {
    pub fn atoms(&self) -> Vec<(Rational, Rational)> {
        self.atoms.iter().map(|a| (a.w.clone(), a.q.clone())).collect()
    }

    /// Σ w (q-1)^s q^x at an integer point, exactly.
    pub fn extension_difference_exact(&self, s: usize, n: usize) -> Rational {
        self.atoms
            .iter()
            .map(|a| &a.w * rational_pow(&(&a.q - Rational::one()), s) * rational_pow(&a.q, n))
            .fold(Rational::zero(), |acc, t| acc + t)
    }

    fn combine(&self, f: impl Fn(&Atom) -> ExtFloat) -> DiffValue {
        let terms: Vec<ExtFloat> = self.atoms.iter().map(|a| a.w_ext * f(a)).collect();
        super::with_condition(&terms)
    }
}

impl SequenceProvider for GeometricMixture {
    fn kind(&self) -> &str {
        self.kind
    }

    fn exactness(&self) -> Exactness {
        Exactness::Exact
    }

    fn term(&self, m: usize) -> Result<Coeff> {
        Ok(Coeff::Exact(self.extension_difference_exact(0, m)))
    }

    fn term_ext(&self, m: usize) -> Result<ExtFloat> {
        Ok(self.combine(|a| a.pow(m)).value)
    }

    fn difference(&self, k: usize, m: usize) -> Result<Coeff> {
        Ok(Coeff::Exact(self.extension_difference_exact(k, m)))
    }

    fn difference_ext(&self, k: usize, m: usize) -> Result<DiffValue> {
        Ok(self.combine(|a| ExtFloat::from_f64(a.q_minus_1).powi(k as i64) * a.pow(m)))
    }

    fn extension(&self) -> Option<&dyn RealExtension> {
        Some(self)
    }

    /// Σ w (q-1)^k e^{-r(1-q)}
    fn closed_transform(&self, k: usize, r: f64) -> Option<ExtFloat> {
        let terms: Vec<ExtFloat> = self
            .atoms
            .iter()
            .map(|a| a.w_ext * ExtFloat::from_f64(a.q_minus_1).powi(k as i64) * ExtFloat::exp(r * a.q_minus_1))
            .collect();
        Some(ext_sum(&terms))
    }
}

impl RealExtension for GeometricMixture {
    fn phi(&self, x: f64) -> ExtFloat {
        self.combine(|a| ExtFloat::exp(x * a.ln_q)).value
    }

    fn phi_difference(&self, s: usize, x: f64) -> DiffValue {
        self.combine(|a| ExtFloat::from_f64(a.q_minus_1).powi(s as i64) * ExtFloat::exp(x * a.ln_q))
    }

    fn phi_derivative(&self, j: usize, x: f64) -> Option<ExtFloat> {
        Some(self.combine(|a| ExtFloat::from_f64(a.ln_q).powi(j as i64) * ExtFloat::exp(x * a.ln_q)).value)
    }

    fn poisson_average(&self, r: f64) -> Option<ExtFloat> {
        self.closed_transform(0, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn terms_and_closed_forms() {
        let g = geometric_mixture(&[(q(1, 1), q(1, 2))]).unwrap();
        assert_eq!(g.term(3).unwrap(), Coeff::Exact(q(1, 8)));
        let f10 = g.closed_transform(0, 10.0).unwrap().to_f64();
        assert!((f10 / (-5.0f64).exp() - 1.0).abs() < 1e-15);
        assert_eq!(SequenceProvider::difference(&g, 2, 0).unwrap(), Coeff::Exact(q(1, 4)));

        let mix = geometric_mixture(&[(q(2, 3), q(1, 2)), (q(1, 3), q(1, 3))]).unwrap();
        assert_eq!(mix.term(2).unwrap(), Coeff::Exact(q(2, 3) * q(1, 4) + q(1, 3) * q(1, 9)));
    }

    #[test]
    fn exp_mixture_forms() {
        let e = exp_mixture(&[(q(1, 1), q(2, 1))]).unwrap();
        assert!((e.phi(3.0).to_f64() - 8.0).abs() < 1e-13);
        let avg = e.poisson_average(5.0).unwrap().to_f64();
        assert!((avg / 5f64.exp() - 1.0).abs() < 1e-14);
        let two = exp_mixture(&[(q(1, 2), q(2, 1)), (q(1, 2), q(3, 1))]).unwrap();
        let avg = two.poisson_average(1.0).unwrap().to_f64();
        let want = 0.5 * std::f64::consts::E + 0.5 * std::f64::consts::E.powi(2);
        assert!((avg - want).abs() < 1e-14);
        let c = exp_mixture(&[(q(1, 1), q(1, 1))]).unwrap();
        assert_eq!(c.poisson_average(7.0).unwrap().to_f64(), 1.0);
    }

    #[test]
    fn validation() {
        assert!(geometric_mixture(&[]).is_err());
        assert!(geometric_mixture(&[(q(1, 1), q(1, 1))]).is_err());
        assert!(geometric_mixture(&[(q(-1, 1), q(1, 2))]).is_err());
        assert!(exp_mixture(&[(q(1, 1), q(1, 2))]).is_err());
        assert!(signed_mixture(&[(q(-1, 1), q(3, 2))]).is_ok());
    }

    #[test]
    fn high_powers_keep_precision() {
        let g = geometric_mixture(&[(q(1, 1), q(9, 10))]).unwrap();
        let exact = ExtFloat::from_rational(&rational_pow(&q(9, 10), 1500));
        let approx = g.term_ext(1500).unwrap();
        assert!(((approx / exact).to_f64() - 1.0).abs() < 1e-14);
    }
}
