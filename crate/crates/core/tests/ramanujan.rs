use depoisson::ramanujan::{
    inverse_findiff_at_integer, inverse_findiff_general_r, ramanujan_derivative_form, ramanujan_findiff_real,
    rate_probe,
};
use depoisson::sequences::{
    constant_sequence, exp_mixture, geometric_mixture, trie_expectation, trie_h, DiffValue, RealExtension,
};
use depoisson::{Coeff, Error, Exactness, ExtFloat, RateFit, Rational, SequenceProvider};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// A_m = 1/(m+1), φ(x) = 1/(x+1), whose Poisson average is (1 - e^{-R})/R.
#[derive(Debug)]
struct Reciprocal;

impl SequenceProvider for Reciprocal {
    fn kind(&self) -> &str {
        "reciprocal"
    }
    fn exactness(&self) -> Exactness {
        Exactness::Exact
    }
    fn term(&self, m: usize) -> depoisson::Result<Coeff> {
        Ok(Coeff::Exact(q(1, m as i64 + 1)))
    }
    fn extension(&self) -> Option<&dyn RealExtension> {
        Some(self)
    }
    fn closed_transform(&self, k: usize, r: f64) -> Option<ExtFloat> {
        (k == 0).then(|| ExtFloat::from_f64(-(-r).exp_m1() / r))
    }
}

impl RealExtension for Reciprocal {
    fn phi(&self, x: f64) -> ExtFloat {
        ExtFloat::from_f64(1.0 / (x + 1.0))
    }
    /// (-1)^s s!/((x+1)(x+2)···(x+s+1))
    fn phi_difference(&self, s: usize, x: f64) -> DiffValue {
        let mut v = 1.0 / (x + 1.0);
        for i in 1..=s {
            v *= -(i as f64) / (x + i as f64 + 1.0);
        }
        DiffValue::exact(ExtFloat::from_f64(v))
    }
    fn poisson_average(&self, r: f64) -> Option<ExtFloat> {
        self.closed_transform(0, r)
    }
}

fn log_grid() -> Vec<f64> {
    (0..=12).map(|k| 64.0 * 2f64.powf(k as f64 / 2.0)).collect()
}

#[test]
fn constant_sequence_everywhere() {
    let c = constant_sequence(q(3, 1));
    let rep = inverse_findiff_at_integer(&c, 9, 4).unwrap();
    assert_eq!(rep.partial_sum.to_f64(), 3.0);
    assert!(rep.certified_bound.unwrap().is_zero());
    for r in [0.5, 9.0, 40.0] {
        let rep = inverse_findiff_general_r(&c, 9, 4, r).unwrap();
        assert!(rel(rep.partial_sum.to_f64(), 3.0) < 1e-14);
        assert!(rep.certified_bound.unwrap().is_zero());
        let rep = ramanujan_findiff_real(&c, r, 4).unwrap();
        assert!(rel(rep.partial_sum.to_f64(), 3.0) < 1e-14);
        assert!(rel(rep.oracle_value.unwrap().to_f64(), 3.0) < 1e-13);
        let rep = ramanujan_derivative_form(&c, r, 4).unwrap();
        assert!(rel(rep.partial_sum.to_f64(), 3.0) < 1e-14);
    }
    assert_eq!(rate_probe(&c, 2, &log_grid()).unwrap(), RateFit::Saturated);
}

#[test]
fn geometric_inverse_forty_terms() {
    let g = geometric_mixture(&[(q(1, 1), q(1, 2))]).unwrap();
    let rep = inverse_findiff_at_integer(&g, 20, 40).unwrap();
    let err = rep.actual_error().unwrap().to_f64();
    assert!(rel(rep.oracle_value.unwrap().to_f64(), (-10.0f64).exp()) < 1e-14);
    assert!(err < 1e-10, "residual after 40 terms at n = 20: {err:.3e}");
}

#[test]
fn trie_inverse_bound() {
    let t = trie_expectation(400).unwrap();
    let rep = inverse_findiff_at_integer(&t, 64, 3).unwrap();
    let err = (ExtFloat::from_f64(trie_h(64.0)) - rep.partial_sum).abs();
    assert!(err <= rep.certified_bound.unwrap());
}

#[test]
fn general_r_examples() {
    let g = geometric_mixture(&[(q(1, 1), q(1, 2))]).unwrap();
    let rep = inverse_findiff_general_r(&g, 20, 12, 22.5).unwrap();
    assert!(rel(rep.oracle_value.unwrap().to_f64(), (-11.25f64).exp()) < 1e-14);
    assert!(rep.bound_holds());
    for n in [5usize, 20] {
        for order in 0..8 {
            let a = inverse_findiff_at_integer(&g, n, order).unwrap();
            let b = inverse_findiff_general_r(&g, n, order, n as f64).unwrap();
            for (x, y) in a.terms.iter().zip(&b.terms) {
                assert_eq!(x.poly_value, y.poly_value);
            }
        }
    }
    assert!(inverse_findiff_at_integer(&g, 1, 2).is_err());
    assert!(inverse_findiff_general_r(&g, 5, 2, 0.0).is_err());
}

#[test]
fn findiff_real_examples() {
    let e = exp_mixture(&[(q(1, 1), q(2, 1))]).unwrap();
    let rep = ramanujan_findiff_real(&e, 100.0, 4).unwrap();
    let oracle = rep.oracle_value.unwrap();
    assert!(((oracle - ExtFloat::exp(100.0)) / ExtFloat::exp(100.0)).abs().to_f64() < 1e-12);
    let errs: Vec<f64> =
        (0..=4).map(|n| ramanujan_findiff_real(&e, 100.0, n).unwrap().relative_error().unwrap()).collect();
    assert!(errs[4] < errs[0], "{errs:?}");

    let g = geometric_mixture(&[(q(1, 1), q(1, 2))]).unwrap();
    let rep = ramanujan_findiff_real(&g, 64.0, 3).unwrap();
    assert!(rep.actual_error().unwrap().to_f64() < 1e-12);
    assert!(rel(rep.oracle_value.unwrap().to_f64(), (-32.0f64).exp()) < 1e-12);

    let t = trie_expectation(50).unwrap();
    assert!(matches!(ramanujan_findiff_real(&t, 10.0, 2), Err(Error::MissingExtension(_))));
}

#[test]
fn derivative_form_examples() {
    let e = exp_mixture(&[(q(1, 1), q(2, 1))]).unwrap();
    let errs: Vec<f64> = [1, 3, 5, 7]
        .iter()
        .map(|&n| ramanujan_derivative_form(&e, 100.0, n).unwrap().relative_error().unwrap())
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");

    let rep = ramanujan_derivative_form(&e, 7.5, 1).unwrap();
    assert!(rel(rep.partial_sum.to_f64(), 2f64.powf(7.5)) < 1e-14);
    assert!(matches!(ramanujan_derivative_form(&Reciprocal, 5.0, 2), Err(Error::MissingDerivatives(_))));
}

#[test]
fn exp_mixture_identity_small_r() {
    let e = exp_mixture(&[(q(1, 2), q(3, 2)), (q(1, 2), q(2, 1))]).unwrap();
    let rep = ramanujan_derivative_form(&e, 1.0, 30).unwrap();
    assert!(rep.relative_error().unwrap() < 1e-8);
}

#[test]
fn rate_for_two_to_minus_x() {
    let g = geometric_mixture(&[(q(1, 1), q(1, 2))]).unwrap();
    let want = [(1, -1.0, 0.15), (3, -2.0, 0.2)];
    let mut bad = Vec::new();
    for (order, slope, tol) in want {
        let fit = rate_probe(&g, order, &log_grid()).unwrap();
        match fit.slope() {
            Some(s) if (s - slope).abs() <= tol => {}
            other => bad.push(format!("N={order}: {other:?}, want {slope} ± {tol}")),
        }
    }
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn reciprocal_extension_is_consistent() {
    let ext = Reciprocal.extension().unwrap();
    for m in 0..=64usize {
        assert_eq!(ext.phi(m as f64).to_f64(), 1.0 / (m as f64 + 1.0));
    }
    for s in 0..=6 {
        for n in 0..=32usize {
            let exact = match Reciprocal.difference(s, n).unwrap() {
                Coeff::Exact(v) => ExtFloat::from_rational(&v),
                Coeff::Float(_) => unreachable!(),
            };
            let closed = ext.phi_difference(s, n as f64).value;
            assert!(((closed - exact) / exact).abs().to_f64() < 1e-14);
        }
    }
    for r in [0.5, 5.0, 80.0] {
        let rep = ramanujan_findiff_real(&Reciprocal, r, 0).unwrap();
        let closed = Reciprocal.closed_transform(0, r).unwrap();
        assert!(((rep.oracle_value.unwrap() - closed) / closed).abs().to_f64() < 1e-13);
    }
}

#[test]
fn rate_for_reciprocal() {
    for (order, want) in [(1, -1.0), (2, -2.0), (3, -2.0)] {
        let fit = rate_probe(&Reciprocal, order, &log_grid()).unwrap();
        let s = fit.slope().expect("unsaturated fit");
        assert!((s - want).abs() <= 0.2, "N={order}: slope {s}, want {want}");
    }
}

#[test]
fn report_invariants() {
    let g = geometric_mixture(&[(q(2, 3), q(1, 2)), (q(1, 3), q(1, 3))]).unwrap();
    let e = exp_mixture(&[(q(1, 1), q(3, 2))]).unwrap();
    let reports = [
        inverse_findiff_at_integer(&g, 30, 6).unwrap(),
        inverse_findiff_general_r(&g, 30, 6, 41.0).unwrap(),
        ramanujan_findiff_real(&e, 12.0, 6).unwrap(),
        ramanujan_derivative_form(&e, 12.0, 6).unwrap(),
    ];
    for rep in &reports {
        let sum: f64 = rep.terms.iter().map(|t| t.term.to_f64()).sum();
        assert!((sum - rep.partial_sum.to_f64()).abs() <= 1e-12 * rep.partial_sum.to_f64().abs());
        assert_eq!(rep.terms.len(), rep.order + 1);
    }
    assert_eq!(reports[0].n, Some(30));
    assert_eq!(reports[2].n, None);
}

#[test]
fn round_trip_within_both_bounds() {
    use depoisson::depoissonize::{certify, charlier_poisson_sum};
    use depoisson::Theorem;
    let g = geometric_mixture(&[(q(2, 3), q(1, 2)), (q(1, 3), q(1, 3))]).unwrap();
    for n in [16usize, 32, 64] {
        for order in 0..=3 {
            let inv = inverse_findiff_at_integer(&g, n, order).unwrap();
            let fwd = charlier_poisson_sum(&g, n, order, n as f64).unwrap();
            assert_eq!(fwd.theorem, Theorem::AtN);
            let a_n = ExtFloat::from_rational(g.term(n).unwrap().as_exact().unwrap());
            // f(n) recovered from the coefficients, then A_n from f(n)
            let slack = inv.certified_bound.unwrap() + fwd.bound;
            assert!((inv.partial_sum - fwd.components[0].derivative).abs() <= inv.certified_bound.unwrap());
            assert!(certify(&g, n, order, n as f64, Theorem::AtN).unwrap().error_against(a_n) <= slack);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inverse_bounds_dominate(
        atoms in proptest::collection::vec((1i64..=5, 1i64..=19), 1..4),
        n in 2usize..150,
        order in 0usize..4,
        scale in 0.25f64..3.0,
    ) {
        let atoms: Vec<_> = atoms.into_iter().map(|(w, a)| (q(w, 5), q(a, 20))).collect();
        let g = geometric_mixture(&atoms).unwrap();
        prop_assert!(inverse_findiff_at_integer(&g, n, order).unwrap().bound_holds());
        prop_assert!(inverse_findiff_general_r(&g, n, order, scale * n as f64).unwrap().bound_holds());
    }

    #[test]
    fn derivative_form_first_order_is_phi(c in 2i64..5, r in 0.5f64..50.0) {
        let e = exp_mixture(&[(q(1, 1), q(c, 1))]).unwrap();
        let rep = ramanujan_derivative_form(&e, r, 1).unwrap();
        prop_assert!(rel(rep.partial_sum.to_f64(), (c as f64).powf(r)) < 1e-13);
    }
}
