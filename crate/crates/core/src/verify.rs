//! Self-check suites: exact polynomial identities and bound domination on
//! oracle sequences. The command line `verify` subcommand runs these.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::depoissonize::{certify, charlier_poisson_sum, first_order_identity_residual, monotone_bound, Theorem};
use crate::error::Result;
use crate::extfloat::{ext_sum, ExtFloat};
use crate::polyfam::{
    binomial, falling_factorial_poly, ramanujan_b, rho_poly, scaled_charlier_value, stirling2, tau_at_integer,
    tau_poly, IntPolynomial,
};
use crate::ramanujan::{inverse_findiff_at_integer, inverse_findiff_general_r};
use crate::sequences::{geometric_mixture, trie_expectation, trie_h, trie_h_derivative, SequenceProvider};
use crate::Rational;

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

/// Parameters shared by the suites.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    /// Largest polynomial order in the identity suite.
    pub max_order: usize,
    /// Largest n (a power of two from 8 up) in the bound grids.
    pub max_n: usize,
    /// Overrides the floating tolerances; exact identities ignore it.
    pub tol: Option<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { max_order: 12, max_n: 512, tol: None }
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn poly(c: &[i64]) -> IntPolynomial {
    IntPolynomial::from(c.to_vec())
}

/// τ_0..τ_6 and ρ_0..ρ_7 as published.
pub fn tau_table() -> Vec<IntPolynomial> {
    vec![
        poly(&[1]),
        poly(&[0]),
        poly(&[0, -1]),
        poly(&[0, 2]),
        poly(&[0, -6, 3]),
        poly(&[0, 24, -20]),
        poly(&[0, -120, 130, -15]),
    ]
}

pub fn rho_table() -> Vec<IntPolynomial> {
    vec![
        poly(&[1]),
        poly(&[0]),
        poly(&[0, -1]),
        poly(&[0, -1]),
        poly(&[0, -1, 3]),
        poly(&[0, -1, 10]),
        poly(&[0, -1, 25, -15]),
        poly(&[0, -1, 56, -105]),
    ]
}

/// Δ^s x^j at x = a.
fn delta_power(s: usize, j: usize, a: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for i in 0..=s {
        let v = Rational::from_integer(binomial(s, i))
            * crate::scalar::rational_pow(&(a + Rational::from_integer(i.into())), j);
        if (s - i) % 2 == 1 {
            acc -= v;
        } else {
            acc += v;
        }
    }
    acc
}

fn fact(n: usize) -> Rational {
    Rational::from_integer(crate::polyfam::factorial(n))
}

/// Σ_j R^{s-j}C_{s-j}(R,n)(-R)^j C_j(-R,-n)/((s-j)! j!) = [s = 0].
pub fn inversion_convolution(r: &Rational, n: &Rational, s: usize) -> Rational {
    let mut acc = Rational::zero();
    for j in 0..=s {
        let a = scaled_charlier_value(r, s - j, n);
        let b = scaled_charlier_value(&-r, j, &-n);
        acc += a * b / (fact(s - j) * fact(j));
    }
    acc
}

/// Both sides of the Charlier/τ duality at (t, y).
pub fn duality_sides(t: &Rational, y: &Rational, big_n: usize) -> [Rational; 3] {
    let direct = scaled_charlier_value(t, big_n, y);
    let mut via_y = Rational::zero();
    let mut via_t = Rational::zero();
    let d = y - t;
    for j in 0..=big_n {
        let c = Rational::from_integer(binomial(big_n, j));
        via_y += &c * tau_poly(big_n - j).eval(y) * crate::scalar::rational_pow(&d, j);
        via_t += &c * tau_poly(big_n - j).eval(t) * falling_factorial_poly(j).eval(&d);
    }
    [direct, via_y, via_t]
}

/// Left and right sides of
/// Σ_s (-R)^s C_s(-R,-n)/s! · Δ^s x^j|_{x=0} = Σ_s τ_s(-R)/s! · Δ^s x^j|_{x=R-n}.
pub fn id_c_sides(r: &Rational, n: &Rational, j: usize) -> (Rational, Rational) {
    let mut lhs = Rational::zero();
    let mut rhs = Rational::zero();
    let zero = Rational::zero();
    let shift = r - n;
    for s in 0..=j {
        lhs += scaled_charlier_value(&-r, s, &-n) / fact(s) * delta_power(s, j, &zero);
        rhs += tau_poly(s).eval(&-r) / fact(s) * delta_power(s, j, &shift);
    }
    (lhs, rhs)
}

/// ρ_n(-R) - Σ_k b_{kn} R^{n-k+1} as a polynomial in R.
pub fn b_bridge_defect(n: usize) -> IntPolynomial {
    let lhs = rho_poly(n).compose_neg();
    let mut rhs = IntPolynomial::zero();
    for k in 1..=n {
        let b = ramanujan_b(k as i64, n as i64);
        if !b.is_zero() {
            rhs = &rhs + &IntPolynomial::monomial(Rational::from_integer(b), n - k + 1);
        }
    }
    &lhs - &rhs
}

/// ρ_j - Σ_s S(j,s) τ_s.
pub fn stirling_bridge_defect(j: usize) -> IntPolynomial {
    let mut acc = rho_poly(j);
    for s in 0..=j {
        acc = &acc - &tau_poly(s).scale(&Rational::from_integer(stirling2(j, s)));
    }
    acc
}

/// Relative gap between Σ_{m≤200} τ_m(n)²/(m!·n^m) and n!·e^n/n^n.
pub fn parseval_gap(n: usize) -> f64 {
    let nb = BigInt::from(n);
    let mut terms = Vec::with_capacity(201);
    let mut denom = ExtFloat::ONE;
    for m in 0..=200usize {
        if m > 0 {
            denom = denom * (m * n) as f64;
        }
        let t = ExtFloat::from_bigint(&tau_at_integer(m, &nb));
        terms.push(t * t / denom);
    }
    let sum = ext_sum(&terms);
    let target = crate::poisson::factorial_ext(n as u64) * ExtFloat::exp(n as f64 - n as f64 * (n as f64).ln());
    ((sum - target).abs() / target).to_f64()
}

fn count(checks: &mut Vec<Check>, name: &str, failures: Vec<String>, total: usize) {
    let passed = failures.is_empty();
    let detail = if passed {
        format!("{total} cases")
    } else {
        format!("{} of {total} failed: {}", failures.len(), failures.join("; "))
    };
    checks.push(Check::new(name, passed, detail));
}

/// Exact polynomial identities plus the Parseval-type sum and the
/// first-order identity.
pub fn identity_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let max = cfg.max_order;

    let bad: Vec<String> = tau_table()
        .iter()
        .enumerate()
        .filter(|(m, p)| tau_poly(*m) != **p)
        .map(|(m, _)| format!("tau_{m}"))
        .chain(rho_table().iter().enumerate().filter(|(j, p)| rho_poly(*j) != **p).map(|(j, _)| format!("rho_{j}")))
        .collect();
    count(&mut checks, "polynomial tables", bad, 15);

    let pairs = [(q(1, 1), q(1, 1)), (q(2, 1), q(3, 1)), (q(11, 2), q(10, 1)), (q(3, 1), q(-7, 1))];
    let mut bad = Vec::new();
    for (r, n) in &pairs {
        for s in 0..=max {
            let v = inversion_convolution(r, n, s);
            let want = if s == 0 { Rational::one() } else { Rational::zero() };
            if v != want {
                bad.push(format!("R={r} n={n} s={s}"));
            }
        }
    }
    count(&mut checks, "inversion convolution", bad, pairs.len() * (max + 1));

    let bad: Vec<String> =
        (0..=max).filter(|&j| !stirling_bridge_defect(j).is_zero()).map(|j| format!("j={j}")).collect();
    count(&mut checks, "rho via tau and Stirling numbers", bad, max + 1);

    let bad: Vec<String> =
        (2..=max.max(2)).filter(|&n| !b_bridge_defect(n).is_zero()).map(|n| format!("n={n}")).collect();
    count(&mut checks, "rho via b coefficients", bad, max.max(2) - 1);

    let points = [(q(2, 1), q(3, 1)), (q(7, 1), q(-4, 1)), (q(-1, 1), q(5, 1))];
    let top = max.min(8);
    let mut bad = Vec::new();
    for (t, y) in &points {
        for big_n in 0..=top {
            let [a, b, c] = duality_sides(t, y, big_n);
            if a != b || a != c {
                bad.push(format!("t={t} y={y} N={big_n}"));
            }
        }
    }
    count(&mut checks, "Charlier-tau duality", bad, points.len() * (top + 1));

    let pairs = [(q(3, 1), q(2, 1)), (q(7, 2), q(3, 1)), (q(10, 1), q(10, 1))];
    let mut bad = Vec::new();
    for (r, n) in &pairs {
        for j in 0..=top {
            let (l, rr) = id_c_sides(r, n, j);
            if l != rr {
                bad.push(format!("R={r} n={n} j={j}"));
            }
        }
    }
    count(&mut checks, "difference identity at R - n", bad, pairs.len() * (top + 1));

    let tol = cfg.tol.unwrap_or(1e-8);
    let bad: Vec<String> = (1..=15)
        .filter_map(|n| {
            let g = parseval_gap(n);
            (!(g <= tol)).then(|| format!("n={n} gap={g:e}"))
        })
        .collect();
    count(&mut checks, "tau square sum", bad, 15);

    let tol = cfg.tol.unwrap_or(1e-9);
    let mixes = [
        geometric_mixture(&[(q(1, 1), q(1, 2))])?,
        geometric_mixture(&[(q(2, 3), q(1, 2)), (q(1, 3), q(1, 3))])?,
        geometric_mixture(&[(q(1, 1), q(9, 10))])?,
    ];
    let mut bad = Vec::new();
    let points = [(5usize, 3.0f64), (10, 10.0), (20, 14.5)];
    for (i, g) in mixes.iter().enumerate() {
        for &(n, r) in &points {
            let res = first_order_identity_residual(g, n, r, 400)?;
            if !(res <= tol) {
                bad.push(format!("mixture {i} n={n} R={r} residual={res:e}"));
            }
        }
    }
    count(&mut checks, "first-order identity", bad, mixes.len() * points.len());
    Ok(checks)
}

/// The standard oracle sequences, with a trie table long enough for
/// windows centered up to 2·max_n.
pub fn oracle_sequences(max_n: usize) -> Result<Vec<(String, Box<dyn SequenceProvider>)>> {
    let top = 2.0 * max_n as f64;
    let trie_len = (top + 12.0 * top.sqrt() + 64.0) as usize;
    Ok(vec![
        ("trie".to_string(), Box::new(trie_expectation(trie_len)?) as Box<dyn SequenceProvider>),
        ("geom:1/(1/2)".to_string(), Box::new(geometric_mixture(&[(q(1, 1), q(1, 2))])?)),
        (
            "geom:(2/3)/(1/2),(1/3)/(1/3)".to_string(),
            Box::new(geometric_mixture(&[(q(2, 3), q(1, 2)), (q(1, 3), q(1, 3))])?),
        ),
        ("geom:1/(9/10)".to_string(), Box::new(geometric_mixture(&[(q(1, 1), q(9, 10))])?)),
    ])
}

fn grid_n(max_n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut n = 8;
    while n <= max_n {
        out.push(n);
        n *= 2;
    }
    out
}

/// Bound domination on the oracle grid, forward and inverse, plus the
/// monotone bound on the trie.
pub fn bound_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let seqs = oracle_sequences(cfg.max_n)?;
    let ns = grid_n(cfg.max_n);
    let orders = 0..=cfg.max_order.min(3);

    let mut at_n = Vec::new();
    let mut general = Vec::new();
    let mut inv_n = Vec::new();
    let mut inv_r = Vec::new();
    let mut total = 0;
    for (name, seq) in &seqs {
        for &n in &ns {
            let a_n = seq.term_ext(n)?;
            let f_n = seq.closed_transform(0, n as f64);
            for order in orders.clone() {
                total += 1;
                let cert = charlier_poisson_sum(seq.as_ref(), n, order, n as f64)?;
                if !cert.covers(a_n) {
                    at_n.push(format!("{name} n={n} N={order}"));
                }
                for r in [n as f64 / 2.0, n as f64, 2.0 * n as f64] {
                    let cert = certify(seq.as_ref(), n, order, r, Theorem::GeneralR)?;
                    if !cert.covers(a_n) {
                        general.push(format!("{name} n={n} N={order} R={r}"));
                    }
                    let rep = inverse_findiff_general_r(seq.as_ref(), n, order, r)?;
                    if !rep.bound_holds() {
                        inv_r.push(format!("{name} n={n} N={order} R={r}"));
                    }
                }
                if f_n.is_some() {
                    let rep = inverse_findiff_at_integer(seq.as_ref(), n, order)?;
                    if !rep.bound_holds() {
                        inv_n.push(format!("{name} n={n} N={order}"));
                    }
                }
            }
        }
    }
    count(&mut checks, "depoissonization bound at R = n", at_n, total);
    count(&mut checks, "depoissonization bound at general R", general, 3 * total);
    count(&mut checks, "inverse bound at integer n", inv_n, total);
    count(&mut checks, "inverse bound at general R", inv_r, 3 * total);

    let trie = &seqs[0].1;
    let mut bad = Vec::new();
    let top = (2 * cfg.max_n).min(1024);
    for n in 2..=top {
        let b = monotone_bound(trie.as_ref(), n, None)?.to_f64();
        let a = trie.term_ext(n)?.to_f64();
        let h = trie_h(n as f64);
        let closed = 2.0 * (n as f64).sqrt() * trie_h_derivative(1, n as f64).abs();
        if !((a - h).abs() <= b) || !((a - h).abs() <= closed) {
            bad.push(format!("n={n}"));
        }
    }
    count(&mut checks, "monotone bound on the trie", bad, top - 1);
    Ok(checks)
}

/// Both suites.
pub fn all_suites(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut out = identity_suite(cfg)?;
    out.extend(bound_suite(cfg)?);
    Ok(out)
}
