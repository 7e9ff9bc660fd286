use std::sync::{LazyLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::combinatorics::{binomial, binomial_row};
use super::poly::IntPolynomial;
use crate::error::{invalid, Result};
use crate::scalar::{Real, Scalar};
use crate::Rational;

type Rows = RwLock<Vec<Vec<BigInt>>>;

/// Integer coefficient rows built by `step(previous_rows)`, memoized.
fn cached_row(cache: &Rows, m: usize, step: fn(&[Vec<BigInt>]) -> Vec<BigInt>) -> Vec<BigInt> {
    {
        let rows = cache.read().unwrap_or_else(|e| e.into_inner());
        if let Some(r) = rows.get(m) {
            return r.clone();
        }
    }
    let mut rows = cache.write().unwrap_or_else(|e| e.into_inner());
    while rows.len() <= m {
        let next = step(&rows);
        rows.push(next);
    }
    rows[m].clone()
}

fn axpy(acc: &mut Vec<BigInt>, c: &BigInt, p: &[BigInt], shift: usize) {
    if acc.len() < p.len() + shift {
        acc.resize(p.len() + shift, BigInt::zero());
    }
    for (i, a) in p.iter().enumerate() {
        acc[i + shift] += c * a;
    }
}

fn trim(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

// ((1+z)e^{-z})^x = exp(x·L(z)) with zL'(z)-coefficients (k+1)L_{k+1} = (-1)^k for
// k ≥ 1. Differentiating exp(xL) gives
//   τ_{m+1} = x · Σ_{k=1}^{m} (-1)^k m!/(m-k)! τ_{m-k}.
fn tau_step(rows: &[Vec<BigInt>]) -> Vec<BigInt> {
    if rows.is_empty() {
        return vec![BigInt::one()];
    }
    let m = rows.len() - 1;
    let mut acc = Vec::new();
    let mut ff = BigInt::one();
    for k in 1..=m {
        ff *= m + 1 - k;
        let c = if k % 2 == 0 { ff.clone() } else { -ff.clone() };
        axpy(&mut acc, &c, &rows[m - k], 1);
    }
    trim(acc)
}

// e^{-x(e^z-1-z)}: ρ_{j+1} = -x · Σ_{k=1}^{j} C(j,k) ρ_{j-k}.
fn rho_step(rows: &[Vec<BigInt>]) -> Vec<BigInt> {
    if rows.is_empty() {
        return vec![BigInt::one()];
    }
    let j = rows.len() - 1;
    let binom = binomial_row(j);
    let mut acc = Vec::new();
    for k in 1..=j {
        axpy(&mut acc, &-&binom[k], &rows[j - k], 1);
    }
    trim(acc)
}

// x_(j+1) = x_(j)·(x - j)
fn falling_step(rows: &[Vec<BigInt>]) -> Vec<BigInt> {
    let Some(prev) = rows.last() else {
        return vec![BigInt::one()];
    };
    let j = rows.len() - 1;
    let mut next = vec![BigInt::zero(); prev.len() + 1];
    for (i, c) in prev.iter().enumerate() {
        next[i + 1] += c;
        next[i] -= c * j;
    }
    next
}

static TAU: LazyLock<Rows> = LazyLock::new(|| RwLock::new(Vec::new()));
static RHO: LazyLock<Rows> = LazyLock::new(|| RwLock::new(Vec::new()));
static FALLING: LazyLock<Rows> = LazyLock::new(|| RwLock::new(Vec::new()));

/// Integer coefficients of τ_m, lowest power first.
pub fn tau_coeffs(m: usize) -> Vec<BigInt> {
    cached_row(&TAU, m, tau_step)
}

/// Integer coefficients of ρ_j, lowest power first.
pub fn rho_coeffs(j: usize) -> Vec<BigInt> {
    cached_row(&RHO, j, rho_step)
}

/// τ_m(x) = n![z^n] e^z (z-n)^m at x = n; generating function ((1+z)e^{-z})^x.
pub fn tau_poly(m: usize) -> IntPolynomial {
    IntPolynomial::from_integers(tau_coeffs(m))
}

/// Mahler polynomial ρ_j(x), generating function e^{-x(e^z-1-z)}.
pub fn rho_poly(j: usize) -> IntPolynomial {
    IntPolynomial::from_integers(rho_coeffs(j))
}

/// The falling factorial x(x-1)...(x-j+1) as a polynomial in x.
pub fn falling_factorial_poly(j: usize) -> IntPolynomial {
    IntPolynomial::from_integers(cached_row(&FALLING, j, falling_step))
}

/// Exact integer value of τ_m at an integer point.
pub fn tau_at_integer(m: usize, n: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in tau_coeffs(m).iter().rev() {
        acc = acc * n + c;
    }
    acc
}

/// C_m(λ,x) = Σ_j (-1)^{m-j} C(m,j) x_(j) / λ^j as a polynomial in x.
pub fn charlier_poly(lambda: &Rational, m: usize) -> Result<IntPolynomial> {
    if lambda.is_zero() {
        return Err(invalid("Charlier polynomials need a nonzero lambda"));
    }
    let inv = lambda.recip();
    let mut acc = IntPolynomial::zero();
    let mut pow = Rational::one();
    for j in 0..=m {
        let mut c = Rational::from_integer(binomial(m, j)) * &pow;
        if (m - j) % 2 == 1 {
            c = -c;
        }
        acc = &acc + &falling_factorial_poly(j).scale(&c);
        pow *= &inv;
    }
    Ok(acc)
}

/// λ^m C_m(λ,x) = Σ_j (-1)^{m-j} C(m,j) x_(j) λ^{m-j}, a polynomial in x
/// that stays defined at λ = 0.
pub fn scaled_charlier_poly(lambda: &Rational, m: usize) -> IntPolynomial {
    let mut acc = IntPolynomial::zero();
    for j in 0..=m {
        let mut c = Rational::from_integer(binomial(m, j)) * crate::scalar::rational_pow(lambda, m - j);
        if (m - j) % 2 == 1 {
            c = -c;
        }
        acc = &acc + &falling_factorial_poly(j).scale(&c);
    }
    acc
}

/// Value of λ^m C_m(λ,x) in any scalar field.
pub fn scaled_charlier_value<T: Scalar>(lambda: &T, m: usize, x: &T) -> T {
    let mut pows = Vec::with_capacity(m + 1);
    pows.push(T::one());
    for i in 0..m {
        let next = pows[i].clone() * lambda.clone();
        pows.push(next);
    }
    let binom = binomial_row(m);
    let mut acc = T::zero();
    let mut ff = T::one();
    let mut cur = x.clone();
    for j in 0..=m {
        let term = T::from_bigint(&binom[j]) * ff.clone() * pows[m - j].clone();
        acc = if (m - j) % 2 == 1 { acc - term } else { acc + term };
        ff = ff * cur.clone();
        cur = cur - T::one();
    }
    acc
}

/// Floating C_m(λ,x) from the explicit sum with compensated accumulation.
pub fn charlier_eval<T: Real>(lambda: T, m: usize, x: T) -> Result<T> {
    if lambda == T::zero() || !lambda.is_finite() {
        return Err(invalid("Charlier evaluation needs a finite nonzero lambda"));
    }
    let mut sum = T::zero();
    let mut comp = T::zero();
    let mut binom = T::one();
    let mut ff = T::one();
    let mut pow = T::one();
    let mut cur = x;
    for j in 0..=m {
        let mag = binom * ff / pow;
        let term = if (m - j) % 2 == 1 { -mag } else { mag };
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp = comp + ((sum - t) + term);
        } else {
            comp = comp + ((term - t) + sum);
        }
        sum = t;
        binom = binom * T::lit((m - j) as f64) / T::lit((j + 1) as f64);
        ff = ff * cur;
        cur = cur - T::one();
        pow = pow * lambda;
    }
    Ok(sum + comp)
}
