use crate::error::{invalid, Result};
use crate::extfloat::{Compensated, ExtFloat};
use crate::scalar::Real;

/// ln n!, exact summation below 256 and the Stirling series above.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n < 256 {
        let mut acc = Compensated::new();
        for k in 2..=n {
            acc.add((k as f64).ln());
        }
        return acc.value();
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + series
}

/// n! without overflow.
pub fn factorial_ext(n: u64) -> ExtFloat {
    if n <= 170 {
        return ExtFloat::from_f64((1..=n).fold(1.0, |acc, k| acc * k as f64));
    }
    ExtFloat::exp(ln_factorial(n))
}

/// e^{-r} r^m / m! in log space.
pub fn poisson_pmf(m: u64, r: f64) -> ExtFloat {
    if r == 0.0 {
        return if m == 0 { ExtFloat::ONE } else { ExtFloat::ZERO };
    }
    ExtFloat::exp(-r + m as f64 * r.ln() - ln_factorial(m))
}

/// (P(X ≤ m), P(X > m)) for X ~ Poisson(r). The smaller side is summed
/// directly and the other one is its complement.
pub fn poisson_cdf_split(m: u64, r: f64) -> (ExtFloat, ExtFloat) {
    if r == 0.0 {
        return (ExtFloat::ONE, ExtFloat::ZERO);
    }
    let mut terms = Vec::new();
    if (m as f64) < r {
        let mut w = poisson_pmf(m, r);
        let mut running = ExtFloat::ZERO;
        let mut k = m;
        loop {
            terms.push(w);
            running += w;
            if k == 0 {
                break;
            }
            w *= ExtFloat::from_f64(k as f64 / r);
            k -= 1;
            if w < running * 1e-20 {
                break;
            }
        }
        let lower = crate::extfloat::ext_sum(&terms);
        (lower, ExtFloat::ONE - lower)
    } else {
        let mut k = m + 1;
        let mut w = poisson_pmf(k, r);
        let mut running = ExtFloat::ZERO;
        loop {
            terms.push(w);
            running += w;
            k += 1;
            w *= ExtFloat::from_f64(r / k as f64);
            if w.is_zero() || w < running * 1e-20 {
                break;
            }
        }
        let upper = crate::extfloat::ext_sum(&terms);
        (ExtFloat::ONE - upper, upper)
    }
}

/// (γ(m+1,R), Γ(m+1,R)) in extended range.
pub fn incomplete_gamma_split_ext(m: u64, r: f64) -> (ExtFloat, ExtFloat) {
    let (le, gt) = poisson_cdf_split(m, r);
    let f = factorial_ext(m);
    (gt * f, le * f)
}

/// (γ(m+1,R), Γ(m+1,R)) with Γ(m+1,R) = m!·e^{-R}·Σ_{k≤m} R^k/k! and
/// γ = m! - Γ. Values past the range of `T` saturate to infinity.
pub fn incomplete_gamma_split<T: Real>(m: u64, r: T) -> Result<(T, T)> {
    let rf = r.as_f64();
    if !(rf > 0.0) || !rf.is_finite() {
        return Err(invalid("incomplete_gamma_split needs R > 0"));
    }
    let (lo, up) = incomplete_gamma_split_ext(m, rf);
    Ok((T::lit(lo.to_f64()), T::lit(up.to_f64())))
}
