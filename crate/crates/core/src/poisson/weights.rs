use crate::error::{invalid, Result};
use crate::scalar::Real;

/// Poisson(r) probabilities w_m = e^{-r} r^m/m! on a window [start, end).
#[derive(Clone, Debug, PartialEq)]
pub struct PoissonWeights<T> {
    pub r: T,
    pub start: usize,
    pub weights: Vec<T>,
    /// Upper bound on the probability mass outside the window.
    pub tail_bound: T,
}

impl<T: Real> PoissonWeights<T> {
    /// One past the last stored index.
    pub fn end(&self) -> usize {
        self.start + self.weights.len()
    }

    /// w_m, zero outside the stored window.
    pub fn weight(&self, m: usize) -> T {
        if m < self.start {
            return T::zero();
        }
        self.weights.get(m - self.start).copied().unwrap_or_else(T::zero)
    }

    pub fn stored_mass(&self) -> T {
        compensated(self.weights.iter().copied())
    }
}

fn compensated<T: Real>(values: impl Iterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for w in values {
        let t = sum + w;
        comp = comp + if sum.abs() >= w.abs() { (sum - t) + w } else { (w - t) + sum };
        sum = t;
    }
    sum + comp
}

// Mass above `hi`, given u_{hi+1}: the ratios u_{m+1}/u_m = r/(m+1) are
// bounded by r/(hi+2) past that point.
fn upper_tail<T: Real>(next: T, r: T, hi: usize) -> T {
    let ratio = r / T::lit((hi + 2) as f64);
    if ratio >= T::one() {
        return T::infinity();
    }
    next / (T::one() - ratio)
}

// Mass below `lo`, given u_{lo-1}: ratios u_{m-1}/u_m = m/r ≤ (lo-1)/r.
fn lower_tail<T: Real>(prev: T, r: T, lo: usize) -> T {
    if lo == 0 {
        return T::zero();
    }
    let ratio = T::lit((lo - 1) as f64) / r;
    if ratio >= T::one() {
        return T::infinity();
    }
    prev / (T::one() - ratio)
}

/// Weights on a window around the mode, grown until the tail mass bound is
/// at most 1 - coverage.
///
/// The weights are built by the ratio recurrence from the mode outward and
/// normalized by the window sum plus the tail bound, so nothing underflows
/// even for r around 10^6.
pub fn poisson_weights<T: Real>(r: T, coverage: T) -> Result<PoissonWeights<T>> {
    if !(r > T::zero()) || !r.is_finite() {
        return Err(invalid("poisson_weights needs r > 0"));
    }
    if !(coverage > T::zero() && coverage < T::one()) {
        return Err(invalid("coverage must lie in (0,1)"));
    }
    let target = (T::one() - coverage).max(T::min_positive_value());
    let mode = r.floor().to_usize().unwrap_or(usize::MAX);
    // Unnormalized u_m with u_mode = 1.
    let mut up: Vec<T> = vec![T::one()];
    let mut down: Vec<T> = Vec::new();
    let mut lo = mode;
    let mut hi = mode;
    let mut next_up = r / T::lit((mode + 1) as f64);
    let mut next_down = if mode > 0 { T::lit(mode as f64) / r } else { T::zero() };
    let mut total = T::one();
    loop {
        let tails = upper_tail(next_up, r, hi) + lower_tail(next_down, r, lo);
        if tails <= target * total {
            // Re-sum with compensation; the running total only steers the loop.
            let total = compensated(down.iter().chain(up.iter()).copied());
            let norm = total + tails;
            let mut weights: Vec<T> = down.iter().rev().chain(up.iter()).map(|&u| u / norm).collect();
            weights.shrink_to_fit();
            return Ok(PoissonWeights { r, start: lo, weights, tail_bound: tails / norm });
        }
        let grow_up = lo == 0 || next_up >= next_down;
        if grow_up {
            up.push(next_up);
            total = total + next_up;
            hi += 1;
            next_up = next_up * r / T::lit((hi + 1) as f64);
        } else {
            down.push(next_down);
            total = total + next_down;
            lo -= 1;
            next_down = if lo > 0 { next_down * T::lit(lo as f64) / r } else { T::zero() };
        }
    }
}
