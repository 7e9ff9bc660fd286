use crate::error::{invalid, Result};
use crate::scalar::Real;

fn factorial_real<T: Real>(m: usize) -> T {
    (1..=m).fold(T::one(), |acc, k| acc * T::lit(k as f64))
}

/// m!·|y|^{⌊m/2⌋}/2, a majorant for |τ_m(y)| when |y| ≥ 1; 1 at m = 0.
pub fn tau_bound<T: Real>(m: usize, y: T) -> Result<T> {
    if !(y.abs() >= T::one()) {
        return Err(invalid("tau_bound needs |y| >= 1"));
    }
    if m == 0 {
        return Ok(T::one());
    }
    Ok(factorial_real::<T>(m) * y.abs().powi((m / 2) as i32) / T::lit(2.0))
}

/// ½·N!·|y|^{N/2}·e^{|y-t|/√|y|}, a majorant for |t^N C_N(t,y)| when |y| ≥ 1.
pub fn charlier_bound<T: Real>(n: usize, t: T, y: T) -> Result<T> {
    if !(y.abs() >= T::one()) {
        return Err(invalid("charlier_bound needs |y| >= 1"));
    }
    let ya = y.abs();
    Ok(T::lit(0.5)
        * factorial_real::<T>(n)
        * ya.powf(T::lit(n as f64) / T::lit(2.0))
        * ((y - t).abs() / ya.sqrt()).exp())
}
