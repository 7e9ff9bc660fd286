//! Exact polynomial families: τ_m, Mahler ρ_j, Charlier C_m(λ,x), falling
//! factorials, Stirling numbers of the second kind and Ramanujan's b_{kn}.
//!
//! Constructors memoize integer coefficient rows behind `RwLock`s, so they
//! are safe to call from any number of threads.

mod bounds;
mod combinatorics;
mod families;
mod poly;

pub use bounds::{charlier_bound, tau_bound};
pub use combinatorics::{binomial, binomial_row, factorial, falling_factorial, ramanujan_b, stirling2, StirlingTable};
pub use families::{
    charlier_eval, charlier_poly, falling_factorial_poly, rho_coeffs, rho_poly, scaled_charlier_poly,
    scaled_charlier_value, tau_at_integer, tau_coeffs, tau_poly,
};
pub use poly::IntPolynomial;
