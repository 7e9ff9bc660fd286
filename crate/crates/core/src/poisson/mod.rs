//! Poisson transforms and the majorant operator E.
//!
//! f(x) = e^{-x} Σ A_m x^m/m!, and f^{(k)} is the same average of Δ^k A_m.
//! All sums run in extended range over an adaptive window around the
//! Poisson bulk; see [`eval_poisson_transform`].

mod algebra;
mod gamma;
mod transform;
mod weights;

pub use algebra::{e_algebra_check, e_bound_split, e_bound_split_parts, EAlgebraReport, SplitBound};
pub use gamma::{
    factorial_ext, incomplete_gamma_split, incomplete_gamma_split_ext, ln_factorial, poisson_cdf_split, poisson_pmf,
};
pub use transform::{
    e_op, eval_poisson_transform, eval_poisson_transform_exact, poisson_average, poisson_probability,
    PoissonEvalReport, WINDOW_CAP,
};
pub use weights::{poisson_weights, PoissonWeights};
