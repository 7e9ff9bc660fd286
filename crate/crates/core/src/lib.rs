//! Real-variable depoissonization and its inverse.
//!
//! * [`polyfam`]: exact τ_m, Mahler ρ_j, Charlier, Stirling and b_{kn} tables.
//! * [`poisson`]: Poisson weights, transforms f^{(k)}(r), the majorant E(f;r),
//!   integer-order incomplete gamma and the E-algebra checks.
//! * [`sequences`]: coefficient providers (geometric and exponential
//!   mixtures, the symmetric trie, files) with exactness metadata.
//! * [`depoissonize`]: Charlier–Poisson partial sums for A_n with certified
//!   error bounds.
//! * [`ramanujan`]: the inverse expansions of f(R) in finite differences or
//!   derivatives.
//! * [`verify`]: the identity and bound suites used by the command line tool.
//!
//! Polynomials and identities are exact over [`Rational`]; analytic quantities
//! are `f64` or [`ExtFloat`] when they leave the `f64` exponent range.
//!
//! ```
//! use depoisson::depoissonize::certify;
//! use depoisson::sequences::trie_expectation;
//! use depoisson::{SequenceProvider, Theorem};
//!
//! let trie = trie_expectation(400)?;
//! let cert = certify(&trie, 64, 2, 64.0, Theorem::AtN)?;
//! assert!(cert.covers(trie.term_ext(64)?));
//! println!("A_64 ≈ {} ± {}", cert.partial_sum, cert.bound);
//! # Ok::<(), depoisson::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod depoissonize;
pub mod error;
pub mod extfloat;
pub mod poisson;
pub mod polyfam;
pub mod ramanujan;
pub mod scalar;
pub mod sequences;
pub mod verify;

pub use error::{Error, Result};
pub use extfloat::ExtFloat;
pub use scalar::{parse_rational, rational_from_f64, rational_to_f64, Real, Scalar};

/// Arbitrary-precision rational, always in lowest terms.
pub type Rational = num_rational::BigRational;
/// Arbitrary-precision integer.
pub type Integer = num_bigint::BigInt;

pub use depoissonize::{ExpansionCertificate, Theorem};
pub use poisson::{PoissonEvalReport, PoissonWeights};
pub use polyfam::{IntPolynomial, StirlingTable};
pub use ramanujan::{InverseExpansionReport, RateFit};
pub use sequences::{Coeff, Exactness, SequenceProvider};

pub type PoissonWeightsF64 = PoissonWeights<f64>;
pub type PoissonWeightsF32 = PoissonWeights<f32>;
