//! Numerical laboratory for the two-dimensional distribution of `ζ(1+it)`.
//!
//! The crate is organised by subject:
//!
//! * [`arith`]: primes, smooth numbers, special functions, the Bessel constant `C`
//!   and the Mertens-type constant `c₀`.
//! * [`divisor`]: complex-order divisor functions and the moment series built on them.
//! * [`euler`]: truncated and rotated Euler products on the 1-line, and `ζ(1+it)` itself.
//! * [`randmodel`]: the random Euler product `L(1,X)` and its tails.
//! * [`torus`]: exact box measures for `({t log p_j / 2π})_j`, degree plans and
//!   minima of linear forms in logarithms.
//! * [`dirichlet`]: `L(1,χ)` for every character modulo a prime.
//! * [`experiments`]: t-grid experiments that tie the modules together.
//!
//! Every quantity that has a closed form, a quadrature or an enumeration behind it
//! exposes enough of its internals for the two routes to be compared in tests.

#![forbid(unsafe_code)]

pub mod arith;
pub mod dirichlet;
pub mod divisor;
mod error;
pub mod euler;
pub mod experiments;
pub mod randmodel;
pub mod reduce;
pub mod stats;
pub mod torus;

pub use error::{Error, Result};
pub use num_complex::Complex64;
