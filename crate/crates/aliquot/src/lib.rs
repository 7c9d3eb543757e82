//! Search for elliptic aliquot cycles of fixed length and compute the
//! conjectural constants that govern their distribution.
//!
//! An aliquot cycle of length L for an elliptic curve E over Q is an
//! L-tuple of distinct good primes with `p_{i+1} = |E(F_{p_i})|` cyclically;
//! the L = 2 case is an amicable pair.  The crate provides:
//!
//! * exact curve arithmetic and point counting ([`ff_curve`], [`point_count`]),
//! * the cycle/sequence search itself ([`cycle_search`]),
//! * trace/determinant combinatorics of subgroups of GL2(Z/nZ) and
//!   transfer-matrix tuple counts ([`gl2_stats`]),
//! * Galois image models, trace-determinant graphs and the closed-walk
//!   positivity criterion ([`galois_models`]),
//! * assembly of the constants and prediction integrals ([`constants`]),
//! * brute-force oracle suites cross-checking all of the above ([`verify`]).

pub mod constants;
pub mod cycle_search;
pub mod error;
pub mod ff_curve;
pub mod galois_models;
pub mod gl2_stats;
pub mod point_count;
pub mod primes;
pub mod verify;

pub use error::{Error, Result};
pub use ff_curve::RationalCurveModel;
