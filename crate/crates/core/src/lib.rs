//! Binary rank, Boolean rank and regular 0,1 matrices.
//!
//! The crate bundles exact rank solvers for 0,1 matrices (real rank by
//! fraction-free elimination, binary rank as a minimum rectangle partition,
//! Boolean rank as a minimum rectangle cover), the machinery for composing a
//! Boolean function with a two-party gadget, certificate-complexity measures
//! of Boolean functions, biclique coverings of graphs with loops, and a
//! pipeline turning a square regular matrix into a simple regular graph with
//! a checkable biclique partition and chromatic lower bound.
//!
//! Exact arithmetic is generic over the integer type (see [`scalar`]); the
//! aliases below fix the concrete choices used by the rest of the crate.

pub mod boolfn;
pub mod cli;
pub mod entropy;
pub mod error;
pub mod gadget;
pub mod graph;
pub mod matrix;
pub mod rank;
pub mod scalar;
pub mod transform;

pub use error::{Error, Result};
pub use matrix::{BoolMatrix, Rectangle};

/// Exact rational used for discrepancies and probability bounds.
pub type Rational = num_rational::Ratio<i64>;

/// Arbitrary-precision rational, for quantities whose denominators can grow.
pub type BigRational = num_rational::Ratio<num_bigint::BigInt>;

/// Block distribution with arbitrary-precision weights.
pub type ExactDistribution = entropy::BlockDistribution<num_bigint::BigInt>;

/// Block distribution with 64-bit weights; enough for uniform fibers.
pub type Distribution64 = entropy::BlockDistribution<i64>;
