//! Computational workbench for prime-rich sets built from admissible tuples:
//! the sets of shifts with large least prime factors, the W-trick, the
//! divisor-sum majorant and its correlations, local densities and Euler
//! factors, and searches for polynomial progressions.
//!
//! Data-parallel loops go through [`exec::Exec`]; with the `parallel` feature
//! disabled they run sequentially and produce identical results.

pub mod admissible;
pub mod arith;
pub mod correlation;
pub mod error;
pub mod exec;
pub mod local_factors;
pub mod progressions;
pub mod quad;
pub mod selftest;
pub mod sieve_measure;
pub mod wtrick;

pub use error::{Error, Result};
pub use exec::Exec;
