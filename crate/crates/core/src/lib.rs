//! Finite non-degenerate involutive set-theoretic solutions of the
//! Yang–Baxter equation.
//!
//! The crate validates solutions, cables them, analyses their
//! decomposability and primitivity, computes the brace structure of their
//! permutation groups and their Dehornoy class, enumerates all solutions of
//! small size up to isomorphism, and runs a harness that checks known
//! structural results against all of the above.

pub mod brace;
pub mod cabling;
pub mod enumerate;
pub mod fixtures;
pub mod format;
pub mod perm;
pub mod solution;
pub mod verify;

pub use perm::{BlockSystem, Partition, PermError, Permutation};
pub use solution::{RetractionResult, Solution, SolutionError};
