//! Numerical model of the Q-deformed Fock space over a finite grid.
//!
//! The crate works entirely in the discrete model: a grid `U_ε` with
//! quadrature weight `ε^j`, a symmetric coupling `Q` sampled on it, and the
//! Fock space truncated at a fixed particle number. On top of that it
//! provides
//!
//! - [`symcomb`]: permutations, reduced words and pair partitions,
//! - [`kernel`]: grids, grid functions and validated coupling kernels,
//! - [`fock`]: the Yang-Baxter operators `T_i`, the Gram operators `P^(n)`
//!   and `R^(n)`, the Q-inner product and the left/right ladder operators,
//! - [`moments`]: pair-partition evaluation of vacuum moments and the
//!   matrix oracle it is checked against,
//! - [`spectral`]: Q-operator norms, the operator estimates used for the
//!   spectral gap of `N_d`, and the gap report itself.
//!
//! The crate is `no_std` (with `alloc`) when built without the default
//! `std` feature.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod fock;
pub mod kernel;
pub mod linalg;
pub mod moments;
pub mod spectral;
pub mod symcomb;

mod math;
#[cfg(test)]
mod test_support;

pub use error::{Error, Result};
pub use fock::{FockOperator, FockVector, LevelMap, TruncatedFockSpace};
pub use kernel::{Grid, GridFunction, QKernel};
pub use symcomb::{Pairing, Permutation, ReducedWord};

/// Tolerance for identities that hold in exact algebra (products and sums of
/// monomial matrices).
pub const TOL_EXACT: f64 = 1e-12;
/// Tolerance for results that pass through one inverse of a Gram operator.
pub const TOL_SOLVE: f64 = 1e-10;
/// Slack allowed on operator-norm bounds.
pub const TOL_NORM: f64 = 1e-9;
