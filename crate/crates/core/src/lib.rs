//! Adaptive sparse-grid collocation on nested piecewise-polynomial
//! (multiwavelet) bases with Lagrange or Hermite interpolation points.
//!
//! The crate is organised bottom-up:
//!
//! - [`mra1d`]: exact 1D point families and their hierarchical bases;
//! - [`transform1d`]: 1D pyramid transforms, evaluation and quadrature;
//! - [`sparse_nd`]: sparse/full tensor spaces and the d-dimensional transforms;
//! - [`adaptive`]: adaptive refinement with hash and leaf tables;
//! - [`analysis`]: sampled error norms, convergence tables, dense oracles;
//! - [`uq`]: test functions and the stochastic elliptic / Kraichnan–Orszag problems.

pub mod adaptive;
pub mod analysis;
mod error;
pub mod mra1d;
pub mod sparse_nd;
pub mod transform1d;
pub mod uq;

pub use error::{Error, Result};
