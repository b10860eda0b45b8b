//! Benchmark functions and the stochastic elliptic and Kraichnan–Orszag
//! problems.

mod elliptic;
mod functions;
mod ko;

pub use elliptic::{
    differentiation_matrix, elliptic_moments, elliptic_solve_at, EllipticConfig, Moments,
};
pub use functions::{default_coefficients, test_function, TestFunction, TestKind};
pub use ko::{
    ko_invariant, ko_monte_carlo, ko_rhs, ko_run, rk3_step, KoCase, KoConfig, KoResult, KoRow,
};
