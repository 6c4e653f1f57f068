//! One-dimensional discontinuous Galerkin solver (P0-P2) for hyperbolic
//! conservation laws with diagonally implicit Runge-Kutta time integration,
//! predictor-frozen space limiters, a Jacobian-free Newton-Krylov stage
//! solver, and a Fourier dissipation-dispersion analysis engine for the
//! fully discrete schemes.

pub mod basis;
pub mod driver;
pub mod error;
pub mod fourier;
pub mod grid;
pub mod limiting;
pub mod problems;
pub mod solver;
pub mod spatial;
pub mod state;
pub mod stepper;
pub mod tableau;

pub use error::{Result, SolverError};
