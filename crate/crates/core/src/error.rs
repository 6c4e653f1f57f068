//! Error type shared across the solver.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("unsupported polynomial degree {0} (supported: 0..=2)")]
    UnsupportedDegree(usize),
    #[error("unsupported quadrature order {0}")]
    UnsupportedQuadrature(usize),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("vacuum formation in Riemann problem")]
    VacuumFormation,
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),
    #[error("zero advection speed")]
    ZeroSpeed,
    #[error("Newton did not converge after {iterations} iterations (residual {residual:.3e})")]
    NewtonNonConvergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },
    #[error("singular matrix")]
    SingularMatrix,
    #[error("defective matrix: eigenvalue {0:?} lacks a full eigenspace")]
    DefectiveMatrix(num_complex::Complex64),
    #[error("eigenvectors nearly parallel; modal weights ill-conditioned")]
    IllConditionedModes,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("step {step} failed at t = {time:.6}: {source}")]
    StepFailed {
        step: usize,
        time: f64,
        #[source]
        source: Box<SolverError>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SolverError>;
