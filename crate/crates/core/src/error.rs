//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |A - A^dag| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("bad operator dimension: expected {expected}, got {got}")]
    BadDim { expected: usize, got: usize },

    #[error("invariance check failed: {what} (norm {norm:e})")]
    CheckFailed { what: String, norm: f64 },

    #[error("steady state is not unique: null space dimension {dim}")]
    DegenerateSteadyState { dim: usize },

    #[error("augmented steady-state system is singular")]
    SolveFailed,

    #[error("heat current has an imaginary part {imag:e}")]
    NonRealCurrent { imag: f64 },

    #[error("time integration unstable: {what} drift {drift:e}")]
    StepUnstable { what: &'static str, drift: f64 },

    #[error("current slope {slope:e} is zero; differential resistance is infinite")]
    ZeroSlope { slope: f64 },

    #[error("dJ_M/dT_M = {slope:e} vanishes; amplification diverges")]
    Divergent { slope: f64 },

    #[error("population inversion on qubit {site}: excited {excited} > ground {ground}")]
    PopulationInversion { site: char, ground: f64, excited: f64 },

    #[error("landmark not found: {0}")]
    NotFound(&'static str),

    #[error("{failed} of {total} quadrature nodes failed ({lost_weight:.3} of the weight lost)")]
    NodeFailure { failed: usize, total: usize, lost_weight: f64 },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid value for `{key}`: {msg}")]
    Validation { key: String, msg: String },
}

impl Error {
    /// Stable snake-case name of the variant, for machine-readable reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotHermitian { .. } => "not_hermitian",
            Error::NoConvergence { .. } => "no_convergence",
            Error::BadDim { .. } => "bad_dim",
            Error::CheckFailed { .. } => "check_failed",
            Error::DegenerateSteadyState { .. } => "degenerate_steady_state",
            Error::SolveFailed => "solve_failed",
            Error::NonRealCurrent { .. } => "non_real_current",
            Error::StepUnstable { .. } => "step_unstable",
            Error::ZeroSlope { .. } => "zero_slope",
            Error::Divergent { .. } => "divergent",
            Error::PopulationInversion { .. } => "population_inversion",
            Error::NotFound(_) => "not_found",
            Error::NodeFailure { .. } => "node_failure",
            Error::Parse { .. } => "parse",
            Error::Validation { .. } => "validation",
        }
    }
}
