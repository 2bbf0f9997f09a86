use thiserror::Error;

pub type Result<T> = std::result::Result<T, DimerError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DimerError {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The (z, θ) chart is singular at z = ±1; use the amplitude chart there.
    #[error("phase chart is singular at z = {z}")]
    EndpointSingularity { z: f64 },

    #[error("outside the domain of {what}: {detail}")]
    Domain { what: &'static str, detail: String },

    #[error("{what} did not converge within {iterations} iterations")]
    ConvergenceFailure {
        what: &'static str,
        iterations: usize,
    },

    #[error("point (z = {z}, theta = {theta}) is not stationary (residual {residual:e})")]
    NotStationary { z: f64, theta: f64, residual: f64 },

    #[error("ambiguous branch continuation at eta = {eta}, z = {z}")]
    BranchMatchingAmbiguous { eta: f64, z: f64 },

    #[error("step size underflow at tau = {tau} (dt = {dt:e})")]
    StepUnderflow { tau: f64, dt: f64 },

    #[error(
        "no isolated doublet: (lambda_2 - lambda_minus)/(lambda_minus - lambda_plus) = {ratio}"
    )]
    NoDoubletGap { ratio: f64 },

    #[error("grid refinement exceeded the cap of {cap} points without converging")]
    GridCapExceeded { cap: usize },

    #[error("mirror symmetry violated in {what}: {detail}")]
    SymmetryViolation { what: &'static str, detail: String },

    #[error("invalid potential: {0}")]
    InvalidPotential(String),
}

impl DimerError {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        DimerError::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}
