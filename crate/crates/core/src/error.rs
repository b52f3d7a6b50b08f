use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index out of range: {0}")]
    Index(String),

    #[error("invalid value for `{key}`: {reason}")]
    InvalidParameter { key: &'static str, reason: String },

    #[error("eigensolver failure: {0}")]
    Eigen(String),

    #[error("linear solve failed: {0}")]
    Solve(String),

    #[error("steady state is not unique: null space of the constrained generator has dimension {nullity}")]
    NonUniqueSteadyState { nullity: usize },

    #[error("step size {dt:e} exceeds the stability bound {max:e}")]
    StepSize { dt: f64, max: f64 },

    #[error("state is not normalized (norm squared = {0})")]
    NotNormalized(f64),

    #[error("hamiltonian contains drive couplings; diagonalize expects the undriven H0")]
    DrivenHamiltonian,

    #[error("grid error: {0}")]
    Grid(String),

    #[error("invalid sweep plan: {0}")]
    Plan(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(key: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        key,
        reason: reason.into(),
    }
}
