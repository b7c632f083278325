use thiserror::Error;

use crate::exterior::ExteriorError;
use crate::expr::{DomainError, ParseError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("form is not Hamiltonian: residual {residual:e} at {point:?}")]
    NotHamiltonian { residual: f64, point: Vec<f64> },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
