use thiserror::Error;

use crate::helmholtz::FdError;
use crate::inverse::InverseError;
use crate::models::ModelError;
use crate::spectral::SpectralError;
use crate::waveguide::DesignError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Inverse(#[from] InverseError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Fd(#[from] FdError),
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
