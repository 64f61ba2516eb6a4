use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite entries in {0}")]
    NonFinite(&'static str),
    #[error("singular matrix in linear solve")]
    Singular,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("time {t} outside [0, {t_g}]")]
    TimeOutOfRange { t: f64, t_g: f64 },
    #[error("quadrature did not reach tolerance {target:e}: estimate {value:e}, error {estimate:e}")]
    Quadrature { value: f64, estimate: f64, target: f64 },
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
