use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numerics error: {0}")]
    Numerics(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("form violation: {0}")]
    Form(String),
    #[error("eigenspace split failed: {0}")]
    DegenerateSplit(String),
    #[error("representation is not generic: {0}")]
    NotGeneric(String),
    #[error("consistency failure: {0}")]
    Consistency(String),
    #[error("zeta integral vanishes: {0}")]
    DegenerateZeta(String),
    #[error("zeta integrals are not proportional: {0}")]
    Proportionality(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
