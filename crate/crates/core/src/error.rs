use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    #[error("quadrature did not converge (achieved error bound {bound:.3e})")]
    Quadrature { bound: f64 },

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("unknown measure: {0}")]
    UnknownMeasure(String),

    #[error("invalid tail dependence function: {0}")]
    InvalidTdf(String),
}

pub(crate) fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}
