use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the requested quantity.
    #[error("domain error: {0}")]
    Domain(String),
    /// An exact enumeration or materialization would exceed its size cap.
    #[error("envelope exceeded: {0}")]
    Envelope(String),
    /// A rejection sampler hit its attempt cap.
    #[error("rejection sampler exceeded {attempts} attempts")]
    RetryCap { attempts: u64 },
    /// Adaptive quadrature ran out of refinement depth before meeting its tolerance.
    #[error("quadrature did not converge: estimated error {error:e} at max depth {depth}")]
    Quadrature { error: f64, depth: usize },
    /// A sampled integer does not fit the count type.
    #[error("count overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
