use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: particle number must be at least 1, got {0}")]
    InvalidDimension(i64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("negative detection noise sigma = {0}")]
    NegativeSigma(f64),

    #[error("scheme {0} has no preparation unitary")]
    UnsupportedForUnitary(&'static str),

    #[error("ill-conditioned distribution at outcome index {index}: p = {p:.3e}, dp = {dp:.3e}")]
    IllConditioned { index: usize, p: f64, dp: f64 },

    #[error("no crossing of overlap 1/2 found for phi in (0, pi]")]
    NoPhaseCrossing,

    #[error("could not complete orthonormal basis: {found} of {needed} vectors")]
    BasisDeficit { found: usize, needed: usize },

    #[error("mixed states need an explicit phase axis")]
    AxisRequired,

    #[error("{what} requires an even particle number, got N = {n}")]
    OddParticleNumber { what: &'static str, n: usize },

    #[error("readout {readout} is not available for scheme {scheme}")]
    UnsupportedReadout {
        readout: &'static str,
        scheme: &'static str,
    },

    #[error("at sigma = {sigma}, phi = {phi}: {source}")]
    AtGridPoint {
        sigma: f64,
        phi: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
