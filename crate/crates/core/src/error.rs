use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("root bracket [{lo}, {hi}] does not straddle a sign change")]
    Bracket { lo: f64, hi: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Fourier modes 0 and 1 span dilations and translations; the second
    /// derivative formulas are only stated on their orthogonal complement.
    #[error(
        "mode {mode} not allowed: modes 0 and 1 (dilation and translation) must be removed first"
    )]
    ModeNotAllowed { mode: usize },

    #[error("no eigenvalue in bracket [{lo}, {hi}]: smallest sigma found was {best_sigma:e}")]
    NoEigenvalueInBracket { lo: f64, hi: f64, best_sigma: f64 },

    #[error("ill-conditioned collocation system: {0}")]
    IllConditioned(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("certificate failure: lowest eigenvalue {mu1} is not negative")]
    Certificate { mu1: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
