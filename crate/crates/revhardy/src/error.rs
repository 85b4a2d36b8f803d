//! Error type shared by all modules.

use thiserror::Error;

/// Which endpoint of an integration range caused a failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Zero,
    Infinity,
    Interior,
}

impl std::fmt::Display for Endpoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Endpoint::Zero => write!(f, "r -> 0"),
            Endpoint::Infinity => write!(f, "r -> inf"),
            Endpoint::Interior => write!(f, "interior"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    /// Exponent pair violates q <= p < 0.
    #[error("invalid exponents: {0}")]
    InvalidExponents(String),

    /// A power-law analysis proves the requested integral diverges.
    #[error("divergent integral at {endpoint}: {detail}")]
    DivergentIntegral { endpoint: Endpoint, detail: String },

    /// Adaptive refinement exhausted its subdivision budget.
    #[error("quadrature did not converge: estimate {estimate:.6e}, error {error:.3e}, tolerance {tolerance:.3e}")]
    NonConvergent {
        estimate: f64,
        error: f64,
        tolerance: f64,
    },

    /// Weight pair fails the local-integrability preconditions.
    #[error("inadmissible weights: {0}")]
    InadmissibleWeights(String),

    /// Power exponent outside the convergence range of a closed form.
    #[error("inadmissible exponent: {0}")]
    InadmissibleExponent(String),

    /// The balance condition linking (p, q, alpha, beta) fails.
    #[error("balance condition violated: residual {0:.3e}")]
    BalanceViolated(f64),

    /// Extremal-family tail fails its integrability requirement.
    #[error("inadmissible extremal tail: {0}")]
    InadmissibleTail(String),

    /// Importance density vanishes where the integrand is positive.
    #[error("degenerate sampler: {0}")]
    DegenerateSampler(String),

    /// Parameter set fails a theorem hypothesis.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Operation not available on the requested space.
    #[error("unsupported space: {0}")]
    UnsupportedSpace(String),

    /// Malformed run configuration.
    #[error("config error: {0}")]
    ConfigError(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub fn divergent(endpoint: Endpoint, detail: impl Into<String>) -> Self {
        Error::DivergentIntegral {
            endpoint,
            detail: detail.into(),
        }
    }
}
