use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("the GPSD family has a Dirac factor in the {0} coordinate; it has no pointwise value there")]
    DiracFactor(&'static str),
    #[error("quadrature did not converge: error estimate {estimate:e} exceeds tolerance {tol:e}")]
    QuadratureNotConverged { estimate: f64, tol: f64 },
    #[error("sampling time must be positive, got {0}")]
    InvalidSamplingTime(f64),
    #[error("index type does not match the kernel time domain: {0}")]
    DomainMismatch(String),
    #[error("filter pole radius must lie in [0, 1), got {0}")]
    InvalidFilterPole(f64),
    #[error("DTFT truncation {truncation} insufficient: |K1({truncation})| = {tail:e} >= 1e-12")]
    TruncationInsufficient { truncation: usize, tail: f64 },
    #[error("effective support of the GPSD cannot be bracketed at the 1e-10 mass level")]
    UnboundedSupport,
    #[error("no sampler available for this GPSD family: {0}")]
    SamplerNotAvailable(String),
    #[error("matrix not positive definite after maximum jitter {max_jitter:e}")]
    NotPositiveDefinite { max_jitter: f64 },
    #[error("imaginary residue {residue:e} of the reconstructed estimate exceeds 1e-8; increase n_theta")]
    ImaginaryResidue { residue: f64 },
    #[error("optimization failed: {0}")]
    OptimizationFailed(String),
    #[error("pole must satisfy |p| < 1 and 0 < angle(p) < pi, got {0}")]
    InvalidPole(String),
    #[error("modulated sequence diverges: last-decade norm {tail:e} exceeds first-decade norm {head:e}")]
    DivergentModulation { head: f64, tail: f64 },
    #[error("simulated output grew beyond 1e6 times the input norm; system is unstable")]
    UnstableSystem,
    #[error("true impulse response is constant; average fit is undefined")]
    DegenerateTruth,
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperParam(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
