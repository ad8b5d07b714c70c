//! Kernel-based linear system identification through generalized power
//! spectral densities (GPSDs): a GPSD is a nonnegative density over decay
//! rate and frequency whose integral of exponentially decaying cosines
//! produces a nonstationary covariance kernel. The crate builds the classic
//! identification priors (TC, SS, DC, stationary and locally stationary
//! families, integrated and filtered kernels) from this harmonic viewpoint,
//! estimates impulse responses with Gaussian-process regression in the time
//! or frequency domain, approximates kernels with deterministic or random
//! feature expansions, and ships an experiment harness for benchmark and
//! demo studies.

pub mod analysis;
pub mod config;
pub mod error;
pub mod features;
pub mod fit;
pub mod gpsd;
pub mod harness;
pub mod kernels;
pub mod opt;
pub mod psd;
pub mod quad;
pub mod regression;

pub use error::{Error, Result};
