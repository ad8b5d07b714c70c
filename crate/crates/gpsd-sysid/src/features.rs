//! Finite-dimensional feature expansions of a GPSD kernel. Each atom
//! `(alpha, omega, w)` contributes the pair of features
//! `sqrt(w/2) e^{alpha t} (cos(omega t), sin(omega t))`, so that
//! `z(t)^T z(s) = 1/2 sum_k w_k e^{alpha_k (t+s)} cos(omega_k (t-s))`
//! approximates the harmonic representation of the kernel.

use crate::error::{Error, Result};
use crate::gpsd::{warped_psd, ContinuousGpsd, GpsdFamily};
use crate::kernels::TimeDomain;
use crate::psd::{Psd1d, PsdShape};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    /// Decay rate in continuous-time units.
    pub alpha: f64,
    /// Frequency in continuous-time units, `>= 0`.
    pub omega: f64,
    /// Mass assigned to the atom.
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExpansionMode {
    Grid { n_alpha: usize, n_omega: usize },
    Random { seed: u64, num_samples: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureExpansion {
    pub atoms: Vec<Atom>,
    pub mode: ExpansionMode,
    pub domain: TimeDomain,
}

impl FeatureExpansion {
    /// Number of scalar features (two per atom).
    pub fn dim(&self) -> usize {
        2 * self.atoms.len()
    }

    /// Sum of atom weights; converges to the total power `int int phi` of the
    /// generating GPSD as the expansion is refined.
    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    fn time(&self, t: f64) -> Result<f64> {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::DomainMismatch(format!("feature index must be >= 0, got {t}")));
        }
        match self.domain {
            TimeDomain::ContinuousTime => Ok(t),
            TimeDomain::DiscreteTime { sampling_time } => {
                if t.fract() != 0.0 {
                    return Err(Error::DomainMismatch(format!(
                        "discrete-time features require integer indices, got {t}"
                    )));
                }
                Ok(t * sampling_time)
            }
        }
    }

    pub fn feature_vector(&self, t: f64) -> Result<DVector<f64>> {
        let tc = self.time(t)?;
        let mut z = DVector::zeros(self.dim());
        for (k, a) in self.atoms.iter().enumerate() {
            let amp = (a.weight / 2.0).sqrt() * (a.alpha * tc).exp();
            z[2 * k] = amp * (a.omega * tc).cos();
            z[2 * k + 1] = amp * (a.omega * tc).sin();
        }
        Ok(z)
    }

    /// `n x dim` matrix with one feature vector per row.
    pub fn feature_matrix(&self, indices: &[f64]) -> Result<DMatrix<f64>> {
        let mut m = DMatrix::zeros(indices.len(), self.dim());
        for (i, &t) in indices.iter().enumerate() {
            let z = self.feature_vector(t)?;
            m.set_row(i, &z.transpose());
        }
        Ok(m)
    }

    /// The kernel induced by the expansion, `z(t)^T z(s)` in closed form.
    pub fn kernel(&self, t: f64, s: f64) -> Result<f64> {
        let (tc, sc) = (self.time(t)?, self.time(s)?);
        let mut acc = 0.0;
        for a in &self.atoms {
            acc += a.weight * (a.alpha * (tc + sc)).exp() * (a.omega * (tc - sc)).cos();
        }
        Ok(0.5 * acc)
    }
}

/// Decay-rate nodes and cell widths for each GPSD family.
fn alpha_nodes(gpsd: &ContinuousGpsd, n_alpha: usize) -> Result<Vec<(f64, f64)>> {
    match &gpsd.family {
        GpsdFamily::Stationary { .. } => Ok(vec![(0.0, 1.0)]),
        GpsdFamily::EclsDirac { alpha0, .. } => Ok(vec![(*alpha0, 1.0)]),
        GpsdFamily::Boxcar { alpha_min, alpha_max, .. }
        | GpsdFamily::BoxcarWarped { alpha_min, alpha_max } => {
            let d = (alpha_max - alpha_min) / n_alpha as f64;
            Ok((0..n_alpha)
                .map(|i| (alpha_min + (i as f64 + 0.5) * d, d))
                .collect())
        }
        GpsdFamily::Separable { decay, .. } => {
            let b = decay.folded_quantile(1.0 - 1e-10)?;
            let d = b / n_alpha as f64;
            Ok((0..n_alpha).map(|i| (-(i as f64 + 0.5) * d, d)).collect())
        }
    }
}

/// Frequency nodes at the quantiles of a marginal density restricted to
/// `omega >= 0`, with midpoint cell edges.
fn omega_nodes(marginal: &Psd1d, n_omega: usize) -> Result<Vec<(f64, f64)>> {
    let nodes: Vec<f64> = (0..n_omega)
        .map(|k| marginal.folded_quantile((k as f64 + 0.5) / n_omega as f64))
        .collect::<Result<_>>()?;
    let mut edges = Vec::with_capacity(n_omega + 1);
    edges.push(0.0);
    for k in 0..n_omega - 1 {
        edges.push(0.5 * (nodes[k] + nodes[k + 1]));
    }
    let last_edge = *edges.last().unwrap();
    edges.push(nodes[n_omega - 1] + (nodes[n_omega - 1] - last_edge));
    Ok((0..n_omega).map(|k| (nodes[k], edges[k + 1] - edges[k])).collect())
}

/// Deterministic grid expansion: decay nodes uniform over the band (or the
/// Dirac location), frequency nodes at quantiles of the frequency marginal,
/// weights `2 * dalpha * domega * phi(alpha_i, omega_k)` (the factor 2 folds
/// the negative frequencies onto the retained `omega >= 0` nodes).
pub fn grid_expansion(
    gpsd: &ContinuousGpsd,
    n_alpha: usize,
    n_omega: usize,
    domain: TimeDomain,
) -> Result<FeatureExpansion> {
    if n_alpha == 0 || n_omega == 0 {
        return Err(Error::InvalidConfig("grid expansion needs n_alpha, n_omega >= 1".into()));
    }
    let alphas = alpha_nodes(gpsd, n_alpha)?;
    let mut atoms = Vec::new();
    match &gpsd.family {
        GpsdFamily::Stationary { psd1 }
        | GpsdFamily::EclsDirac { psd1, .. }
        | GpsdFamily::Boxcar { psd1, .. } => {
            let omegas = omega_nodes(psd1, n_omega)?;
            for &(alpha, da) in &alphas {
                for &(omega, dw) in &omegas {
                    atoms.push(Atom { alpha, omega, weight: 2.0 * da * dw * psd1.eval(omega) });
                }
            }
        }
        GpsdFamily::BoxcarWarped { .. } => {
            // marginal over the chosen decay nodes guides the quantile grid
            let marginal = Psd1d::new(
                PsdShape::Mixture(alphas.iter().map(|&(a, _)| (1.0, warped_psd(a))).collect()),
                1.0,
                0.0,
                1.0,
            )?;
            let omegas = omega_nodes(&marginal, n_omega)?;
            for &(alpha, da) in &alphas {
                let slice = warped_psd(alpha);
                for &(omega, dw) in &omegas {
                    atoms.push(Atom { alpha, omega, weight: 2.0 * da * dw * slice.eval(omega) });
                }
            }
        }
        GpsdFamily::Separable { decay, psd1 } => {
            let omegas = omega_nodes(psd1, n_omega)?;
            for &(alpha, da) in &alphas {
                let dens = decay.eval(alpha);
                for &(omega, dw) in &omegas {
                    atoms.push(Atom { alpha, omega, weight: 2.0 * da * dw * dens * psd1.eval(omega) });
                }
            }
        }
    }
    Ok(FeatureExpansion {
        atoms,
        mode: ExpansionMode::Grid { n_alpha, n_omega },
        domain,
    })
}

/// Monte Carlo expansion: atoms sampled from the normalized GPSD, each with
/// weight `total_power / num_samples`, making the induced kernel an unbiased
/// estimate of the exact one.
pub fn random_expansion(
    gpsd: &ContinuousGpsd,
    num_samples: usize,
    seed: u64,
    domain: TimeDomain,
) -> Result<FeatureExpansion> {
    if num_samples == 0 {
        return Err(Error::InvalidConfig("random expansion needs num_samples >= 1".into()));
    }
    let total = gpsd.total_power(1e-8)?;
    let w = total / num_samples as f64;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut atoms = Vec::with_capacity(num_samples);
    for _ in 0..num_samples {
        let (alpha, omega) = sample_point(gpsd, &mut rng)?;
        atoms.push(Atom { alpha, omega: omega.abs(), weight: w });
    }
    Ok(FeatureExpansion {
        atoms,
        mode: ExpansionMode::Random { seed, num_samples },
        domain,
    })
}

fn sample_point(gpsd: &ContinuousGpsd, rng: &mut ChaCha12Rng) -> Result<(f64, f64)> {
    use rand::Rng;
    match &gpsd.family {
        GpsdFamily::Stationary { psd1 } => Ok((0.0, psd1.sample(rng)?)),
        GpsdFamily::EclsDirac { alpha0, psd1 } => Ok((*alpha0, psd1.sample(rng)?)),
        GpsdFamily::Boxcar { alpha_min, alpha_max, psd1 } => {
            let a = rng.gen_range(*alpha_min..*alpha_max);
            Ok((a, psd1.sample(rng)?))
        }
        GpsdFamily::BoxcarWarped { alpha_min, alpha_max } => {
            // every decay slice carries the same frequency mass
            let a = rng.gen_range(*alpha_min..*alpha_max);
            Ok((a, warped_psd(a).sample(rng)?))
        }
        GpsdFamily::Separable { decay, psd1 } => {
            let a = -decay.sample(rng)?.abs();
            Ok((a, psd1.sample(rng)?))
        }
    }
}

/// Worst-case Gram discrepancy between the expansion kernel and a reference
/// kernel over the given indices.
pub fn approx_error(
    expansion: &FeatureExpansion,
    kernel: &crate::kernels::KernelModel,
    indices: &[f64],
) -> Result<f64> {
    let mut worst = 0.0f64;
    for &t in indices {
        for &s in indices {
            let d = (expansion.kernel(t, s)? - kernel.eval(t, s)?).abs();
            worst = worst.max(d);
        }
    }
    Ok(worst)
}
