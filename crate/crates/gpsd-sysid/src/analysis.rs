//! Diagnostics built on top of a kernel prior: impulse responses of
//! second-order prototypes, prior log-densities, pole-location density maps,
//! modulated discrete-time Fourier transforms, and density panels for
//! visualizing a discrete GPSD over the unit disc.

use crate::error::{Error, Result};
use crate::gpsd::{DiscreteGpsd, RadialSupport};
use crate::kernels::KernelModel;
use crate::psd::wrap_to_pi;
use crate::regression::jittered_cholesky;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Impulse response of the strictly causal second-order system with poles
/// `rho e^{+/- j theta}`: `g(t) = rho^{t-1} sin(t theta) / sin(theta)`,
/// `t = 1..=n`, computed by the numerically stable recursion
/// `g(t) = 2 rho cos(theta) g(t-1) - rho^2 g(t-2)`.
pub fn second_order_impulse(rho: f64, theta: f64, n: usize) -> Result<Vec<f64>> {
    if !(rho > 0.0 && rho < 1.0) || !(theta > 0.0 && theta < PI) {
        return Err(Error::InvalidPole(format!(
            "need 0 < rho < 1 and 0 < theta < pi, got rho={rho}, theta={theta}"
        )));
    }
    let mut g = Vec::with_capacity(n);
    let c = 2.0 * rho * theta.cos();
    for t in 0..n {
        let v = match t {
            0 => 1.0,
            1 => c,
            _ => c * g[t - 1] - rho * rho * g[t - 2],
        };
        g.push(v);
    }
    Ok(g)
}

/// Unnormalized Gaussian prior log-density `-1/2 g^T K^{-1} g` of a response
/// under the kernel, via one Cholesky factorization.
pub fn prior_logpdf(kernel: &KernelModel, g: &[f64]) -> Result<f64> {
    let n = g.len();
    let idx: Vec<f64> = (1..=n).map(|t| t as f64).collect();
    let gram = kernel.gram(&idx)?;
    let chol = jittered_cholesky(&gram)?;
    let gv = DVector::from_column_slice(g);
    let sol = chol.solve(&gv);
    Ok(-0.5 * gv.dot(&sol))
}

/// Density map over a pole grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleGrid {
    pub magnitudes: Vec<f64>,
    pub phases: Vec<f64>,
    /// Raw prior log-densities, `log_values[(i, j)]` at `(magnitudes[i], phases[j])`.
    pub log_values: DMatrix<f64>,
    /// Exponentiated map normalized to unit mass over the grid cells.
    pub values: DMatrix<f64>,
}

/// Prior density of second-order impulse responses over a grid of pole
/// locations: the Gram is factored once and each pole costs two triangular
/// solves. The exponentiated map is shifted by its maximum before
/// normalization for overflow safety.
pub fn pole_density_map(
    kernel: &KernelModel,
    magnitudes: &[f64],
    phases: &[f64],
    n: usize,
) -> Result<PoleGrid> {
    if magnitudes.len() < 2 || phases.len() < 2 {
        return Err(Error::InvalidConfig("pole grid needs at least 2 x 2 nodes".into()));
    }
    let idx: Vec<f64> = (1..=n).map(|t| t as f64).collect();
    let gram = kernel.gram(&idx)?;
    let chol = jittered_cholesky(&gram)?;
    let mut log_values = DMatrix::zeros(magnitudes.len(), phases.len());
    for (i, &rho) in magnitudes.iter().enumerate() {
        for (j, &theta) in phases.iter().enumerate() {
            let g = second_order_impulse(rho, theta, n)?;
            let gv = DVector::from_column_slice(&g);
            let sol = chol.solve(&gv);
            log_values[(i, j)] = -0.5 * gv.dot(&sol);
        }
    }
    let max = log_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut values = log_values.map(|v| (v - max).exp());
    // normalize over the (assumed uniform) grid cells
    let d_rho = (magnitudes[magnitudes.len() - 1] - magnitudes[0]) / (magnitudes.len() - 1) as f64;
    let d_theta = (phases[phases.len() - 1] - phases[0]) / (phases.len() - 1) as f64;
    let mass: f64 = values.iter().sum::<f64>() * d_rho * d_theta;
    values /= mass;
    Ok(PoleGrid {
        magnitudes: magnitudes.to_vec(),
        phases: phases.to_vec(),
        log_values,
        values,
    })
}

/// Modulated DTFT of a finite response:
/// `G(theta) = (1/pi) sum_{t=1}^{n} lambda0^{-t} g(t) e^{-j theta t}`.
/// The inverse weighting can amplify the tail of `g`; when the modulated
/// sequence grows (last-decade energy above first-decade energy), the
/// transform is meaningless and an error is returned.
pub fn modulated_dtft(g: &[f64], lambda0: f64, thetas: &[f64]) -> Result<Vec<Complex64>> {
    if !(lambda0 > 0.0 && lambda0 <= 1.0) {
        return Err(Error::InvalidHyperParam(format!("lambda0 must be in (0, 1], got {lambda0}")));
    }
    let n = g.len();
    let h: Vec<f64> = g
        .iter()
        .enumerate()
        .map(|(i, &v)| lambda0.powi(-(i as i32 + 1)) * v)
        .collect();
    if n >= 20 {
        let d = n / 10;
        let head: f64 = h[..d].iter().map(|v| v * v).sum::<f64>().sqrt();
        let tail: f64 = h[n - d..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if tail > head.max(1e-300) {
            return Err(Error::DivergentModulation { head, tail });
        }
    }
    Ok(thetas
        .iter()
        .map(|&th| {
            let mut acc = Complex64::ZERO;
            for (i, &v) in h.iter().enumerate() {
                acc += v * Complex64::new(0.0, -th * (i as f64 + 1.0)).exp();
            }
            acc / PI
        })
        .collect())
}

/// Plain DTFT `G(e^{j theta}) = sum_{t=1}^{n} g(t) e^{-j theta t}`.
pub fn dtft(g: &[f64], thetas: &[f64]) -> Vec<Complex64> {
    thetas
        .iter()
        .map(|&th| {
            let mut acc = Complex64::ZERO;
            for (i, &v) in g.iter().enumerate() {
                acc += v * Complex64::new(0.0, -th * (i as f64 + 1.0)).exp();
            }
            acc
        })
        .collect()
}

/// Evaluate a discrete GPSD on a polar grid of the unit disc for plotting.
/// Dirac-circle families render their angular factor on the grid row closest
/// to the circle radius (all other rows are zero); band families evaluate
/// pointwise.
pub fn gpsd_figure_grid(
    dgpsd: &DiscreteGpsd,
    lambdas: &[f64],
    thetas: &[f64],
) -> Result<DMatrix<f64>> {
    let mut out = DMatrix::zeros(lambdas.len(), thetas.len());
    match dgpsd.support() {
        RadialSupport::Circle(lambda0) => {
            let row = lambdas
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - lambda0).abs().total_cmp(&(b.1 - lambda0).abs()))
                .map(|(i, _)| i)
                .ok_or_else(|| Error::InvalidConfig("empty lambda grid".into()))?;
            for (j, &th) in thetas.iter().enumerate() {
                out[(row, j)] = dgpsd.circle_psd(wrap_to_pi(th))?;
            }
        }
        RadialSupport::Band { .. } | RadialSupport::Disc => {
            for (i, &lam) in lambdas.iter().enumerate() {
                for (j, &th) in thetas.iter().enumerate() {
                    out[(i, j)] = dgpsd.eval(lam, wrap_to_pi(th))?;
                }
            }
        }
    }
    Ok(out)
}
