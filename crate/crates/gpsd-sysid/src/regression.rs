//! Bayesian impulse-response estimation: the Gaussian posterior over the
//! first `n` impulse-response taps given input/output data, in the time
//! domain (exact Gram), in the frequency domain (stationary PSD of the
//! kernel), and through a low-rank feature expansion; plus the marginal
//! negative log-likelihood used for hyper-parameter tuning.

use crate::error::{Error, Result};
use crate::features::FeatureExpansion;
use crate::kernels::{stationary_psd_discrete, KernelModel};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;
use std::f64::consts::PI;

/// One identification experiment: input, output, and noise variance.
#[derive(Debug, Clone, PartialEq)]
pub struct DataRecord {
    pub u: Vec<f64>,
    pub y: Vec<f64>,
    pub sigma2: f64,
}

impl DataRecord {
    pub fn validate(&self) -> Result<()> {
        if self.u.len() != self.y.len() || self.u.is_empty() {
            return Err(Error::InvalidConfig(
                "data record needs matching non-empty input/output".into(),
            ));
        }
        if !(self.sigma2 > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "noise variance must be > 0, got {}",
                self.sigma2
            )));
        }
        Ok(())
    }
}

/// Convolution regressor: `Phi[k][t] = u(k - t)` for `k = 1..N`, `t = 1..n`,
/// with `u(t) = 0` for `t < 1`, so that `(Phi g)(k) = sum_t g(t) u(k - t)`.
pub fn build_regressor(u: &[f64], n: usize) -> DMatrix<f64> {
    let big_n = u.len();
    let mut phi = DMatrix::zeros(big_n, n);
    for k in 1..=big_n {
        for t in 1..=n.min(k.saturating_sub(1)) {
            phi[(k - 1, t - 1)] = u[k - t - 1];
        }
    }
    phi
}

/// Posterior mean and pointwise variance of the impulse response taps `1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorEstimate {
    pub g_hat: DVector<f64>,
    pub cov_diag: DVector<f64>,
}

impl PosteriorEstimate {
    /// Pointwise posterior standard deviation (tiny negative variances from
    /// round-off are clipped at zero).
    pub fn sd(&self) -> DVector<f64> {
        self.cov_diag.map(|v| v.max(0.0).sqrt())
    }
}

/// Cholesky factorization with an escalating jitter fallback: on failure a
/// multiple of the mean diagonal is added, growing tenfold from `1e-10` up to
/// `1e-4` before giving up.
pub fn jittered_cholesky(mat: &DMatrix<f64>) -> Result<Cholesky<f64, Dyn>> {
    if let Some(c) = mat.clone().cholesky() {
        return Ok(c);
    }
    let scale = mat.trace() / mat.nrows() as f64;
    let mut rel = 1e-10;
    while rel <= 1e-4 {
        let mut m = mat.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += rel * scale;
        }
        if let Some(c) = m.cholesky() {
            return Ok(c);
        }
        rel *= 10.0;
    }
    Err(Error::NotPositiveDefinite { max_jitter: 1e-4 * scale })
}

fn taps(n: usize) -> Vec<f64> {
    (1..=n).map(|t| t as f64).collect()
}

/// Exact time-domain posterior:
/// `g_hat = K Phi^T (Phi K Phi^T + sigma^2 I)^{-1} y`, with pointwise
/// variance `diag(K - K Phi^T V^{-1} Phi K)`.
pub fn posterior_time_domain(kernel: &KernelModel, data: &DataRecord, n: usize) -> Result<PosteriorEstimate> {
    data.validate()?;
    let k = kernel.gram(&taps(n))?;
    posterior_from_gram(&k, data, n)
}

fn posterior_from_gram(k: &DMatrix<f64>, data: &DataRecord, n: usize) -> Result<PosteriorEstimate> {
    let phi = build_regressor(&data.u, n);
    let y = DVector::from_column_slice(&data.y);
    let big_n = data.y.len();
    let b = &phi * k; // N x n
    let mut v = &b * phi.transpose();
    for i in 0..big_n {
        v[(i, i)] += data.sigma2;
    }
    let chol = jittered_cholesky(&v)?;
    let a = chol.solve(&y);
    let g_hat = b.transpose() * a;
    let x = chol.solve(&b);
    let mut cov_diag = DVector::zeros(n);
    for t in 0..n {
        cov_diag[t] = k[(t, t)] - b.column(t).dot(&x.column(t));
    }
    Ok(PosteriorEstimate { g_hat, cov_diag })
}

/// Frequency-domain posterior for (locally) stationary kernels. The Gram is
/// never formed for the mean: the output covariance is assembled on a
/// uniform angular grid from the discrete stationary PSD,
/// `V = 2 dtheta Re( sum_j phi_1(theta_j) U_j U_j^* ) + sigma^2 I`
/// with `U_k(theta) = 1/2 sum_s lambda0^s u(k-s) e^{j theta s}`, and the mean
/// is recovered as
/// `g_hat(t) = 1/2 lambda0^t Re( dtheta sum_j 2 phi_1(theta_j) U_j^* V^{-1} y e^{j theta_j t} )`.
/// The trapezoid sums converge to the exact time-domain posterior as the
/// grid is refined.
pub fn posterior_freq_domain(
    kernel: &KernelModel,
    data: &DataRecord,
    n: usize,
    n_theta: usize,
    truncation: usize,
) -> Result<PosteriorEstimate> {
    data.validate()?;
    if truncation < n {
        return Err(Error::TruncationInsufficient { truncation, tail: f64::NAN });
    }
    let spsd = stationary_psd_discrete(kernel, truncation)?;
    let lambda0 = spsd.lambda0;
    let big_n = data.y.len();
    let phi = build_regressor(&data.u, n);
    let y = DVector::from_column_slice(&data.y);

    let dtheta = 2.0 * PI / n_theta as f64;
    let thetas: Vec<f64> = (0..n_theta).map(|j| -PI + j as f64 * dtheta).collect();
    let psd_vals: Vec<f64> = thetas.iter().map(|&th| spsd.eval(th)).collect();

    // U: N x n_theta, U[k][j] = 1/2 sum_s lambda0^s Phi[k][s] e^{j theta_j s}
    let lam_pow: Vec<f64> = (1..=n).map(|s| lambda0.powi(s as i32)).collect();
    let mut u_mat = vec![vec![Complex64::ZERO; n_theta]; big_n];
    for k in 0..big_n {
        for (j, &th) in thetas.iter().enumerate() {
            let mut acc = Complex64::ZERO;
            for s in 0..n {
                let c = phi[(k, s)] * lam_pow[s];
                if c != 0.0 {
                    acc += c * Complex64::new(0.0, th * (s + 1) as f64).exp();
                }
            }
            u_mat[k][j] = 0.5 * acc;
        }
    }

    // output covariance from the angular grid
    let mut v = DMatrix::zeros(big_n, big_n);
    for j in 0..n_theta {
        let w = 2.0 * dtheta * psd_vals[j];
        if w == 0.0 {
            continue;
        }
        for k in 0..big_n {
            for l in 0..=k {
                let prod = u_mat[k][j] * u_mat[l][j].conj();
                v[(k, l)] += w * prod.re;
            }
        }
    }
    for k in 0..big_n {
        for l in 0..k {
            v[(l, k)] = v[(k, l)];
        }
        v[(k, k)] += data.sigma2;
    }
    let chol = jittered_cholesky(&v)?;
    let a = chol.solve(&y);

    // E[G](theta_j) = 2 phi_1(theta_j) U_j^* a, then invert the transform
    let mut g_hat = DVector::zeros(n);
    for t in 1..=n {
        let mut acc = Complex64::ZERO;
        for j in 0..n_theta {
            let mut udots = Complex64::ZERO;
            for k in 0..big_n {
                udots += u_mat[k][j].conj() * a[k];
            }
            let eg = 2.0 * psd_vals[j] * udots;
            acc += eg * Complex64::new(0.0, thetas[j] * t as f64).exp();
        }
        g_hat[t - 1] = 0.5 * lambda0.powi(t as i32) * (dtheta * acc).re;
    }

    // pointwise variance through the stationary reconstruction of the Gram
    let mut cov_diag = DVector::zeros(n);
    for t in 1..=n {
        let mut b_t = DVector::zeros(big_n);
        for k in 0..big_n {
            let mut acc = 0.0;
            for s in 1..=n {
                let c = phi[(k, s - 1)];
                if c != 0.0 {
                    acc += c * lam_pow[s - 1] * spsd.k1((t as i64 - s as i64).unsigned_abs() as usize);
                }
            }
            b_t[k] = lambda0.powi(t as i32) * acc;
        }
        let sol = chol.solve(&b_t);
        cov_diag[t - 1] = lambda0.powi(2 * t as i32) * spsd.k1(0) - b_t.dot(&sol);
    }
    Ok(PosteriorEstimate { g_hat, cov_diag })
}

/// Low-rank posterior through a feature expansion `K ~ Z Z^T`:
/// `g_hat = Z (Z^T Phi^T Phi Z / sigma^2 + I)^{-1} Z^T Phi^T y / sigma^2`.
pub fn posterior_low_rank(
    expansion: &FeatureExpansion,
    data: &DataRecord,
    n: usize,
) -> Result<PosteriorEstimate> {
    data.validate()?;
    let z = expansion.feature_matrix(&taps(n))?;
    let phi = build_regressor(&data.u, n);
    let y = DVector::from_column_slice(&data.y);
    let a = &phi * &z; // N x d
    let d = z.ncols();
    let mut m = a.transpose() * &a / data.sigma2;
    for i in 0..d {
        m[(i, i)] += 1.0;
    }
    let chol = jittered_cholesky(&m)?;
    let w = chol.solve(&(a.transpose() * &y)) / data.sigma2;
    let g_hat = &z * w;
    let x = chol.solve(&z.transpose()); // d x n
    let mut cov_diag = DVector::zeros(n);
    for t in 0..n {
        cov_diag[t] = z.row(t).transpose().dot(&x.column(t));
    }
    Ok(PosteriorEstimate { g_hat, cov_diag })
}

fn nll_from_factor(b: &DMatrix<f64>, extra_logdet: f64, data: &DataRecord) -> Result<f64> {
    // V = B B^T + sigma^2 I; determinant lemma + Woodbury on the n x n core
    let big_n = data.y.len() as f64;
    let r = b.ncols();
    let y = DVector::from_column_slice(&data.y);
    let mut s = b.transpose() * b;
    for i in 0..r {
        s[(i, i)] += data.sigma2;
    }
    let chol = jittered_cholesky(&s)?;
    let z = b.transpose() * &y;
    let quad = (y.dot(&y) - z.dot(&chol.solve(&z))) / data.sigma2;
    let logdet_s: f64 = (0..r).map(|i| chol.l_dirty()[(i, i)].ln()).sum::<f64>() * 2.0;
    let logdet_v = (big_n - r as f64) * data.sigma2.ln() + logdet_s + extra_logdet;
    Ok(0.5 * quad + 0.5 * logdet_v + 0.5 * big_n * (2.0 * PI).ln())
}

/// Negative marginal log-likelihood
/// `1/2 y^T V^{-1} y + 1/2 log det V + N/2 log 2 pi`,
/// `V = Phi K Phi^T + sigma^2 I`, computed through an `n x n` core
/// factorization (matrix determinant lemma), never forming `V`.
pub fn negative_log_likelihood(kernel: &KernelModel, data: &DataRecord, n: usize) -> Result<f64> {
    data.validate()?;
    let k = kernel.gram(&taps(n))?;
    let chol_k = jittered_cholesky(&k)?;
    let phi = build_regressor(&data.u, n);
    let b = phi * chol_k.l();
    nll_from_factor(&b, 0.0, data)
}

/// Marginal likelihood under the low-rank kernel `Z Z^T`.
pub fn negative_log_likelihood_low_rank(
    expansion: &FeatureExpansion,
    data: &DataRecord,
    n: usize,
) -> Result<f64> {
    data.validate()?;
    let z = expansion.feature_matrix(&taps(n))?;
    let phi = build_regressor(&data.u, n);
    if z.ncols() > n {
        // wide expansions: the induced kernel Z Z^T on the n taps has rank
        // <= n, so the n x n core is the cheaper equivalent factorization
        let k = &z * z.transpose();
        let chol_k = jittered_cholesky(&k)?;
        let b = phi * chol_k.l();
        return nll_from_factor(&b, 0.0, data);
    }
    let b = phi * z;
    nll_from_factor(&b, 0.0, data)
}
