//! Kernel families for impulse-response estimation. Every family here is the
//! closed form induced by some GPSD (stationary, exponentially-decaying
//! locally stationary, integrated over a decay band, or filtered through a
//! second-order all-pole filter), plus escape hatches for kernels defined
//! directly by a GPSD (numeric quadrature) or by a feature expansion.

use crate::error::{Error, Result};
use crate::features::FeatureExpansion;
use crate::gpsd::ContinuousGpsd;
use crate::psd::Psd1d;
use nalgebra::DMatrix;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeDomain {
    ContinuousTime,
    DiscreteTime { sampling_time: f64 },
}

impl TimeDomain {
    pub fn sampling_time(&self) -> f64 {
        match self {
            TimeDomain::ContinuousTime => 1.0,
            TimeDomain::DiscreteTime { sampling_time } => *sampling_time,
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, TimeDomain::DiscreteTime { .. })
    }
}

/// Hyper-parameters shared across kernel families; each family reads the
/// subset it needs. Decay rates are stored in continuous-time units; in
/// discrete time the corresponding circle radius is `lambda = e^{alpha T}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperParams {
    /// Frequency bandwidth (stationary factor).
    pub beta: f64,
    /// Center frequency of the stationary factor.
    pub omega0: f64,
    /// Decay rate of Dirac families (`< 0`).
    pub alpha0: f64,
    /// Decay-band edges of integrated families (`alpha_min < alpha_max < 0`).
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// Rate of the TC / SS families (`> 0`).
    pub gamma: f64,
    /// Overall kernel multiplier (`> 0`).
    pub scale: f64,
    /// Filter pole magnitude (`0 <= rho0 < 1`) and phase for filtered kernels.
    pub rho0: f64,
    pub theta0: f64,
}

impl Default for HyperParams {
    fn default() -> Self {
        Self {
            beta: 1.0,
            omega0: 0.0,
            alpha0: -0.5,
            alpha_min: -1.0,
            alpha_max: -0.1,
            gamma: 1.0,
            scale: 1.0,
            rho0: 0.0,
            theta0: PI / 2.0,
        }
    }
}

impl HyperParams {
    /// Circle radius `lambda0 = e^{alpha0 T}`.
    pub fn lambda0(&self, sampling_time: f64) -> f64 {
        (self.alpha0 * sampling_time).exp()
    }

    pub fn set_lambda0(&mut self, lambda0: f64, sampling_time: f64) {
        self.alpha0 = lambda0.ln() / sampling_time;
    }
}

/// Which stationary shape a family carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Laplacian,
    Cauchy,
    Gaussian,
}

impl Shape {
    /// `K1(tau)` for unit scale.
    pub fn k1(&self, beta: f64, omega0: f64, tau: f64) -> f64 {
        let c = (omega0 * tau).cos();
        match self {
            Shape::Laplacian => (-beta * tau.abs()).exp() * c,
            Shape::Cauchy => c / (1.0 + beta * beta * tau * tau),
            Shape::Gaussian => (-0.5 * beta * tau * tau).exp() * c,
        }
    }

    pub fn psd1(&self, beta: f64, omega0: f64, scale: f64) -> Result<Psd1d> {
        match self {
            Shape::Laplacian => Psd1d::laplacian(beta, omega0, scale),
            Shape::Cauchy => Psd1d::cauchy(beta, omega0, scale),
            Shape::Gaussian => Psd1d::gaussian(beta, omega0, scale),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelKind {
    /// `K1(t-s)` alone.
    Stationary(Shape),
    /// `e^{alpha0 (t+s)} K1(t-s)`.
    Ecls(Shape),
    /// Tuned/correlated: `e^{-gamma max(t,s)}`.
    Tc,
    /// Stable spline: `e^{-gamma(t+s+max)}/2 - e^{-3 gamma max}/6`.
    Ss,
    /// Diagonal/correlated: `e^{alpha0 (t+s)} e^{-beta |t-s|}`.
    Dc,
    /// Decay band integrated against `K1`:
    /// `K1(t-s) (e^{aM(t+s)} - e^{am(t+s)})/(t+s)`.
    Integrated(Shape),
    /// Integrated TC: `(lamM^m - lamm^m)/(2m)`, `m = max(t,s)`, `lam = e^{alpha}`.
    Itc,
    /// First-moment variant: `(lamM^{m+1} - lamm^{m+1})/(m+1)`.
    ItcBar,
    /// Discrete base kernel pushed through the all-pole filter
    /// `z^2 / ((z - rho0 e^{j theta0})(z - rho0 e^{-j theta0}))`.
    Filtered { base: Box<KernelModel>, horizon: usize },
    /// Kernel defined by numeric quadrature of a GPSD.
    FromGpsd { gpsd: ContinuousGpsd, abs_tol: f64 },
    /// Finite-dimensional kernel of a feature expansion.
    FromFeatures(FeatureExpansion),
    /// Sum of compatible kernels.
    Mixture(Vec<KernelModel>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelModel {
    pub kind: KernelKind,
    pub hyper: HyperParams,
    pub domain: TimeDomain,
}

impl KernelModel {
    pub fn new(kind: KernelKind, hyper: HyperParams, domain: TimeDomain) -> Result<Self> {
        let m = Self { kind, hyper, domain };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let h = &self.hyper;
        if !(h.scale > 0.0) {
            return Err(Error::InvalidHyperParam(format!("scale must be > 0, got {}", h.scale)));
        }
        match &self.kind {
            KernelKind::Stationary(_) | KernelKind::Ecls(_) | KernelKind::Integrated(_) | KernelKind::Dc => {
                if !(h.beta > 0.0) {
                    return Err(Error::InvalidHyperParam(format!("beta must be > 0, got {}", h.beta)));
                }
                if !(h.omega0 >= 0.0) {
                    return Err(Error::InvalidHyperParam(format!("omega0 must be >= 0, got {}", h.omega0)));
                }
            }
            _ => {}
        }
        match &self.kind {
            KernelKind::Ecls(_) | KernelKind::Dc => {
                if !(h.alpha0 < 0.0) {
                    return Err(Error::InvalidHyperParam(format!("alpha0 must be < 0, got {}", h.alpha0)));
                }
            }
            KernelKind::Tc | KernelKind::Ss => {
                if !(h.gamma > 0.0) {
                    return Err(Error::InvalidHyperParam(format!("gamma must be > 0, got {}", h.gamma)));
                }
            }
            KernelKind::Integrated(_) | KernelKind::Itc | KernelKind::ItcBar => {
                if !(h.alpha_min < h.alpha_max && h.alpha_max < 0.0) {
                    return Err(Error::InvalidHyperParam(format!(
                        "decay band requires alpha_min < alpha_max < 0, got [{}, {}]",
                        h.alpha_min, h.alpha_max
                    )));
                }
            }
            KernelKind::Filtered { base, horizon } => {
                if !(0.0..1.0).contains(&h.rho0) {
                    return Err(Error::InvalidFilterPole(h.rho0));
                }
                if *horizon == 0 {
                    return Err(Error::InvalidHyperParam("filter horizon must be >= 1".into()));
                }
                if !base.domain.is_discrete() || !self.domain.is_discrete() {
                    return Err(Error::DomainMismatch("filtered kernels are discrete-time".into()));
                }
                base.validate()?;
            }
            KernelKind::Mixture(parts) => {
                if parts.is_empty() {
                    return Err(Error::InvalidHyperParam("mixture needs at least one component".into()));
                }
                for p in parts {
                    if p.domain != self.domain {
                        return Err(Error::DomainMismatch("mixture components must share the time domain".into()));
                    }
                    p.validate()?;
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Map user indices to continuous evaluation times, enforcing integer
    /// nonnegative indices in discrete time.
    fn times(&self, t: f64, s: f64) -> Result<(f64, f64)> {
        if t < 0.0 || s < 0.0 || !t.is_finite() || !s.is_finite() {
            return Err(Error::DomainMismatch(format!("kernel arguments must be >= 0, got ({t}, {s})")));
        }
        match self.domain {
            TimeDomain::ContinuousTime => Ok((t, s)),
            TimeDomain::DiscreteTime { sampling_time } => {
                if t.fract() != 0.0 || s.fract() != 0.0 {
                    return Err(Error::DomainMismatch(format!(
                        "discrete-time kernel requires integer indices, got ({t}, {s})"
                    )));
                }
                Ok((t * sampling_time, s * sampling_time))
            }
        }
    }

    pub fn eval(&self, t: f64, s: f64) -> Result<f64> {
        let h = &self.hyper;
        if let KernelKind::Filtered { base, horizon } = &self.kind {
            return filtered_eval(base, h.rho0, h.theta0, *horizon, t, s);
        }
        if let KernelKind::Mixture(parts) = &self.kind {
            let mut acc = 0.0;
            for p in parts {
                acc += p.eval(t, s)?;
            }
            return Ok(h.scale * acc);
        }
        let (tc, sc) = self.times(t, s)?;
        let tau = tc - sc;
        let max = tc.max(sc);
        let v = match &self.kind {
            KernelKind::Stationary(shape) => h.scale * shape.k1(h.beta, h.omega0, tau),
            KernelKind::Ecls(shape) => {
                h.scale * (h.alpha0 * (tc + sc)).exp() * shape.k1(h.beta, h.omega0, tau)
            }
            KernelKind::Tc => h.scale * (-h.gamma * max).exp(),
            KernelKind::Ss => {
                h.scale * ((-h.gamma * (tc + sc + max)).exp() / 2.0 - (-3.0 * h.gamma * max).exp() / 6.0)
            }
            KernelKind::Dc => h.scale * (h.alpha0 * (tc + sc)).exp() * (-h.beta * tau.abs()).exp(),
            KernelKind::Integrated(shape) => {
                h.scale * shape.k1(h.beta, h.omega0, tau) * band_factor(h.alpha_min, h.alpha_max, tc + sc)
            }
            KernelKind::Itc => {
                // (lamM^m - lamm^m)/(2m) with lam = e^{alpha}; at m = 0 the
                // removable singularity has limit (alpha_max - alpha_min)/2.
                h.scale * 0.5 * band_factor(h.alpha_min, h.alpha_max, max)
            }
            KernelKind::ItcBar => {
                let x = max;
                h.scale * ((h.alpha_max * (x + 1.0)).exp() - (h.alpha_min * (x + 1.0)).exp()) / (x + 1.0)
            }
            KernelKind::FromGpsd { gpsd, abs_tol } => h.scale * gpsd.kernel_value(tc, sc, *abs_tol)?,
            KernelKind::FromFeatures(exp) => h.scale * exp.kernel(t, s)?,
            KernelKind::Filtered { .. } | KernelKind::Mixture(_) => unreachable!(),
        };
        Ok(v)
    }

    /// Gram matrix over the given indices (integers in discrete time).
    pub fn gram(&self, indices: &[f64]) -> Result<DMatrix<f64>> {
        if let KernelKind::Filtered { base, horizon } = &self.kind {
            return filtered_gram(base, self.hyper.rho0, self.hyper.theta0, *horizon, indices);
        }
        let n = indices.len();
        let mut g = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = self.eval(indices[i], indices[j])?;
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        Ok(g)
    }

    /// Decompose into `e^{alpha0 (t+s)} K1(t-s)` when the family is (locally)
    /// stationary: returns the decay rate and the stationary factor at a
    /// continuous-time lag, including the overall scale.
    pub fn stationary_part(&self) -> Result<(f64, StationaryFactor)> {
        let h = self.hyper;
        match &self.kind {
            KernelKind::Stationary(shape) => Ok((0.0, StationaryFactor::Shaped(*shape, h.beta, h.omega0, h.scale))),
            KernelKind::Ecls(shape) => Ok((h.alpha0, StationaryFactor::Shaped(*shape, h.beta, h.omega0, h.scale))),
            KernelKind::Dc => Ok((h.alpha0, StationaryFactor::Shaped(Shape::Laplacian, h.beta, 0.0, h.scale))),
            KernelKind::Tc => Ok((
                -h.gamma / 2.0,
                StationaryFactor::Shaped(Shape::Laplacian, h.gamma / 2.0, 0.0, h.scale),
            )),
            KernelKind::Ss => Ok((-1.5 * h.gamma, StationaryFactor::SsFactor(h.gamma, h.scale))),
            KernelKind::Mixture(parts) => {
                let mut decays = Vec::new();
                let mut factors = Vec::new();
                for p in parts {
                    let (a, f) = p.stationary_part()?;
                    decays.push(a);
                    factors.push(f);
                }
                let a0 = decays[0];
                if decays.iter().any(|a| (a - a0).abs() > 1e-12) {
                    return Err(Error::DomainMismatch(
                        "mixture components have different decay rates; no common stationary factor".into(),
                    ));
                }
                Ok((a0, StationaryFactor::Sum(factors, h.scale)))
            }
            _ => Err(Error::DomainMismatch(
                "kernel has no exponential-times-stationary decomposition".into(),
            )),
        }
    }

    /// The GPSD inducing this kernel, when one is available in closed form.
    pub fn gpsd(&self) -> Option<ContinuousGpsd> {
        let h = self.hyper;
        match &self.kind {
            KernelKind::Stationary(shape) => {
                Some(ContinuousGpsd::stationary(shape.psd1(h.beta, h.omega0, h.scale).ok()?))
            }
            KernelKind::Ecls(shape) => {
                ContinuousGpsd::ecls(h.alpha0, shape.psd1(h.beta, h.omega0, h.scale).ok()?).ok()
            }
            KernelKind::Dc => {
                ContinuousGpsd::ecls(h.alpha0, Psd1d::laplacian_at_zero(h.beta, h.scale).ok()?).ok()
            }
            KernelKind::Tc => ContinuousGpsd::ecls(
                -h.gamma / 2.0,
                Psd1d::laplacian_at_zero(h.gamma / 2.0, h.scale).ok()?,
            )
            .ok(),
            KernelKind::Integrated(shape) => ContinuousGpsd::boxcar(
                h.alpha_min,
                h.alpha_max,
                shape.psd1(h.beta, h.omega0, h.scale).ok()?,
            )
            .ok(),
            // ITC is the warped boxcar over half the decay band:
            // each slice e^{2 a max} is TC with lam = e^{2a}.
            KernelKind::Itc => ContinuousGpsd::boxcar_warped(h.alpha_min / 2.0, h.alpha_max / 2.0).ok(),
            KernelKind::FromGpsd { gpsd, .. } => Some(gpsd.clone()),
            _ => None,
        }
    }
}

/// Stationary factor `K1` of a decomposed kernel, evaluable at any lag.
#[derive(Debug, Clone, PartialEq)]
pub enum StationaryFactor {
    Shaped(Shape, f64, f64, f64),
    /// `scale (e^{-gamma |tau|/2}/2 - e^{-3 gamma |tau|/2}/6)`.
    SsFactor(f64, f64),
    Sum(Vec<StationaryFactor>, f64),
}

impl StationaryFactor {
    pub fn eval(&self, tau: f64) -> f64 {
        match self {
            StationaryFactor::Shaped(shape, beta, omega0, scale) => scale * shape.k1(*beta, *omega0, tau),
            StationaryFactor::SsFactor(gamma, scale) => {
                let a = tau.abs();
                scale * ((-gamma * a / 2.0).exp() / 2.0 - (-1.5 * gamma * a).exp() / 6.0)
            }
            StationaryFactor::Sum(parts, scale) => scale * parts.iter().map(|p| p.eval(tau)).sum::<f64>(),
        }
    }
}

/// `(e^{aM x} - e^{am x})/x` with the removable singularity filled in.
fn band_factor(alpha_min: f64, alpha_max: f64, x: f64) -> f64 {
    if x.abs() < 1e-12 {
        alpha_max - alpha_min
    } else {
        ((alpha_max * x).exp() - (alpha_min * x).exp()) / x
    }
}

/// Impulse response of `z^2 / ((z - rho0 e^{j theta0})(z - rho0 e^{-j theta0}))`
/// at taps `0..len`: `f_0 = 1`, `f_1 = 2 rho0 cos theta0`,
/// `f_t = 2 rho0 cos(theta0) f_{t-1} - rho0^2 f_{t-2}`.
pub fn filter_impulse(rho0: f64, theta0: f64, len: usize) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&rho0) {
        return Err(Error::InvalidFilterPole(rho0));
    }
    let mut f = Vec::with_capacity(len);
    let c = 2.0 * rho0 * theta0.cos();
    for t in 0..len {
        let v = match t {
            0 => 1.0,
            1 => c,
            _ => c * f[t - 1] - rho0 * rho0 * f[t - 2],
        };
        f.push(v);
    }
    Ok(f)
}

/// Wrap a discrete base kernel with a second-order filter.
pub fn filtered_kernel(base: KernelModel, rho0: f64, theta0: f64, horizon: usize) -> Result<KernelModel> {
    let domain = base.domain;
    KernelModel::new(
        KernelKind::Filtered { base: Box::new(base), horizon },
        HyperParams { rho0, theta0, ..HyperParams::default() },
        domain,
    )
}

fn check_filtered_index(t: f64, horizon: usize) -> Result<usize> {
    if t < 1.0 || t.fract() != 0.0 || t as usize > horizon {
        return Err(Error::DomainMismatch(format!(
            "filtered kernel index must be an integer in 1..={horizon}, got {t}"
        )));
    }
    Ok(t as usize)
}

fn filtered_eval(base: &KernelModel, rho0: f64, theta0: f64, horizon: usize, t: f64, s: f64) -> Result<f64> {
    let ti = check_filtered_index(t, horizon)?;
    let si = check_filtered_index(s, horizon)?;
    let f = filter_impulse(rho0, theta0, horizon)?;
    let mut acc = 0.0;
    for l in 1..=ti {
        let ftl = f[ti - l];
        let mut inner = 0.0;
        for m in 1..=si {
            inner += base.eval(l as f64, m as f64)? * f[si - m];
        }
        acc += ftl * inner;
    }
    Ok(acc)
}

fn filtered_gram(
    base: &KernelModel,
    rho0: f64,
    theta0: f64,
    horizon: usize,
    indices: &[f64],
) -> Result<DMatrix<f64>> {
    let idx: Vec<usize> = indices
        .iter()
        .map(|&t| check_filtered_index(t, horizon))
        .collect::<Result<_>>()?;
    let f = filter_impulse(rho0, theta0, horizon)?;
    let base_idx: Vec<f64> = (1..=horizon).map(|i| i as f64).collect();
    let g_base = base.gram(&base_idx)?;
    // Lower-triangular Toeplitz convolution matrix L[t][l] = f_{t-l}.
    let mut l_mat = DMatrix::zeros(horizon, horizon);
    for t in 0..horizon {
        for l in 0..=t {
            l_mat[(t, l)] = f[t - l];
        }
    }
    let full = &l_mat * g_base * l_mat.transpose();
    let n = idx.len();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = full[(idx[i] - 1, idx[j] - 1)];
        }
    }
    Ok(out)
}

/// Discrete-time stationary PSD of a (locally) stationary kernel by a
/// truncated cosine series of its stationary factor:
/// `phi_1(theta) = (1/pi) sum_tau K1(tau) e^{-j theta tau}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryPsd {
    pub lambda0: f64,
    k1: Vec<f64>,
    /// Largest negative excursion of the raw series (before clipping at 0).
    pub max_negative: f64,
    /// Set when the excursion exceeds `1e-8`: the truncation introduced
    /// non-trivial negativity.
    pub clipped: bool,
}

impl StationaryPsd {
    /// Stationary factor at integer lag.
    pub fn k1(&self, tau: usize) -> f64 {
        self.k1[tau]
    }

    pub fn truncation(&self) -> usize {
        self.k1.len() - 1
    }

    /// `phi_1(theta)`, clipped at zero from below.
    pub fn eval(&self, theta: f64) -> f64 {
        let mut acc = self.k1[0];
        for (tau, k) in self.k1.iter().enumerate().skip(1) {
            acc += 2.0 * k * (theta * tau as f64).cos();
        }
        (acc / PI).max(0.0)
    }
}

/// Build the discrete stationary PSD of `kernel`, requiring
/// `|K1(truncation)| < 1e-12` so the truncated series is spectrally converged.
pub fn stationary_psd_discrete(kernel: &KernelModel, truncation: usize) -> Result<StationaryPsd> {
    let ts = kernel.domain.sampling_time();
    let (alpha0, factor) = kernel.stationary_part()?;
    let lambda0 = (alpha0 * ts).exp();
    let k1: Vec<f64> = (0..=truncation).map(|tau| factor.eval(tau as f64 * ts)).collect();
    let tail = k1[truncation].abs();
    if tail >= 1e-12 {
        return Err(Error::TruncationInsufficient { truncation, tail });
    }
    let mut max_negative = 0.0f64;
    let n_scan = 2048;
    for j in 0..n_scan {
        let theta = -PI + 2.0 * PI * j as f64 / n_scan as f64;
        let mut acc = k1[0];
        for (tau, k) in k1.iter().enumerate().skip(1) {
            acc += 2.0 * k * (theta * tau as f64).cos();
        }
        max_negative = max_negative.max(-(acc / PI));
    }
    Ok(StationaryPsd {
        lambda0,
        k1,
        max_negative,
        clipped: max_negative > 1e-8,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psd::Psd1d;

    fn discrete() -> TimeDomain {
        TimeDomain::DiscreteTime { sampling_time: 1.0 }
    }

    #[test]
    fn tc_value() {
        let k = KernelModel::new(
            KernelKind::Tc,
            HyperParams { gamma: 0.5, ..Default::default() },
            discrete(),
        )
        .unwrap();
        assert!((k.eval(2.0, 3.0).unwrap() - (-1.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn itc_and_itcbar_values() {
        let h = HyperParams {
            alpha_min: 0.4f64.ln(),
            alpha_max: 0.9f64.ln(),
            ..Default::default()
        };
        let itc = KernelModel::new(KernelKind::Itc, h, discrete()).unwrap();
        assert!((itc.eval(1.0, 1.0).unwrap() - 0.25).abs() < 1e-15);
        // removable singularity at max = 0
        let k00 = itc.eval(0.0, 0.0).unwrap();
        assert!((k00 - (0.9f64.ln() - 0.4f64.ln()) / 2.0).abs() < 1e-12);
        let itcbar = KernelModel::new(KernelKind::ItcBar, h, discrete()).unwrap();
        assert!((itcbar.eval(1.0, 1.0).unwrap() - 0.325).abs() < 1e-15);
    }

    #[test]
    fn ss_matches_ecls_decomposition() {
        let k = KernelModel::new(
            KernelKind::Ss,
            HyperParams { gamma: 0.8, ..Default::default() },
            TimeDomain::ContinuousTime,
        )
        .unwrap();
        let (a0, f) = k.stationary_part().unwrap();
        for (t, s) in [(0.5, 0.5), (2.0, 1.0), (3.0, 0.25)] {
            let direct = k.eval(t, s).unwrap();
            let decomposed = (a0 * (t + s)).exp() * f.eval(t - s);
            assert!((direct - decomposed).abs() < 1e-14);
        }
    }

    #[test]
    fn closed_forms_match_gpsd_quadrature() {
        // every family with a GPSD must agree with the harmonic representation
        let cases: Vec<KernelModel> = vec![
            KernelModel::new(
                KernelKind::Ecls(Shape::Laplacian),
                HyperParams { beta: 0.3, omega0: 1.2, alpha0: -0.4, scale: 1.5, ..Default::default() },
                TimeDomain::ContinuousTime,
            )
            .unwrap(),
            KernelModel::new(
                KernelKind::Dc,
                HyperParams { beta: 0.5, alpha0: -0.2, ..Default::default() },
                TimeDomain::ContinuousTime,
            )
            .unwrap(),
            KernelModel::new(
                KernelKind::Integrated(Shape::Gaussian),
                HyperParams { beta: 0.4, omega0: 0.9, alpha_min: -1.1, alpha_max: -0.3, ..Default::default() },
                TimeDomain::ContinuousTime,
            )
            .unwrap(),
        ];
        for k in cases {
            let g = k.gpsd().unwrap();
            for (t, s) in [(0.0, 0.0), (1.0, 0.5), (2.5, 2.0)] {
                let closed = k.eval(t, s).unwrap();
                let quad = g.kernel_value(t, s, 1e-9).unwrap();
                assert!((closed - quad).abs() < 1e-6, "{:?} at ({t},{s}): {closed} vs {quad}", k.kind);
            }
        }
    }

    #[test]
    fn itc_matches_warped_gpsd() {
        let h = HyperParams { alpha_min: -1.2, alpha_max: -0.15, ..Default::default() };
        let k = KernelModel::new(KernelKind::Itc, h, discrete()).unwrap();
        let g = k.gpsd().unwrap();
        for (t, s) in [(0usize, 0usize), (1, 1), (3, 2), (6, 6)] {
            let closed = k.eval(t as f64, s as f64).unwrap();
            let quad = g.kernel_value(t as f64, s as f64, 1e-9).unwrap();
            assert!((closed - quad).abs() < 1e-6, "({t},{s}): {closed} vs {quad}");
        }
    }

    #[test]
    fn filter_impulse_is_damped_sinusoid() {
        let (rho, th) = (0.8, 1.1);
        let f = filter_impulse(rho, th, 12).unwrap();
        for (t, v) in f.iter().enumerate() {
            let exact = rho.powi(t as i32) * ((t as f64 + 1.0) * th).sin() / th.sin();
            assert!((v - exact).abs() < 1e-12, "t={t}");
        }
        assert!(matches!(filter_impulse(1.0, th, 4), Err(Error::InvalidFilterPole(_))));
    }

    #[test]
    fn filtered_gram_matches_eval_and_identity_filter() {
        let base = KernelModel::new(
            KernelKind::Tc,
            HyperParams { gamma: 0.6, ..Default::default() },
            discrete(),
        )
        .unwrap();
        // rho0 = 0 makes the filter the identity
        let ident = filtered_kernel(base.clone(), 0.0, 1.0, 8).unwrap();
        for (t, s) in [(1.0, 1.0), (3.0, 2.0), (8.0, 5.0)] {
            assert!((ident.eval(t, s).unwrap() - base.eval(t, s).unwrap()).abs() < 1e-14);
        }
        let filt = filtered_kernel(base, 0.7, 0.9, 8).unwrap();
        let idx: Vec<f64> = (1..=8).map(|i| i as f64).collect();
        let g = filt.gram(&idx).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let e = filt.eval(idx[i], idx[j]).unwrap();
                assert!((g[(i, j)] - e).abs() < 1e-12);
            }
        }
        // positive semidefinite
        let eig = g.symmetric_eigen();
        assert!(eig.eigenvalues.iter().all(|&l| l > -1e-10));
    }

    #[test]
    fn stationary_psd_matches_exact_fold() {
        let beta = 0.35;
        let k = KernelModel::new(
            KernelKind::Dc,
            HyperParams { beta, alpha0: -0.3, ..Default::default() },
            discrete(),
        )
        .unwrap();
        let spsd = stationary_psd_discrete(&k, 200).unwrap();
        assert!((spsd.lambda0 - (-0.3f64).exp()).abs() < 1e-15);
        assert!(!spsd.clipped);
        let p = Psd1d::laplacian_at_zero(beta, 1.0).unwrap();
        for tau in [0usize, 1, 3, 9] {
            let from_series: f64 = {
                // K1(tau) = 1/2 int phi_1 cos by construction of the series
                let n = 4096;
                let mut acc = 0.0;
                for j in 0..n {
                    let th = -PI + 2.0 * PI * j as f64 / n as f64;
                    acc += spsd.eval(th) * (th * tau as f64).cos();
                }
                0.5 * acc * 2.0 * PI / n as f64
            };
            assert!((from_series - (-beta * tau as f64).exp()).abs() < 1e-8, "tau={tau}");
        }
        // and the series value tracks the exact wrapped fold up to truncation
        // the truncated series tracks the exact wrapped periodization: both
        // satisfy K1(n) = 1/2 int_{-pi}^{pi} phi_1(theta) cos(theta n) dtheta.
        for th in [0.0, 0.7, 2.0, PI - 0.1] {
            let exact = p.fold(th, 1.0, 3);
            assert!((spsd.eval(th) - exact).abs() < 1e-6, "theta={th}");
        }
    }

    #[test]
    fn truncation_guard() {
        let k = KernelModel::new(
            KernelKind::Dc,
            HyperParams { beta: 0.05, alpha0: -0.1, ..Default::default() },
            discrete(),
        )
        .unwrap();
        assert!(matches!(
            stationary_psd_discrete(&k, 30),
            Err(Error::TruncationInsufficient { .. })
        ));
        assert!(stationary_psd_discrete(&k, 600).is_ok());
    }
}
