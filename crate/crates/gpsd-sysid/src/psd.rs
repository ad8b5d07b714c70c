//! One-dimensional spectral densities `phi_1(omega)`: the frequency factor of
//! a GPSD. Built-in shapes are symmetrized as `phi~(omega) + phi~(-omega)` so
//! every evaluator is even in frequency.

use crate::error::{Error, Result};
use crate::quad;
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::erf::erf;
use std::f64::consts::PI;

/// Spectral shape of the frequency factor. `Laplacian`, `Cauchy` and
/// `Gaussian` are named after the stationary kernel they induce.
#[derive(Debug, Clone, PartialEq)]
pub enum PsdShape {
    /// `beta / (pi (beta^2 + (w - w0)^2))` per side; induces `e^{-beta|tau|} cos(w0 tau)`.
    Laplacian,
    /// `e^{-|w - w0|/beta} / (2 beta)` per side; induces `cos(w0 tau) / (1 + beta^2 tau^2)`.
    Cauchy,
    /// `e^{-(w - w0)^2/(2 beta)} / sqrt(2 pi beta)` per side; induces `e^{-beta tau^2/2} cos(w0 tau)`.
    Gaussian,
    /// `2 beta / (pi (beta^2 + w^2))`; the Laplacian shape pinned at `w0 = 0`.
    LaplacianAtZero,
    /// Nonnegative combination of other shapes.
    Mixture(Vec<(f64, Psd1d)>),
    /// Piecewise-linear table over `w >= 0`, extended evenly.
    Tabulated { grid: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Psd1d {
    pub shape: PsdShape,
    /// Bandwidth parameter, `> 0`.
    pub beta: f64,
    /// Center frequency, `>= 0`.
    pub omega0: f64,
    /// Overall multiplier, `> 0`.
    pub scale: f64,
}

impl Psd1d {
    pub fn new(shape: PsdShape, beta: f64, omega0: f64, scale: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::InvalidHyperParam(format!("beta must be > 0, got {beta}")));
        }
        if !(omega0 >= 0.0) {
            return Err(Error::InvalidHyperParam(format!("omega0 must be >= 0, got {omega0}")));
        }
        if !(scale > 0.0) {
            return Err(Error::InvalidHyperParam(format!("scale must be > 0, got {scale}")));
        }
        if let PsdShape::Tabulated { grid, values } = &shape {
            if grid.len() != values.len() || grid.len() < 2 {
                return Err(Error::InvalidHyperParam("tabulated psd needs matching grid/values of length >= 2".into()));
            }
            if values.iter().any(|v| *v < 0.0) {
                return Err(Error::InvalidHyperParam("tabulated psd values must be nonnegative".into()));
            }
        }
        Ok(Self { shape, beta, omega0, scale })
    }

    pub fn laplacian(beta: f64, omega0: f64, scale: f64) -> Result<Self> {
        Self::new(PsdShape::Laplacian, beta, omega0, scale)
    }
    pub fn cauchy(beta: f64, omega0: f64, scale: f64) -> Result<Self> {
        Self::new(PsdShape::Cauchy, beta, omega0, scale)
    }
    pub fn gaussian(beta: f64, omega0: f64, scale: f64) -> Result<Self> {
        Self::new(PsdShape::Gaussian, beta, omega0, scale)
    }
    pub fn laplacian_at_zero(beta: f64, scale: f64) -> Result<Self> {
        Self::new(PsdShape::LaplacianAtZero, beta, 0.0, scale)
    }

    /// Pointwise value `phi_1(omega)`; even in `omega` by construction.
    pub fn eval(&self, omega: f64) -> f64 {
        match &self.shape {
            PsdShape::Laplacian => {
                self.scale * (lorentz(omega - self.omega0, self.beta) + lorentz(omega + self.omega0, self.beta))
            }
            PsdShape::Cauchy => {
                self.scale * (laplace(omega - self.omega0, self.beta) + laplace(omega + self.omega0, self.beta))
            }
            PsdShape::Gaussian => {
                self.scale * (gauss(omega - self.omega0, self.beta) + gauss(omega + self.omega0, self.beta))
            }
            PsdShape::LaplacianAtZero => self.scale * 2.0 * lorentz(omega, self.beta),
            PsdShape::Mixture(parts) => parts
                .iter()
                .map(|(w, p)| w * p.eval(omega))
                .sum::<f64>()
                * self.scale,
            PsdShape::Tabulated { grid, values } => {
                let x = omega.abs();
                if x < grid[0] || x > *grid.last().unwrap() {
                    return 0.0;
                }
                let i = grid.partition_point(|g| *g <= x).min(grid.len() - 1).max(1);
                let (g0, g1) = (grid[i - 1], grid[i]);
                let t = if g1 > g0 { (x - g0) / (g1 - g0) } else { 0.0 };
                self.scale * (values[i - 1] * (1.0 - t) + values[i] * t)
            }
        }
    }

    /// Total mass `int phi_1 d omega`. Analytic for built-in shapes.
    pub fn mass(&self) -> f64 {
        match &self.shape {
            PsdShape::Laplacian | PsdShape::Cauchy | PsdShape::Gaussian | PsdShape::LaplacianAtZero => {
                2.0 * self.scale
            }
            PsdShape::Mixture(parts) => {
                self.scale * parts.iter().map(|(w, p)| w * p.mass()).sum::<f64>()
            }
            PsdShape::Tabulated { grid, values } => {
                let mut m = 0.0;
                for i in 1..grid.len() {
                    m += 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
                }
                2.0 * self.scale * m
            }
        }
    }

    /// End of the non-monotone core region; beyond it the density decreases.
    fn core_edge(&self) -> f64 {
        match &self.shape {
            PsdShape::Laplacian => self.omega0 + 12.0 * self.beta,
            PsdShape::Cauchy => self.omega0 + 12.0 * self.beta,
            PsdShape::Gaussian => self.omega0 + 12.0 * self.beta.sqrt(),
            PsdShape::LaplacianAtZero => 12.0 * self.beta,
            PsdShape::Mixture(parts) => parts
                .iter()
                .map(|(_, p)| p.core_edge())
                .fold(1.0, f64::max),
            PsdShape::Tabulated { grid, .. } => *grid.last().unwrap(),
        }
    }

    /// `int phi_1(w) cos(w tau) dw` by quadrature (adaptive core plus
    /// accelerated oscillatory tail). This is the generic numeric route; the
    /// closed-form kernels in `kernels` are validated against it.
    pub fn cos_transform(&self, tau: f64, abs_tol: f64) -> Result<f64> {
        if let PsdShape::Mixture(parts) = &self.shape {
            let mut acc = 0.0;
            for (w, p) in parts {
                acc += w * p.cos_transform(tau, abs_tol / parts.len() as f64)?;
            }
            return Ok(self.scale * acc);
        }
        let f = |w: f64| self.eval(w) * (w * tau).cos();
        let edge = self.core_edge();
        let core = quad::adaptive(&f, 0.0, edge, 0.5 * abs_tol)?;
        let tail = if matches!(self.shape, PsdShape::Tabulated { .. }) {
            0.0
        } else {
            quad::cosine_tail(&f, edge, tau, 0.5 * abs_tol)?
        };
        Ok(2.0 * (core + tail))
    }

    /// CDF of the mass folded onto `w >= 0`, i.e.
    /// `int_0^w phi_1 / int_0^inf phi_1`.
    pub fn folded_cdf(&self, omega: f64) -> f64 {
        if omega <= 0.0 {
            return 0.0;
        }
        match &self.shape {
            PsdShape::Laplacian | PsdShape::Cauchy | PsdShape::Gaussian => {
                self.bump_cdf(omega) - self.bump_cdf(-omega)
            }
            PsdShape::LaplacianAtZero => 2.0 / PI * (omega / self.beta).atan(),
            PsdShape::Mixture(parts) => {
                let total: f64 = parts.iter().map(|(w, p)| w * p.mass()).sum();
                parts
                    .iter()
                    .map(|(w, p)| w * p.mass() * p.folded_cdf(omega))
                    .sum::<f64>()
                    / total
            }
            PsdShape::Tabulated { grid, values } => {
                let mut acc = 0.0;
                let mut total = 0.0;
                for i in 1..grid.len() {
                    let seg = 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
                    total += seg;
                    if omega >= grid[i] {
                        acc += seg;
                    } else if omega > grid[i - 1] {
                        let t = (omega - grid[i - 1]) / (grid[i] - grid[i - 1]);
                        let vm = values[i - 1] * (1.0 - t) + values[i] * t;
                        acc += 0.5 * (values[i - 1] + vm) * (omega - grid[i - 1]);
                    }
                }
                if total > 0.0 {
                    acc / total
                } else {
                    0.0
                }
            }
        }
    }

    /// CDF at `x` of the single bump centered at `omega0` (unit mass).
    fn bump_cdf(&self, x: f64) -> f64 {
        let z = x - self.omega0;
        match self.shape {
            PsdShape::Laplacian => 0.5 + (z / self.beta).atan() / PI,
            PsdShape::Cauchy => {
                if z <= 0.0 {
                    0.5 * (z / self.beta).exp()
                } else {
                    1.0 - 0.5 * (-z / self.beta).exp()
                }
            }
            PsdShape::Gaussian => 0.5 * (1.0 + erf(z / (2.0 * self.beta).sqrt())),
            _ => unreachable!("bump_cdf only defined for two-bump shapes"),
        }
    }

    /// Inverse of `folded_cdf` by bisection.
    pub fn folded_quantile(&self, q: f64) -> Result<f64> {
        assert!((0.0..1.0).contains(&q));
        if q == 0.0 {
            return Ok(0.0);
        }
        let mut hi = self.core_edge().max(1.0);
        let mut tries = 0;
        while self.folded_cdf(hi) < q {
            hi *= 2.0;
            tries += 1;
            if tries > 200 {
                return Err(Error::UnboundedSupport);
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.folded_cdf(mid) < q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Draw one frequency from the normalized density `phi_1 / mass`
    /// (unfolded: the sample may be negative).
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Result<f64> {
        match &self.shape {
            PsdShape::Laplacian => {
                let center = if rng.gen_bool(0.5) { self.omega0 } else { -self.omega0 };
                let u: f64 = rng.gen();
                Ok(center + self.beta * (PI * (u - 0.5)).tan())
            }
            PsdShape::LaplacianAtZero => {
                let u: f64 = rng.gen();
                Ok(self.beta * (PI * (u - 0.5)).tan())
            }
            PsdShape::Cauchy => {
                let center = if rng.gen_bool(0.5) { self.omega0 } else { -self.omega0 };
                let u: f64 = rng.gen();
                let mag = -self.beta * (1.0 - u).ln();
                Ok(center + if rng.gen_bool(0.5) { mag } else { -mag })
            }
            PsdShape::Gaussian => {
                let center = if rng.gen_bool(0.5) { self.omega0 } else { -self.omega0 };
                let z: f64 = rng.sample(StandardNormal);
                Ok(center + self.beta.sqrt() * z)
            }
            PsdShape::Mixture(parts) => {
                let total: f64 = parts.iter().map(|(w, p)| w * p.mass()).sum();
                let mut pick = rng.gen::<f64>() * total;
                for (w, p) in parts {
                    pick -= w * p.mass();
                    if pick <= 0.0 {
                        return p.sample(rng);
                    }
                }
                parts.last().unwrap().1.sample(rng)
            }
            PsdShape::Tabulated { .. } => Err(Error::SamplerNotAvailable(
                "tabulated density has no inverse-CDF table".into(),
            )),
        }
    }

    /// Discrete-time stationary PSD obtained by folding this density with
    /// sampling time `T`: `(1/T) sum_k phi_1((theta - 2 pi k)/T)`.
    ///
    /// Laplacian and Cauchy shapes use the exact closed-form periodization
    /// (wrapped Cauchy / wrapped Laplace); their algebraic tails would need
    /// thousands of terms to reach quadrature-level accuracy otherwise. The
    /// Gaussian and tabulated shapes truncate the sum at `fold_terms`.
    pub fn fold(&self, theta: f64, sampling_time: f64, fold_terms: usize) -> f64 {
        let t = sampling_time;
        match &self.shape {
            PsdShape::Laplacian => {
                self.scale
                    * (wrapped_cauchy(theta - self.omega0 * t, self.beta * t)
                        + wrapped_cauchy(theta + self.omega0 * t, self.beta * t))
            }
            PsdShape::LaplacianAtZero => self.scale * 2.0 * wrapped_cauchy(theta, self.beta * t),
            PsdShape::Cauchy => {
                self.scale
                    * (wrapped_laplace(theta - self.omega0 * t, self.beta * t)
                        + wrapped_laplace(theta + self.omega0 * t, self.beta * t))
            }
            PsdShape::Mixture(parts) => {
                self.scale
                    * parts
                        .iter()
                        .map(|(w, p)| w * p.fold(theta, t, fold_terms))
                        .sum::<f64>()
            }
            PsdShape::Gaussian | PsdShape::Tabulated { .. } => {
                let mut acc = 0.0;
                for k in -(fold_terms as i64)..=(fold_terms as i64) {
                    acc += self.eval((theta - 2.0 * PI * k as f64) / t);
                }
                acc / t
            }
        }
    }
}

fn lorentz(x: f64, b: f64) -> f64 {
    b / (PI * (b * b + x * x))
}

fn laplace(x: f64, b: f64) -> f64 {
    (-x.abs() / b).exp() / (2.0 * b)
}

fn gauss(x: f64, b: f64) -> f64 {
    (-x * x / (2.0 * b)).exp() / (2.0 * PI * b).sqrt()
}

/// `sum_k b/(pi (b^2 + (x - 2 pi k)^2)) = sinh(b) / (2 pi (cosh(b) - cos(x)))`.
fn wrapped_cauchy(x: f64, b: f64) -> f64 {
    b.sinh() / (2.0 * PI * (b.cosh() - x.cos()))
}

/// `sum_k e^{-|x - 2 pi k|/b} / (2b) = cosh((pi - |x mod 2pi|)/b) / (2 b sinh(pi/b))`.
///
/// For small `b` the hyperbolic ratio overflows; the magnitude-sorted form
/// `e^{-|x|/b}` terms are used instead.
fn wrapped_laplace(x: f64, b: f64) -> f64 {
    let xw = wrap_to_pi(x).abs();
    if PI / b < 700.0 {
        ((PI - xw) / b).cosh() / (2.0 * b * (PI / b).sinh())
    } else {
        // sinh/cosh in exponent form: exact up to e^{-2 pi / b} corrections.
        ((-xw / b).exp() + ((xw - 2.0 * PI) / b).exp()) / (2.0 * b * (1.0 - (-2.0 * PI / b).exp()))
    }
}

pub(crate) fn wrap_to_pi(x: f64) -> f64 {
    let mut v = (x + PI).rem_euclid(2.0 * PI) - PI;
    if v < -PI {
        v += 2.0 * PI;
    }
    v
}
