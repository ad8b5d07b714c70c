//! JSON configuration schemas for kernels and GPSDs, and the CSV formats the
//! command-line tools read and write. All floating-point output is printed
//! with 17 significant digits so artifacts are bit-reproducible.

use crate::error::{Error, Result};
use crate::gpsd::ContinuousGpsd;
use crate::kernels::{
    filtered_kernel, HyperParams, KernelKind, KernelModel, Shape, TimeDomain,
};
use crate::psd::{Psd1d, PsdShape};
use crate::regression::DataRecord;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Round-trip-exact float formatting (17 significant digits).
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| Error::InvalidConfig(format!("bad number '{s}': {e}")))
}

/// One-dimensional spectral density description.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PsdConfig {
    /// "laplacian" | "cauchy" | "gaussian" | "laplacian0" | "mixture"
    pub shape: String,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default)]
    pub omega0: f64,
    #[serde(default = "one")]
    pub scale: f64,
    /// Weighted components for "mixture".
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<WeightedPsd>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct WeightedPsd {
    pub weight: f64,
    pub psd: PsdConfig,
}

fn one() -> f64 {
    1.0
}

impl PsdConfig {
    pub fn to_psd(&self) -> Result<Psd1d> {
        match self.shape.as_str() {
            "laplacian" => Psd1d::laplacian(self.beta, self.omega0, self.scale),
            "cauchy" => Psd1d::cauchy(self.beta, self.omega0, self.scale),
            "gaussian" => Psd1d::gaussian(self.beta, self.omega0, self.scale),
            "laplacian0" => Psd1d::laplacian_at_zero(self.beta, self.scale),
            "mixture" => {
                let parts = self
                    .components
                    .iter()
                    .map(|w| Ok((w.weight, w.psd.to_psd()?)))
                    .collect::<Result<Vec<_>>>()?;
                Psd1d::new(PsdShape::Mixture(parts), self.beta, self.omega0, self.scale)
            }
            other => Err(Error::InvalidConfig(format!("unknown psd shape '{other}'"))),
        }
    }
}

/// GPSD description.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GpsdConfig {
    /// "stationary" | "ecls" | "boxcar" | "boxcar-warped" | "separable"
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psd: Option<PsdConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<PsdConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_max: Option<f64>,
}

impl GpsdConfig {
    fn psd(&self) -> Result<Psd1d> {
        self.psd
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig(format!("family '{}' needs a psd", self.family)))?
            .to_psd()
    }

    fn band(&self) -> Result<(f64, f64)> {
        match (self.alpha_min, self.alpha_max) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::InvalidConfig(format!(
                "family '{}' needs alpha_min and alpha_max",
                self.family
            ))),
        }
    }

    pub fn to_gpsd(&self) -> Result<ContinuousGpsd> {
        match self.family.as_str() {
            "stationary" => Ok(ContinuousGpsd::stationary(self.psd()?)),
            "ecls" => {
                let alpha0 = self
                    .alpha0
                    .ok_or_else(|| Error::InvalidConfig("ecls needs alpha0".into()))?;
                ContinuousGpsd::ecls(alpha0, self.psd()?)
            }
            "boxcar" => {
                let (lo, hi) = self.band()?;
                ContinuousGpsd::boxcar(lo, hi, self.psd()?)
            }
            "boxcar-warped" => {
                let (lo, hi) = self.band()?;
                ContinuousGpsd::boxcar_warped(lo, hi)
            }
            "separable" => {
                let decay = self
                    .decay
                    .as_ref()
                    .ok_or_else(|| Error::InvalidConfig("separable needs a decay density".into()))?
                    .to_psd()?;
                Ok(ContinuousGpsd::separable(decay, self.psd()?))
            }
            other => Err(Error::InvalidConfig(format!("unknown gpsd family '{other}'"))),
        }
    }
}

/// Kernel description; decay fields accept either `alpha*` (continuous
/// units) or `lambda*` (circle radius, converted with the sampling time).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct KernelConfig {
    /// "stationary-l/c/g" | "ecls-l/c/g" | "tc" | "ss" | "dc" |
    /// "integrated-l/c/g" | "itc" | "itcbar" | "filtered" | "mixture" | "gpsd"
    pub kind: String,
    /// "discrete" (default) or "continuous".
    #[serde(default = "default_domain")]
    pub domain: String,
    #[serde(default = "one")]
    pub sampling_time: f64,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default)]
    pub omega0: f64,
    #[serde(default = "one")]
    pub gamma: f64,
    #[serde(default = "one")]
    pub scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_max: Option<f64>,
    #[serde(default)]
    pub rho0: f64,
    #[serde(default = "default_theta0")]
    pub theta0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Box<KernelConfig>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<KernelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gpsd: Option<GpsdConfig>,
    #[serde(default = "default_quad_tol")]
    pub quad_tol: f64,
}

fn default_domain() -> String {
    "discrete".into()
}

fn default_theta0() -> f64 {
    std::f64::consts::FRAC_PI_2
}

fn default_quad_tol() -> f64 {
    1e-8
}

impl KernelConfig {
    fn domain(&self) -> Result<TimeDomain> {
        match self.domain.as_str() {
            "discrete" => {
                if !(self.sampling_time > 0.0) {
                    return Err(Error::InvalidSamplingTime(self.sampling_time));
                }
                Ok(TimeDomain::DiscreteTime { sampling_time: self.sampling_time })
            }
            "continuous" => Ok(TimeDomain::ContinuousTime),
            other => Err(Error::InvalidConfig(format!("unknown domain '{other}'"))),
        }
    }

    fn decay(&self, alpha: Option<f64>, lambda: Option<f64>, name: &str) -> Result<f64> {
        let ts = self.sampling_time;
        match (alpha, lambda) {
            (Some(a), None) => Ok(a),
            (None, Some(l)) => {
                if !(l > 0.0) {
                    return Err(Error::InvalidConfig(format!("{name} radius must be > 0, got {l}")));
                }
                Ok(l.ln() / ts)
            }
            (None, None) => Err(Error::InvalidConfig(format!("missing decay field {name}"))),
            _ => Err(Error::InvalidConfig(format!("give either alpha or lambda for {name}, not both"))),
        }
    }

    pub fn to_kernel(&self) -> Result<KernelModel> {
        let domain = self.domain()?;
        let mut hyper = HyperParams {
            beta: self.beta,
            omega0: self.omega0,
            gamma: self.gamma,
            scale: self.scale,
            rho0: self.rho0,
            theta0: self.theta0,
            ..Default::default()
        };
        let needs_alpha0 = matches!(self.kind.as_str(), "ecls-l" | "ecls-c" | "ecls-g" | "dc");
        if needs_alpha0 {
            hyper.alpha0 = self.decay(self.alpha0, self.lambda0, "alpha0/lambda0")?;
        }
        if matches!(self.kind.as_str(), "integrated-l" | "integrated-c" | "integrated-g" | "itc" | "itcbar") {
            hyper.alpha_min = self.decay(self.alpha_min, self.lambda_min, "alpha_min/lambda_min")?;
            hyper.alpha_max = self.decay(self.alpha_max, self.lambda_max, "alpha_max/lambda_max")?;
        }
        let kind = match self.kind.as_str() {
            "stationary-l" => KernelKind::Stationary(Shape::Laplacian),
            "stationary-c" => KernelKind::Stationary(Shape::Cauchy),
            "stationary-g" => KernelKind::Stationary(Shape::Gaussian),
            "ecls-l" => KernelKind::Ecls(Shape::Laplacian),
            "ecls-c" => KernelKind::Ecls(Shape::Cauchy),
            "ecls-g" => KernelKind::Ecls(Shape::Gaussian),
            "tc" => KernelKind::Tc,
            "ss" => KernelKind::Ss,
            "dc" => KernelKind::Dc,
            "integrated-l" => KernelKind::Integrated(Shape::Laplacian),
            "integrated-c" => KernelKind::Integrated(Shape::Cauchy),
            "integrated-g" => KernelKind::Integrated(Shape::Gaussian),
            "itc" => KernelKind::Itc,
            "itcbar" => KernelKind::ItcBar,
            "filtered" => {
                let base = self
                    .base
                    .as_ref()
                    .ok_or_else(|| Error::InvalidConfig("filtered kernel needs a base".into()))?
                    .to_kernel()?;
                let horizon = self
                    .horizon
                    .ok_or_else(|| Error::InvalidConfig("filtered kernel needs a horizon".into()))?;
                return filtered_kernel(base, self.rho0, self.theta0, horizon);
            }
            "mixture" => {
                let parts = self
                    .components
                    .iter()
                    .map(|c| c.to_kernel())
                    .collect::<Result<Vec<_>>>()?;
                KernelKind::Mixture(parts)
            }
            "gpsd" => {
                let g = self
                    .gpsd
                    .as_ref()
                    .ok_or_else(|| Error::InvalidConfig("gpsd kernel needs a gpsd".into()))?
                    .to_gpsd()?;
                KernelKind::FromGpsd { gpsd: g, abs_tol: self.quad_tol }
            }
            other => return Err(Error::InvalidConfig(format!("unknown kernel kind '{other}'"))),
        };
        KernelModel::new(kind, hyper, domain)
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Write a CSV with a header row; every cell is already formatted.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Data CSV: header `t,u,y`, one row per sample.
pub fn write_data_csv(path: &Path, data: &DataRecord) -> Result<()> {
    let rows: Vec<Vec<String>> = data
        .u
        .iter()
        .zip(&data.y)
        .enumerate()
        .map(|(i, (u, y))| vec![(i + 1).to_string(), format_f64(*u), format_f64(*y)])
        .collect();
    write_csv(path, &["t", "u", "y"], &rows)
}

/// Read a data CSV (`t,u,y`); the noise variance must come from elsewhere
/// (flag or sidecar), so it is an argument.
pub fn read_data_csv(path: &Path, sigma2: f64) -> Result<DataRecord> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidConfig(format!("{}: empty data file", path.display())))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols != ["t", "u", "y"] {
        return Err(Error::InvalidConfig(format!(
            "{}: expected header 't,u,y', got '{header}'",
            path.display()
        )));
    }
    let mut u = Vec::new();
    let mut y = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::InvalidConfig(format!("{}: bad row '{line}'", path.display())));
        }
        u.push(parse_f64(fields[1])?);
        y.push(parse_f64(fields[2])?);
    }
    let record = DataRecord { u, y, sigma2 };
    record.validate()?;
    Ok(record)
}

/// Read one named column of a CSV with a header row.
pub fn read_csv_column(path: &Path, column: &str) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidConfig(format!("{}: empty file", path.display())))?;
    let idx = header
        .split(',')
        .position(|c| c.trim() == column)
        .ok_or_else(|| {
            Error::InvalidConfig(format!("{}: no column '{column}' in '{header}'", path.display()))
        })?;
    let mut out = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let field = line.split(',').nth(idx).ok_or_else(|| {
            Error::InvalidConfig(format!("{}: short row '{line}'", path.display()))
        })?;
        out.push(parse_f64(field)?);
    }
    Ok(out)
}

/// Estimate CSV: header `t,g_hat,posterior_sd`.
pub fn write_estimate_csv(path: &Path, g_hat: &[f64], sd: &[f64]) -> Result<()> {
    let rows: Vec<Vec<String>> = g_hat
        .iter()
        .zip(sd)
        .enumerate()
        .map(|(i, (g, s))| vec![(i + 1).to_string(), format_f64(*g), format_f64(*s)])
        .collect();
    write_csv(path, &["t", "g_hat", "posterior_sd"], &rows)
}
