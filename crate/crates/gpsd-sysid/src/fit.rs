//! Marginal-likelihood hyper-parameter fitting: a template names the free
//! fields of a kernel with their boxes, and the fit minimizes the negative
//! log-likelihood over them with the multi-start simplex.

use crate::error::{Error, Result};
use crate::features::{grid_expansion, random_expansion, FeatureExpansion};
use crate::kernels::{KernelKind, KernelModel};
use crate::opt::minimize_multistart;
use crate::regression::{negative_log_likelihood, negative_log_likelihood_low_rank, DataRecord};

/// A tunable scalar of the model. Decay fields have `lambda`-parameterized
/// twins for discrete time (`lambda = e^{alpha T}`); `Sigma2` frees the noise
/// variance instead of a kernel field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HyperField {
    Beta,
    Omega0,
    Alpha0,
    AlphaMin,
    AlphaMax,
    Gamma,
    Scale,
    Rho0,
    Theta0,
    Sigma2,
    Lambda0,
    LambdaMin,
    LambdaMax,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeParam {
    pub field: HyperField,
    pub lo: f64,
    pub hi: f64,
    /// Optimize `ln(value)`; the natural choice for positive scale-like fields.
    pub log_scale: bool,
}

impl FreeParam {
    pub fn new(field: HyperField, lo: f64, hi: f64, log_scale: bool) -> Result<Self> {
        if !(lo < hi) || (log_scale && !(lo > 0.0)) {
            return Err(Error::InvalidConfig(format!(
                "bad bounds [{lo}, {hi}] for {field:?} (log_scale={log_scale})"
            )));
        }
        Ok(Self { field, lo, hi, log_scale })
    }
}

/// How the likelihood is evaluated: exactly through the Gram, or through a
/// feature expansion rebuilt from the kernel's GPSD at every trial point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LikelihoodRoute {
    Exact,
    GridExpansion { n_alpha: usize, n_omega: usize },
    RandomExpansion { num_samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitTemplate {
    pub kernel: KernelModel,
    pub free: Vec<FreeParam>,
    pub route: LikelihoodRoute,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptBudget {
    pub starts: usize,
    pub max_evals_per_start: usize,
    pub seed: u64,
}

impl Default for OptBudget {
    fn default() -> Self {
        Self { starts: 5, max_evals_per_start: 500, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub kernel: KernelModel,
    pub sigma2: f64,
    pub nll: f64,
    /// Fitted values in the order of the template's free fields.
    pub params: Vec<f64>,
    /// The expansion used by the likelihood route, rebuilt at the optimum.
    pub expansion: Option<FeatureExpansion>,
}

/// Assign `value` to `field` on `kernel`. Shape fields recurse into mixture
/// components and filter bases so that shared parameters stay tied; `Scale`
/// stays at the top level (mixtures multiply their components) but follows
/// the filter into its base, which carries the magnitude.
fn apply_field(kernel: &mut KernelModel, field: HyperField, value: f64) {
    let ts = kernel.domain.sampling_time();
    match &mut kernel.kind {
        KernelKind::Mixture(parts) => {
            if field == HyperField::Scale {
                kernel.hyper.scale = value;
                return;
            }
            for p in parts.iter_mut() {
                apply_field(p, field, value);
            }
            set_plain(&mut kernel.hyper, field, value, ts);
            return;
        }
        KernelKind::Filtered { base, .. } => {
            if matches!(field, HyperField::Rho0 | HyperField::Theta0) {
                set_plain(&mut kernel.hyper, field, value, ts);
            } else {
                apply_field(base, field, value);
            }
            return;
        }
        _ => {}
    }
    set_plain(&mut kernel.hyper, field, value, ts);
}

fn set_plain(h: &mut crate::kernels::HyperParams, field: HyperField, value: f64, ts: f64) {
    match field {
        HyperField::Beta => h.beta = value,
        HyperField::Omega0 => h.omega0 = value,
        HyperField::Alpha0 => h.alpha0 = value,
        HyperField::AlphaMin => h.alpha_min = value,
        HyperField::AlphaMax => h.alpha_max = value,
        HyperField::Gamma => h.gamma = value,
        HyperField::Scale => h.scale = value,
        HyperField::Rho0 => h.rho0 = value,
        HyperField::Theta0 => h.theta0 = value,
        HyperField::Lambda0 => h.alpha0 = value.ln() / ts,
        HyperField::LambdaMin => h.alpha_min = value.ln() / ts,
        HyperField::LambdaMax => h.alpha_max = value.ln() / ts,
        HyperField::Sigma2 => {}
    }
}

/// Instantiate the template at the given parameter values (natural units).
pub fn instantiate(template: &FitTemplate, params: &[f64], data: &DataRecord) -> Result<(KernelModel, DataRecord)> {
    if params.len() != template.free.len() {
        return Err(Error::InvalidConfig("parameter count does not match template".into()));
    }
    let mut kernel = template.kernel.clone();
    let mut data = data.clone();
    for (p, &v) in template.free.iter().zip(params) {
        if p.field == HyperField::Sigma2 {
            data.sigma2 = v;
        } else {
            apply_field(&mut kernel, p.field, v);
        }
    }
    kernel.validate()?;
    Ok((kernel, data))
}

fn expansion_for(kernel: &KernelModel, route: LikelihoodRoute) -> Result<Option<FeatureExpansion>> {
    match route {
        LikelihoodRoute::Exact => Ok(None),
        LikelihoodRoute::GridExpansion { n_alpha, n_omega } => {
            let g = kernel.gpsd().ok_or_else(|| {
                Error::InvalidConfig("kernel has no GPSD; expansion route unavailable".into())
            })?;
            Ok(Some(grid_expansion(&g, n_alpha, n_omega, kernel.domain)?))
        }
        LikelihoodRoute::RandomExpansion { num_samples, seed } => {
            let g = kernel.gpsd().ok_or_else(|| {
                Error::InvalidConfig("kernel has no GPSD; expansion route unavailable".into())
            })?;
            Ok(Some(random_expansion(&g, num_samples, seed, kernel.domain)?))
        }
    }
}

/// Evaluate the template's objective at natural-unit parameter values.
pub fn objective(template: &FitTemplate, params: &[f64], data: &DataRecord, n: usize) -> Result<f64> {
    let (kernel, data) = instantiate(template, params, data)?;
    match expansion_for(&kernel, template.route)? {
        None => negative_log_likelihood(&kernel, &data, n),
        Some(exp) => negative_log_likelihood_low_rank(&exp, &data, n),
    }
}

/// Fit the free fields by multi-start simplex minimization of the marginal
/// negative log-likelihood. Trial points that violate a family constraint
/// (for example a crossed decay band) are rejected with an infinite value.
pub fn fit_hyperparameters(
    template: &FitTemplate,
    data: &DataRecord,
    n: usize,
    budget: &OptBudget,
) -> Result<FitResult> {
    data.validate()?;
    if template.free.is_empty() {
        return Err(Error::InvalidConfig("fit template has no free parameters".into()));
    }
    let to_natural = |x: &[f64]| -> Vec<f64> {
        template
            .free
            .iter()
            .zip(x)
            .map(|(p, &v)| if p.log_scale { v.exp() } else { v })
            .collect()
    };
    let lo: Vec<f64> = template.free.iter().map(|p| if p.log_scale { p.lo.ln() } else { p.lo }).collect();
    let hi: Vec<f64> = template.free.iter().map(|p| if p.log_scale { p.hi.ln() } else { p.hi }).collect();
    let obj = |x: &[f64]| -> f64 {
        objective(template, &to_natural(x), data, n).unwrap_or(f64::INFINITY)
    };
    let (x_best, nll) =
        minimize_multistart(obj, &lo, &hi, budget.starts, budget.max_evals_per_start, budget.seed)?;
    let params = to_natural(&x_best);
    let (kernel, fitted_data) = instantiate(template, &params, data)?;
    let expansion = expansion_for(&kernel, template.route)?;
    Ok(FitResult { sigma2: fitted_data.sigma2, nll, params, kernel, expansion })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{HyperParams, KernelKind, KernelModel, TimeDomain};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn dc_data(scale_true: f64) -> DataRecord {
        // synthesize data whose generator matches the prior family
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        let big_n = 150;
        let u: Vec<f64> = (0..big_n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let g: Vec<f64> = (1..=12)
            .map(|t| scale_true.sqrt() * (-0.3 * t as f64).exp() * if t % 2 == 0 { -1.0 } else { 1.0 })
            .collect();
        let mut y = vec![0.0; big_n];
        for k in 1..=big_n {
            for (t, gv) in g.iter().enumerate() {
                if k > t + 1 {
                    y[k - 1] += gv * u[k - t - 2];
                }
            }
            y[k - 1] += 0.02 * (rng.gen::<f64>() * 2.0 - 1.0);
        }
        DataRecord { u, y, sigma2: 0.02f64.powi(2) / 3.0 }
    }

    fn dc_template() -> FitTemplate {
        FitTemplate {
            kernel: KernelModel::new(
                KernelKind::Dc,
                HyperParams { beta: 0.5, alpha0: -0.3, ..Default::default() },
                TimeDomain::DiscreteTime { sampling_time: 1.0 },
            )
            .unwrap(),
            free: vec![
                FreeParam::new(HyperField::Scale, 1e-3, 1e3, true).unwrap(),
                FreeParam::new(HyperField::Lambda0, 0.3, 0.99, false).unwrap(),
            ],
            route: LikelihoodRoute::Exact,
        }
    }

    #[test]
    fn fitted_scale_matches_grid_search_oracle() {
        let data = dc_data(2.0);
        let template = FitTemplate { free: vec![template_scale()], ..dc_template() };
        let n = 15;
        // dense one-dimensional grid search as the oracle
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..4000 {
            let s = 1e-3 * (1e6f64).powf(i as f64 / 3999.0);
            let v = objective(&template, &[s], &data, n).unwrap();
            if v < best.0 {
                best = (v, s);
            }
        }
        let fit = fit_hyperparameters(&template, &data, n, &OptBudget { starts: 3, max_evals_per_start: 200, seed: 1 }).unwrap();
        assert!(
            (fit.params[0] - best.1).abs() < 0.01 * best.1,
            "simplex {} vs grid {}",
            fit.params[0],
            best.1
        );
        assert!(fit.nll <= best.0 + 1e-9);
    }

    fn template_scale() -> FreeParam {
        FreeParam::new(HyperField::Scale, 1e-3, 1e3, true).unwrap()
    }

    #[test]
    fn fit_improves_on_default_params() {
        let data = dc_data(1.0);
        let template = dc_template();
        let n = 15;
        let base = negative_log_likelihood(&template.kernel, &data, n).unwrap();
        let fit = fit_hyperparameters(&template, &data, n, &OptBudget { starts: 3, max_evals_per_start: 150, seed: 2 }).unwrap();
        assert!(fit.nll < base, "{} !< {base}", fit.nll);
        // lambda0 was mapped back into alpha0
        let lam = fit.kernel.hyper.lambda0(1.0);
        assert!((0.3..=0.99).contains(&lam));
    }

    #[test]
    fn infeasible_band_is_rejected_not_fatal() {
        // free band edges may cross during the search; the fit must survive
        let kernel = KernelModel::new(
            KernelKind::Itc,
            HyperParams { alpha_min: -1.0, alpha_max: -0.2, ..Default::default() },
            TimeDomain::DiscreteTime { sampling_time: 1.0 },
        )
        .unwrap();
        let template = FitTemplate {
            kernel,
            free: vec![
                FreeParam::new(HyperField::LambdaMin, 0.05, 0.99, false).unwrap(),
                FreeParam::new(HyperField::LambdaMax, 0.05, 0.99, false).unwrap(),
            ],
            route: LikelihoodRoute::Exact,
        };
        let data = dc_data(1.0);
        let fit = fit_hyperparameters(&template, &data, 12, &OptBudget { starts: 3, max_evals_per_start: 100, seed: 3 }).unwrap();
        assert!(fit.params[0] < fit.params[1]);
    }
}
