//! Command-line front end: kernel inspection, identification runs, density
//! maps, benchmark execution, and CSV export for figures.
//!
//! Every subcommand validates its inputs and finishes its computation before
//! writing any artifact, and each run logs the fully resolved configuration
//! (including defaults) to a JSON sidecar so the artifacts can be reproduced
//! from the sidecar alone.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use gpsd_sysid::analysis::{gpsd_figure_grid, modulated_dtft, pole_density_map};
use gpsd_sysid::config::{
    format_f64, read_csv_column, read_data_csv, read_json, write_csv, write_estimate_csv,
    write_json, GpsdConfig, KernelConfig,
};
use gpsd_sysid::features::{approx_error, grid_expansion, random_expansion, FeatureExpansion};
use gpsd_sysid::fit::{
    fit_hyperparameters, FitTemplate, FreeParam, HyperField, LikelihoodRoute, OptBudget,
};
use gpsd_sysid::harness::{average_fit, run_benchmark, run_demo, ExperimentConfig};
use gpsd_sysid::kernels::TimeDomain;
use gpsd_sysid::regression::{negative_log_likelihood, posterior_time_domain};
use gpsd_sysid::{Error, Result};

#[derive(Parser)]
#[command(
    name = "gpsd-sysid",
    about = "Kernel-based impulse-response identification toolkit",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a kernel's Gram matrix on an index range and export it as CSV.
    KernelEval(KernelEvalArgs),
    /// Evaluate a continuous GPSD on a rectangular (alpha, omega) grid.
    GpsdGrid(GpsdGridArgs),
    /// Discretize a continuous GPSD and export its unit-disc density grid.
    Discretize(DiscretizeArgs),
    /// Estimate an impulse response from a data CSV with a kernel prior.
    Identify(IdentifyArgs),
    /// Prior density of second-order impulse responses over a pole grid.
    DensityMap(DensityMapArgs),
    /// (Modulated) discrete-time Fourier transform of a response column.
    Dtft(DtftArgs),
    /// Build a feature expansion of a kernel and report its approximation error.
    ApproxStudy(ApproxStudyArgs),
    /// Run the randomized estimator benchmark and write result/summary CSVs.
    Benchmark(BenchmarkArgs),
    /// Run the fixed five-pole demo study with the three circle priors.
    Demo(DemoArgs),
}

#[derive(Args, Serialize)]
struct KernelEvalArgs {
    /// Kernel description JSON.
    #[arg(long)]
    kernel: PathBuf,
    /// First index of the Gram grid.
    #[arg(long, default_value_t = 1)]
    min_index: usize,
    /// Last index of the Gram grid (inclusive).
    #[arg(long, default_value_t = 10)]
    max_index: usize,
    /// Output CSV (row-major Gram matrix with an index header).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct GpsdGridArgs {
    /// GPSD description JSON.
    #[arg(long)]
    gpsd: PathBuf,
    #[arg(long, default_value_t = -2.0)]
    alpha_lo: f64,
    #[arg(long, default_value_t = -0.01)]
    alpha_hi: f64,
    #[arg(long, default_value_t = -10.0)]
    omega_lo: f64,
    #[arg(long, default_value_t = 10.0)]
    omega_hi: f64,
    #[arg(long, default_value_t = 50)]
    n_alpha: usize,
    #[arg(long, default_value_t = 50)]
    n_omega: usize,
    /// Output CSV of (alpha, omega, value) triplets.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct DiscretizeArgs {
    /// GPSD description JSON.
    #[arg(long)]
    gpsd: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    sampling_time: f64,
    /// Number of aliasing terms folded on each side.
    #[arg(long, default_value_t = 3)]
    fold_terms: usize,
    #[arg(long, default_value_t = 60)]
    n_lambda: usize,
    #[arg(long, default_value_t = 60)]
    n_theta: usize,
    /// Output CSV of (lambda, theta, value) triplets over the unit disc.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct IdentifyArgs {
    /// Input data CSV with columns t,u,y.
    #[arg(long)]
    data: PathBuf,
    /// Kernel description JSON (the prior).
    #[arg(long)]
    kernel: PathBuf,
    /// Noise variance of the record.
    #[arg(long)]
    sigma2: f64,
    /// Practical impulse-response length.
    #[arg(long, default_value_t = 50)]
    n: usize,
    /// Tune hyperparameters by marginal likelihood before estimating
    /// (frees the bandwidth and the scale, and the center frequency with
    /// --free-omega0); otherwise the kernel is used exactly as configured.
    #[arg(long, default_value_t = false)]
    fit: bool,
    /// Also free omega0 in [0, pi] when fitting.
    #[arg(long, default_value_t = false)]
    free_omega0: bool,
    #[arg(long, default_value_t = 3)]
    starts: usize,
    #[arg(long, default_value_t = 200)]
    max_evals: usize,
    /// Optimizer seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Optional truth CSV with a `g` column; adds the average fit to the report.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Output estimate CSV (t, g_hat, posterior_sd).
    #[arg(long)]
    out: PathBuf,
    /// Output hyperparameter report JSON.
    #[arg(long)]
    hyper_out: PathBuf,
}

#[derive(Args, Serialize)]
struct DensityMapArgs {
    /// Kernel description JSON (the prior).
    #[arg(long)]
    kernel: PathBuf,
    /// Impulse-response length entering the prior density.
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 60)]
    n_mag: usize,
    #[arg(long, default_value_t = 60)]
    n_phase: usize,
    #[arg(long, default_value_t = 0.02)]
    mag_lo: f64,
    #[arg(long, default_value_t = 0.98)]
    mag_hi: f64,
    #[arg(long, default_value_t = 0.02)]
    phase_lo: f64,
    #[arg(long, default_value_t = std::f64::consts::PI - 0.02)]
    phase_hi: f64,
    /// Output CSV of (magnitude, phase, density) triplets.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct DtftArgs {
    /// Input CSV holding the response.
    #[arg(long)]
    input: PathBuf,
    /// Column to transform.
    #[arg(long, default_value = "g_hat")]
    column: String,
    /// Modulation radius; 1 gives the plain transform (scaled by 1/pi).
    #[arg(long, default_value_t = 1.0)]
    lambda0: f64,
    #[arg(long, default_value_t = 512)]
    n_theta: usize,
    /// Output CSV (theta, re, im, abs).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct ApproxStudyArgs {
    /// Kernel description JSON; the kernel must expose a GPSD.
    #[arg(long)]
    kernel: PathBuf,
    /// "grid" or "random".
    #[arg(long, default_value = "grid")]
    mode: String,
    #[arg(long, default_value_t = 8)]
    n_alpha: usize,
    #[arg(long, default_value_t = 32)]
    n_omega: usize,
    /// Monte Carlo sample count for --mode random.
    #[arg(long, default_value_t = 50)]
    num_samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Indices 1..=max checked for the worst-case Gram discrepancy.
    #[arg(long, default_value_t = 20)]
    max_index: usize,
    /// Output CSV of atoms (alpha_or_lambda, omega_or_theta, weight).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct BenchmarkArgs {
    /// Experiment config JSON; defaults to the desk-scale protocol.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config file's seed when given.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (results.csv, summary.csv, config sidecar).
    #[arg(long)]
    out_dir: PathBuf,
    /// Cache per-system rows under <out-dir>/systems so an interrupted run
    /// resumes where it stopped.
    #[arg(long, default_value_t = false)]
    resume: bool,
}

#[derive(Args, Serialize)]
struct DemoArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Record length.
    #[arg(long, default_value_t = 500)]
    big_n: usize,
    #[arg(long, default_value_t = 10.0)]
    snr: f64,
    /// Practical impulse-response length.
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Angular grid size of the transform comparison.
    #[arg(long, default_value_t = 400)]
    n_theta: usize,
    /// Output directory (impulse.csv, transforms.csv, errors.csv, sidecar).
    #[arg(long)]
    out_dir: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = dispatch(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::KernelEval(a) => kernel_eval(a),
        Command::GpsdGrid(a) => gpsd_grid(a),
        Command::Discretize(a) => discretize(a),
        Command::Identify(a) => identify(a),
        Command::DensityMap(a) => density_map(a),
        Command::Dtft(a) => dtft_cmd(a),
        Command::ApproxStudy(a) => approx_study(a),
        Command::Benchmark(a) => benchmark(a),
        Command::Demo(a) => run_demo_command(a),
    }
}

/// Sidecar with the resolved run configuration, written next to the named
/// artifact (or into the output directory for multi-file runs).
#[derive(Serialize)]
struct Sidecar<'a, A: Serialize, E: Serialize> {
    subcommand: &'a str,
    args: A,
    resolved: E,
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".config.json");
    out.with_file_name(name)
}

fn write_sidecar<A: Serialize, E: Serialize>(
    out: &Path,
    subcommand: &str,
    args: &A,
    resolved: &E,
) -> Result<()> {
    write_json(&sidecar_path(out), &Sidecar { subcommand, args, resolved })
}

fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(lo < hi) {
        return Err(Error::InvalidConfig(format!("bad grid [{lo}, {hi}] x {n}")));
    }
    Ok((0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect())
}

fn kernel_eval(a: KernelEvalArgs) -> Result<()> {
    let cfg: KernelConfig = read_json(&a.kernel)?;
    let kernel = cfg.to_kernel()?;
    if a.max_index < a.min_index {
        return Err(Error::InvalidConfig(format!(
            "max_index {} below min_index {}",
            a.max_index, a.min_index
        )));
    }
    let indices: Vec<f64> = (a.min_index..=a.max_index).map(|t| t as f64).collect();
    let gram = kernel.gram(&indices)?;
    let mut header: Vec<String> = vec!["t".into()];
    header.extend(indices.iter().map(|t| format!("{t:.0}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = indices
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut row = vec![format!("{t:.0}")];
            row.extend((0..indices.len()).map(|j| format_f64(gram[(i, j)])));
            row
        })
        .collect();
    write_csv(&a.out, &header_refs, &rows)?;
    write_sidecar(&a.out, "kernel-eval", &a, &cfg)
}

fn gpsd_grid(a: GpsdGridArgs) -> Result<()> {
    let cfg: GpsdConfig = read_json(&a.gpsd)?;
    let gpsd = cfg.to_gpsd()?;
    let alphas = linspace(a.alpha_lo, a.alpha_hi, a.n_alpha)?;
    let omegas = linspace(a.omega_lo, a.omega_hi, a.n_omega)?;
    let mut rows = Vec::with_capacity(a.n_alpha * a.n_omega);
    for &al in &alphas {
        for &om in &omegas {
            rows.push(vec![format_f64(al), format_f64(om), format_f64(gpsd.eval(al, om)?)]);
        }
    }
    write_csv(&a.out, &["alpha", "omega", "value"], &rows)?;
    write_sidecar(&a.out, "gpsd-grid", &a, &cfg)
}

fn discretize(a: DiscretizeArgs) -> Result<()> {
    let cfg: GpsdConfig = read_json(&a.gpsd)?;
    let gpsd = cfg.to_gpsd()?;
    let dgpsd = gpsd.discretize(a.sampling_time, a.fold_terms)?;
    if a.n_lambda == 0 || a.n_theta == 0 {
        return Err(Error::InvalidConfig("grid sizes must be >= 1".into()));
    }
    // cell centers: radii inside (0, 1), angles over [-pi, pi)
    let lambdas: Vec<f64> = (0..a.n_lambda)
        .map(|i| (i as f64 + 0.5) / a.n_lambda as f64)
        .collect();
    let thetas: Vec<f64> = (0..a.n_theta)
        .map(|j| -PI + 2.0 * PI * (j as f64 + 0.5) / a.n_theta as f64)
        .collect();
    let grid = gpsd_figure_grid(&dgpsd, &lambdas, &thetas)?;
    let mut rows = Vec::with_capacity(a.n_lambda * a.n_theta);
    for (i, &lam) in lambdas.iter().enumerate() {
        for (j, &th) in thetas.iter().enumerate() {
            rows.push(vec![format_f64(lam), format_f64(th), format_f64(grid[(i, j)])]);
        }
    }
    write_csv(&a.out, &["lambda", "theta", "value"], &rows)?;
    write_sidecar(&a.out, "discretize", &a, &cfg)
}

#[derive(Serialize)]
struct IdentifyReport {
    sigma2: f64,
    nll: f64,
    n: usize,
    fitted: bool,
    /// Fitted values keyed by field name (empty when not fitting).
    params: Vec<(String, f64)>,
    /// Average fit against the supplied truth, when given.
    #[serde(skip_serializing_if = "Option::is_none")]
    average_fit: Option<f64>,
}

fn identify(a: IdentifyArgs) -> Result<()> {
    let cfg: KernelConfig = read_json(&a.kernel)?;
    let kernel = cfg.to_kernel()?;
    if !(a.sigma2 > 0.0) {
        return Err(Error::InvalidConfig(format!("sigma2 must be > 0, got {}", a.sigma2)));
    }
    if a.n == 0 {
        return Err(Error::InvalidConfig("n must be >= 1".into()));
    }
    let data = read_data_csv(&a.data, a.sigma2)?;
    let truth = a
        .truth
        .as_ref()
        .map(|p| read_csv_column(p, "g"))
        .transpose()?;
    let (kernel, nll, params) = if a.fit {
        let mut free = vec![
            FreeParam::new(HyperField::Beta, 1e-3, 5.0, true)?,
            FreeParam::new(HyperField::Scale, 1e-4, 1e4, true)?,
        ];
        if a.free_omega0 {
            free.push(FreeParam::new(HyperField::Omega0, 0.0, PI, false)?);
        }
        let names: Vec<String> = free.iter().map(|f| format!("{:?}", f.field)).collect();
        let template = FitTemplate { kernel, free, route: LikelihoodRoute::Exact };
        let budget = OptBudget {
            starts: a.starts,
            max_evals_per_start: a.max_evals,
            seed: a.seed,
        };
        let fit = fit_hyperparameters(&template, &data, a.n, &budget)?;
        let params = names.into_iter().zip(fit.params.iter().copied()).collect();
        (fit.kernel, fit.nll, params)
    } else {
        let nll = negative_log_likelihood(&kernel, &data, a.n)?;
        (kernel, nll, Vec::new())
    };
    let post = posterior_time_domain(&kernel, &data, a.n)?;
    let g_hat: Vec<f64> = post.g_hat.iter().copied().collect();
    let sd: Vec<f64> = post.sd().iter().copied().collect();
    let af = truth
        .as_deref()
        .map(|g| average_fit(&g_hat, g))
        .transpose()?;
    let report = IdentifyReport {
        sigma2: a.sigma2,
        nll,
        n: a.n,
        fitted: a.fit,
        params,
        average_fit: af,
    };
    write_estimate_csv(&a.out, &g_hat, &sd)?;
    write_json(&a.hyper_out, &report)?;
    write_sidecar(&a.out, "identify", &a, &cfg)
}

#[derive(Serialize)]
struct DensityMeta {
    n: usize,
    max_log_density: f64,
    argmax_magnitude: f64,
    argmax_phase: f64,
}

fn density_map(a: DensityMapArgs) -> Result<()> {
    let cfg: KernelConfig = read_json(&a.kernel)?;
    let kernel = cfg.to_kernel()?;
    let mags = linspace(a.mag_lo, a.mag_hi, a.n_mag)?;
    let phases = linspace(a.phase_lo, a.phase_hi, a.n_phase)?;
    let grid = pole_density_map(&kernel, &mags, &phases, a.n)?;
    let mut rows = Vec::with_capacity(a.n_mag * a.n_phase);
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for (i, &m) in mags.iter().enumerate() {
        for (j, &p) in phases.iter().enumerate() {
            if grid.log_values[(i, j)] > best.0 {
                best = (grid.log_values[(i, j)], m, p);
            }
            rows.push(vec![format_f64(m), format_f64(p), format_f64(grid.values[(i, j)])]);
        }
    }
    let meta = DensityMeta {
        n: a.n,
        max_log_density: best.0,
        argmax_magnitude: best.1,
        argmax_phase: best.2,
    };
    write_csv(&a.out, &["magnitude", "phase", "value"], &rows)?;
    write_json(&a.out.with_extension("meta.json"), &meta)?;
    write_sidecar(&a.out, "density-map", &a, &cfg)
}

fn dtft_cmd(a: DtftArgs) -> Result<()> {
    let g = read_csv_column(&a.input, &a.column)?;
    if g.is_empty() {
        return Err(Error::InvalidConfig(format!("no data in column '{}'", a.column)));
    }
    if a.n_theta == 0 {
        return Err(Error::InvalidConfig("n_theta must be >= 1".into()));
    }
    let thetas: Vec<f64> = (0..a.n_theta)
        .map(|j| -PI + 2.0 * PI * j as f64 / a.n_theta as f64)
        .collect();
    let vals = modulated_dtft(&g, a.lambda0, &thetas)?;
    let rows: Vec<Vec<String>> = thetas
        .iter()
        .zip(&vals)
        .map(|(&th, v)| {
            vec![format_f64(th), format_f64(v.re), format_f64(v.im), format_f64(v.norm())]
        })
        .collect();
    write_csv(&a.out, &["theta", "re", "im", "abs"], &rows)?;
    write_sidecar(&a.out, "dtft", &a, &a.column)
}

#[derive(Serialize)]
struct ApproxMeta {
    mode: String,
    seed: u64,
    num_samples: usize,
    time_domain: String,
    total_weight: f64,
    /// Worst-case Gram discrepancy over indices 1..=max_index.
    max_error: f64,
}

fn approx_study(a: ApproxStudyArgs) -> Result<()> {
    let cfg: KernelConfig = read_json(&a.kernel)?;
    let kernel = cfg.to_kernel()?;
    let gpsd = kernel.gpsd().ok_or_else(|| {
        Error::InvalidConfig(format!("kernel '{}' has no GPSD to expand", cfg.kind))
    })?;
    let expansion: FeatureExpansion = match a.mode.as_str() {
        "grid" => grid_expansion(&gpsd, a.n_alpha, a.n_omega, kernel.domain)?,
        "random" => random_expansion(&gpsd, a.num_samples, a.seed, kernel.domain)?,
        other => return Err(Error::InvalidConfig(format!("unknown mode '{other}'"))),
    };
    if a.max_index == 0 {
        return Err(Error::InvalidConfig("max_index must be >= 1".into()));
    }
    let indices: Vec<f64> = (1..=a.max_index).map(|t| t as f64).collect();
    let max_error = approx_error(&expansion, &kernel, &indices)?;
    // discrete-time atoms are reported in disc coordinates (lambda, theta)
    let (header, rows): (Vec<&str>, Vec<Vec<String>>) = match kernel.domain {
        TimeDomain::ContinuousTime => (
            vec!["alpha", "omega", "weight"],
            expansion
                .atoms
                .iter()
                .map(|at| vec![format_f64(at.alpha), format_f64(at.omega), format_f64(at.weight)])
                .collect(),
        ),
        TimeDomain::DiscreteTime { sampling_time } => (
            vec!["lambda", "theta", "weight"],
            expansion
                .atoms
                .iter()
                .map(|at| {
                    vec![
                        format_f64((at.alpha * sampling_time).exp()),
                        format_f64(at.omega * sampling_time),
                        format_f64(at.weight),
                    ]
                })
                .collect(),
        ),
    };
    let meta = ApproxMeta {
        mode: a.mode.clone(),
        seed: a.seed,
        num_samples: expansion.atoms.len(),
        time_domain: match kernel.domain {
            TimeDomain::ContinuousTime => "continuous".into(),
            TimeDomain::DiscreteTime { sampling_time } => format!("discrete(T={sampling_time})"),
        },
        total_weight: expansion.total_weight(),
        max_error,
    };
    write_csv(&a.out, &header, &rows)?;
    write_json(&a.out.with_extension("meta.json"), &meta)?;
    write_sidecar(&a.out, "approx-study", &a, &cfg)
}

fn benchmark(a: BenchmarkArgs) -> Result<()> {
    let mut config = match &a.config {
        Some(path) => read_json::<ExperimentConfig>(path)?,
        None => ExperimentConfig::desk_scale(a.seed.unwrap_or(0)),
    };
    if let Some(seed) = a.seed {
        config.seed = seed;
    }
    config.validate()?;
    std::fs::create_dir_all(&a.out_dir)?;
    let resume_dir = a.resume.then(|| a.out_dir.join("systems"));
    let result = run_benchmark(&config, resume_dir.as_deref())?;
    let rows: Vec<Vec<String>> = result
        .rows
        .iter()
        .map(|r| {
            vec![
                r.system_id.to_string(),
                r.estimator.clone(),
                format_f64(r.af),
                format_f64(r.nll),
                format_f64(r.fit_seconds),
                r.status.clone(),
            ]
        })
        .collect();
    write_csv(
        &a.out_dir.join("results.csv"),
        &["system_id", "estimator", "af", "nll", "fit_seconds", "status"],
        &rows,
    )?;
    let summary: Vec<Vec<String>> = result
        .summaries
        .iter()
        .map(|s| {
            vec![
                s.estimator.clone(),
                format_f64(s.q1),
                format_f64(s.median),
                format_f64(s.q3),
                format_f64(s.mean),
                s.failures.to_string(),
            ]
        })
        .collect();
    write_csv(
        &a.out_dir.join("summary.csv"),
        &["estimator", "q1", "median", "q3", "mean", "failures"],
        &summary,
    )?;
    write_sidecar(&a.out_dir.join("run"), "benchmark", &a, &config)
}

fn run_demo_command(a: DemoArgs) -> Result<()> {
    let result = run_demo(a.seed, a.big_n, a.snr, a.n, a.n_theta)?;
    std::fs::create_dir_all(&a.out_dir)?;
    // impulse responses, one column per prior
    let mut header: Vec<String> = vec!["t".into()];
    header.extend(result.estimates.iter().map(|e| format!("g_{}", e.name)));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let imp_rows: Vec<Vec<String>> = (0..a.n)
        .map(|t| {
            let mut row = vec![(t + 1).to_string()];
            row.extend(result.estimates.iter().map(|e| format_f64(e.g_hat[t])));
            row
        })
        .collect();
    write_csv(&a.out_dir.join("impulse.csv"), &header_refs, &imp_rows)?;
    // transform magnitudes against the truth
    let mut theader: Vec<String> = vec!["theta".into(), "true_abs".into()];
    theader.extend(result.estimates.iter().map(|e| format!("abs_{}", e.name)));
    let theader_refs: Vec<&str> = theader.iter().map(String::as_str).collect();
    let thetas = &result.thetas;
    let mut tr_rows = Vec::with_capacity(thetas.len());
    let est_abs: Vec<Vec<f64>> = result
        .estimates
        .iter()
        .map(|e| {
            gpsd_sysid::analysis::dtft(&e.g_hat, thetas)
                .iter()
                .map(|v| v.norm())
                .collect()
        })
        .collect();
    for (j, &th) in thetas.iter().enumerate() {
        let mut row = vec![format_f64(th), format_f64(result.true_abs[j])];
        row.extend(est_abs.iter().map(|col| format_f64(col[j])));
        tr_rows.push(row);
    }
    write_csv(&a.out_dir.join("transforms.csv"), &theader_refs, &tr_rows)?;
    let err_rows: Vec<Vec<String>> = result
        .estimates
        .iter()
        .map(|e| vec![e.name.clone(), format_f64(e.transform_error), format_f64(e.nll)])
        .collect();
    write_csv(
        &a.out_dir.join("errors.csv"),
        &["estimator", "transform_error", "nll"],
        &err_rows,
    )?;
    write_sidecar(&a.out_dir.join("run"), "demo", &a, &a.seed)
}
