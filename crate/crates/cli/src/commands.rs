//! The `prior`, `fit`, `compare` and `simulate` workflows.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fgnpc::{
    compare_fits, fit, induced_distance_density, run_simulation, BayesFactorResult, Estimate, Fit, ModelSpec,
    NoiseKind, PcPrior, SharedPriors, Side, Trend,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::series::{centered, TimeSeriesFile};

/// Half-width of the internal-coordinate grid used for prior curves.
const CURVE_HALF_WIDTH: f64 = 36.0;
const CURVE_POINTS: usize = 4001;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriorKind {
    Fgn,
    Ar1,
    Precision,
}

impl PriorKind {
    pub fn name(self) -> &'static str {
        match self {
            PriorKind::Fgn => "fgn",
            PriorKind::Ar1 => "ar1",
            PriorKind::Precision => "precision",
        }
    }
}

/// Writes `contents` to `dir/name` and returns the path.
fn write_output(dir: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn build_priors(cfg: &RunConfig) -> CliResult<SharedPriors> {
    Ok(SharedPriors::build(&cfg.prior_config())?)
}

// ---------------------------------------------------------------- prior

#[derive(Serialize)]
struct PcPriorMeta<'a> {
    kind: &'static str,
    parameter: &'static str,
    rate: f64,
    rate_source: &'static str,
    base_point: f64,
    /// `P(θ > u)` under this prior, by numerical integration.
    tail_probability_above_u: f64,
    lower_branch_scale: f64,
    upper_branch_scale: f64,
    files: [String; 2],
    config: &'a RunConfig,
}

#[derive(Serialize)]
struct PrecisionMeta<'a> {
    kind: &'static str,
    rate: f64,
    marginal_sd: f64,
    /// `P(σ > prec_u)`.
    tail_probability_above_u: f64,
    files: [String; 2],
    config: &'a RunConfig,
}

/// Density of `θ` at nodes mapped from a uniform internal grid. The base
/// point appears twice, holding the left and then the right limit.
fn parameter_curve(prior: &PcPrior) -> String {
    let table = prior.table();
    let base = table.base_internal();
    let step = 2.0 * CURVE_HALF_WIDTH / (CURVE_POINTS - 1) as f64;
    let mut out = String::from("theta,density\n");
    for i in 0..CURVE_POINTS {
        let x = base - CURVE_HALF_WIDTH + step * i as f64;
        let x = if i == CURVE_POINTS / 2 { base } else { x };
        let theta = table.to_parameter(x);
        if !table.support().contains(theta) {
            continue;
        }
        let jac = table.jacobian(x);
        let sides: &[Side] = if x == base {
            &[Side::Lower, Side::Upper]
        } else if x < base {
            &[Side::Lower]
        } else {
            &[Side::Upper]
        };
        for &side in sides {
            let _ = writeln!(out, "{theta},{}", prior.one_sided_internal(side, x) / jac);
        }
    }
    out
}

/// Signed-distance densities induced by the PC prior and by a uniform prior.
fn distance_curve(prior: &PcPrior) -> CliResult<String> {
    let table = prior.table();
    let support = table.support();
    let pc = induced_distance_density(|t| prior.density(t).unwrap_or(0.0), table, true)?;
    let uniform = induced_distance_density(|_| 1.0 / support.width(), table, true)?;
    let mut out = String::from("signed_distance,theta,pc_density,uniform_density\n");
    for (a, b) in pc.iter().zip(&uniform) {
        let _ = writeln!(out, "{},{},{},{}", a.distance, a.theta, a.density, b.density);
    }
    Ok(out)
}

pub fn cmd_prior(kind: PriorKind, cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let priors = build_priors(cfg)?;
    let name = kind.name();
    let files = [format!("{name}_prior.csv"), format!("{name}_distance.csv")];
    let mut written = Vec::new();
    match kind {
        PriorKind::Fgn | PriorKind::Ar1 => {
            let prior = priors.prior(if kind == PriorKind::Fgn { NoiseKind::Fgn } else { NoiseKind::Ar1 });
            let table = prior.table();
            written.push(write_output(&cfg.out, &files[0], &parameter_curve(prior))?);
            written.push(write_output(&cfg.out, &files[1], &distance_curve(prior)?)?);
            let meta = PcPriorMeta {
                kind: name,
                parameter: prior.parameter_name(),
                rate: prior.rate(),
                rate_source: if kind == PriorKind::Fgn {
                    "calibrated from P(H > u) = alpha"
                } else {
                    "shared with the fGn prior calibrated from P(H > u) = alpha"
                },
                base_point: table.base_point(),
                tail_probability_above_u: prior.tail_probability(cfg.u, table.support().hi)?,
                lower_branch_scale: prior.branch_scale(Side::Lower),
                upper_branch_scale: prior.branch_scale(Side::Upper),
                files: files.clone(),
                config: cfg,
            };
            written.push(write_output(&cfg.out, &format!("{name}_meta.json"), &to_json(&meta))?);
        }
        PriorKind::Precision => {
            let p = priors.precision;
            files_precision(cfg, &p, &files, &mut written)?;
            let meta = PrecisionMeta {
                kind: name,
                rate: p.rate(),
                marginal_sd: p.marginal_sd(),
                tail_probability_above_u: p.sigma_exceedance(p.u()),
                files,
                config: cfg,
            };
            written.push(write_output(&cfg.out, &format!("{name}_meta.json"), &to_json(&meta))?);
        }
    }
    Ok(written)
}

/// Log-precision density, and the density of `σ = τ^{-1/2}`.
fn files_precision(
    cfg: &RunConfig,
    p: &fgnpc::PrecisionPrior,
    files: &[String; 2],
    written: &mut Vec<PathBuf>,
) -> CliResult<()> {
    let mut kappa = String::from("kappa,density\n");
    let (k0, k1, nk) = (-12.0 - 2.0 * p.u().ln(), 30.0 - 2.0 * p.u().ln(), 4201);
    for i in 0..nk {
        let k = k0 + (k1 - k0) * i as f64 / (nk - 1) as f64;
        let _ = writeln!(kappa, "{k},{}", p.log_density(k).exp());
    }
    let mut sigma = String::from("sigma,density\n");
    let smax = 30.0 / p.rate();
    for i in 0..CURVE_POINTS {
        let s = smax * i as f64 / (CURVE_POINTS - 1) as f64;
        let _ = writeln!(sigma, "{s},{}", p.density_sigma(s));
    }
    written.push(write_output(&cfg.out, &files[0], &kappa)?);
    written.push(write_output(&cfg.out, &files[1], &sigma)?);
    Ok(())
}

// ---------------------------------------------------------------- fit / compare

#[derive(Serialize)]
struct SeriesMeta {
    file: String,
    n: usize,
    first_time: String,
    last_time: String,
    spacing: String,
    /// Values had their sample mean removed (trend `none` only).
    mean_centered: bool,
    mean_removed: f64,
}

#[derive(Serialize)]
struct EstimateOut {
    name: String,
    mean: f64,
    lower_95: f64,
    upper_95: f64,
}

impl EstimateOut {
    fn new(name: impl Into<String>, e: &Estimate) -> Self {
        Self {
            name: name.into(),
            mean: e.mean,
            lower_95: e.lower,
            upper_95: e.upper,
        }
    }
}

#[derive(Serialize)]
struct FitOut {
    model: &'static str,
    log_marginal_likelihood: f64,
    posterior: Vec<EstimateOut>,
    mode_theta: f64,
    mode_log_precision: f64,
    grid_internal_range: (f64, f64),
    grid_log_precision_range: (f64, f64),
}

/// Names of the regression coefficients.
fn beta_name(j: usize) -> String {
    match j {
        0 => "beta0".into(),
        1 => "beta1".into(),
        _ => format!("beta{j}"),
    }
}

impl FitOut {
    fn new(f: &Fit) -> Self {
        let s = &f.summaries;
        let mut posterior = vec![EstimateOut::new(s.parameter, &s.flex), EstimateOut::new("sigma", &s.sigma)];
        posterior.extend(s.beta.iter().enumerate().map(|(j, e)| EstimateOut::new(beta_name(j), e)));
        Self {
            model: f.noise_kind.name(),
            log_marginal_likelihood: f.log_ml,
            posterior,
            mode_theta: f.mode.0,
            mode_log_precision: f.mode.1,
            grid_internal_range: f.internal_range,
            grid_log_precision_range: f.kappa_range,
        }
    }
}

#[derive(Serialize)]
struct FitReport<'a> {
    series: SeriesMeta,
    trend: &'static str,
    rate: f64,
    fit: FitOut,
    config: &'a RunConfig,
}

#[derive(Serialize)]
struct CompareReport<'a> {
    series: SeriesMeta,
    trend: &'static str,
    rate: f64,
    log_ml_fgn: f64,
    log_ml_ar1: f64,
    log_bayes_factor: f64,
    bayes_factor: f64,
    category: &'static str,
    category_range: &'static str,
    fits: [FitOut; 2],
    config: &'a RunConfig,
}

/// Reads the series and applies the trend-`none` centering.
fn load(path: &Path, cfg: &RunConfig) -> CliResult<(Vec<f64>, SeriesMeta)> {
    let series = TimeSeriesFile::read(path)?;
    series.require_length(path)?;
    let center = cfg.trend() == Trend::None;
    let mean = series.values.iter().sum::<f64>() / series.len() as f64;
    let y = if center { centered(&series.values) } else { series.values.clone() };
    let meta = SeriesMeta {
        file: path.display().to_string(),
        n: series.len(),
        first_time: series.span.0.clone(),
        last_time: series.span.1.clone(),
        spacing: series.spacing.describe(),
        mean_centered: center,
        mean_removed: if center { mean } else { 0.0 },
    };
    Ok((y, meta))
}

fn model_spec(priors: &SharedPriors, kind: NoiseKind, cfg: &RunConfig, n: usize) -> CliResult<ModelSpec> {
    Ok(priors
        .spec(kind, cfg.trend(), n, cfg.quadrature())?
        .with_beta_precision(cfg.beta_precision)?)
}

fn fit_lines(out: &mut String, f: &Fit) {
    let s = &f.summaries;
    let mut row = |name: &str, e: &Estimate| {
        let _ = writeln!(
            out,
            "  {:<8} {:>12.6} {:>12.6} {:>12.6}",
            name, e.mean, e.lower, e.upper
        );
    };
    row(s.parameter, &s.flex);
    row("sigma", &s.sigma);
    for (j, e) in s.beta.iter().enumerate() {
        row(&beta_name(j), e);
    }
}

fn series_lines(out: &mut String, meta: &SeriesMeta, cfg: &RunConfig, rate: f64) {
    let _ = writeln!(
        out,
        "series: {} (n = {}, {} to {}, step {})",
        meta.file, meta.n, meta.first_time, meta.last_time, meta.spacing
    );
    if meta.mean_centered {
        let _ = writeln!(out, "trend: none (sample mean {:.6} removed)", meta.mean_removed);
    } else {
        let _ = writeln!(out, "trend: linear in the time index 1..n");
    }
    let _ = writeln!(
        out,
        "priors: P(H > {}) = {} gives rate {:.6}; P(sigma > {}) = {}",
        cfg.u, cfg.alpha, rate, cfg.prec_u, cfg.prec_alpha
    );
}

pub fn cmd_fit(path: &Path, kind: NoiseKind, cfg: &RunConfig) -> CliResult<(String, Vec<PathBuf>)> {
    let (y, series) = load(path, cfg)?;
    let priors = build_priors(cfg)?;
    let spec = model_spec(&priors, kind, cfg, y.len())?;
    let f = fit(&y, &spec)?;

    let mut text = String::new();
    series_lines(&mut text, &series, cfg, priors.rate());
    let _ = writeln!(text, "\nmodel {}: log marginal likelihood {:.6}", kind.name(), f.log_ml);
    let _ = writeln!(text, "  {:<8} {:>12} {:>12} {:>12}", "", "mean", "2.5%", "97.5%");
    fit_lines(&mut text, &f);

    let report = FitReport {
        series,
        trend: cfg.trend().name(),
        rate: priors.rate(),
        fit: FitOut::new(&f),
        config: cfg,
    };
    let name = format!("fit_{}", kind.name());
    let written = vec![
        write_output(&cfg.out, &format!("{name}.json"), &to_json(&report))?,
        write_output(&cfg.out, &format!("{name}.txt"), &text)?,
    ];
    Ok((text, written))
}

pub fn cmd_compare(path: &Path, cfg: &RunConfig) -> CliResult<(String, Vec<PathBuf>)> {
    let (y, series) = load(path, cfg)?;
    let priors = build_priors(cfg)?;
    let fgn_spec = model_spec(&priors, NoiseKind::Fgn, cfg, y.len())?;
    let ar1_spec = model_spec(&priors, NoiseKind::Ar1, cfg, y.len())?;
    let (bf, f_fgn, f_ar1): (BayesFactorResult, Fit, Fit) = compare_fits(&y, &fgn_spec, &ar1_spec)?;

    let mut text = String::new();
    series_lines(&mut text, &series, cfg, priors.rate());
    let _ = writeln!(text);
    let _ = writeln!(text, "log marginal likelihood  fgn {:.6}  ar1 {:.6}", bf.log_ml_fgn, bf.log_ml_ar1);
    let _ = writeln!(
        text,
        "Bayes factor fgn over ar1: {:.6e} (log {:.6})  {} ({})",
        bf.bf,
        bf.log_bf(),
        bf.category.label(),
        bf.category.range()
    );
    for f in [&f_fgn, &f_ar1] {
        let _ = writeln!(text, "\nposterior, {} model", f.noise_kind.name());
        let _ = writeln!(text, "  {:<8} {:>12} {:>12} {:>12}", "", "mean", "2.5%", "97.5%");
        fit_lines(&mut text, f);
    }

    let report = CompareReport {
        series,
        trend: cfg.trend().name(),
        rate: priors.rate(),
        log_ml_fgn: bf.log_ml_fgn,
        log_ml_ar1: bf.log_ml_ar1,
        log_bayes_factor: bf.log_bf(),
        bayes_factor: bf.bf,
        category: bf.category.label(),
        category_range: bf.category.range(),
        fits: [FitOut::new(&f_fgn), FitOut::new(&f_ar1)],
        config: cfg,
    };
    let written = vec![
        write_output(&cfg.out, "compare.json", &to_json(&report))?,
        write_output(&cfg.out, "compare.txt", &text)?,
    ];
    Ok((text, written))
}

// ---------------------------------------------------------------- simulate

#[derive(Serialize)]
struct SimulationMeta<'a> {
    rate: f64,
    cells: usize,
    replicates: usize,
    failures: usize,
    files: [&'static str; 3],
    config: &'a RunConfig,
}

pub fn cmd_simulate(cfg: &RunConfig) -> CliResult<(String, Vec<PathBuf>)> {
    let plan = cfg.simulation_plan();
    let report = run_simulation(&plan)?;
    let table = report.to_table();
    let files = ["simulation.csv", "simulation.txt", "simulation_seeds.csv"];
    let meta = SimulationMeta {
        rate: report.rate,
        cells: report.cells.len(),
        replicates: report.replicates,
        failures: report.cells.iter().map(|c| c.failures).sum(),
        files,
        config: cfg,
    };
    let written = vec![
        write_output(&cfg.out, files[0], &report.to_csv())?,
        write_output(&cfg.out, files[1], &table)?,
        write_output(&cfg.out, files[2], &report.seeds_csv())?,
        write_output(&cfg.out, "simulation_meta.json", &to_json(&meta))?,
    ];
    Ok((table, written))
}
