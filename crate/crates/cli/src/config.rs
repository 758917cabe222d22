//! Run configuration: defaults, then an optional TOML file, then flags.

use std::path::{Path, PathBuf};

use fgnpc::{AxisRule, Calibration, PriorConfig, QuadratureConfig, SimulationPlan, TableOptions, Trend};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Keys accepted in a config file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub u: Option<f64>,
    pub alpha: Option<f64>,
    pub prec_u: Option<f64>,
    pub prec_alpha: Option<f64>,
    pub trend: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub grid: Option<usize>,
    pub width_sd: Option<f64>,
    pub rule: Option<String>,
    pub beta_precision: Option<f64>,
    pub n_ref: Option<usize>,
    pub table_grid: Option<usize>,
    pub hurst: Option<Vec<f64>>,
    pub lengths: Option<Vec<usize>>,
    pub replicates: Option<usize>,
}

/// Values given on the command line; they win over the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub u: Option<f64>,
    pub alpha: Option<f64>,
    pub prec_u: Option<f64>,
    pub prec_alpha: Option<f64>,
    pub trend: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub grid: Option<usize>,
    pub hurst: Option<Vec<f64>>,
    pub lengths: Option<Vec<usize>>,
    pub replicates: Option<usize>,
}

/// Fully resolved settings, echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub u: f64,
    pub alpha: f64,
    pub prec_u: f64,
    pub prec_alpha: f64,
    pub trend: String,
    pub seed: u64,
    pub out: PathBuf,
    pub grid: usize,
    pub width_sd: f64,
    pub rule: String,
    pub beta_precision: f64,
    pub n_ref: usize,
    pub table_grid: usize,
    pub hurst: Vec<f64>,
    pub lengths: Vec<usize>,
    pub replicates: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let plan = SimulationPlan::default();
        Self {
            u: 0.9,
            alpha: 0.10,
            prec_u: 1.0,
            prec_alpha: 0.01,
            trend: "none".into(),
            seed: plan.base_seed,
            out: PathBuf::from("out"),
            grid: 61,
            width_sd: 6.0,
            rule: "simpson".into(),
            beta_precision: fgnpc::DEFAULT_BETA_PRECISION,
            n_ref: fgnpc::DEFAULT_N_REF,
            table_grid: TableOptions::default().grid_size,
            hurst: plan.hurst_values,
            lengths: plan.lengths,
            replicates: 200,
        }
    }
}

/// Where a value came from, for error messages.
enum Origin<'a> {
    Default,
    File { path: &'a Path, line: Option<usize> },
    Flag(&'static str),
}

impl Origin<'_> {
    fn describe(&self, key: &str) -> String {
        match self {
            Origin::Default => format!("default `{key}`"),
            Origin::File { path, line: Some(l) } => format!("{}:{l}: field `{key}`", path.display()),
            Origin::File { path, line: None } => format!("{}: field `{key}`", path.display()),
            Origin::Flag(flag) => format!("flag {flag}"),
        }
    }
}

/// 1-based line on which `key` is assigned, if found.
fn key_line(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let l = l.trim_start();
        l.strip_prefix(key)
            .is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}

impl RunConfig {
    /// Merges defaults, the file at `path` (if any) and `flags`, then validates.
    pub fn resolve(path: Option<&Path>, flags: &Overrides) -> CliResult<Self> {
        let (file, text) = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
                let file: FileConfig = toml::from_str(&text).map_err(|e| {
                    let line = e.span().map(|s| text[..s.start].matches('\n').count() + 1);
                    let loc = match line {
                        Some(l) => format!("{}:{l}", p.display()),
                        None => p.display().to_string(),
                    };
                    CliError::validation_hint(
                        format!("{loc}: {}", e.message()),
                        "see the config schema in the README",
                    )
                })?;
                (file, text)
            }
            None => (FileConfig::default(), String::new()),
        };

        let mut cfg = RunConfig::default();
        let file_origin = |key: &str| match path {
            Some(p) => Origin::File {
                path: p,
                line: key_line(&text, key),
            },
            None => Origin::Default,
        };

        macro_rules! merge {
            ($field:ident, $flag:literal) => {{
                if let Some(v) = flags.$field.clone() {
                    cfg.$field = v;
                    Origin::Flag($flag)
                } else if let Some(v) = file.$field.clone() {
                    cfg.$field = v;
                    file_origin(stringify!($field))
                } else {
                    Origin::Default
                }
            }};
            ($field:ident) => {{
                if let Some(v) = file.$field.clone() {
                    cfg.$field = v;
                    file_origin(stringify!($field))
                } else {
                    Origin::Default
                }
            }};
        }

        let o_u = merge!(u, "--u");
        let o_alpha = merge!(alpha, "--alpha");
        let o_prec_u = merge!(prec_u, "--prec-u");
        let o_prec_alpha = merge!(prec_alpha, "--prec-alpha");
        let o_trend = merge!(trend, "--trend");
        merge!(seed, "--seed");
        merge!(out, "--out");
        let o_grid = merge!(grid, "--grid");
        let o_width = merge!(width_sd);
        let o_rule = merge!(rule);
        let o_beta = merge!(beta_precision);
        let o_nref = merge!(n_ref);
        let o_table = merge!(table_grid);
        let o_hurst = merge!(hurst, "--hurst");
        let o_lengths = merge!(lengths, "--lengths");
        let o_reps = merge!(replicates, "--replicates");

        let fail = |origin: &Origin, key: &str, what: String| -> CliError {
            CliError::validation(format!("{}: {what}", origin.describe(key)))
        };
        let prob = |origin: &Origin, key: &str, v: f64| -> CliResult<()> {
            if v > 0.0 && v < 0.5 {
                Ok(())
            } else {
                Err(fail(origin, key, format!("probability must lie in (0, 0.5), got {v}")))
            }
        };

        if !(cfg.u > 0.0 && cfg.u < 1.0) || cfg.u == 0.5 {
            return Err(fail(&o_u, "u", format!("must lie in (0, 1) and differ from 0.5, got {}", cfg.u)));
        }
        prob(&o_alpha, "alpha", cfg.alpha)?;
        if !(cfg.prec_u > 0.0 && cfg.prec_u.is_finite()) {
            return Err(fail(&o_prec_u, "prec_u", format!("must be positive, got {}", cfg.prec_u)));
        }
        prob(&o_prec_alpha, "prec_alpha", cfg.prec_alpha)?;
        if !matches!(cfg.trend.as_str(), "none" | "linear") {
            return Err(fail(&o_trend, "trend", format!("expected `none` or `linear`, got `{}`", cfg.trend)));
        }
        if cfg.grid < 5 {
            return Err(fail(&o_grid, "grid", format!("need at least 5 nodes per axis, got {}", cfg.grid)));
        }
        if !(cfg.width_sd > 0.0 && cfg.width_sd.is_finite()) {
            return Err(fail(&o_width, "width_sd", format!("must be positive, got {}", cfg.width_sd)));
        }
        if !matches!(cfg.rule.as_str(), "simpson" | "trapezoid") {
            return Err(fail(&o_rule, "rule", format!("expected `simpson` or `trapezoid`, got `{}`", cfg.rule)));
        }
        if !(cfg.beta_precision > 0.0 && cfg.beta_precision.is_finite()) {
            return Err(fail(&o_beta, "beta_precision", format!("must be positive, got {}", cfg.beta_precision)));
        }
        if cfg.n_ref < 2 {
            return Err(fail(&o_nref, "n_ref", format!("must be at least 2, got {}", cfg.n_ref)));
        }
        if cfg.table_grid < 101 {
            return Err(fail(&o_table, "table_grid", format!("must be at least 101, got {}", cfg.table_grid)));
        }
        if cfg.hurst.is_empty() {
            return Err(fail(&o_hurst, "hurst", "needs at least one value".into()));
        }
        if let Some(h) = cfg.hurst.iter().find(|h| !(**h > 0.0 && **h < 1.0)) {
            return Err(fail(&o_hurst, "hurst", format!("values must lie in (0, 1), got {h}")));
        }
        if cfg.lengths.is_empty() {
            return Err(fail(&o_lengths, "lengths", "needs at least one value".into()));
        }
        if let Some(n) = cfg.lengths.iter().find(|n| **n < 10) {
            return Err(fail(&o_lengths, "lengths", format!("series lengths must be at least 10, got {n}")));
        }
        if cfg.replicates == 0 {
            return Err(fail(&o_reps, "replicates", "must be at least 1".into()));
        }
        Ok(cfg)
    }

    pub fn trend(&self) -> Trend {
        if self.trend == "linear" {
            Trend::Linear
        } else {
            Trend::None
        }
    }

    pub fn table_options(&self) -> TableOptions {
        TableOptions {
            grid_size: self.table_grid,
            ..TableOptions::default()
        }
    }

    pub fn prior_config(&self) -> PriorConfig {
        PriorConfig {
            flex: Calibration { u: self.u, alpha: self.alpha },
            precision: Calibration {
                u: self.prec_u,
                alpha: self.prec_alpha,
            },
            n_ref: self.n_ref,
            table: self.table_options(),
        }
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        QuadratureConfig {
            nodes: self.grid,
            width_sd: self.width_sd,
            rule: if self.rule == "trapezoid" {
                AxisRule::Trapezoid
            } else {
                AxisRule::Simpson
            },
            ..QuadratureConfig::default()
        }
    }

    pub fn simulation_plan(&self) -> SimulationPlan {
        let prior = self.prior_config();
        SimulationPlan {
            hurst_values: self.hurst.clone(),
            lengths: self.lengths.clone(),
            replicates: self.replicates,
            base_seed: self.seed,
            calibration: prior.flex,
            precision_calibration: prior.precision,
            quadrature: self.quadrature(),
            n_ref: self.n_ref,
            table: prior.table,
        }
    }
}
