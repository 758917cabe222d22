//! Gaussian regression with fGn or AR(1) noise: exact likelihood given the
//! hyperparameters, and marginal likelihood by quadrature over
//! `(internal θ, κ = ln τ)`.

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use statrs::function::erf::erfc;

use crate::ar1::ar1_autocorrelation;
use crate::error::{Error, Result};
use crate::fgn::fgn_autocorrelation;
use crate::prior::{ParameterKind, PcPrior, PrecisionPrior, Side};
use crate::quadrature::{axis_nodes, split_axis_nodes, AxisRule};
use crate::toeplitz::{dot, levinson_solve_many, CorrelationSequence};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    Fgn,
    Ar1,
}

impl NoiseKind {
    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::Fgn => "fgn",
            NoiseKind::Ar1 => "ar1",
        }
    }

    pub fn parameter_kind(self) -> ParameterKind {
        match self {
            NoiseKind::Fgn => ParameterKind::Hurst,
            NoiseKind::Ar1 => ParameterKind::Ar1Coefficient,
        }
    }

    pub fn correlation(self, theta: f64, n: usize) -> Result<CorrelationSequence> {
        match self {
            NoiseKind::Fgn => fgn_autocorrelation(theta, n),
            NoiseKind::Ar1 => ar1_autocorrelation(theta, n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Trend {
    None,
    Linear,
}

impl Trend {
    pub fn name(self) -> &'static str {
        match self {
            Trend::None => "none",
            Trend::Linear => "linear",
        }
    }
}

/// Intercept and time columns `(1, t)` for `t = 1..n`.
pub fn linear_design(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { (i + 1) as f64 })
}

/// Mode search and grid settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Nodes per axis.
    pub nodes: usize,
    /// Half-width of the grid in Laplace standard deviations.
    pub width_sd: f64,
    pub rule: AxisRule,
    /// Nelder-Mead stops when the simplex cost spread falls below this.
    pub mode_tolerance: f64,
    pub max_iterations: u64,
    /// Step of the finite-difference Hessian.
    pub hessian_step: f64,
    /// Cap on the Laplace standard deviation of either axis.
    pub max_sd: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            nodes: 61,
            width_sd: 6.0,
            rule: AxisRule::Simpson,
            mode_tolerance: 1e-10,
            max_iterations: 1000,
            hessian_step: 1e-3,
            max_sd: 3.0,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes < 5 {
            return Err(Error::domain(format!("quadrature needs at least 5 nodes per axis, got {}", self.nodes)));
        }
        let positive = [
            ("width_sd", self.width_sd),
            ("mode_tolerance", self.mode_tolerance),
            ("hessian_step", self.hessian_step),
            ("max_sd", self.max_sd),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_iterations == 0 {
            return Err(Error::domain("max_iterations must be positive"));
        }
        Ok(())
    }
}

/// Noise model, hyperpriors and regression design.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub noise_kind: NoiseKind,
    pub flex_prior: PcPrior,
    pub prec_prior: PrecisionPrior,
    pub trend: Trend,
    pub design: Option<DMatrix<f64>>,
    /// Precision of the independent Gaussian prior on each coefficient.
    pub beta_precision: f64,
    pub quadrature: QuadratureConfig,
}

pub const DEFAULT_BETA_PRECISION: f64 = 1e-6;

impl ModelSpec {
    /// Zero-mean model without regression terms.
    pub fn new(noise_kind: NoiseKind, flex_prior: PcPrior, prec_prior: PrecisionPrior) -> Result<Self> {
        if flex_prior.kind() != noise_kind.parameter_kind() {
            return Err(Error::domain(format!(
                "{} prior supplied for a {} model",
                flex_prior.parameter_name(),
                noise_kind.name()
            )));
        }
        Ok(Self {
            noise_kind,
            flex_prior,
            prec_prior,
            trend: Trend::None,
            design: None,
            beta_precision: DEFAULT_BETA_PRECISION,
            quadrature: QuadratureConfig::default(),
        })
    }

    /// Adds an intercept and a linear time trend for series of length `n`.
    pub fn with_linear_trend(self, n: usize) -> Result<Self> {
        self.with_design(linear_design(n))
    }

    pub fn with_design(mut self, design: DMatrix<f64>) -> Result<Self> {
        if design.ncols() == 0 || design.nrows() <= design.ncols() {
            return Err(Error::domain(format!(
                "design must have more rows than columns, got {}x{}",
                design.nrows(),
                design.ncols()
            )));
        }
        let gram = design.transpose() * &design;
        let chol = gram.clone().cholesky().ok_or_else(|| Error::domain("design columns are linearly dependent"))?;
        // Each column's component orthogonal to the earlier ones, relative to its norm.
        let l = chol.l();
        let independent = (0..gram.ncols()).all(|j| l[(j, j)] > 1e-6 * gram[(j, j)].sqrt());
        if !independent {
            return Err(Error::domain("design columns are linearly dependent"));
        }
        self.trend = Trend::Linear;
        self.design = Some(design);
        Ok(self)
    }

    pub fn with_beta_precision(mut self, beta_precision: f64) -> Result<Self> {
        if !(beta_precision > 0.0 && beta_precision.is_finite()) {
            return Err(Error::domain(format!("beta_precision must be positive, got {beta_precision}")));
        }
        self.beta_precision = beta_precision;
        Ok(self)
    }

    pub fn with_quadrature(mut self, quadrature: QuadratureConfig) -> Result<Self> {
        quadrature.validate()?;
        self.quadrature = quadrature;
        Ok(self)
    }

    fn check_data(&self, y: &[f64]) -> Result<()> {
        if y.len() < 2 {
            return Err(Error::domain(format!("series needs at least 2 observations, got {}", y.len())));
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!("observation {} is not finite", i + 1)));
        }
        if let Some(x) = &self.design {
            if x.nrows() != y.len() {
                return Err(Error::DimensionMismatch {
                    expected: y.len(),
                    found: x.nrows(),
                });
            }
        }
        Ok(())
    }
}

/// Toeplitz quantities at one θ, reused across κ.
struct Profile {
    n: usize,
    log_det: f64,
    /// `yᵀ Σ⁻¹ y`.
    q: f64,
    /// `Xᵀ Σ⁻¹ y`.
    g: DVector<f64>,
    /// `Xᵀ Σ⁻¹ X`.
    gram: DMatrix<f64>,
    beta_precision: f64,
}

impl Profile {
    fn new(y: &[f64], spec: &ModelSpec, theta: f64) -> Result<Self> {
        let n = y.len();
        let corr = spec.noise_kind.correlation(theta, n)?;
        let columns: Vec<Vec<f64>> = match &spec.design {
            Some(x) => x.column_iter().map(|c| c.iter().copied().collect()).collect(),
            None => Vec::new(),
        };
        let mut rhs: Vec<&[f64]> = vec![y];
        rhs.extend(columns.iter().map(Vec::as_slice));
        let sol = levinson_solve_many(&corr, &rhs)?;
        let p = columns.len();
        let q = dot(y, &sol.solutions[0]);
        let g = DVector::from_fn(p, |j, _| dot(&columns[j], &sol.solutions[0]));
        let gram = DMatrix::from_fn(p, p, |i, j| dot(&columns[i], &sol.solutions[j + 1]));
        // Symmetrise the round-off.
        let gram = 0.5 * (&gram + gram.transpose());
        Ok(Self {
            n,
            log_det: sol.log_det,
            q,
            g,
            gram,
            beta_precision: spec.beta_precision,
        })
    }

    fn p(&self) -> usize {
        self.g.len()
    }

    /// `M = bI + τG`, Cholesky-factored.
    fn coefficient_precision(&self, kappa: f64) -> Option<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
        let p = self.p();
        let m = DMatrix::identity(p, p) * self.beta_precision + &self.gram * kappa.exp();
        m.cholesky()
    }

    fn log_likelihood(&self, kappa: f64) -> f64 {
        let n = self.n as f64;
        let tau = kappa.exp();
        let base = -0.5 * n * LN_2PI - 0.5 * (self.log_det - n * kappa);
        if self.p() == 0 {
            return base - 0.5 * tau * self.q;
        }
        let Some(chol) = self.coefficient_precision(kappa) else {
            return f64::NAN;
        };
        let log_det_m = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
        let r = chol.solve(&self.g);
        let quad = tau * self.q - tau * tau * self.g.dot(&r);
        base - 0.5 * (log_det_m - self.p() as f64 * self.beta_precision.ln()) - 0.5 * quad
    }

    /// Conditional posterior of the coefficients: mean and marginal variances.
    fn beta_conditional(&self, kappa: f64) -> Option<(DVector<f64>, DVector<f64>)> {
        let chol = self.coefficient_precision(kappa)?;
        let mean = chol.solve(&(&self.g * kappa.exp()));
        let var = chol.inverse().diagonal();
        Some((mean, var))
    }
}

/// Exact `ln N(y | 0, e^{−κ} Σ(θ) + X Xᵀ / b)`.
pub fn log_likelihood_given_hyper(y: &[f64], spec: &ModelSpec, theta: f64, kappa: f64) -> Result<f64> {
    spec.check_data(y)?;
    if !kappa.is_finite() {
        return Err(Error::domain(format!("log-precision must be finite, got {kappa}")));
    }
    let ll = Profile::new(y, spec, theta)?.log_likelihood(kappa);
    if ll.is_finite() {
        Ok(ll)
    } else {
        Err(Error::domain(format!("log-likelihood is not finite at theta = {theta}, kappa = {kappa}")))
    }
}

/// Posterior mean and equal-tailed 95% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSummaries {
    /// Name of the flexibility parameter (`H` or `phi`).
    pub parameter: &'static str,
    pub flex: Estimate,
    /// Noise standard deviation `σ = e^{−κ/2}`.
    pub sigma: Estimate,
    /// One entry per design column; empty without a trend.
    pub beta: Vec<Estimate>,
}

/// Outcome of the quadrature: log marginal likelihood, posterior
/// summaries and a description of the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    pub noise_kind: NoiseKind,
    pub log_ml: f64,
    pub summaries: PosteriorSummaries,
    /// Joint posterior mode as `(θ, κ)`.
    pub mode: (f64, f64),
    /// Laplace standard deviations in `(internal θ, κ)`.
    pub laplace_sd: (f64, f64),
    pub internal_range: (f64, f64),
    pub kappa_range: (f64, f64),
}

/// `log ∫∫ L(y | θ, κ) π(θ) π(κ) dθ dκ`.
pub fn log_marginal_likelihood(y: &[f64], spec: &ModelSpec) -> Result<f64> {
    Ok(fit(y, spec)?.log_ml)
}

pub fn posterior_summaries(y: &[f64], spec: &ModelSpec) -> Result<PosteriorSummaries> {
    Ok(fit(y, spec)?.summaries)
}

struct Posterior<'a> {
    y: &'a [f64],
    spec: &'a ModelSpec,
}

impl Posterior<'_> {
    fn internal_range(&self) -> (f64, f64) {
        self.spec.flex_prior.table().internal_range()
    }

    fn theta(&self, x: f64) -> f64 {
        self.spec.flex_prior.table().to_parameter(x)
    }

    /// Log-likelihood plus the κ prior; smooth in both coordinates.
    fn smooth_part(&self, x: f64, kappa: f64) -> Result<f64> {
        let profile = Profile::new(self.y, self.spec, self.theta(x))?;
        Ok(profile.log_likelihood(kappa) + self.spec.prec_prior.log_density(kappa))
    }

    fn log_posterior(&self, x: f64, kappa: f64) -> f64 {
        let (lo, hi) = self.internal_range();
        if !(x >= lo && x <= hi && kappa.is_finite()) {
            return f64::NEG_INFINITY;
        }
        match self.smooth_part(x, kappa) {
            Ok(v) if v.is_finite() => v + self.spec.flex_prior.log_density_internal(x),
            _ => f64::NEG_INFINITY,
        }
    }
}

impl CostFunction for Posterior<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        let v = -self.log_posterior(p[0], p[1]);
        Ok(if v.is_nan() { f64::INFINITY } else { v })
    }
}

fn nelder_mead(post: &Posterior, start: [f64; 2], step: f64, cfg: &QuadratureConfig) -> Result<(Vec<f64>, f64)> {
    let simplex = vec![
        start.to_vec(),
        vec![start[0] + step, start[1]],
        vec![start[0], start[1] + step],
    ];
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(cfg.mode_tolerance)
        .map_err(|e| Error::domain(format!("mode search setup failed: {e}")))?;
    let res = Executor::new(
        Posterior {
            y: post.y,
            spec: post.spec,
        },
        solver,
    )
    .configure(|s| s.max_iters(cfg.max_iterations))
    .run()
    .map_err(|e| Error::domain(format!("mode search failed: {e}")))?;
    let state = res.state();
    let best = state
        .get_best_param()
        .cloned()
        .ok_or_else(|| Error::domain("mode search returned no point"))?;
    Ok((best, state.get_best_cost()))
}

/// Starting log-precision: inverse residual variance.
fn initial_kappa(y: &[f64], design: Option<&DMatrix<f64>>) -> f64 {
    let n = y.len() as f64;
    let rss = match design {
        None => y.iter().map(|v| v * v).sum::<f64>(),
        Some(x) => {
            let yv = DVector::from_column_slice(y);
            let xtx = x.transpose() * x;
            match xtx.cholesky() {
                Some(ch) => {
                    let b = ch.solve(&(x.transpose() * &yv));
                    (&yv - x * b).norm_squared()
                }
                None => yv.norm_squared(),
            }
        }
    };
    let var = rss / n;
    if var > 0.0 && var.is_finite() {
        -var.ln()
    } else {
        0.0
    }
}

/// Joint mode of the posterior in `(internal θ, κ)`.
fn find_mode(post: &Posterior) -> Result<[f64; 2]> {
    let cfg = &post.spec.quadrature;
    let x0 = post.spec.flex_prior.table().base_internal();
    let k0 = initial_kappa(post.y, post.spec.design.as_ref());
    let (first, c1) = nelder_mead(post, [x0, k0], 0.5, cfg)?;
    let (second, c2) = nelder_mead(post, [first[0], first[1]], 0.05, cfg)?;
    let best = if c2 <= c1 { second } else { first };
    if !(c1.min(c2).is_finite()) {
        return Err(Error::QuadratureNonFinite {
            internal: best[0],
            kappa: best[1],
        });
    }
    Ok([best[0], best[1]])
}

/// Laplace standard deviations from the Hessian of the smooth part of the
/// log posterior (the flexibility prior has a cusp at the base point).
fn laplace_sd(post: &Posterior, mode: [f64; 2]) -> Result<(f64, f64)> {
    let cfg = &post.spec.quadrature;
    let h = cfg.hessian_step;
    let (lo, hi) = post.internal_range();
    // Keep the stencil inside the tabulated range.
    let x = mode[0].clamp(lo + 2.0 * h, hi - 2.0 * h);
    let k = mode[1];
    let f = |dx: f64, dk: f64| post.smooth_part(x + dx, k + dk);
    let f0 = f(0.0, 0.0)?;
    let fxx = (f(h, 0.0)? - 2.0 * f0 + f(-h, 0.0)?) / (h * h);
    let fkk = (f(0.0, h)? - 2.0 * f0 + f(0.0, -h)?) / (h * h);
    let fxk = (f(h, h)? - f(h, -h)? - f(-h, h)? + f(-h, -h)?) / (4.0 * h * h);
    let det = fxx * fkk - fxk * fxk;
    let cap = |v: f64| if v.is_finite() && v > 0.0 { v.sqrt().clamp(1e-6, cfg.max_sd) } else { cfg.max_sd };
    if fxx < 0.0 && fkk < 0.0 && det > 0.0 {
        // Inverse of the negative Hessian.
        Ok((cap(-fkk / det), cap(-fxx / det)))
    } else {
        Ok((cap(-1.0 / fxx), cap(-1.0 / fkk)))
    }
}

/// Runs the mode search and the grid quadrature.
pub fn fit(y: &[f64], spec: &ModelSpec) -> Result<Fit> {
    spec.check_data(y)?;
    spec.quadrature.validate()?;
    let post = Posterior { y, spec };
    let cfg = &spec.quadrature;
    let table = spec.flex_prior.table();

    let mode = find_mode(&post)?;
    let (sx, sk) = laplace_sd(&post, mode)?;
    let (lo, hi) = table.internal_range();
    let xa = (mode[0] - cfg.width_sd * sx).max(lo);
    let xb = (mode[0] + cfg.width_sd * sx).min(hi);
    let (ka, kb) = (mode[1] - cfg.width_sd * sk, mode[1] + cfg.width_sd * sk);
    let x_axis = split_axis_nodes(xa, xb, cfg.nodes, Some(table.base_internal()), cfg.rule);
    let (xs, wx) = (x_axis.nodes.clone(), x_axis.weights.clone());
    let (ks, wk) = axis_nodes(ka, kb, cfg.nodes, None, cfg.rule);
    let log_prior_k: Vec<f64> = ks.iter().map(|&k| spec.prec_prior.log_density(k)).collect();

    struct Column {
        log_post: Vec<f64>,
        beta: Vec<(DVector<f64>, DVector<f64>)>,
    }
    let columns: Vec<Column> = xs
        .par_iter()
        .enumerate()
        .map(|(i, &x)| -> Result<Column> {
            let profile = Profile::new(y, spec, table.to_parameter(x))?;
            // The prior may jump at the base point: weight each one-sided
            // limit by its own panel.
            let lp_x = match x_axis.split {
                Some((k, wl, wr)) if k == i => {
                    let prior = &spec.flex_prior;
                    let lower = prior.one_sided_internal(Side::Lower, x);
                    let upper = prior.one_sided_internal(Side::Upper, x);
                    ((wl * lower + wr * upper) / (wl + wr)).ln()
                }
                _ => spec.flex_prior.log_density_internal(x),
            };
            let mut log_post = Vec::with_capacity(ks.len());
            let mut beta = Vec::new();
            for (j, &k) in ks.iter().enumerate() {
                let v = profile.log_likelihood(k) + lp_x + log_prior_k[j];
                if !v.is_finite() {
                    return Err(Error::QuadratureNonFinite { internal: x, kappa: k });
                }
                log_post.push(v);
                if profile.p() > 0 {
                    beta.push(
                        profile
                            .beta_conditional(k)
                            .ok_or(Error::QuadratureNonFinite { internal: x, kappa: k })?,
                    );
                }
            }
            Ok(Column { log_post, beta })
        })
        .collect::<Result<_>>()?;

    // Weighted log-sum-exp in a fixed order.
    let mut peak = f64::NEG_INFINITY;
    for c in &columns {
        for &v in &c.log_post {
            peak = peak.max(v);
        }
    }
    let mut weights = vec![vec![0.0; ks.len()]; xs.len()];
    let mut total = 0.0;
    for (i, c) in columns.iter().enumerate() {
        for (j, &v) in c.log_post.iter().enumerate() {
            let w = wx[i] * wk[j] * (v - peak).exp();
            weights[i][j] = w;
            total += w;
        }
    }
    let log_ml = peak + total.ln();
    if !log_ml.is_finite() {
        return Err(Error::QuadratureNonFinite {
            internal: mode[0],
            kappa: mode[1],
        });
    }
    for row in &mut weights {
        for w in row.iter_mut() {
            *w /= total;
        }
    }

    // Marginal densities on each axis (per unit of the axis coordinate).
    let dens_x: Vec<f64> = (0..xs.len())
        .map(|i| weights[i].iter().sum::<f64>() / wx[i])
        .collect();
    let dens_k: Vec<f64> = (0..ks.len())
        .map(|j| weights.iter().map(|r| r[j]).sum::<f64>() / wk[j])
        .collect();
    let mass_x: Vec<f64> = (0..xs.len()).map(|i| weights[i].iter().sum()).collect();
    let mass_k: Vec<f64> = (0..ks.len()).map(|j| weights.iter().map(|r| r[j]).sum()).collect();

    let flex = {
        let mean = xs.iter().zip(&mass_x).map(|(&x, m)| table.to_parameter(x) * m).sum();
        let lower = table.to_parameter(quantile(&xs, &dens_x, 0.025));
        let upper = table.to_parameter(quantile(&xs, &dens_x, 0.975));
        Estimate { mean, lower, upper }
    };
    let sigma = {
        let mean = ks.iter().zip(&mass_k).map(|(&k, m)| (-0.5 * k).exp() * m).sum();
        // σ decreases in κ.
        let lower = (-0.5 * quantile(&ks, &dens_k, 0.975)).exp();
        let upper = (-0.5 * quantile(&ks, &dens_k, 0.025)).exp();
        Estimate { mean, lower, upper }
    };
    let beta = match &spec.design {
        None => Vec::new(),
        Some(x) => {
            let mut components = Vec::new();
            for (i, c) in columns.iter().enumerate() {
                for (j, b) in c.beta.iter().enumerate() {
                    if weights[i][j] > 1e-14 {
                        components.push((weights[i][j], b));
                    }
                }
            }
            let kept: f64 = components.iter().map(|c| c.0).sum();
            (0..x.ncols())
                .map(|col| {
                    let mix: Vec<(f64, f64, f64)> = components
                        .iter()
                        .map(|(w, (m, v))| (w / kept, m[col], v[col].sqrt()))
                        .collect();
                    mixture_estimate(&mix)
                })
                .collect()
        }
    };

    Ok(Fit {
        noise_kind: spec.noise_kind,
        log_ml,
        summaries: PosteriorSummaries {
            parameter: spec.flex_prior.parameter_name(),
            flex,
            sigma,
            beta,
        },
        mode: (table.to_parameter(mode[0]), mode[1]),
        laplace_sd: (sx, sk),
        internal_range: (xa, xb),
        kappa_range: (ka, kb),
    })
}

/// Quantile of a density given at increasing nodes, linear between nodes.
fn quantile(nodes: &[f64], density: &[f64], p: f64) -> f64 {
    let areas: Vec<f64> = nodes
        .windows(2)
        .zip(density.windows(2))
        .map(|(x, f)| 0.5 * (x[1] - x[0]) * (f[0] + f[1]))
        .collect();
    let total: f64 = areas.iter().sum();
    let target = p * total;
    let mut acc = 0.0;
    for (k, &a) in areas.iter().enumerate() {
        if acc + a >= target && a > 0.0 {
            // Solve f0 t + (f1 − f0) t² / (2h) = remaining for t in [0, h].
            let (h, f0, f1) = (nodes[k + 1] - nodes[k], density[k], density[k + 1]);
            let rem = target - acc;
            let slope = (f1 - f0) / h;
            let t = if slope.abs() < 1e-300 {
                rem / f0
            } else {
                let disc = (f0 * f0 + 2.0 * slope * rem).max(0.0);
                2.0 * rem / (f0 + disc.sqrt())
            };
            return nodes[k] + t.clamp(0.0, h);
        }
        acc += a;
    }
    *nodes.last().unwrap()
}

/// Mean and 95% interval of a Gaussian mixture `(weight, mean, sd)`.
fn mixture_estimate(mix: &[(f64, f64, f64)]) -> Estimate {
    let mean = mix.iter().map(|(w, m, _)| w * m).sum();
    let cdf = |b: f64| -> f64 {
        mix.iter()
            .map(|(w, m, s)| w * 0.5 * erfc(-(b - m) / (s * std::f64::consts::SQRT_2)))
            .sum()
    };
    let lo = mix.iter().map(|(_, m, s)| m - 10.0 * s).fold(f64::INFINITY, f64::min);
    let hi = mix.iter().map(|(_, m, s)| m + 10.0 * s).fold(f64::NEG_INFINITY, f64::max);
    let solve = |p: f64| {
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if cdf(mid) < p {
                a = mid;
            } else {
                b = mid;
            }
            if b - a <= 1e-15 * (1.0 + mid.abs()) {
                break;
            }
        }
        0.5 * (a + b)
    };
    Estimate {
        mean,
        lower: solve(0.025),
        upper: solve(0.975),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_of_linear_density() {
        // Density 2x on [0, 1]: F(x) = x².
        let nodes: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let dens: Vec<f64> = nodes.iter().map(|x| 2.0 * x).collect();
        for p in [0.01, 0.25, 0.5, 0.9] {
            assert!((quantile(&nodes, &dens, p) - f64::sqrt(p)).abs() < 1e-12);
        }
    }

    #[test]
    fn mixture_of_one_normal() {
        let e = mixture_estimate(&[(1.0, 2.0, 0.5)]);
        assert!((e.mean - 2.0).abs() < 1e-15);
        assert!((e.lower - (2.0 - 1.959_963_984_540_054 * 0.5)).abs() < 1e-9);
        assert!((e.upper - (2.0 + 1.959_963_984_540_054 * 0.5)).abs() < 1e-9);
    }

    #[test]
    fn linear_design_columns() {
        let x = linear_design(4);
        assert_eq!(x.column(0).as_slice(), &[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(x.column(1).as_slice(), &[1.0, 2.0, 3.0, 4.0]);
    }
}
