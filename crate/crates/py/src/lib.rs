//! Python bindings. Arrays cross the boundary as lists of floats.

use fgnpc_core as core;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

fn to_py(err: core::Error) -> PyErr {
    match err {
        core::Error::Domain(_) | core::Error::DimensionMismatch { .. } | core::Error::MismatchedPriors(_) => {
            PyValueError::new_err(err.to_string())
        }
        _ => PyArithmeticError::new_err(err.to_string()),
    }
}

fn trend(name: &str) -> PyResult<core::Trend> {
    match name {
        "none" => Ok(core::Trend::None),
        "linear" => Ok(core::Trend::Linear),
        _ => Err(PyValueError::new_err(format!("trend must be 'none' or 'linear', got '{name}'"))),
    }
}

fn noise(name: &str) -> PyResult<core::NoiseKind> {
    match name {
        "fgn" => Ok(core::NoiseKind::Fgn),
        "ar1" => Ok(core::NoiseKind::Ar1),
        _ => Err(PyValueError::new_err(format!("model must be 'fgn' or 'ar1', got '{name}'"))),
    }
}

/// fGn autocorrelations at lags `0..n`.
#[pyfunction]
fn fgn_autocorrelation(hurst: f64, n: usize) -> PyResult<Vec<f64>> {
    Ok(core::fgn_autocorrelation(hurst, n).map_err(to_py)?.values().to_vec())
}

#[pyfunction]
#[pyo3(signature = (hurst, n_ref = core::DEFAULT_N_REF))]
fn fgn_distance(hurst: f64, n_ref: usize) -> PyResult<f64> {
    core::fgn_distance(hurst, n_ref).map_err(to_py)
}

#[pyfunction]
fn ar1_distance(phi: f64) -> PyResult<f64> {
    core::ar1_distance(phi).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (hurst, n, seed, precision = 1.0))]
fn fgn_sample(hurst: f64, n: usize, seed: u64, precision: f64) -> PyResult<Vec<f64>> {
    let params = core::FgnParams::new(hurst, precision).map_err(to_py)?;
    core::fgn_sample(params, n, seed).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (phi, n, seed, precision = 1.0))]
fn ar1_sample(phi: f64, n: usize, seed: u64, precision: f64) -> PyResult<Vec<f64>> {
    let params = core::Ar1Params::new(phi, precision).map_err(to_py)?;
    core::ar1_sample(params, n, seed).map_err(to_py)
}

/// `ln |R|` of the Toeplitz matrix with first row `r` (`r[0] = 1`).
#[pyfunction]
fn levinson_logdet(r: Vec<f64>) -> PyResult<f64> {
    let seq = core::CorrelationSequence::new(r).map_err(to_py)?;
    core::levinson_logdet(&seq).map_err(to_py)
}

/// Evidence label for a Bayes factor.
#[pyfunction]
fn evidence_category(bayes_factor: f64) -> &'static str {
    core::EvidenceCategory::from_bayes_factor(bayes_factor).label()
}

#[pyclass(name = "PcPrior", module = "fgnpc", frozen)]
struct PyPcPrior(core::PcPrior);

#[pymethods]
impl PyPcPrior {
    #[getter]
    fn rate(&self) -> f64 {
        self.0.rate()
    }

    #[getter]
    fn parameter(&self) -> &'static str {
        self.0.parameter_name()
    }

    fn density(&self, theta: f64) -> PyResult<f64> {
        self.0.density(theta).map_err(to_py)
    }

    fn cdf(&self, theta: f64) -> PyResult<f64> {
        self.0.cdf(theta).map_err(to_py)
    }

    /// `P(lo < θ < hi)` by numerical integration.
    fn tail_probability(&self, lo: f64, hi: f64) -> PyResult<f64> {
        self.0.tail_probability(lo, hi).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("PcPrior({}, rate={})", self.0.parameter_name(), self.0.rate())
    }
}

#[pyclass(name = "PrecisionPrior", module = "fgnpc", frozen)]
struct PyPrecisionPrior(core::PrecisionPrior);

#[pymethods]
impl PyPrecisionPrior {
    #[new]
    #[pyo3(signature = (u = 1.0, alpha = 0.01))]
    fn new(u: f64, alpha: f64) -> PyResult<Self> {
        Ok(Self(core::PrecisionPrior::new(u, alpha).map_err(to_py)?))
    }

    #[getter]
    fn rate(&self) -> f64 {
        self.0.rate()
    }

    #[getter]
    fn marginal_sd(&self) -> f64 {
        self.0.marginal_sd()
    }

    /// Log density of the log-precision `κ`.
    fn log_density(&self, kappa: f64) -> f64 {
        self.0.log_density(kappa)
    }

    fn density_sigma(&self, sigma: f64) -> f64 {
        self.0.density_sigma(sigma)
    }
}

/// Posterior mean and 95% interval of one quantity.
#[pyclass(name = "Estimate", module = "fgnpc", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyEstimate {
    name: String,
    mean: f64,
    lower: f64,
    upper: f64,
}

impl PyEstimate {
    fn new(name: impl Into<String>, e: &core::Estimate) -> Self {
        Self {
            name: name.into(),
            mean: e.mean,
            lower: e.lower,
            upper: e.upper,
        }
    }
}

#[pymethods]
impl PyEstimate {
    fn __repr__(&self) -> String {
        format!("Estimate({}: {} [{}, {}])", self.name, self.mean, self.lower, self.upper)
    }
}

#[pyclass(name = "Fit", module = "fgnpc", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyFit {
    model: &'static str,
    log_ml: f64,
    /// `H` or `phi`, then `sigma`, then one entry per regression coefficient.
    estimates: Vec<PyEstimate>,
    mode: (f64, f64),
}

impl From<&core::Fit> for PyFit {
    fn from(f: &core::Fit) -> Self {
        let s = &f.summaries;
        let mut estimates = vec![PyEstimate::new(s.parameter, &s.flex), PyEstimate::new("sigma", &s.sigma)];
        estimates.extend(s.beta.iter().enumerate().map(|(j, e)| PyEstimate::new(format!("beta{j}"), e)));
        Self {
            model: f.noise_kind.name(),
            log_ml: f.log_ml,
            estimates,
            mode: f.mode,
        }
    }
}

#[pyclass(name = "Comparison", module = "fgnpc", frozen, get_all)]
struct PyComparison {
    log_ml_fgn: f64,
    log_ml_ar1: f64,
    log_bf: f64,
    bf: f64,
    category: &'static str,
    fgn: PyFit,
    ar1: PyFit,
}

/// fGn and AR(1) priors sharing one rate, plus the precision prior.
#[pyclass(name = "Priors", module = "fgnpc", frozen)]
struct PyPriors(core::SharedPriors);

impl PyPriors {
    fn spec(&self, kind: core::NoiseKind, trend_name: &str, n: usize) -> PyResult<core::ModelSpec> {
        self.0
            .spec(kind, trend(trend_name)?, n, core::QuadratureConfig::default())
            .map_err(to_py)
    }
}

#[pymethods]
impl PyPriors {
    #[new]
    #[pyo3(signature = (u = 0.9, alpha = 0.10, prec_u = 1.0, prec_alpha = 0.01))]
    fn new(u: f64, alpha: f64, prec_u: f64, prec_alpha: f64) -> PyResult<Self> {
        let config = core::PriorConfig {
            flex: core::Calibration { u, alpha },
            precision: core::Calibration {
                u: prec_u,
                alpha: prec_alpha,
            },
            ..Default::default()
        };
        Ok(Self(core::SharedPriors::build(&config).map_err(to_py)?))
    }

    #[getter]
    fn rate(&self) -> f64 {
        self.0.rate()
    }

    #[getter]
    fn fgn(&self) -> PyPcPrior {
        PyPcPrior(self.0.fgn.clone())
    }

    #[getter]
    fn ar1(&self) -> PyPcPrior {
        PyPcPrior(self.0.ar1.clone())
    }

    #[getter]
    fn precision(&self) -> PyPrecisionPrior {
        PyPrecisionPrior(self.0.precision)
    }

    /// Exact log-likelihood at fixed `(θ, κ)`.
    #[pyo3(signature = (y, theta, kappa, model = "fgn", trend = "none"))]
    fn log_likelihood(&self, y: Vec<f64>, theta: f64, kappa: f64, model: &str, trend: &str) -> PyResult<f64> {
        let spec = self.spec(noise(model)?, trend, y.len())?;
        core::log_likelihood_given_hyper(&y, &spec, theta, kappa).map_err(to_py)
    }

    #[pyo3(signature = (y, model = "fgn", trend = "none"))]
    fn fit(&self, py: Python<'_>, y: Vec<f64>, model: &str, trend: &str) -> PyResult<PyFit> {
        let spec = self.spec(noise(model)?, trend, y.len())?;
        let f = py.detach(|| core::fit(&y, &spec)).map_err(to_py)?;
        Ok(PyFit::from(&f))
    }

    /// Bayes factor of fGn over AR(1).
    #[pyo3(signature = (y, trend = "none"))]
    fn compare(&self, py: Python<'_>, y: Vec<f64>, trend: &str) -> PyResult<PyComparison> {
        let a = self.spec(core::NoiseKind::Fgn, trend, y.len())?;
        let b = self.spec(core::NoiseKind::Ar1, trend, y.len())?;
        let (bf, fa, fb) = py.detach(|| core::compare_fits(&y, &a, &b)).map_err(to_py)?;
        Ok(PyComparison {
            log_ml_fgn: bf.log_ml_fgn,
            log_ml_ar1: bf.log_ml_ar1,
            log_bf: bf.log_bf(),
            bf: bf.bf,
            category: bf.category.label(),
            fgn: PyFit::from(&fa),
            ar1: PyFit::from(&fb),
        })
    }
}

/// Runs the Monte Carlo study and returns its CSV report.
#[pyfunction]
#[pyo3(signature = (hurst, lengths, replicates, seed = 20_240_101))]
fn run_simulation(py: Python<'_>, hurst: Vec<f64>, lengths: Vec<usize>, replicates: usize, seed: u64) -> PyResult<String> {
    let plan = core::SimulationPlan {
        hurst_values: hurst,
        lengths,
        replicates,
        base_seed: seed,
        ..Default::default()
    };
    let report = py.detach(|| core::run_simulation(&plan)).map_err(to_py)?;
    Ok(report.to_csv())
}

#[pymodule]
fn fgnpc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(fgn_autocorrelation, m)?)?;
    m.add_function(wrap_pyfunction!(fgn_distance, m)?)?;
    m.add_function(wrap_pyfunction!(ar1_distance, m)?)?;
    m.add_function(wrap_pyfunction!(fgn_sample, m)?)?;
    m.add_function(wrap_pyfunction!(ar1_sample, m)?)?;
    m.add_function(wrap_pyfunction!(levinson_logdet, m)?)?;
    m.add_function(wrap_pyfunction!(evidence_category, m)?)?;
    m.add_function(wrap_pyfunction!(run_simulation, m)?)?;
    m.add_class::<PyPcPrior>()?;
    m.add_class::<PyPrecisionPrior>()?;
    m.add_class::<PyEstimate>()?;
    m.add_class::<PyFit>()?;
    m.add_class::<PyComparison>()?;
    m.add_class::<PyPriors>()?;
    Ok(())
}
