//! Fractional Gaussian noise.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{num_complex::Complex64, FftPlanner};

use crate::error::{Error, Result};
use crate::prior::{DistanceMeasure, DistanceTable, Interval, TableOptions, Transform};
use crate::toeplitz::{levinson_logdet, CorrelationSequence};

/// Reference length used when tabulating `d(H)` for prior construction.
pub const DEFAULT_N_REF: usize = 1000;

/// Eigenvalues of the circulant embedding below this are treated as failures.
const EMBEDDING_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FgnParams {
    hurst: f64,
    precision: f64,
}

impl FgnParams {
    pub fn new(hurst: f64, precision: f64) -> Result<Self> {
        check_hurst(hurst)?;
        if !(precision > 0.0 && precision.is_finite()) {
            return Err(Error::domain(format!("precision must be positive, got {precision}")));
        }
        Ok(Self { hurst, precision })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn precision(&self) -> f64 {
        self.precision
    }
}

fn check_hurst(hurst: f64) -> Result<()> {
    if hurst > 0.0 && hurst < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("Hurst exponent must lie in (0, 1), got {hurst}")))
    }
}

/// `γ(k) = ½(|k+1|^{2H} − 2|k|^{2H} + |k−1|^{2H})` for `k = 0..n−1`.
pub fn fgn_autocorrelation(hurst: f64, n: usize) -> Result<CorrelationSequence> {
    check_hurst(hurst)?;
    if n == 0 {
        return Err(Error::domain("sequence length must be at least 1"));
    }
    let mut values = vec![0.0; n];
    values[0] = 1.0;
    if hurst == 0.5 {
        return Ok(CorrelationSequence::from_trusted(values));
    }
    let a = 2.0 * hurst;
    if n > 1 {
        values[1] = 0.5 * (2f64.powf(a) - 2.0);
    }
    // k^{2H}·((1+1/k)^{2H} − 2 + (1−1/k)^{2H})/2 written with expm1/ln1p so the
    // second difference keeps relative accuracy at large lags.
    for (k, v) in values.iter_mut().enumerate().skip(2) {
        let kf = k as f64;
        let x = 1.0 / kf;
        let up = (a * x.ln_1p()).exp_m1();
        let down = (a * (-x).ln_1p()).exp_m1();
        *v = 0.5 * kf.powf(a) * (up + down);
    }
    Ok(CorrelationSequence::from_trusted(values))
}

/// Distance to white noise, `d(H) = sqrt(−ln|Σ(H)| / n)`.
pub fn fgn_distance(hurst: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("distance needs n >= 2"));
    }
    let log_det = levinson_logdet(&fgn_autocorrelation(hurst, n)?)?;
    Ok((-log_det / n as f64).max(0.0).sqrt())
}

/// `d(H)` as a [`DistanceMeasure`] at a fixed reference length.
///
/// As `H → 0` the correlation tends to `(1, −½, 0, …)`, a tridiagonal
/// matrix with determinant `(n+1)/2ⁿ`, so the lower branch is bounded.
/// As `H → 1` the matrix tends to the rank-one all-ones matrix and the
/// distance diverges.
#[derive(Debug, Clone, Copy)]
pub struct FgnDistance {
    pub n_ref: usize,
}

impl Default for FgnDistance {
    fn default() -> Self {
        Self { n_ref: DEFAULT_N_REF }
    }
}

impl DistanceMeasure for FgnDistance {
    fn distance(&self, hurst: f64) -> Result<f64> {
        fgn_distance(hurst, self.n_ref)
    }

    fn lower_limit(&self) -> Option<f64> {
        let mut limit = vec![0.0; self.n_ref];
        limit[0] = 1.0;
        if self.n_ref > 1 {
            limit[1] = -0.5;
        }
        let log_det = levinson_logdet(&CorrelationSequence::from_trusted(limit)).ok()?;
        Some((-log_det / self.n_ref as f64).max(0.0).sqrt())
    }
}

/// Tabulates `d(H)` over `(0, 1)` in logit coordinates.
pub fn fgn_distance_table(n_ref: usize, options: &TableOptions) -> Result<Arc<DistanceTable>> {
    DistanceTable::build(
        &FgnDistance { n_ref },
        Interval::new(0.0, 1.0)?,
        0.5,
        Transform::Logit,
        options,
    )
    .map(Arc::new)
}

/// One exact draw of length `n` from `N(0, τ⁻¹ Σ(H))` by circulant embedding.
pub fn fgn_sample(params: FgnParams, n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::domain("sample length must be at least 1"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let sd = params.precision.recip().sqrt();
    if n == 1 {
        let z: f64 = StandardNormal.sample(&mut rng);
        return Ok(vec![sd * z]);
    }

    let gamma = fgn_autocorrelation(params.hurst, n)?;
    let g = gamma.values();
    // First row of the circulant: γ(0..n−1) followed by γ(n−2..1).
    let m = 2 * (n - 1);
    let mut row: Vec<Complex64> = g
        .iter()
        .chain(g[1..n - 1].iter().rev())
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    debug_assert_eq!(row.len(), m);

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    fft.process(&mut row);

    let mut spectrum = Vec::with_capacity(m);
    for (index, c) in row.iter().enumerate() {
        let eigenvalue = c.re;
        if eigenvalue < -EMBEDDING_TOLERANCE {
            return Err(Error::EmbeddingFailure { index, eigenvalue });
        }
        let scale = (eigenvalue.max(0.0) / m as f64).sqrt();
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        spectrum.push(Complex64::new(scale * re, scale * im));
    }
    fft.process(&mut spectrum);
    Ok(spectrum[..n].iter().map(|c| sd * c.re).collect())
}
