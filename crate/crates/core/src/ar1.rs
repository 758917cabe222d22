//! First-order autoregressive noise.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::prior::{DistanceMeasure, DistanceTable, Interval, TableOptions, Transform};
use crate::toeplitz::CorrelationSequence;

/// Below this `|φ|` the prior density uses its series expansion.
const SERIES_CUTOFF: f64 = 1e-6;

/// AR(1) parameters. `precision` is the marginal precision τ of the
/// stationary process; the innovation precision is `κ = τ/(1−φ²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ar1Params {
    phi: f64,
    precision: f64,
}

impl Ar1Params {
    pub fn new(phi: f64, precision: f64) -> Result<Self> {
        check_phi(phi)?;
        if !(precision > 0.0 && precision.is_finite()) {
            return Err(Error::domain(format!("precision must be positive, got {precision}")));
        }
        Ok(Self { phi, precision })
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn precision(&self) -> f64 {
        self.precision
    }

    pub fn innovation_precision(&self) -> f64 {
        self.precision / ((1.0 - self.phi) * (1.0 + self.phi))
    }
}

fn check_phi(phi: f64) -> Result<()> {
    if phi.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("AR(1) coefficient must satisfy |phi| < 1, got {phi}")))
    }
}

/// `−ln(1 − φ²)`, accurate for small `φ`.
fn neg_log_one_minus_sq(phi: f64) -> f64 {
    -(-phi * phi).ln_1p()
}

/// `γ(k) = φᵏ`.
pub fn ar1_autocorrelation(phi: f64, n: usize) -> Result<CorrelationSequence> {
    check_phi(phi)?;
    if n == 0 {
        return Err(Error::domain("sequence length must be at least 1"));
    }
    let mut values = Vec::with_capacity(n);
    let mut p = 1.0;
    for _ in 0..n {
        values.push(p);
        p *= phi;
    }
    Ok(CorrelationSequence::from_trusted(values))
}

/// `d(φ) = sqrt(−ln(1 − φ²))`.
pub fn ar1_distance(phi: f64) -> Result<f64> {
    check_phi(phi)?;
    Ok(neg_log_one_minus_sq(phi).sqrt())
}

/// Closed-form PC prior density for φ at rate `λ`.
pub fn ar1_pc_prior_density(phi: f64, rate: f64) -> Result<f64> {
    check_phi(phi)?;
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::domain(format!("rate must be positive, got {rate}")));
    }
    if phi.abs() < SERIES_CUTOFF {
        // d ≈ |φ|, d′ ≈ 1 near the base model.
        return Ok(0.5 * rate * (-rate * phi.abs()).exp() * (1.0 + 0.5 * phi * phi));
    }
    let s = neg_log_one_minus_sq(phi);
    let d = s.sqrt();
    let one_minus_sq = (1.0 - phi) * (1.0 + phi);
    Ok(0.5 * rate * (-rate * d).exp() * phi.abs() / (one_minus_sq * d))
}

/// `d(φ)` as a [`DistanceMeasure`]; unbounded at both ends of `(−1, 1)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Ar1Distance;

impl DistanceMeasure for Ar1Distance {
    fn distance(&self, phi: f64) -> Result<f64> {
        ar1_distance(phi)
    }
}

/// Tabulates `d(φ)` over `(−1, 1)` in the coordinate `logit((φ+1)/2)`.
pub fn ar1_distance_table(options: &TableOptions) -> Result<Arc<DistanceTable>> {
    DistanceTable::build(
        &Ar1Distance,
        Interval::new(-1.0, 1.0)?,
        0.0,
        Transform::Logit,
        options,
    )
    .map(Arc::new)
}

/// Stationary AR(1) path: `x₁ ~ N(0, τ⁻¹)`, then `x_t = φ x_{t−1} + w_t`
/// with `w_t ~ N(0, (1−φ²)/τ)`.
pub fn ar1_sample(params: Ar1Params, n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::domain("sample length must be at least 1"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let marginal_sd = params.precision.recip().sqrt();
    let innovation_sd = params.innovation_precision().recip().sqrt();
    let mut out = Vec::with_capacity(n);
    let z: f64 = StandardNormal.sample(&mut rng);
    let mut x = marginal_sd * z;
    out.push(x);
    for _ in 1..n {
        let w: f64 = StandardNormal.sample(&mut rng);
        x = params.phi * x + innovation_sd * w;
        out.push(x);
    }
    Ok(out)
}
