//! Priors shared by the two noise models in a comparison.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::ar1::ar1_distance_table;
use crate::error::Result;
use crate::fgn::{fgn_distance_table, DEFAULT_N_REF};
use crate::marginal::{ModelSpec, NoiseKind, QuadratureConfig, Trend, DEFAULT_BETA_PRECISION};
use crate::prior::{calibrate_rate, DistanceTable, ParameterKind, PcPrior, PrecisionPrior, TableOptions};

/// Tail statement `P(θ > u) = α` (or `P(σ > U) = α` for the precision).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub u: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorConfig {
    /// Calibration of the Hurst prior; its rate is reused for AR(1).
    pub flex: Calibration,
    pub precision: Calibration,
    /// Series length at which the fGn distance is evaluated.
    pub n_ref: usize,
    pub table: TableOptions,
}

impl Default for PriorConfig {
    fn default() -> Self {
        Self {
            flex: Calibration { u: 0.9, alpha: 0.10 },
            precision: Calibration { u: 1.0, alpha: 0.01 },
            n_ref: DEFAULT_N_REF,
            table: TableOptions::default(),
        }
    }
}

type TableKey = (&'static str, usize, usize, u64);

/// Distance tables are deterministic in their inputs, so they are built
/// once per process.
fn cached_table(key: TableKey, build: impl FnOnce() -> Result<Arc<DistanceTable>>) -> Result<Arc<DistanceTable>> {
    static CACHE: OnceLock<Mutex<HashMap<TableKey, Arc<DistanceTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().unwrap().get(&key) {
        return Ok(t.clone());
    }
    let table = build()?;
    cache.lock().unwrap().insert(key, table.clone());
    Ok(table)
}

/// The fGn distance table for the given settings, cached per process.
pub fn shared_fgn_table(n_ref: usize, options: &TableOptions) -> Result<Arc<DistanceTable>> {
    cached_table(("fgn", n_ref, options.grid_size, options.margin.to_bits()), || {
        fgn_distance_table(n_ref, options)
    })
}

/// The AR(1) distance table, cached per process.
pub fn shared_ar1_table(options: &TableOptions) -> Result<Arc<DistanceTable>> {
    cached_table(("ar1", 0, options.grid_size, options.margin.to_bits()), || {
        ar1_distance_table(options)
    })
}

/// fGn and AR(1) priors with a common rate, plus the precision prior.
#[derive(Debug, Clone)]
pub struct SharedPriors {
    pub fgn: PcPrior,
    pub ar1: PcPrior,
    pub precision: PrecisionPrior,
}

impl SharedPriors {
    pub fn build(config: &PriorConfig) -> Result<Self> {
        let fgn_table = shared_fgn_table(config.n_ref, &config.table)?;
        let rate = calibrate_rate(&fgn_table, config.flex.u, config.flex.alpha)?;
        let fgn = PcPrior::new(ParameterKind::Hurst, fgn_table, rate)?;
        let ar1 = PcPrior::new(ParameterKind::Ar1Coefficient, shared_ar1_table(&config.table)?, rate)?;
        let precision = PrecisionPrior::new(config.precision.u, config.precision.alpha)?;
        Ok(Self { fgn, ar1, precision })
    }

    pub fn rate(&self) -> f64 {
        self.fgn.rate()
    }

    pub fn prior(&self, kind: NoiseKind) -> &PcPrior {
        match kind {
            NoiseKind::Fgn => &self.fgn,
            NoiseKind::Ar1 => &self.ar1,
        }
    }

    /// Model for a series of length `n`.
    pub fn spec(&self, kind: NoiseKind, trend: Trend, n: usize, quadrature: QuadratureConfig) -> Result<ModelSpec> {
        let spec = ModelSpec::new(kind, self.prior(kind).clone(), self.precision)?
            .with_beta_precision(DEFAULT_BETA_PRECISION)?
            .with_quadrature(quadrature)?;
        match trend {
            Trend::None => Ok(spec),
            Trend::Linear => spec.with_linear_trend(n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shared_rate_and_cache() {
        let a = SharedPriors::build(&PriorConfig::default()).unwrap();
        let b = SharedPriors::build(&PriorConfig::default()).unwrap();
        assert!(Arc::ptr_eq(a.fgn.table(), b.fgn.table()));
        assert_eq!(a.fgn.rate(), a.ar1.rate());
        assert!((a.rate() - 1.70).abs() < 0.01);
        assert!((a.precision.rate() - 4.6052).abs() < 1e-4);
    }
}
