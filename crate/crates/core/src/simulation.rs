//! Monte Carlo study of Bayes factors on simulated fGn series.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evidence::{compare, EvidenceCategory};
use crate::fgn::{fgn_sample, FgnParams, DEFAULT_N_REF};
use crate::marginal::{NoiseKind, QuadratureConfig, Trend};
use crate::prior::TableOptions;
use crate::setup::{Calibration, PriorConfig, SharedPriors};

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationPlan {
    pub hurst_values: Vec<f64>,
    pub lengths: Vec<usize>,
    pub replicates: usize,
    pub base_seed: u64,
    pub calibration: Calibration,
    pub precision_calibration: Calibration,
    pub quadrature: QuadratureConfig,
    pub n_ref: usize,
    pub table: TableOptions,
}

impl Default for SimulationPlan {
    fn default() -> Self {
        Self {
            hurst_values: vec![0.7, 0.8, 0.9],
            lengths: vec![100, 200, 500],
            replicates: 1000,
            base_seed: 20_240_101,
            calibration: Calibration { u: 0.9, alpha: 0.10 },
            precision_calibration: Calibration { u: 1.0, alpha: 0.01 },
            quadrature: QuadratureConfig::default(),
            n_ref: DEFAULT_N_REF,
            table: TableOptions::default(),
        }
    }
}

impl SimulationPlan {
    pub fn validate(&self) -> Result<()> {
        if self.hurst_values.is_empty() || self.lengths.is_empty() {
            return Err(Error::domain("plan needs at least one Hurst value and one length"));
        }
        if let Some(h) = self.hurst_values.iter().find(|h| !(**h > 0.0 && **h < 1.0)) {
            return Err(Error::domain(format!("Hurst values must lie in (0, 1), got {h}")));
        }
        if let Some(n) = self.lengths.iter().find(|n| **n < 2) {
            return Err(Error::domain(format!("series lengths must be at least 2, got {n}")));
        }
        if self.replicates == 0 {
            return Err(Error::domain("replicates must be at least 1"));
        }
        self.quadrature.validate()
    }

    fn prior_config(&self) -> PriorConfig {
        PriorConfig {
            flex: self.calibration,
            precision: self.precision_calibration,
            n_ref: self.n_ref,
            table: self.table,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `base_seed ⊕ h(H, n, r)` with `h` a chain of SplitMix64 steps over the
/// bits of `H`, then `n`, then `r`.
pub fn replicate_seed(base_seed: u64, hurst: f64, n: usize, replicate: usize) -> u64 {
    let h = splitmix64(hurst.to_bits());
    let h = splitmix64(h ^ n as u64);
    let h = splitmix64(h ^ replicate as u64);
    base_seed ^ h
}

/// Outcome of one replicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReplicateOutcome {
    Categorized { log_bf: f64, category: EvidenceCategory },
    Failed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellReport {
    pub hurst: f64,
    pub n: usize,
    /// Counts in the order of [`EvidenceCategory::ALL`].
    pub counts: [usize; 5],
    pub failures: usize,
    pub seeds: Vec<u64>,
    pub outcomes: Vec<ReplicateOutcome>,
}

impl CellReport {
    pub fn categorized(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Proportions over the categorized replicates; zeros if none succeeded.
    pub fn proportions(&self) -> [f64; 5] {
        let total = self.categorized();
        if total == 0 {
            return [0.0; 5];
        }
        self.counts.map(|c| c as f64 / total as f64)
    }

    pub fn proportion(&self, category: EvidenceCategory) -> f64 {
        self.proportions()[category as usize]
    }

    /// Proportion with `BF > 3`.
    pub fn bf_gt_3(&self) -> f64 {
        let total = self.categorized();
        if total == 0 {
            return 0.0;
        }
        (self.counts[2] + self.counts[3] + self.counts[4]) as f64 / total as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub rate: f64,
    pub replicates: usize,
    pub base_seed: u64,
    pub cells: Vec<CellReport>,
}

impl SimulationReport {
    pub fn cell(&self, hurst: f64, n: usize) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.hurst == hurst && c.n == n)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("hurst,n,false,no_conclusion,positive,strong,very_strong,bf_gt_3,failures\n");
        for c in &self.cells {
            let p = c.proportions();
            let _ = writeln!(
                out,
                "{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{}",
                c.hurst,
                c.n,
                p[0],
                p[1],
                p[2],
                p[3],
                p[4],
                c.bf_gt_3(),
                c.failures
            );
        }
        out
    }

    /// One line per replicate: cell, replicate index, seed, log Bayes factor and category.
    pub fn seeds_csv(&self) -> String {
        let mut out = String::from("hurst,n,replicate,seed,log_bf,category\n");
        for c in &self.cells {
            for (r, (seed, outcome)) in c.seeds.iter().zip(&c.outcomes).enumerate() {
                let (log_bf, cat) = match outcome {
                    ReplicateOutcome::Categorized { log_bf, category } => (format!("{log_bf:.9}"), category.label()),
                    ReplicateOutcome::Failed => (String::new(), "FAILED"),
                };
                let _ = writeln!(out, "{},{},{},{},{},{}", c.hurst, c.n, r, seed, log_bf, cat);
            }
        }
        out
    }

    /// Table laid out with one row per (n, H) cell.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "Proportion of Bayes factors (fGn over AR(1)) per evidence category; {} replicates per cell, rate {:.4}",
            self.replicates, self.rate
        );
        let _ = writeln!(
            out,
            "{:>5} {:>5} {:>8} {:>11} {:>9} {:>10} {:>8} {:>8} {:>8}",
            "n", "H", "BF<1/3", "1/3<=BF<=3", "3<BF<=20", "20<BF<=150", "BF>150", "BF>3", "failed"
        );
        let mut cells: Vec<&CellReport> = self.cells.iter().collect();
        cells.sort_by(|a, b| a.n.cmp(&b.n).then(a.hurst.total_cmp(&b.hurst)));
        for c in cells {
            let p = c.proportions();
            let _ = writeln!(
                out,
                "{:>5} {:>5} {:>8.3} {:>11.3} {:>9.3} {:>10.3} {:>8.3} {:>8.3} {:>8}",
                c.n,
                c.hurst,
                p[0],
                p[1],
                p[2],
                p[3],
                p[4],
                c.bf_gt_3(),
                c.failures
            );
        }
        out
    }
}

fn run_replicate(priors: &SharedPriors, plan: &SimulationPlan, hurst: f64, n: usize, seed: u64) -> Result<f64> {
    let y = fgn_sample(FgnParams::new(hurst, 1.0)?, n, seed)?;
    let fgn = priors.spec(NoiseKind::Fgn, Trend::None, n, plan.quadrature)?;
    let ar1 = priors.spec(NoiseKind::Ar1, Trend::None, n, plan.quadrature)?;
    Ok(compare(&y, &fgn, &ar1)?.log_bf())
}

/// Runs every cell of the plan. Replicates run in parallel; a replicate
/// whose fit fails is counted under `failures`.
pub fn run_simulation(plan: &SimulationPlan) -> Result<SimulationReport> {
    plan.validate()?;
    let priors = SharedPriors::build(&plan.prior_config())?;
    let mut jobs = Vec::new();
    for &hurst in &plan.hurst_values {
        for &n in &plan.lengths {
            for r in 0..plan.replicates {
                jobs.push((hurst, n, r));
            }
        }
    }
    let outcomes: Vec<(u64, ReplicateOutcome)> = jobs
        .par_iter()
        .map(|&(hurst, n, r)| {
            let seed = replicate_seed(plan.base_seed, hurst, n, r);
            let outcome = match run_replicate(&priors, plan, hurst, n, seed) {
                Ok(log_bf) if !log_bf.is_nan() => ReplicateOutcome::Categorized {
                    log_bf,
                    category: EvidenceCategory::from_log_bayes_factor(log_bf),
                },
                _ => ReplicateOutcome::Failed,
            };
            (seed, outcome)
        })
        .collect();

    let mut cells = Vec::new();
    for (k, chunk) in outcomes.chunks(plan.replicates).enumerate() {
        let (hurst, n, _) = jobs[k * plan.replicates];
        let mut counts = [0usize; 5];
        let mut failures = 0;
        for (_, o) in chunk {
            match o {
                ReplicateOutcome::Categorized { category, .. } => counts[*category as usize] += 1,
                ReplicateOutcome::Failed => failures += 1,
            }
        }
        cells.push(CellReport {
            hurst,
            n,
            counts,
            failures,
            seeds: chunk.iter().map(|c| c.0).collect(),
            outcomes: chunk.iter().map(|c| c.1).collect(),
        });
    }
    Ok(SimulationReport {
        rate: priors.rate(),
        replicates: plan.replicates,
        base_seed: plan.base_seed,
        cells,
    })
}
