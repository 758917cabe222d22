//! Penalised-complexity priors for fractional Gaussian noise and AR(1)
//! models, and Bayes-factor comparison of the two on observed series.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ar1;
pub mod error;
pub mod evidence;
pub mod fgn;
pub mod marginal;
pub mod prior;
pub mod quadrature;
pub mod setup;
pub mod simulation;
pub mod toeplitz;

pub use ar1::{ar1_autocorrelation, ar1_distance, ar1_distance_table, ar1_pc_prior_density, ar1_sample, Ar1Params};
pub use error::{Error, Result};
pub use evidence::{bayes_factor, check_compatible, compare, compare_fits, BayesFactorResult, EvidenceCategory};
pub use fgn::{fgn_autocorrelation, fgn_distance, fgn_distance_table, fgn_sample, FgnParams, DEFAULT_N_REF};
pub use marginal::{
    fit, linear_design, log_likelihood_given_hyper, log_marginal_likelihood, posterior_summaries, Estimate, Fit,
    ModelSpec, NoiseKind, PosteriorSummaries, QuadratureConfig, Trend, DEFAULT_BETA_PRECISION,
};
pub use prior::{
    build_distance_table, calibrate_rate, induced_distance_density, precision_logprior, DensityPoint,
    DistanceMeasure, DistanceTable, Interval, ParameterKind, PcPrior, PrecisionPrior, Side, TableOptions, Transform,
};
pub use quadrature::AxisRule;
pub use setup::{Calibration, PriorConfig, SharedPriors};
pub use simulation::{replicate_seed, run_simulation, CellReport, SimulationPlan, SimulationReport};
pub use toeplitz::{levinson_logdet, levinson_solve, quadratic_form, CorrelationSequence};
