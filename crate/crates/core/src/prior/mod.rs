//! Penalised-complexity priors.
//!
//! A flexible model is indexed by a parameter `θ`, with a base model at
//! `θ₀` where the distance `d(θ)` to the base is zero. The prior puts an
//! exponential with rate `λ` on the distance, half of the mass on each side
//! of `θ₀`, and maps it back to `θ` through the tabulated `d(θ)`.

mod induced;
mod pc;
mod precision;
mod table;

pub use induced::{induced_distance_density, DensityPoint};
pub use pc::{calibrate_rate, ParameterKind, PcPrior};
pub use precision::{precision_logprior, PrecisionPrior};
pub use table::{build_distance_table, DistanceTable, Side, TableOptions};

use crate::error::{Error, Result};

/// A distance from a flexible model to its base model.
pub trait DistanceMeasure: Sync {
    fn distance(&self, theta: f64) -> Result<f64>;

    /// Limit of the distance at the open lower end of the support, or
    /// `None` when it diverges.
    fn lower_limit(&self) -> Option<f64> {
        None
    }

    /// Limit at the open upper end, or `None` when it diverges.
    fn upper_limit(&self) -> Option<f64> {
        None
    }
}

impl<F> DistanceMeasure for F
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    fn distance(&self, theta: f64) -> Result<f64> {
        self(theta)
    }
}

/// An open interval `(lo, hi)` with finite ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Self { lo, hi })
        } else {
            Err(Error::domain(format!("invalid interval ({lo}, {hi})")))
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }
}

/// Map between the parameter and the internal coordinate the table is built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    /// Internal coordinate equals the parameter.
    Identity,
    /// `x = logit((θ − lo)/(hi − lo))`, unbounded on both sides.
    Logit,
}

impl Transform {
    pub fn to_internal(self, support: Interval, theta: f64) -> f64 {
        match self {
            Transform::Identity => theta,
            Transform::Logit => {
                let u = (theta - support.lo) / support.width();
                (u / (1.0 - u)).ln()
            }
        }
    }

    pub fn to_parameter(self, support: Interval, x: f64) -> f64 {
        match self {
            Transform::Identity => x,
            Transform::Logit => support.lo + support.width() * sigmoid(x),
        }
    }

    /// `dθ/dx`.
    pub fn jacobian(self, support: Interval, x: f64) -> f64 {
        match self {
            Transform::Identity => 1.0,
            Transform::Logit => support.width() * sigmoid(x) * sigmoid(-x),
        }
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}
