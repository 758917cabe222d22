//! Bayes factors between two noise models and their evidence categories.

use std::fmt;

use crate::error::{Error, Result};
use crate::marginal::{fit, Fit, ModelSpec};

/// Strength of evidence for the first model over the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EvidenceCategory {
    /// `BF < 1/3`.
    False,
    /// `1/3 ≤ BF ≤ 3`.
    NoConclusion,
    /// `3 < BF ≤ 20`.
    Positive,
    /// `20 < BF ≤ 150`.
    Strong,
    /// `BF > 150`.
    VeryStrong,
}

impl EvidenceCategory {
    pub const ALL: [EvidenceCategory; 5] = [
        EvidenceCategory::False,
        EvidenceCategory::NoConclusion,
        EvidenceCategory::Positive,
        EvidenceCategory::Strong,
        EvidenceCategory::VeryStrong,
    ];

    pub fn from_bayes_factor(bf: f64) -> Self {
        if bf < 1.0 / 3.0 {
            EvidenceCategory::False
        } else if bf <= 3.0 {
            EvidenceCategory::NoConclusion
        } else if bf <= 20.0 {
            EvidenceCategory::Positive
        } else if bf <= 150.0 {
            EvidenceCategory::Strong
        } else {
            EvidenceCategory::VeryStrong
        }
    }

    /// Classifies on the log scale, which stays exact when `BF` overflows.
    pub fn from_log_bayes_factor(log_bf: f64) -> Self {
        if log_bf > 150f64.ln() {
            EvidenceCategory::VeryStrong
        } else if log_bf < -(3f64.ln()) - 1.0 {
            EvidenceCategory::False
        } else {
            Self::from_bayes_factor(log_bf.exp())
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            EvidenceCategory::False => "FALSE",
            EvidenceCategory::NoConclusion => "NO_CONCLUSION",
            EvidenceCategory::Positive => "POSITIVE",
            EvidenceCategory::Strong => "STRONG",
            EvidenceCategory::VeryStrong => "VERY_STRONG",
        }
    }

    /// Bayes-factor range of the category.
    pub fn range(self) -> &'static str {
        match self {
            EvidenceCategory::False => "BF<1/3",
            EvidenceCategory::NoConclusion => "1/3<=BF<=3",
            EvidenceCategory::Positive => "3<BF<=20",
            EvidenceCategory::Strong => "20<BF<=150",
            EvidenceCategory::VeryStrong => "BF>150",
        }
    }

    pub fn supports_first(self) -> bool {
        self > EvidenceCategory::NoConclusion
    }
}

impl fmt::Display for EvidenceCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Paired log marginal likelihoods and their ratio. The `fgn` slot holds
/// the first model passed to [`compare`] and the `ar1` slot the second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BayesFactorResult {
    pub log_ml_fgn: f64,
    pub log_ml_ar1: f64,
    pub bf: f64,
    pub category: EvidenceCategory,
}

impl BayesFactorResult {
    pub fn from_log_ml(log_ml_fgn: f64, log_ml_ar1: f64) -> Self {
        let log_bf = log_ml_fgn - log_ml_ar1;
        Self {
            log_ml_fgn,
            log_ml_ar1,
            bf: log_bf.exp(),
            category: EvidenceCategory::from_log_bayes_factor(log_bf),
        }
    }

    pub fn log_bf(&self) -> f64 {
        self.log_ml_fgn - self.log_ml_ar1
    }

    /// The same comparison with the two models swapped.
    pub fn swapped(&self) -> Self {
        Self::from_log_ml(self.log_ml_ar1, self.log_ml_fgn)
    }
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// Checks that two specs share the flexibility rate, precision prior and
/// regression setup.
pub fn check_compatible(first: &ModelSpec, second: &ModelSpec) -> Result<()> {
    if !same(first.flex_prior.rate(), second.flex_prior.rate()) {
        return Err(Error::MismatchedPriors(format!(
            "flexibility rates differ ({} vs {})",
            first.flex_prior.rate(),
            second.flex_prior.rate()
        )));
    }
    let (p, q) = (first.prec_prior, second.prec_prior);
    if !(same(p.u(), q.u()) && same(p.alpha(), q.alpha())) {
        return Err(Error::MismatchedPriors(format!(
            "precision priors differ (U={}, alpha={} vs U={}, alpha={})",
            p.u(),
            p.alpha(),
            q.u(),
            q.alpha()
        )));
    }
    if first.trend != second.trend || first.design != second.design {
        return Err(Error::MismatchedPriors("trend or design differ".into()));
    }
    if !same(first.beta_precision, second.beta_precision) {
        return Err(Error::MismatchedPriors("coefficient prior precisions differ".into()));
    }
    Ok(())
}

/// Bayes factor of `first` over `second` from two completed fits.
pub fn bayes_factor(first: &Fit, second: &Fit) -> BayesFactorResult {
    BayesFactorResult::from_log_ml(first.log_ml, second.log_ml)
}

/// Fits both models and returns the Bayes factor of `first` over `second`.
pub fn compare(y: &[f64], first: &ModelSpec, second: &ModelSpec) -> Result<BayesFactorResult> {
    Ok(compare_fits(y, first, second)?.0)
}

/// As [`compare`], also returning both fits.
pub fn compare_fits(y: &[f64], first: &ModelSpec, second: &ModelSpec) -> Result<(BayesFactorResult, Fit, Fit)> {
    check_compatible(first, second)?;
    let a = fit(y, first)?;
    let b = fit(y, second)?;
    Ok((bayes_factor(&a, &b), a, b))
}
