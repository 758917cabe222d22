use crate::error::{Error, Result};

/// PC prior for a precision `τ`: an exponential with rate `λ = −ln α / U`
/// on the standard deviation `σ = τ^{−1/2}`, so that `P(σ > U) = α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionPrior {
    u: f64,
    alpha: f64,
    rate: f64,
}

impl PrecisionPrior {
    pub fn new(u: f64, alpha: f64) -> Result<Self> {
        if !(u > 0.0 && u.is_finite()) {
            return Err(Error::domain(format!("U must be positive, got {u}")));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        Ok(Self {
            u,
            alpha,
            rate: -alpha.ln() / u,
        })
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Log density of `κ = ln τ`.
    pub fn log_density(&self, kappa: f64) -> f64 {
        let l = self.rate;
        (0.5 * l).ln() - l * (-0.5 * kappa).exp() - 0.5 * kappa
    }

    /// Density of `τ`: `(λ/2) τ^{−3/2} exp(−λ τ^{−1/2})`.
    pub fn density_precision(&self, tau: f64) -> f64 {
        if !(tau > 0.0) {
            return 0.0;
        }
        0.5 * self.rate * tau.powf(-1.5) * (-self.rate / tau.sqrt()).exp()
    }

    /// Density of `σ`: `λ exp(−λσ)`.
    pub fn density_sigma(&self, sigma: f64) -> f64 {
        if sigma < 0.0 {
            return 0.0;
        }
        self.rate * (-self.rate * sigma).exp()
    }

    /// `P(σ > s)`.
    pub fn sigma_exceedance(&self, s: f64) -> f64 {
        (-self.rate * s.max(0.0)).exp()
    }

    /// `sqrt(E[σ²]) = √2/λ`.
    pub fn marginal_sd(&self) -> f64 {
        std::f64::consts::SQRT_2 / self.rate
    }
}

/// `ln[(λ/2) exp(−λ e^{−κ/2} − κ/2)]`.
pub fn precision_logprior(kappa: f64, prior: &PrecisionPrior) -> f64 {
    prior.log_density(kappa)
}
