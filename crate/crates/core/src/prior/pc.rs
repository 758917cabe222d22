use std::sync::Arc;

use super::table::{DistanceTable, Side};
use crate::error::{Error, Result};
use crate::quadrature::integrate_gl10;

/// Which flexibility parameter a prior is defined over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParameterKind {
    /// Hurst exponent of fractional Gaussian noise.
    Hurst,
    /// Lag-one coefficient of an AR(1) process.
    Ar1Coefficient,
}

impl ParameterKind {
    pub fn name(self) -> &'static str {
        match self {
            ParameterKind::Hurst => "H",
            ParameterKind::Ar1Coefficient => "phi",
        }
    }
}

/// `λ = −ln(2α)/d(u)`.
pub fn calibrate_rate(table: &DistanceTable, u: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::domain(format!("alpha must lie in (0, 0.5), got {alpha}")));
    }
    if u == table.base_point() {
        return Err(Error::domain("calibration point coincides with the base model"));
    }
    let d = table.distance(u)?;
    if !(d > 0.0) {
        return Err(Error::domain(format!("distance at the calibration point {u} is zero")));
    }
    Ok(-(2.0 * alpha).ln() / d)
}

/// Exponential prior with rate `λ` on the distance, half of the mass on
/// each side of the base model, carried to the parameter scale through a
/// [`DistanceTable`].
///
/// When a branch of the distance is bounded (the lower fGn branch tends to
/// a finite limit as `H → 0`), the exponential is truncated at the limit
/// and renormalised so that the branch still carries mass ½.
#[derive(Debug, Clone)]
pub struct PcPrior {
    kind: ParameterKind,
    table: Arc<DistanceTable>,
    rate: f64,
    scale: [f64; 2],
}

fn side_index(side: Side) -> usize {
    match side {
        Side::Lower => 0,
        Side::Upper => 1,
    }
}

impl PcPrior {
    pub fn new(kind: ParameterKind, table: Arc<DistanceTable>, rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::domain(format!("rate must be positive, got {rate}")));
        }
        let near = (-rate * table.base_distance()).exp();
        let scale = [Side::Lower, Side::Upper].map(|side| {
            let far = match far_distance(&table, side) {
                Some(d) => (-rate * d).exp(),
                None => 0.0,
            };
            1.0 / (near - far)
        });
        Ok(Self {
            kind,
            table,
            rate,
            scale,
        })
    }

    /// Calibrates the rate from `P(θ beyond u) = α` and builds the prior.
    pub fn calibrated(kind: ParameterKind, table: Arc<DistanceTable>, u: f64, alpha: f64) -> Result<Self> {
        let rate = calibrate_rate(&table, u, alpha)?;
        Self::new(kind, table, rate)
    }

    pub fn kind(&self) -> ParameterKind {
        self.kind
    }

    pub fn parameter_name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn table(&self) -> &Arc<DistanceTable> {
        &self.table
    }

    /// Renormalising factor of a branch; 1 for unbounded branches.
    pub fn branch_scale(&self, side: Side) -> f64 {
        self.scale[side_index(side)]
    }

    /// Density of the internal coordinate on one branch, extended to the
    /// base point as that branch's limit.
    pub fn one_sided_internal(&self, side: Side, x: f64) -> f64 {
        let (d, slope) = self.table.eval_on(side, x);
        0.5 * self.rate * (-self.rate * d).exp() * slope.abs() * self.scale[side_index(side)]
    }

    /// Density of the internal coordinate `x`. At the base point the larger
    /// one-sided value is returned.
    pub fn density_internal(&self, x: f64) -> f64 {
        if x == self.table.base_internal() {
            return self
                .one_sided_internal(Side::Lower, x)
                .max(self.one_sided_internal(Side::Upper, x));
        }
        self.one_sided_internal(self.table.side_of_internal(x), x)
    }

    pub fn log_density_internal(&self, x: f64) -> f64 {
        self.density_internal(x).ln()
    }

    /// `π(θ) = ½ λ exp(−λ d(θ)) |d′(θ)|`.
    pub fn density(&self, theta: f64) -> Result<f64> {
        if !self.table.support().contains(theta) {
            return Err(Error::domain(format!(
                "{} = {theta} outside the support",
                self.parameter_name()
            )));
        }
        let x = self.table.to_internal(theta);
        Ok(self.density_internal(x) / self.table.jacobian(x))
    }

    /// Closed-form distribution function of the interpolated prior.
    pub fn cdf(&self, theta: f64) -> Result<f64> {
        let support = self.table.support();
        if theta <= support.lo {
            return Ok(0.0);
        }
        if theta >= support.hi {
            return Ok(1.0);
        }
        let x = self.table.to_internal(theta);
        let side = self.table.side_of_internal(x);
        let e = (-self.rate * self.table.eval_on(side, x).0).exp();
        let near = (-self.rate * self.table.base_distance()).exp();
        Ok(match side {
            Side::Lower => {
                let far = far_distance(&self.table, side).map_or(0.0, |d| (-self.rate * d).exp());
                0.5 * self.scale[0] * (e - far)
            }
            Side::Upper => 0.5 + 0.5 * self.scale[1] * (near - e),
        })
    }

    /// `P(lo < θ < hi)` by numerical integration of the density. The ends
    /// may be the support bounds.
    pub fn tail_probability(&self, lo: f64, hi: f64) -> Result<f64> {
        let support = self.table.support();
        if !(lo >= support.lo && hi <= support.hi && lo <= hi) {
            return Err(Error::domain(format!(
                "interval [{lo}, {hi}] not inside the support ({}, {})",
                support.lo, support.hi
            )));
        }
        let a = if lo == support.lo {
            f64::NEG_INFINITY
        } else {
            self.table.to_internal(lo)
        };
        let b = if hi == support.hi {
            f64::INFINITY
        } else {
            self.table.to_internal(hi)
        };
        Ok(self.integrate_internal(a, b).clamp(0.0, 1.0))
    }

    fn integrate_internal(&self, a: f64, b: f64) -> f64 {
        if !(b > a) {
            return 0.0;
        }
        let f = |x: f64| self.density_internal(x);
        let (xmin, xmax) = self.table.internal_range();
        let mut total = 0.0;

        // Tabulated range, one Gauss-Legendre panel per cell.
        let (lo, hi) = (a.max(xmin), b.min(xmax));
        if hi > lo {
            let mut edges: Vec<f64> = self.table.branch_nodes(Side::Lower);
            edges.extend(self.table.branch_nodes(Side::Upper).into_iter().skip(1));
            let mut prev = lo;
            for e in edges.into_iter().filter(|&e| e > lo && e < hi).chain(std::iter::once(hi)) {
                total += integrate_gl10(f, prev, e);
                prev = e;
            }
        }

        // Extrapolated regions, in panels that double in width.
        if a < xmin {
            total += tail_integral(&f, b.min(xmin), a, -1.0);
        }
        if b > xmax {
            total += tail_integral(&f, a.max(xmax), b, 1.0);
        }
        total
    }
}

/// Integral of `f` from `from` outward (direction `dir`) up to `to`.
fn tail_integral(f: &impl Fn(f64) -> f64, from: f64, to: f64, dir: f64) -> f64 {
    let reach = dir * (to - from);
    if !(reach > 0.0) {
        return 0.0;
    }
    let mut total = 0.0;
    let mut t0 = 0.0;
    let mut width = 1.0;
    while t0 < reach {
        let t1 = (t0 + width).min(reach);
        let (p, q) = (from + dir * t0, from + dir * t1);
        let part = integrate_gl10(f, p.min(q), p.max(q));
        total += part;
        if t0 > 0.0 && part <= 1e-18 * total.max(1e-300) {
            break;
        }
        t0 = t1;
        width *= 2.0;
        if t0 > 1e6 {
            break;
        }
    }
    total
}

/// Distance the extrapolated branch tends to far from the base; `None`
/// when it diverges.
fn far_distance(table: &DistanceTable, side: Side) -> Option<f64> {
    let end = table.end_distance(side);
    match table.limit(side) {
        None => None,
        Some(limit) if limit > end => Some(limit),
        Some(_) => Some(end),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ar1::{ar1_distance_table, ar1_pc_prior_density};
    use crate::fgn::{fgn_distance_table, DEFAULT_N_REF};
    use crate::prior::TableOptions;
    use std::sync::OnceLock;

    fn fgn_table() -> Arc<DistanceTable> {
        static T: OnceLock<Arc<DistanceTable>> = OnceLock::new();
        T.get_or_init(|| fgn_distance_table(DEFAULT_N_REF, &TableOptions::default()).unwrap())
            .clone()
    }

    fn ar1_table() -> Arc<DistanceTable> {
        ar1_distance_table(&TableOptions::default()).unwrap()
    }

    #[test]
    fn fgn_rates() {
        let t = fgn_table();
        for (alpha, expected) in [(0.10, 1.70), (0.15, 1.27), (0.20, 0.97)] {
            let rate = calibrate_rate(&t, 0.9, alpha).unwrap();
            assert!((rate - expected).abs() < 0.01, "alpha {alpha}: {rate}");
        }
    }

    #[test]
    fn ar1_rate() {
        let rate = calibrate_rate(&ar1_table(), 0.5, 0.25).unwrap();
        let expected = -(0.5f64).ln() / (-(0.75f64).ln()).sqrt();
        assert!((rate - expected).abs() < 1e-9);
        assert!((rate - 1.2923).abs() < 1e-4);
    }

    #[test]
    fn calibration_errors() {
        let t = ar1_table();
        assert!(calibrate_rate(&t, 0.0, 0.1).is_err());
        assert!(calibrate_rate(&t, 0.5, 0.5).is_err());
        assert!(calibrate_rate(&t, 1.0, 0.1).is_err());
        assert!(PcPrior::new(ParameterKind::Hurst, t, -1.0).is_err());
    }

    #[test]
    fn fgn_prior_normalised_with_calibrated_tail() {
        let prior = PcPrior::calibrated(ParameterKind::Hurst, fgn_table(), 0.9, 0.10).unwrap();
        let total = prior.tail_probability(0.0, 1.0).unwrap();
        assert!((total - 1.0).abs() < 1e-6, "total = {total}");
        let tail = prior.tail_probability(0.9, 1.0).unwrap();
        assert!((tail - 0.10).abs() < 2e-3, "tail = {tail}");
        let lower = prior.tail_probability(0.0, 0.5).unwrap();
        assert!((lower - 0.5).abs() < 1e-6, "lower = {lower}");
    }

    #[test]
    fn numerical_tail_matches_cdf() {
        let prior = PcPrior::calibrated(ParameterKind::Hurst, fgn_table(), 0.9, 0.15).unwrap();
        for &(lo, hi) in &[(0.1, 0.3), (0.45, 0.62), (0.5, 0.999), (0.0, 0.2), (0.8, 1.0)] {
            let numeric = prior.tail_probability(lo, hi).unwrap();
            let closed = prior.cdf(hi).unwrap() - prior.cdf(lo).unwrap();
            assert!((numeric - closed).abs() < 1e-8, "[{lo}, {hi}]: {numeric} vs {closed}");
        }
    }

    #[test]
    fn fgn_mode_at_base() {
        for alpha in [0.10, 0.15, 0.20] {
            let prior = PcPrior::calibrated(ParameterKind::Hurst, fgn_table(), 0.9, alpha).unwrap();
            let at = prior.density(0.5).unwrap();
            for dh in [0.001, 0.01, 0.05] {
                assert!(at >= prior.density(0.5 + dh).unwrap());
                assert!(at >= prior.density(0.5 - dh).unwrap());
            }
        }
    }

    #[test]
    fn ar1_matches_closed_form() {
        let rate = 1.70;
        let prior = PcPrior::new(ParameterKind::Ar1Coefficient, ar1_table(), rate).unwrap();
        let mut worst: f64 = 0.0;
        for i in 1..1000 {
            let phi = -1.0 + i as f64 / 500.0;
            if phi.abs() < 1e-12 {
                continue;
            }
            let numeric = prior.density(phi).unwrap();
            let exact = ar1_pc_prior_density(phi, rate).unwrap();
            worst = worst.max((numeric - exact).abs());
        }
        assert!(worst < 1e-5, "worst = {worst}");
    }

    #[test]
    fn ar1_prior_symmetric_halves() {
        let prior = PcPrior::new(ParameterKind::Ar1Coefficient, ar1_table(), 1.3).unwrap();
        assert!((prior.tail_probability(0.0, 1.0).unwrap() - 0.5).abs() < 1e-4);
        assert!((prior.tail_probability(-1.0, 1.0).unwrap() - 1.0).abs() < 1e-6);
        assert!(prior.density(1.0).is_err());
        assert!(prior.tail_probability(0.5, 1.5).is_err());
    }

    #[test]
    fn calibrations_reproduce_alpha() {
        let t = fgn_table();
        for &(u, alpha) in &[(0.9, 0.10), (0.8, 0.05), (0.95, 0.2), (0.7, 0.3)] {
            let prior = PcPrior::calibrated(ParameterKind::Hurst, t.clone(), u, alpha).unwrap();
            let tail = prior.tail_probability(u, 1.0).unwrap();
            assert!((tail - alpha).abs() < 2e-3, "({u}, {alpha}): {tail}");
        }
        let prior = PcPrior::calibrated(ParameterKind::Ar1Coefficient, ar1_table(), 0.5, 0.25).unwrap();
        assert!((prior.tail_probability(0.5, 1.0).unwrap() - 0.25).abs() < 1e-6);
    }

    #[test]
    fn invariant_under_reparameterisation() {
        use crate::fgn::FgnDistance;
        use crate::prior::{DistanceMeasure, Interval, Transform};

        // Distance expressed directly in ρ = logit(H).
        struct InRho(FgnDistance);
        impl DistanceMeasure for InRho {
            fn distance(&self, rho: f64) -> Result<f64> {
                self.0.distance(crate::prior::sigmoid(rho))
            }
            fn lower_limit(&self) -> Option<f64> {
                self.0.lower_limit()
            }
        }
        let measure = InRho(FgnDistance { n_ref: DEFAULT_N_REF });
        let rho_table = DistanceTable::build(
            &measure,
            Interval::new(-14.0, 14.0).unwrap(),
            0.0,
            Transform::Identity,
            &TableOptions {
                grid_size: 4001,
                ..Default::default()
            },
        )
        .unwrap();
        let h_prior = PcPrior::new(ParameterKind::Hurst, fgn_table(), 1.70).unwrap();
        let rho_prior = PcPrior::new(ParameterKind::Hurst, Arc::new(rho_table), 1.70).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..=240 {
            let rho = -6.0 + i as f64 * 0.05;
            if rho == 0.0 {
                continue;
            }
            let h = crate::prior::sigmoid(rho);
            let via_h = h_prior.density(h).unwrap() * h * (1.0 - h);
            worst = worst.max((via_h - rho_prior.density(rho).unwrap()).abs());
        }
        assert!(worst < 1e-5, "worst = {worst}");
    }
}
