use rayon::prelude::*;

use super::{DistanceMeasure, Interval, Transform};
use crate::error::{Error, Result};

/// Largest distance accepted at the base point.
const BASE_TOLERANCE: f64 = 1e-6;

/// Which side of the base point a parameter value lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Lower,
    Upper,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Lower => "lower",
            Side::Upper => "upper",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableOptions {
    /// Total number of tabulation nodes, base point included once.
    pub grid_size: usize,
    /// Gap left at each open end of the support, as a fraction of its width
    /// (in the unit-interval coordinate for logit tables).
    pub margin: f64,
}

impl Default for TableOptions {
    fn default() -> Self {
        Self {
            grid_size: 2001,
            margin: 1e-4,
        }
    }
}

/// One monotone branch of the tabulated distance, on a uniform grid in the
/// internal coordinate.
#[derive(Debug, Clone)]
struct Branch {
    start: f64,
    end: f64,
    step: f64,
    d: Vec<f64>,
    /// dd/dx at the nodes.
    slope: Vec<f64>,
    /// Distance limit at the far (open) end; `None` when unbounded.
    limit: Option<f64>,
}

impl Branch {
    fn node(&self, i: usize) -> f64 {
        if i + 1 == self.d.len() {
            self.end
        } else {
            self.start + i as f64 * self.step
        }
    }

    fn cell(&self, x: f64) -> usize {
        let i = ((x - self.start) / self.step).floor();
        (i.max(0.0) as usize).min(self.d.len() - 2)
    }

    /// Cubic Hermite value and derivative inside the tabulated range.
    fn hermite(&self, x: f64) -> (f64, f64) {
        let i = self.cell(x);
        let x0 = self.node(i);
        let h = self.node(i + 1) - x0;
        let t = (x - x0) / h;
        let (f0, f1, m0, m1) = (self.d[i], self.d[i + 1], self.slope[i], self.slope[i + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let value = (2.0 * t3 - 3.0 * t2 + 1.0) * f0
            + (t3 - 2.0 * t2 + t) * h * m0
            + (-2.0 * t3 + 3.0 * t2) * f1
            + (t3 - t2) * h * m1;
        let deriv = (6.0 * t2 - 6.0 * t) * (f0 - f1) / h + (3.0 * t2 - 4.0 * t + 1.0) * m0 + (3.0 * t2 - 2.0 * t) * m1;
        (value, deriv)
    }

    /// Continuation past the far end: linear when the distance diverges,
    /// exponential approach to the limit otherwise. Both match value and
    /// slope at the last node.
    fn extrapolate(&self, d_end: f64, slope_end: f64, t: f64) -> (f64, f64) {
        let s = slope_end.abs();
        match self.limit {
            None => (d_end + s * t, s),
            Some(limit) if limit > d_end && s > 0.0 => {
                let gap = limit - d_end;
                let k = s / gap;
                let decay = (-k * t).exp();
                (limit - gap * decay, s * decay)
            }
            Some(_) => (d_end, 0.0),
        }
    }
}

/// Tabulated distance `d(θ)` with one monotone branch on each side of the
/// base point, interpolated by monotone cubic Hermite splines in the
/// internal coordinate.
#[derive(Debug, Clone)]
pub struct DistanceTable {
    support: Interval,
    transform: Transform,
    base_point: f64,
    base_internal: f64,
    lower: Branch,
    upper: Branch,
}

/// Tabulates `measure` over `support`; see [`DistanceTable::build`].
pub fn build_distance_table<M: DistanceMeasure + ?Sized>(
    measure: &M,
    support: Interval,
    base_point: f64,
    transform: Transform,
    options: &TableOptions,
) -> Result<DistanceTable> {
    DistanceTable::build(measure, support, base_point, transform, options)
}

impl DistanceTable {
    pub fn build<M: DistanceMeasure + ?Sized>(
        measure: &M,
        support: Interval,
        base_point: f64,
        transform: Transform,
        options: &TableOptions,
    ) -> Result<Self> {
        if options.grid_size < 101 {
            return Err(Error::domain(format!(
                "grid_size must be at least 101, got {}",
                options.grid_size
            )));
        }
        if !(options.margin > 0.0 && options.margin < 0.25) {
            return Err(Error::domain(format!("margin must lie in (0, 0.25), got {}", options.margin)));
        }
        if !support.contains(base_point) {
            return Err(Error::domain(format!("base point {base_point} outside the support")));
        }
        let m = options.margin;
        let (xmin, xmax) = match transform {
            Transform::Identity => (support.lo + m * support.width(), support.hi - m * support.width()),
            Transform::Logit => ((m / (1.0 - m)).ln(), ((1.0 - m) / m).ln()),
        };
        let xb = transform.to_internal(support, base_point);
        if !(xb > xmin && xb < xmax) {
            return Err(Error::domain(format!(
                "base point {base_point} falls inside the excluded margin"
            )));
        }

        let d_base = measure.distance(base_point)?;
        if !(d_base.abs() <= BASE_TOLERANCE) {
            return Err(Error::domain(format!(
                "distance at the base point is {d_base}, expected 0"
            )));
        }

        let intervals = options.grid_size - 1;
        let n_lower = ((intervals as f64 * (xb - xmin) / (xmax - xmin)).round() as usize).clamp(4, intervals - 4);
        let n_upper = intervals - n_lower;

        let lower_x: Vec<f64> = (0..=n_lower)
            .map(|i| if i == n_lower { xb } else { xmin + i as f64 * (xb - xmin) / n_lower as f64 })
            .collect();
        let upper_x: Vec<f64> = (0..=n_upper)
            .map(|i| if i == n_upper { xmax } else { xb + i as f64 * (xmax - xb) / n_upper as f64 })
            .collect();

        let eval = |xs: &[f64], base_at: usize| -> Result<Vec<f64>> {
            xs.par_iter()
                .enumerate()
                .map(|(i, &x)| {
                    if i == base_at {
                        return Ok(d_base);
                    }
                    let theta = transform.to_parameter(support, x);
                    let d = measure.distance(theta)?;
                    if !d.is_finite() || d < 0.0 {
                        return Err(Error::domain(format!("distance at {theta} is {d}")));
                    }
                    Ok(d)
                })
                .collect()
        };
        let lower_d = eval(&lower_x, n_lower)?;
        let upper_d = eval(&upper_x, 0)?;

        for i in 0..n_lower {
            if !(lower_d[i] > lower_d[i + 1]) {
                return Err(Error::NonMonotoneDistance {
                    side: Side::Lower.name(),
                    at: transform.to_parameter(support, lower_x[i]),
                });
            }
        }
        for i in 0..n_upper {
            if !(upper_d[i + 1] > upper_d[i]) {
                return Err(Error::NonMonotoneDistance {
                    side: Side::Upper.name(),
                    at: transform.to_parameter(support, upper_x[i + 1]),
                });
            }
        }

        let lower_step = (xb - xmin) / n_lower as f64;
        let upper_step = (xmax - xb) / n_upper as f64;
        let lower = Branch {
            start: xmin,
            end: xb,
            step: lower_step,
            slope: node_slopes(&lower_d, lower_step),
            d: lower_d,
            limit: measure.lower_limit(),
        };
        let upper = Branch {
            start: xb,
            end: xmax,
            step: upper_step,
            slope: node_slopes(&upper_d, upper_step),
            d: upper_d,
            limit: measure.upper_limit(),
        };
        Ok(Self {
            support,
            transform,
            base_point,
            base_internal: xb,
            lower,
            upper,
        })
    }

    pub fn support(&self) -> Interval {
        self.support
    }

    pub fn transform(&self) -> Transform {
        self.transform
    }

    pub fn base_point(&self) -> f64 {
        self.base_point
    }

    pub fn base_internal(&self) -> f64 {
        self.base_internal
    }

    /// Tabulated range of the internal coordinate.
    pub fn internal_range(&self) -> (f64, f64) {
        (self.lower.start, self.upper.end)
    }

    /// Tabulation nodes in the internal coordinate, increasing.
    pub fn internal_grid(&self) -> Vec<f64> {
        let mut out: Vec<f64> = (0..self.lower.d.len()).map(|i| self.lower.node(i)).collect();
        out.extend((1..self.upper.d.len()).map(|i| self.upper.node(i)));
        out
    }

    /// Tabulation nodes on the parameter scale, increasing.
    pub fn grid(&self) -> Vec<f64> {
        self.internal_grid()
            .into_iter()
            .map(|x| self.to_parameter(x))
            .collect()
    }

    /// Tabulated distances aligned with [`grid`](Self::grid).
    pub fn distances(&self) -> Vec<f64> {
        let mut out = self.lower.d.clone();
        out.extend_from_slice(&self.upper.d[1..]);
        out
    }

    pub fn to_internal(&self, theta: f64) -> f64 {
        if theta == self.base_point {
            return self.base_internal;
        }
        self.transform.to_internal(self.support, theta)
    }

    pub fn to_parameter(&self, x: f64) -> f64 {
        if x == self.base_internal {
            return self.base_point;
        }
        self.transform.to_parameter(self.support, x)
    }

    /// `dθ/dx`.
    pub fn jacobian(&self, x: f64) -> f64 {
        self.transform.jacobian(self.support, x)
    }

    pub fn side_of_internal(&self, x: f64) -> Side {
        if x < self.base_internal {
            Side::Lower
        } else {
            Side::Upper
        }
    }

    fn branch(&self, side: Side) -> &Branch {
        match side {
            Side::Lower => &self.lower,
            Side::Upper => &self.upper,
        }
    }

    /// Distance and `dd/dx` on the given branch, extrapolating past the far end.
    pub fn eval_on(&self, side: Side, x: f64) -> (f64, f64) {
        let b = self.branch(side);
        match side {
            Side::Lower if x < b.start => {
                let (d, s) = b.extrapolate(b.d[0], b.slope[0], b.start - x);
                (d, -s)
            }
            Side::Upper if x > b.end => {
                let last = b.d.len() - 1;
                b.extrapolate(b.d[last], b.slope[last], x - b.end)
            }
            _ => b.hermite(x.clamp(b.start, b.end)),
        }
    }

    /// Distance and `dd/dx` at internal coordinate `x`.
    pub fn eval_internal(&self, x: f64) -> (f64, f64) {
        self.eval_on(self.side_of_internal(x), x)
    }

    fn check_support(&self, theta: f64) -> Result<()> {
        if self.support.contains(theta) {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "{theta} outside the support ({}, {})",
                self.support.lo, self.support.hi
            )))
        }
    }

    /// Interpolated `d(θ)`.
    pub fn distance(&self, theta: f64) -> Result<f64> {
        self.check_support(theta)?;
        Ok(self.eval_internal(self.to_internal(theta)).0)
    }

    /// `dd/dθ` (the upper one-sided derivative at the base point).
    pub fn derivative(&self, theta: f64) -> Result<f64> {
        self.check_support(theta)?;
        let x = self.to_internal(theta);
        Ok(self.eval_internal(x).1 / self.jacobian(x))
    }

    /// Tabulated distance at the far node of a branch.
    pub fn end_distance(&self, side: Side) -> f64 {
        let b = self.branch(side);
        match side {
            Side::Lower => b.d[0],
            Side::Upper => b.d[b.d.len() - 1],
        }
    }

    /// Distance at the base node.
    pub fn base_distance(&self) -> f64 {
        self.upper.d[0]
    }

    /// Limit of the distance at the open end of a branch.
    pub fn limit(&self, side: Side) -> Option<f64> {
        self.branch(side).limit
    }

    /// Internal coordinates of the tabulation nodes on one branch, increasing.
    pub(crate) fn branch_nodes(&self, side: Side) -> Vec<f64> {
        let b = self.branch(side);
        (0..b.d.len()).map(|i| b.node(i)).collect()
    }

    /// Parameter value on `side` whose distance is `d`, for `d` between the
    /// base and far-end tabulated distances.
    pub fn invert(&self, side: Side, d: f64) -> Result<f64> {
        let b = self.branch(side);
        let (lo_d, hi_d) = (self.base_distance(), self.end_distance(side));
        if d <= lo_d {
            return Ok(self.base_point);
        }
        if !(d <= hi_d) {
            return Err(Error::domain(format!(
                "distance {d} beyond the tabulated {} branch (max {hi_d})",
                side.name()
            )));
        }
        // Nodes ordered by increasing distance when walking away from the base.
        let n = b.d.len();
        let by_distance = |k: usize| match side {
            Side::Upper => k,
            Side::Lower => n - 1 - k,
        };
        let (mut lo, mut hi) = (0usize, n - 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if b.d[by_distance(mid)] < d {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (mut xa, mut xb) = (b.node(by_distance(lo)), b.node(by_distance(hi)));
        for _ in 0..80 {
            let mid = 0.5 * (xa + xb);
            // `xa` always holds the smaller distance.
            if self.eval_on(side, mid).0 < d {
                xa = mid;
            } else {
                xb = mid;
            }
        }
        Ok(self.to_parameter(0.5 * (xa + xb)))
    }
}

/// Finite-difference slopes on a uniform grid: five-point central stencils
/// inside, one-sided fourth-order stencils at the two ends, then the
/// Fritsch-Carlson limiter so the Hermite interpolant stays monotone.
fn node_slopes(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    debug_assert!(n >= 5);
    let mut m = vec![0.0; n];
    for i in 2..n - 2 {
        m[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
    }
    m[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
    m[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h);
    let l = n - 1;
    m[l] = (25.0 * f[l] - 48.0 * f[l - 1] + 36.0 * f[l - 2] - 16.0 * f[l - 3] + 3.0 * f[l - 4]) / (12.0 * h);
    m[l - 1] = (3.0 * f[l] + 10.0 * f[l - 1] - 18.0 * f[l - 2] + 6.0 * f[l - 3] - f[l - 4]) / (12.0 * h);

    for k in 0..n - 1 {
        let secant = (f[k + 1] - f[k]) / h;
        for j in [k, k + 1] {
            if m[j] * secant < 0.0 {
                m[j] = 0.0;
            }
        }
        let (a, b) = (m[k] / secant, m[k + 1] / secant);
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            m[k] = tau * a * secant;
            m[k + 1] = tau * b * secant;
        }
    }
    m
}
