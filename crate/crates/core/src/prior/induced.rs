use super::table::{DistanceTable, Side};
use crate::error::{Error, Result};

/// Points per branch of the distance axis.
const POINTS_PER_SIDE: usize = 2000;

/// One point of a density on the distance scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityPoint {
    /// Distance, negative below the base point when signed.
    pub distance: f64,
    /// Parameter value mapped to `distance` (the lower-branch value for
    /// unsigned output).
    pub theta: f64,
    pub density: f64,
}

/// Density of `d(θ)` when `θ` has density `prior`.
///
/// With `signed`, the axis is `sign(θ − θ₀)·d(θ)` and the base point
/// appears twice, as the left and then the right limit. Otherwise the two
/// branches are summed on `d ≥ 0`.
pub fn induced_distance_density(
    prior: impl Fn(f64) -> f64,
    table: &DistanceTable,
    signed: bool,
) -> Result<Vec<DensityPoint>> {
    let lower_end = table.end_distance(Side::Lower);
    let upper_end = table.end_distance(Side::Upper);
    let base = table.base_distance();

    // Density contributed by one branch at distance `d`.
    let branch = |side: Side, d: f64| -> Result<(f64, f64)> {
        let d = d.max(base + 1e-9 * (upper_end.max(lower_end) - base));
        let theta = table.invert(side, d)?;
        let x = table.to_internal(theta);
        let slope = table.eval_on(side, x).1 / table.jacobian(x);
        if !(slope.abs() > 0.0) {
            return Err(Error::NonMonotoneDistance {
                side: side.name(),
                at: theta,
            });
        }
        Ok((theta, prior(theta) / slope.abs()))
    };

    let axis = |end: f64| -> Vec<f64> {
        (0..=POINTS_PER_SIDE)
            .map(|i| base + (end - base) * i as f64 / POINTS_PER_SIDE as f64)
            .collect()
    };

    let mut out = Vec::with_capacity(2 * POINTS_PER_SIDE + 2);
    if signed {
        for &d in axis(lower_end).iter().rev() {
            let (theta, density) = branch(Side::Lower, d)?;
            out.push(DensityPoint {
                distance: -d,
                theta,
                density,
            });
        }
        for &d in &axis(upper_end) {
            let (theta, density) = branch(Side::Upper, d)?;
            out.push(DensityPoint {
                distance: d,
                theta,
                density,
            });
        }
    } else {
        for &d in &axis(upper_end.max(lower_end)) {
            let mut total = 0.0;
            let mut theta = f64::NAN;
            for (side, end) in [(Side::Upper, upper_end), (Side::Lower, lower_end)] {
                if d <= end {
                    let (t, density) = branch(side, d)?;
                    total += density;
                    theta = t;
                }
            }
            out.push(DensityPoint {
                distance: d,
                theta,
                density: total,
            });
        }
    }
    Ok(out)
}
