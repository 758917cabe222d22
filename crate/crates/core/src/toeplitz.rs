//! Symmetric positive-definite Toeplitz correlation matrices.
//!
//! Log-determinants, solves and quadratic forms all go through the
//! Levinson-Durbin recursion in O(n²) time and O(n) memory. Positive
//! definiteness is checked inside the recursion: every innovation variance
//! must stay above [`PD_TOLERANCE`] (relative to `γ(0) = 1`).

use crate::error::{Error, Result};

/// Smallest innovation variance accepted by the recursion, relative to `γ(0)`.
pub const PD_TOLERANCE: f64 = 1e-12;

/// Lag-indexed autocorrelations `γ(0), …, γ(n−1)` of a stationary process.
///
/// `γ(0)` is exactly one and every lag lies in `[-1, 1]`. Positive
/// definiteness of the implied Toeplitz matrix is only verified when a
/// recursion runs over it.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSequence(Vec<f64>);

impl CorrelationSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("correlation sequence must be non-empty"));
        }
        if values[0] != 1.0 {
            return Err(Error::domain(format!(
                "correlation at lag 0 must be exactly 1, got {}",
                values[0]
            )));
        }
        if let Some((k, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || v.abs() > 1.0)
        {
            return Err(Error::domain(format!(
                "correlation at lag {k} is {v}, outside [-1, 1]"
            )));
        }
        Ok(Self(values))
    }

    /// Builds a sequence whose invariants the caller already guarantees.
    pub(crate) fn from_trusted(values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty() && values[0] == 1.0);
        Self(values)
    }

    /// White noise: `γ(0) = 1`, all other lags zero.
    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "identity sequence needs n >= 1");
        let mut values = vec![0.0; n];
        values[0] = 1.0;
        Self(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }
}

/// Output of a multi right-hand-side Levinson solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzSolution {
    /// `ln |Σ|`.
    pub log_det: f64,
    /// `Σ⁻¹ b` for each right-hand side, in input order.
    pub solutions: Vec<Vec<f64>>,
}

#[inline]
fn check_innovation(order: usize, variance: f64) -> Result<()> {
    if variance > PD_TOLERANCE {
        Ok(())
    } else {
        Err(Error::NotPositiveDefinite { order, variance })
    }
}

/// Σ_{i<k} a[i] · b[k-1-i]
#[inline]
fn reversed_dot(a: &[f64], b: &[f64], k: usize) -> f64 {
    a[..k]
        .iter()
        .zip(b[..k].iter().rev())
        .map(|(x, y)| x * y)
        .sum()
}

/// Durbin step: y ← [y + α·reverse(y); α], in place over the first `k + 1` slots.
#[inline]
fn durbin_update(y: &mut [f64], alpha: f64, k: usize) {
    let (mut i, mut j) = (0usize, k - 1);
    while i < j {
        let (yi, yj) = (y[i], y[j]);
        y[i] = yi + alpha * yj;
        y[j] = yj + alpha * yi;
        i += 1;
        j -= 1;
    }
    if i == j {
        y[i] += alpha * y[i];
    }
    y[k] = alpha;
}

/// `ln |Σ|` as the sum of log innovation variances from the Durbin recursion.
pub fn levinson_logdet(corr: &CorrelationSequence) -> Result<f64> {
    let r = corr.values();
    let n = r.len();
    if n == 1 {
        return Ok(0.0);
    }
    let mut y = vec![0.0; n];
    y[0] = -r[1];
    let mut alpha = -r[1];
    let mut beta = 1.0;
    let mut log_det = 0.0;
    for k in 1..n {
        beta *= (1.0 - alpha) * (1.0 + alpha);
        check_innovation(k, beta)?;
        log_det += beta.ln();
        if k < n - 1 {
            alpha = (-r[k + 1] - reversed_dot(&r[1..], &y, k)) / beta;
            durbin_update(&mut y, alpha, k);
        }
    }
    Ok(log_det)
}

/// Solves `Σ x = b` for several right-hand sides at once, sharing the Durbin
/// recursion, and returns `ln |Σ|` alongside.
pub fn levinson_solve_many(corr: &CorrelationSequence, rhs: &[&[f64]]) -> Result<ToeplitzSolution> {
    let r = corr.values();
    let n = r.len();
    for b in rhs {
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
    }
    let mut xs: Vec<Vec<f64>> = rhs
        .iter()
        .map(|b| {
            let mut x = vec![0.0; n];
            x[0] = b[0];
            x
        })
        .collect();
    if n == 1 {
        return Ok(ToeplitzSolution {
            log_det: 0.0,
            solutions: xs,
        });
    }

    let mut y = vec![0.0; n];
    y[0] = -r[1];
    let mut alpha = -r[1];
    let mut beta = 1.0;
    let mut log_det = 0.0;
    for k in 1..n {
        beta *= (1.0 - alpha) * (1.0 + alpha);
        check_innovation(k, beta)?;
        log_det += beta.ln();
        for (x, b) in xs.iter_mut().zip(rhs) {
            let mu = (b[k] - reversed_dot(&r[1..], x, k)) / beta;
            for (xi, yi) in x[..k].iter_mut().zip(y[..k].iter().rev()) {
                *xi += mu * yi;
            }
            x[k] = mu;
        }
        if k < n - 1 {
            alpha = (-r[k + 1] - reversed_dot(&r[1..], &y, k)) / beta;
            durbin_update(&mut y, alpha, k);
        }
    }
    Ok(ToeplitzSolution {
        log_det,
        solutions: xs,
    })
}

/// Solves `Σ x = rhs`.
pub fn levinson_solve(corr: &CorrelationSequence, rhs: &[f64]) -> Result<Vec<f64>> {
    let mut out = levinson_solve_many(corr, &[rhs])?;
    Ok(out.solutions.pop().expect("one right-hand side"))
}

/// `vᵀ Σ⁻¹ v`.
pub fn quadratic_form(corr: &CorrelationSequence, v: &[f64]) -> Result<f64> {
    let x = levinson_solve(corr, v)?;
    Ok(dot(v, &x))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dense O(n³) reference routines. These exist to cross-check the Levinson
/// path and are not used by any model code.
pub mod dense {
    use super::CorrelationSequence;
    use nalgebra::{DMatrix, DVector};

    pub fn matrix(corr: &CorrelationSequence) -> DMatrix<f64> {
        let r = corr.values();
        let n = r.len();
        DMatrix::from_fn(n, n, |i, j| r[i.abs_diff(j)])
    }

    /// `ln |Σ|` from a Cholesky factorisation; `None` if Σ is not positive definite.
    pub fn cholesky_logdet(corr: &CorrelationSequence) -> Option<f64> {
        let chol = matrix(corr).cholesky()?;
        Some(2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>())
    }

    pub fn lu_solve(corr: &CorrelationSequence, rhs: &[f64]) -> Option<Vec<f64>> {
        let b = DVector::from_column_slice(rhs);
        matrix(corr).lu().solve(&b).map(|x| x.as_slice().to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ar1(phi: f64, n: usize) -> CorrelationSequence {
        CorrelationSequence::new((0..n).map(|k| phi.powi(k as i32)).collect()).unwrap()
    }

    #[test]
    fn rejects_bad_sequences() {
        assert!(CorrelationSequence::new(vec![]).is_err());
        assert!(CorrelationSequence::new(vec![0.9, 0.1]).is_err());
        assert!(CorrelationSequence::new(vec![1.0, 1.2]).is_err());
        assert!(CorrelationSequence::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn identity_logdet_is_zero() {
        for n in [1, 2, 7, 100] {
            assert_eq!(levinson_logdet(&CorrelationSequence::identity(n)).unwrap(), 0.0);
        }
    }

    #[test]
    fn ar1_logdet_n3() {
        // det [[1,.5,.25],[.5,1,.5],[.25,.5,1]] = 1(1-.25) - .5(.5-.125) + .25(.25-.25) = 0.5625
        let ld = levinson_logdet(&ar1(0.5, 3)).unwrap();
        assert!((ld - 0.5625f64.ln()).abs() < 1e-14);
        assert!((ld - (-0.5754)).abs() < 1e-4);
    }

    #[test]
    fn solve_identity_and_ar1_by_hand() {
        let v = [3.0, -1.0, 2.5];
        assert_eq!(levinson_solve(&CorrelationSequence::identity(3), &v).unwrap(), v);

        let x = levinson_solve(&ar1(0.5, 2), &[1.0, 0.0]).unwrap();
        assert!((x[0] - 4.0 / 3.0).abs() < 1e-14);
        assert!((x[1] + 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn quadratic_forms_by_hand() {
        let q = quadratic_form(&CorrelationSequence::identity(2), &[3.0, 4.0]).unwrap();
        assert!((q - 25.0).abs() < 1e-14);
        let q = quadratic_form(&ar1(0.5, 2), &[1.0, 1.0]).unwrap();
        assert!((q - 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn detects_non_positive_definite() {
        // γ(1) = γ(2) = 1 makes the 3×3 matrix singular.
        let corr = CorrelationSequence::new(vec![1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            levinson_logdet(&corr),
            Err(Error::NotPositiveDefinite { order: 1, .. })
        ));
        // [[1,.9,-.9],...] is indefinite.
        let corr = CorrelationSequence::new(vec![1.0, 0.9, -0.9]).unwrap();
        assert!(levinson_logdet(&corr).is_err());
        assert!(dense::cholesky_logdet(&corr).is_none());
        assert!(levinson_solve(&corr, &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        assert_eq!(
            levinson_solve(&CorrelationSequence::identity(3), &[1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        );
    }

    #[test]
    fn multi_rhs_matches_single() {
        let corr = ar1(-0.7, 40);
        let a: Vec<f64> = (0..40).map(|i| (i as f64).sin()).collect();
        let b: Vec<f64> = (0..40).map(|i| 1.0 + i as f64).collect();
        let both = levinson_solve_many(&corr, &[&a, &b]).unwrap();
        assert_eq!(both.solutions[0], levinson_solve(&corr, &a).unwrap());
        assert_eq!(both.solutions[1], levinson_solve(&corr, &b).unwrap());
        assert!((both.log_det - levinson_logdet(&corr).unwrap()).abs() < 1e-12);
    }

    /// Random positive-definite sequences: mixtures of AR(1) correlations
    /// with positive weights are positive definite.
    fn mixture_sequence() -> impl Strategy<Value = CorrelationSequence> {
        (
            2usize..80,
            prop::collection::vec((-0.95f64..0.95, 0.05f64..1.0), 1..4),
        )
            .prop_map(|(n, comps)| {
                let total: f64 = comps.iter().map(|c| c.1).sum();
                let mut v: Vec<f64> = (0..n)
                    .map(|k| comps.iter().map(|(p, w)| w / total * p.powi(k as i32)).sum())
                    .collect();
                v[0] = 1.0;
                CorrelationSequence::new(v).unwrap()
            })
    }

    proptest! {
        #[test]
        fn logdet_and_solve_match_dense(corr in mixture_sequence(), seed in 0u64..1000) {
            let n = corr.len();
            let ld = levinson_logdet(&corr).unwrap();
            let dense_ld = dense::cholesky_logdet(&corr).unwrap();
            prop_assert!((ld - dense_ld).abs() < 1e-8);

            let rhs: Vec<f64> = (0..n).map(|i| ((i as u64 * 7919 + seed) % 101) as f64 / 50.0 - 1.0).collect();
            let x = levinson_solve(&corr, &rhs).unwrap();
            let m = dense::matrix(&corr);
            let resid = &m * nalgebra::DVector::from_column_slice(&x) - nalgebra::DVector::from_column_slice(&rhs);
            let scale = rhs.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
            prop_assert!(resid.amax() <= 1e-8 * scale);
        }

        #[test]
        fn quadratic_form_nonnegative(corr in mixture_sequence(), scale in -5.0f64..5.0) {
            let v: Vec<f64> = (0..corr.len()).map(|i| scale * ((i % 3) as f64 - 1.0)).collect();
            let q = quadratic_form(&corr, &v).unwrap();
            if v.iter().all(|x| *x == 0.0) {
                prop_assert_eq!(q, 0.0);
            } else {
                prop_assert!(q > 0.0);
            }
        }
    }
}
