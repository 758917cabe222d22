//! One-dimensional quadrature rules.

use std::sync::OnceLock;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Three-term recurrence for P_n(x) and its derivative.
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl10() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(10))
}

/// Ten-point Gauss-Legendre on `[a, b]`.
pub fn integrate_gl10(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gl10();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    half * nodes
        .iter()
        .zip(weights)
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
}

/// Weighting scheme along one axis of the hyperparameter grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisRule {
    Trapezoid,
    Simpson,
}

/// Nodes and weights along one axis, optionally forcing a node onto
/// `breakpoint` so that an integrand with a kink there is integrated
/// piecewise.
pub fn axis_nodes(a: f64, b: f64, nodes: usize, breakpoint: Option<f64>, rule: AxisRule) -> (Vec<f64>, Vec<f64>) {
    let axis = split_axis_nodes(a, b, nodes, breakpoint, rule);
    (axis.nodes, axis.weights)
}

/// Quadrature axis with the weight of the breakpoint node kept apart by side.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Index of the breakpoint node with its left and right panel weights,
    /// for integrands that jump there.
    pub split: Option<(usize, f64, f64)>,
}

pub fn split_axis_nodes(a: f64, b: f64, nodes: usize, breakpoint: Option<f64>, rule: AxisRule) -> Axis {
    assert!(nodes >= 3 && b > a);
    let intervals = nodes - 1;
    let split = breakpoint.filter(|&c| c > a && c < b).and_then(|c| {
        let step = if rule == AxisRule::Simpson { 2 } else { 1 };
        let raw = (intervals as f64 * (c - a) / (b - a)).round() as usize;
        let mut left = (raw / step) * step;
        left = left.clamp(step, intervals - step);
        // Both pieces need room for at least one panel.
        (left >= step && intervals - left >= step).then_some((c, left))
    });
    match split {
        None => {
            let (nodes, weights) = piece(a, b, intervals, rule);
            Axis {
                nodes,
                weights,
                split: None,
            }
        }
        Some((c, left)) => {
            let (mut x, mut w) = piece(a, c, left, rule);
            let (x2, w2) = piece(c, b, intervals - left, rule);
            // Shared node at the breakpoint.
            let w_left = *w.last().unwrap();
            *w.last_mut().unwrap() += w2[0];
            x.extend_from_slice(&x2[1..]);
            w.extend_from_slice(&w2[1..]);
            Axis {
                nodes: x,
                weights: w,
                split: Some((left, w_left, w2[0])),
            }
        }
    }
}

fn piece(a: f64, b: f64, intervals: usize, rule: AxisRule) -> (Vec<f64>, Vec<f64>) {
    let h = (b - a) / intervals as f64;
    let x: Vec<f64> = (0..=intervals)
        .map(|i| if i == intervals { b } else { a + i as f64 * h })
        .collect();
    let w = match rule {
        AxisRule::Trapezoid => (0..=intervals)
            .map(|i| if i == 0 || i == intervals { 0.5 * h } else { h })
            .collect(),
        AxisRule::Simpson if intervals == 1 => vec![0.5 * h, 0.5 * h],
        AxisRule::Simpson => {
            // Odd panel counts fall back to a 3/8 rule on the last three panels.
            let mut w = vec![0.0; intervals + 1];
            let simpson_end = if intervals.is_multiple_of(2) { intervals } else { intervals - 3 };
            for k in (0..simpson_end).step_by(2) {
                w[k] += h / 3.0;
                w[k + 1] += 4.0 * h / 3.0;
                w[k + 2] += h / 3.0;
            }
            if simpson_end < intervals {
                let k = simpson_end;
                w[k] += 3.0 * h / 8.0;
                w[k + 1] += 9.0 * h / 8.0;
                w[k + 2] += 9.0 * h / 8.0;
                w[k + 3] += 3.0 * h / 8.0;
            }
            w
        }
    };
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let (x, w) = gauss_legendre(10);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // Degree 19 is integrated exactly.
        let i: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((i - 2.0 / 19.0).abs() < 1e-14);
        let (x, w) = gauss_legendre(1);
        assert_eq!((x[0], w[0]), (0.0, 2.0));
    }

    #[test]
    fn gl10_integrates_exp() {
        let v = integrate_gl10(f64::exp, 0.0, 1.0);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn axis_rules_integrate_smooth_functions() {
        for rule in [AxisRule::Trapezoid, AxisRule::Simpson] {
            for bp in [None, Some(0.3), Some(-5.0)] {
                let (x, w) = axis_nodes(-1.0, 2.0, 61, bp, rule);
                assert_eq!(x.len(), 61);
                let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.cos()).sum();
                let exact = 2f64.sin() + 1f64.sin();
                let tol = if rule == AxisRule::Simpson { 1e-7 } else { 1e-3 };
                assert!((v - exact).abs() < tol, "{rule:?} {bp:?}: {v}");
            }
        }
    }

    #[test]
    fn split_weights_integrate_a_jump() {
        let axis = split_axis_nodes(-1.0, 1.0, 41, Some(0.3), AxisRule::Simpson);
        let (k, wl, wr) = axis.split.unwrap();
        assert_eq!(axis.nodes[k], 0.3);
        assert!((wl + wr - axis.weights[k]).abs() < 1e-15);
        // Step from 1 to 2 at the breakpoint.
        let f = |x: f64| if x < 0.3 { 1.0 } else { 2.0 };
        let v: f64 = axis
            .nodes
            .iter()
            .zip(&axis.weights)
            .enumerate()
            .map(|(i, (x, w))| if i == k { wl * 1.0 + wr * 2.0 } else { w * f(*x) })
            .sum();
        assert!((v - (1.3 + 1.4)).abs() < 1e-12);
        assert!(split_axis_nodes(0.5, 1.0, 41, Some(0.3), AxisRule::Simpson).split.is_none());
    }

    #[test]
    fn breakpoint_lands_on_a_node() {
        let (x, _) = axis_nodes(-1.0, 1.0, 61, Some(0.123), AxisRule::Simpson);
        assert!(x.contains(&0.123));
        // A kink at the breakpoint is integrated to Simpson accuracy.
        let (x, w) = axis_nodes(-1.0, 1.0, 61, Some(0.123), AxisRule::Simpson);
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * (-(x - 0.123f64).abs()).exp()).sum();
        let exact = (1.0 - (-1.123f64).exp()) + (1.0 - (-0.877f64).exp());
        assert!((v - exact).abs() < 1e-7);
    }
}
