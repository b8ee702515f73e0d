//! Time quadrature: Gauss–Legendre rules, dyadic panels refined toward
//! `t = 0`, and composite-trapezoid grids with geometric refinement.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut x = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Quadrature nodes and weights on `[0, T]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl TimeRule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }

    /// Trapezoid weights on a sorted grid.
    pub fn trapezoid(grid: &[f64]) -> TimeRule {
        let mut weights = vec![0.0; grid.len()];
        for (i, w) in grid.windows(2).enumerate() {
            let h = 0.5 * (w[1] - w[0]);
            weights[i] += h;
            weights[i + 1] += h;
        }
        TimeRule { nodes: grid.to_vec(), weights }
    }
}

/// Composite Gauss–Legendre rule on the dyadic panels `[T/2, T]`,
/// `[T/4, T/2]`, … down to a first panel `[0, e]` with `e ≤ min_edge`.
pub fn dyadic_gauss_rule(horizon: f64, min_edge: f64, points: usize) -> Result<TimeRule> {
    dyadic_gauss_rule_split(horizon, min_edge, points, 1)
}

/// As [`dyadic_gauss_rule`] with every panel cut into `pieces` equal parts.
pub fn dyadic_gauss_rule_split(
    horizon: f64,
    min_edge: f64,
    points: usize,
    pieces: usize,
) -> Result<TimeRule> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::domain("time horizon must be positive and finite"));
    }
    if !(min_edge > 0.0) {
        return Err(Error::domain("minimum panel edge must be positive"));
    }
    let (x, w) = gauss_legendre(points.max(1));
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let pieces = pieces.max(1);
    let mut push_panel = |a: f64, b: f64| {
        let step = (b - a) / pieces as f64;
        for p in 0..pieces {
            let lo = a + step * p as f64;
            let (mid, half) = (lo + 0.5 * step, 0.5 * step);
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + half * xi);
                weights.push(half * wi);
            }
        }
    };
    let mut right = horizon;
    while right > min_edge {
        let left = 0.5 * right;
        push_panel(left, right);
        right = left;
    }
    push_panel(0.0, right);
    Ok(TimeRule { nodes, weights })
}

/// Sorted trapezoid grid on `[0, T]`: `uniform` equal steps merged with the
/// geometric points `T·2^{-j/per_octave}` down to `t_min`.
pub fn refined_time_grid(
    horizon: f64,
    uniform: usize,
    per_octave: usize,
    t_min: f64,
) -> Result<Vec<f64>> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::domain("time horizon must be positive and finite"));
    }
    if uniform == 0 || per_octave == 0 {
        return Err(Error::domain("time grid needs at least one uniform step and octave point"));
    }
    let mut grid: Vec<f64> = (0..=uniform).map(|i| horizon * i as f64 / uniform as f64).collect();
    let ratio = libm::exp2(-1.0 / per_octave as f64);
    let mut j = 0i32;
    loop {
        j += 1;
        let t = horizon * libm::pow(ratio, f64::from(j));
        if !(t > t_min) || j > 100_000 {
            break;
        }
        grid.push(t);
    }
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    grid.dedup();
    Ok(grid)
}

/// Composite trapezoid rule for samples `f` at sorted abscissae `t`.
pub fn trapezoid(t: &[f64], f: &[f64]) -> f64 {
    t.windows(2).zip(f.windows(2)).map(|(tw, fw)| 0.5 * (tw[1] - tw[0]) * (fw[0] + fw[1])).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [1usize, 2, 5, 24] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for deg in 0..2 * n {
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn dyadic_rule_integrates_fast_exponentials() {
        for lambda in [1.0, 50.0, 3000.0, 1e5] {
            let rule = dyadic_gauss_rule(1.0, 1e-3 / (2.0 * lambda), 24).unwrap();
            let q: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(t, w)| w * libm::exp(-2.0 * lambda * t))
                .sum();
            let exact = -libm::expm1(-2.0 * lambda) / (2.0 * lambda);
            assert!(((q - exact) / exact).abs() < 1e-13, "lambda={lambda}");
        }
    }

    #[test]
    fn split_panels_and_trapezoid_weights() {
        let a = dyadic_gauss_rule(2.0, 1e-3, 6).unwrap();
        let b = dyadic_gauss_rule_split(2.0, 1e-3, 6, 3).unwrap();
        assert_eq!(b.nodes.len(), 3 * a.nodes.len());
        let f = |t: f64| libm::cos(3.0 * t);
        let exact = libm::sin(6.0) / 3.0;
        assert!((b.integrate(f) - exact).abs() < 1e-10);
        let g = [0.0, 0.25, 1.0];
        let r = TimeRule::trapezoid(&g);
        assert_eq!(r.weights, vec![0.125, 0.5, 0.375]);
        assert_eq!(r.integrate(|t| t), trapezoid(&g, &[0.0, 0.25, 1.0]));
    }

    #[test]
    fn trapezoid_on_refined_grid() {
        let g = refined_time_grid(1.0, 4, 1, 0.005).unwrap();
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(g.contains(&0.0078125));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        let f: Vec<f64> = g.iter().map(|t| 3.0 * t + 1.0).collect();
        assert!((trapezoid(&g, &f) - 2.5).abs() < 1e-15);
    }
}
