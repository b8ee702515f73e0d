//! Independent oracles and the pass/fail report used by the acceptance
//! suite. Nothing here calls into the numerical routines it checks.

use std::fmt;
use std::time::{Duration, Instant};

/// Outcome of one acceptance criterion.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    /// Measured quantities against their pinned tolerances.
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl Verdict {
    /// Passing also requires finishing within the time budget.
    pub fn ok(&self) -> bool {
        self.passed && self.elapsed <= self.limit
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.ok() { "PASS" } else { "FAIL" };
        let slow = if self.elapsed > self.limit { " (over time budget)" } else { "" };
        write!(
            f,
            "[{tag}] C{:<2} {}: {} [{:.2?} / {:?}{slow}]",
            self.id, self.title, self.detail, self.elapsed, self.limit
        )
    }
}

/// Times `body`, which returns `(passed, detail)`.
pub fn criterion(id: u32, title: &'static str, limit_secs: u64, body: impl FnOnce() -> (bool, String)) -> Verdict {
    let start = Instant::now();
    let (passed, detail) = body();
    Verdict { id, title, passed, detail, elapsed: start.elapsed(), limit: Duration::from_secs(limit_secs) }
}

/// Ordered pairs of positive integers with `a² + b² = r`, by enumeration.
pub fn count_two_squares(r: u64) -> u64 {
    (1..).take_while(|a| a * a < r).filter(|a| is_square(r - a * a)).count() as u64
}

fn is_square(v: u64) -> bool {
    let s = v.isqrt();
    s > 0 && s * s == v
}

/// `max ‖c‖₂` over `{c : |Σ_j rows[i][j] c_j| ≤ 1 ∀i}`, attained at a vertex;
/// `min_{‖c‖=1} ‖Ec‖_∞` is its reciprocal. Rows must span `R^n`, `n ≤ 3`.
pub fn polytope_radius(rows: &[Vec<f64>]) -> f64 {
    let n = rows[0].len();
    let mut best: f64 = 0.0;
    for s in subsets(rows.len(), n) {
        let a: Vec<Vec<f64>> = s.iter().map(|&i| rows[i].clone()).collect();
        for signs in 0..(1u32 << n) {
            let b: Vec<f64> = (0..n).map(|i| if signs >> i & 1 == 1 { -1.0 } else { 1.0 }).collect();
            let Some(c) = cramer(&a, &b) else { continue };
            let feasible =
                rows.iter().all(|r| r.iter().zip(&c).map(|(x, y)| x * y).sum::<f64>().abs() <= 1.0 + 1e-12);
            if feasible {
                best = best.max(c.iter().map(|v| v * v).sum::<f64>().sqrt());
            }
        }
    }
    best
}

fn det(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
    }
}

fn cramer(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let d = det(a);
    let scale: f64 = a.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
    if d.abs() <= 1e-13 * scale.powi(a.len() as i32) {
        return None;
    }
    Some(
        (0..a.len())
            .map(|col| {
                let m: Vec<Vec<f64>> = a
                    .iter()
                    .zip(b)
                    .map(|(row, &bi)| {
                        let mut r = row.clone();
                        r[col] = bi;
                        r
                    })
                    .collect();
                det(&m) / d
            })
            .collect(),
    )
}

fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if m < k {
        return vec![];
    }
    let mut out = subsets(m - 1, k);
    for mut s in subsets(m - 1, k - 1) {
        s.push(m - 1);
        out.push(s);
    }
    out
}

/// Composite Simpson rule on `[0, t]` over geometrically graded panels
/// `[t·2^{-j-1}, t·2^{-j}]` (plus `[0, t·2^{-levels}]`), `per_panel` even
/// subintervals each. Suited to sums of decaying exponentials.
pub fn graded_simpson(f: &impl Fn(f64) -> f64, t: f64, levels: u32, per_panel: usize) -> f64 {
    assert!(per_panel % 2 == 0 && per_panel > 0);
    let simpson = |a: f64, b: f64| {
        let h = (b - a) / per_panel as f64;
        let mut s = f(a) + f(b);
        for i in 1..per_panel {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    };
    let mut total = simpson(0.0, t * 0.5f64.powi(levels as i32));
    for j in 0..levels {
        total += simpson(t * 0.5f64.powi(j as i32 + 1), t * 0.5f64.powi(j as i32));
    }
    total
}

/// [`graded_simpson`] at `n` and `2n` subintervals combined by one
/// Richardson step, sixth order.
pub fn graded_romberg(f: impl Fn(f64) -> f64, t: f64, levels: u32, n: usize) -> f64 {
    let coarse = graded_simpson(&f, t, levels, n);
    let fine = graded_simpson(&f, t, levels, 2 * n);
    (16.0 * fine - coarse) / 15.0
}

/// `√2 sin(πkx)` evaluated with the standard library only.
pub fn sine_mode(k: u32, x: f64) -> f64 {
    std::f64::consts::SQRT_2 * (std::f64::consts::PI * f64::from(k) * x).sin()
}

/// Least-squares slope of `y` on `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
