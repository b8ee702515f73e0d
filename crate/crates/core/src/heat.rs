//! Heat semigroup on `(0,1)^n` by eigen-expansion, observability ratios and
//! constants, and the Lebeau–Robbiano time schedules.
//!
//! A solution with initial coefficients `c` is `u(t) = Σ c_j e^{-λ_j t} φ_j`;
//! every quantity below is computed from that closed form, so there is no
//! time-stepping error.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;

use crate::eigenbasis::{CoefVec, SpectrumSlice};
use crate::linalg::{self, norm2, solve_upper, solve_upper_transpose, top_right_singular};
use crate::pointsets::PointSet;
use crate::quadrature::{dyadic_gauss_rule, dyadic_gauss_rule_split, refined_time_grid, TimeRule};
use crate::spectral::{eigenspace_witness, eval_matrix, EvalMatrix, SpectralFit};
use crate::{default_nullspace_tol, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct HeatState<'a> {
    slice: &'a SpectrumSlice,
    coefs: CoefVec,
    time: f64,
}

impl<'a> HeatState<'a> {
    pub fn new(slice: &'a SpectrumSlice, coefs: CoefVec) -> Result<Self> {
        coefs.check_aligned(slice)?;
        Ok(HeatState { slice, coefs, time: 0.0 })
    }

    pub fn slice(&self) -> &'a SpectrumSlice {
        self.slice
    }

    pub fn coefs(&self) -> &CoefVec {
        &self.coefs
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Exact solution operator `e^{Δ·dt}`.
    pub fn evolve(&self, dt: f64) -> Result<HeatState<'a>> {
        if !(dt >= 0.0) || !dt.is_finite() {
            return Err(Error::domain("evolution step must be finite and >= 0"));
        }
        let coefs = self
            .coefs
            .as_slice()
            .iter()
            .zip(self.slice.modes())
            .map(|(c, m)| c * libm::exp(-m.eigenvalue() * dt))
            .collect();
        Ok(HeatState { slice: self.slice, coefs: CoefVec::new(coefs), time: self.time + dt })
    }

    pub fn l2_norm(&self) -> f64 {
        self.coefs.norm()
    }
}

/// Coefficients of `u(t)` for initial data `c`.
pub fn evolved(slice: &SpectrumSlice, c: &[f64], t: f64) -> Vec<f64> {
    c.iter().zip(slice.modes()).map(|(cj, m)| cj * libm::exp(-m.eigenvalue() * t)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TerminalNorm {
    L2,
    /// Maximum over a uniform grid with `per_axis` points per axis, plus a
    /// Bernstein resolution bound.
    LInf { per_axis: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceKind {
    /// `∫_0^T sup_{x∈ω} |u(t,x)| dt`
    SupL1,
    /// `∫_0^T Σ_{x∈ω} |u(t,x)|² dt`; ratios are then of squared quantities.
    L2Sum,
}

/// Time rule for trace integrals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeQuadrature {
    /// Composite trapezoid on `uniform` equal steps merged with geometric
    /// points `T·2^{-j/per_octave}` down to `t_min_factor / λ_max`.
    Trapezoid { uniform: usize, per_octave: usize, t_min_factor: f64 },
    /// Gauss–Legendre on dyadic panels down to `panel_floor / (2λ_max)`,
    /// each panel cut into `pieces`.
    Gauss { points: usize, panel_floor: f64, pieces: usize },
}

impl Default for TimeQuadrature {
    fn default() -> Self {
        TimeQuadrature::Gauss { points: 16, panel_floor: 1e-3, pieces: 4 }
    }
}

impl TimeQuadrature {
    /// The same family at twice the resolution.
    pub fn doubled(self) -> Self {
        match self {
            TimeQuadrature::Trapezoid { uniform, per_octave, t_min_factor } => TimeQuadrature::Trapezoid {
                uniform: 2 * uniform,
                per_octave: 2 * per_octave,
                t_min_factor: 0.5 * t_min_factor,
            },
            TimeQuadrature::Gauss { points, panel_floor, pieces } => {
                TimeQuadrature::Gauss { points, panel_floor: 0.5 * panel_floor, pieces: 2 * pieces }
            }
        }
    }

    pub fn rule(&self, horizon: f64, lambda_max: f64) -> Result<TimeRule> {
        let lambda_max = lambda_max.max(f64::MIN_POSITIVE);
        match *self {
            TimeQuadrature::Trapezoid { uniform, per_octave, t_min_factor } => {
                let grid = refined_time_grid(horizon, uniform, per_octave, t_min_factor / lambda_max)?;
                Ok(TimeRule::trapezoid(&grid))
            }
            TimeQuadrature::Gauss { points, panel_floor, pieces } => {
                dyadic_gauss_rule_split(horizon, panel_floor / (2.0 * lambda_max), points, pieces)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ObsExperiment<'a> {
    pub slice: &'a SpectrumSlice,
    pub omega: &'a PointSet,
    pub horizon: f64,
    pub time_rule: TimeRule,
    pub norm: TerminalNorm,
    pub trace: TraceKind,
    /// Relative threshold below which the trace counts as identically zero.
    pub zero_trace_tol: f64,
    matrix: EvalMatrix,
}

impl<'a> ObsExperiment<'a> {
    pub fn new(
        slice: &'a SpectrumSlice,
        omega: &'a PointSet,
        horizon: f64,
        norm: TerminalNorm,
        trace: TraceKind,
        quadrature: TimeQuadrature,
    ) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::domain("time horizon must be positive and finite"));
        }
        if slice.is_empty() {
            return Err(Error::contract("observability experiment needs a nonempty slice"));
        }
        let matrix = eval_matrix(slice, omega)?;
        let lambda_max = slice.modes().last().map_or(1.0, |m| m.eigenvalue());
        let time_rule = quadrature.rule(horizon, lambda_max)?;
        Ok(ObsExperiment {
            slice,
            omega,
            horizon,
            time_rule,
            norm,
            trace,
            zero_trace_tol: 1e-10,
            matrix,
        })
    }

    /// `sup_{x∈ω} |u(t,x)|`
    pub fn sup_trace(&self, c: &[f64], t: f64) -> f64 {
        linalg::norm_inf(&self.matrix.apply(&evolved(self.slice, c, t)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObsRatio {
    pub numerator: f64,
    pub denominator: f64,
    /// `numerator / denominator`, infinite for a vanishing trace.
    pub ratio: f64,
    /// For the L∞ terminal norm: `sup_upper − grid max`.
    pub linf_error_bound: Option<f64>,
    pub zero_trace: bool,
}

/// Observability ratio of one solution.
pub fn obs_ratio(u0: &CoefVec, exp: &ObsExperiment<'_>) -> Result<ObsRatio> {
    u0.check_aligned(exp.slice)?;
    if u0.is_zero() {
        return Err(Error::contract("initial data must be nonzero"));
    }
    let c = u0.as_slice();
    let terminal = evolved(exp.slice, c, exp.horizon);
    let (norm, linf_error_bound) = match exp.norm {
        TerminalNorm::L2 => (norm2(&terminal), None),
        TerminalNorm::LInf { per_axis } => {
            let (grid_max, upper) = linf_norm(exp.slice, &terminal, per_axis)?;
            (grid_max, Some(upper - grid_max))
        }
    };
    let n = exp.slice.dimension() as i32;
    let amp = libm::pow(2.0, f64::from(n) / 2.0);
    let (numerator, denominator, reference) = match exp.trace {
        TraceKind::SupL1 => {
            let den = exp.time_rule.integrate(|t| exp.sup_trace(c, t));
            // ∫ Σ_j |c_j| e^{-λ_j t} sup|φ_j| dt bounds the trace of any data with these magnitudes
            let reference: f64 = c
                .iter()
                .zip(exp.slice.modes())
                .map(|(cj, m)| cj.abs() * amp * integral_exp(m.eigenvalue(), exp.horizon))
                .sum();
            (norm, den, reference)
        }
        TraceKind::L2Sum => {
            let den = trace_energy(exp.slice, &exp.matrix, c, exp.horizon, 32, 1e-5)?;
            let abs: Vec<f64> = c.iter().map(|x| x.abs() * amp).collect();
            let mut reference = 0.0;
            for (j, mj) in exp.slice.modes().iter().enumerate() {
                for (k, mk) in exp.slice.modes().iter().enumerate() {
                    reference += abs[j]
                        * abs[k]
                        * integral_exp(mj.eigenvalue() + mk.eigenvalue(), exp.horizon);
                }
            }
            (norm * norm, den, exp.omega.len() as f64 * reference)
        }
    };
    let tol = match exp.trace {
        TraceKind::SupL1 => exp.zero_trace_tol,
        TraceKind::L2Sum => exp.zero_trace_tol * exp.zero_trace_tol,
    };
    let zero_trace = denominator <= 1e-300 || denominator <= tol * reference;
    let ratio = if zero_trace { f64::INFINITY } else { numerator / denominator };
    Ok(ObsRatio { numerator, denominator, ratio, linf_error_bound, zero_trace })
}

/// `∫_0^T e^{-λt} dt`
fn integral_exp(lambda: f64, horizon: f64) -> f64 {
    if lambda == 0.0 {
        horizon
    } else {
        -libm::expm1(-lambda * horizon) / lambda
    }
}

/// `cᵀGc = ∫_0^T Σ_{x∈ω} |u(t,x)|² dt` by a composite Gauss rule. Summing
/// squares avoids the cancellation of the quadratic form in `G` when the
/// trace is small relative to `|c|`.
fn trace_energy(
    slice: &SpectrumSlice,
    e: &EvalMatrix,
    c: &[f64],
    horizon: f64,
    points: usize,
    panel_floor: f64,
) -> Result<f64> {
    let lambda_max = slice.modes().last().map_or(1.0, |m| m.eigenvalue());
    let rule = dyadic_gauss_rule(horizon, panel_floor / (2.0 * lambda_max), points)?;
    Ok(rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&t, &w)| {
            let v = e.apply(&evolved(slice, c, t));
            w * linalg::dot(&v, &v)
        })
        .sum())
}

/// Grid maximum of `|Σ c_j φ_j|` on `per_axis^n` points and the Bernstein
/// upper bound `max / (1 − (h/2) π Σ_i K_i)` for the true supremum.
pub fn linf_norm(slice: &SpectrumSlice, c: &[f64], per_axis: usize) -> Result<(f64, f64)> {
    if per_axis < 2 {
        return Err(Error::domain("L-infinity grid needs at least 2 points per axis"));
    }
    let n = slice.dimension();
    let xs: Vec<f64> = (0..per_axis).map(|i| i as f64 / (per_axis - 1) as f64).collect();
    let kmax: Vec<u32> = (0..n).map(|a| slice.max_frequency_along(a)).collect();
    // per-axis tables √2 sin(πkx)
    let tables: Vec<Vec<Vec<f64>>> = kmax
        .iter()
        .map(|&km| {
            (0..=km)
                .map(|k| {
                    xs.iter()
                        .map(|&x| core::f64::consts::SQRT_2 * crate::sin_pi(f64::from(k) * x))
                        .collect()
                })
                .collect()
        })
        .collect();
    let grid_max = match n {
        1 => {
            let mut best: f64 = 0.0;
            for (xi, _) in xs.iter().enumerate() {
                let v: f64 = slice
                    .modes()
                    .iter()
                    .zip(c)
                    .map(|(m, cj)| cj * tables[0][m.index().components()[0] as usize][xi])
                    .sum();
                best = best.max(v.abs());
            }
            best
        }
        2 => {
            // U = Aᵀ C B with C[k1][k2] the coefficient grid
            let (k1, k2) = (kmax[0] as usize + 1, kmax[1] as usize + 1);
            let mut coef = DMatrix::<f64>::zeros(k1, k2);
            for (m, cj) in slice.modes().iter().zip(c) {
                let idx = m.index().components();
                coef[(idx[0] as usize, idx[1] as usize)] = *cj;
            }
            let a = DMatrix::from_fn(k1, per_axis, |k, x| tables[0][k][x]);
            let b = DMatrix::from_fn(k2, per_axis, |k, y| tables[1][k][y]);
            let u = a.transpose() * coef * b;
            u.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
        }
        _ => {
            let total = (per_axis as u64).saturating_pow(n as u32);
            if total > 50_000_000 {
                return Err(Error::resource("L-infinity grid points", 50_000_000));
            }
            let mut best: f64 = 0.0;
            let mut pos = vec![0usize; n];
            for _ in 0..total {
                let v: f64 = slice
                    .modes()
                    .iter()
                    .zip(c)
                    .map(|(m, cj)| {
                        let idx = m.index().components();
                        cj * (0..n).map(|a| tables[a][idx[a] as usize][pos[a]]).product::<f64>()
                    })
                    .sum();
                best = best.max(v.abs());
                for p in pos.iter_mut() {
                    *p += 1;
                    if *p < per_axis {
                        break;
                    }
                    *p = 0;
                }
            }
            best
        }
    };
    let h = 1.0 / (per_axis - 1) as f64;
    let shrink = 1.0 - 0.5 * h * PI * kmax.iter().map(|&k| f64::from(k)).sum::<f64>();
    let upper = if grid_max == 0.0 {
        0.0
    } else if shrink > 0.0 {
        grid_max / shrink
    } else {
        f64::INFINITY
    };
    Ok((grid_max, upper))
}

/// `G_jk = Σ_{x∈ω} φ_j(x) φ_k(x) ∫_0^T e^{-(λ_j+λ_k)t} dt`
pub fn gramian(slice: &SpectrumSlice, omega: &PointSet, horizon: f64) -> Result<DMatrix<f64>> {
    let e = eval_matrix(slice, omega)?;
    let ev = slice.eigenvalues();
    let cross = e.matrix().transpose() * e.matrix();
    Ok(DMatrix::from_fn(ev.len(), ev.len(), |j, k| {
        cross[(j, k)] * integral_exp(ev[j] + ev[k], horizon)
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObsMethod {
    RatioMeasured,
    GenEig,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObsConstant {
    /// Largest generalized eigenvalue of `(D, G)`; infinite for singular `G`.
    pub value: f64,
    pub witness: CoefVec,
    pub method: ObsMethod,
    /// `cᵀDc / cᵀGc` for the witness, with `cᵀGc` from a finer,
    /// independent time rule.
    pub reference_ratio: f64,
    /// The same ratio with the quadrature factor `F` (`FᵀF ≈ G`).
    pub factor_ratio: f64,
    /// Eigenvalue of the invisible eigenspace when `value` is infinite.
    pub nodal_eigenvalue: Option<f64>,
    /// `Σ|c_j c_k G_jk| / cᵀGc` for the witness. The trace of the witness is
    /// resolved only to about `cancellation · ε`, which bounds how well any
    /// independent recomputation of its ratio can agree with `value`.
    pub cancellation: f64,
}

impl ObsConstant {
    /// Relative disagreement between `value` and the witness ratios.
    pub fn witness_discrepancy(&self) -> f64 {
        if !self.value.is_finite() {
            return 0.0;
        }
        let a = ((self.factor_ratio - self.value) / self.value).abs();
        let b = ((self.reference_ratio - self.value) / self.value).abs();
        a.max(b)
    }
}

impl ObsConstant {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WorstCaseOptions {
    pub tol: Option<f64>,
    pub gauss_points: usize,
    /// Dyadic panels stop once `edge · 2λ_max ≤ panel_floor`.
    pub panel_floor: f64,
}

impl Default for WorstCaseOptions {
    fn default() -> Self {
        WorstCaseOptions { tol: None, gauss_points: 24, panel_floor: 1e-3 }
    }
}

/// Worst ratio `‖u(T)‖²_{L²} / ∫_0^T Σ_{x∈ω} |u(t,x)|² dt` over the slice.
///
/// `G` is singular exactly when some eigenspace contains a combination
/// vanishing on `ω`, which is tested first. Otherwise the generalized
/// eigenproblem is solved through a square-root factor `F` of `G` built from
/// Gauss–Legendre time nodes: with `F = QR`, the value is `σ_max(D^{1/2}R^{-1})²`.
/// Forming `G` and factoring it directly loses all precision once the
/// slice reaches a few dozen modes.
pub fn worst_case_obs(
    slice: &SpectrumSlice,
    omega: &PointSet,
    horizon: f64,
    options: &WorstCaseOptions,
) -> Result<ObsConstant> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::domain("time horizon must be positive and finite"));
    }
    let n = slice.len();
    if n == 0 {
        return Err(Error::contract("worst_case_obs needs a nonempty slice"));
    }
    let tol = options.tol.unwrap_or_else(|| default_nullspace_tol(n));
    let e = eval_matrix(slice, omega)?;
    let d: Vec<f64> = slice.modes().iter().map(|m| libm::exp(-2.0 * m.eigenvalue() * horizon)).collect();
    let ratio_of = |c: &[f64]| -> Result<f64> {
        let num: f64 = c.iter().zip(&d).map(|(cj, dj)| cj * cj * dj).sum();
        Ok(num / trace_energy(slice, &e, c, horizon, 32, 1e-5)?)
    };

    for range in slice.eigenspaces() {
        if let Some(w) = eigenspace_witness(slice, range, omega, tol)? {
            let reference = ratio_of(w.coefficients.as_slice())?;
            return Ok(ObsConstant {
                value: f64::INFINITY,
                reference_ratio: if reference.is_finite() { reference } else { f64::INFINITY },
                factor_ratio: f64::INFINITY,
                witness: w.coefficients,
                method: ObsMethod::GenEig,
                nodal_eigenvalue: w.eigenvalue,
                cancellation: f64::INFINITY,
            });
        }
    }

    let lambda_max = slice.modes()[n - 1].eigenvalue();
    let min_edge = options.panel_floor / (2.0 * lambda_max);
    let rule = dyadic_gauss_rule(horizon, min_edge, options.gauss_points)?;
    let m = omega.len();
    let rows = rule.nodes.len() * m;
    if rows < n {
        return Err(Error::contract(format!(
            "quadrature factor has {rows} rows for {n} modes; raise gauss_points"
        )));
    }
    // columns ordered from the highest eigenvalue down
    let order: Vec<usize> = (0..n).rev().collect();
    let ev = slice.eigenvalues();
    let mut f = DMatrix::<f64>::zeros(rows, n);
    for (q, (&t, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let sw = libm::sqrt(w);
        for (col, &j) in order.iter().enumerate() {
            let decay = sw * libm::exp(-ev[j] * t);
            for x in 0..m {
                f[(q * m + x, col)] = e.matrix()[(x, j)] * decay;
            }
        }
    }
    let r = f.clone().qr().r();
    let mut m_rows: Vec<f64> = Vec::new();
    let mut kept = 0;
    for (col, &j) in order.iter().enumerate() {
        if d[j] == 0.0 {
            continue;
        }
        let mut unit = vec![0.0; n];
        unit[col] = 1.0;
        // row `col` of R^{-1} is (R^{-T} e_col)ᵀ
        let row = solve_upper_transpose(&r, &unit);
        let s = libm::sqrt(d[j]);
        m_rows.extend(row.iter().map(|v| v * s));
        kept += 1;
    }
    let mat = DMatrix::from_row_slice(kept, n, &m_rows);
    let (sigma, y) = top_right_singular(&mat);
    let permuted = solve_upper(&r, &y);
    let mut c = vec![0.0; n];
    for (col, &j) in order.iter().enumerate() {
        c[j] = permuted[col];
    }
    linalg::normalize(&mut c);
    linalg::canonical_sign(&mut c);
    let value = sigma * sigma;
    let fc: Vec<f64> = {
        let mut p = vec![0.0; n];
        for (col, &j) in order.iter().enumerate() {
            p[col] = c[j];
        }
        linalg::mat_vec(&f, &p)
    };
    let factor_ratio = c.iter().zip(&d).map(|(cj, dj)| cj * cj * dj).sum::<f64>()
        / linalg::dot(&fc, &fc);
    let reference_ratio = ratio_of(&c)?;
    let g = gramian(slice, omega, horizon)?;
    let (mut signed, mut abs) = (0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            let term = c[j] * c[k] * g[(j, k)];
            signed += term;
            abs += term.abs();
        }
    }
    let cancellation = if signed > 0.0 { abs / signed } else { f64::INFINITY };
    Ok(ObsConstant {
        cancellation,
        value,
        witness: CoefVec::new(c),
        method: ObsMethod::GenEig,
        reference_ratio,
        factor_ratio,
        nodal_eigenvalue: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScheduleVariant {
    Dyadic,
    Geometric { alpha: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LRSchedule {
    pub variant: ScheduleVariant,
    pub horizon: f64,
    /// Dyadic: `l_1, l_2, …`. Geometric: `T_0, T_1, …`.
    pub times: Vec<f64>,
}

impl LRSchedule {
    /// Dyadic: `l = T/2`. Geometric: the limit `0`.
    pub fn limit(&self) -> f64 {
        match self.variant {
            ScheduleVariant::Dyadic => 0.5 * self.horizon,
            ScheduleVariant::Geometric { .. } => 0.0,
        }
    }

    /// Dyadic: `l_m − l_{m+1} = 2^{-m}·T/4`. Geometric: `T_k − T_{k+1} = (1−η)η^k T`.
    /// Both are formed directly rather than by subtracting stored times.
    pub fn gap(&self, m: usize) -> f64 {
        match self.variant {
            ScheduleVariant::Dyadic => libm::scalbn(0.25 * self.horizon, -(m as i32)),
            ScheduleVariant::Geometric { alpha } => {
                let eta = libm::exp2(-1.0 / alpha);
                (1.0 - eta) * libm::pow(eta, m as f64) * self.horizon
            }
        }
    }

    pub fn eta(&self) -> Option<f64> {
        match self.variant {
            ScheduleVariant::Geometric { alpha } => Some(libm::exp2(-1.0 / alpha)),
            ScheduleVariant::Dyadic => None,
        }
    }

    /// Consecutive `(t1, t2)` intervals with `t1 < t2`.
    pub fn intervals(&self) -> Vec<(f64, f64)> {
        self.times.windows(2).map(|w| (w[1], w[0])).collect()
    }
}

pub fn lr_schedule(variant: ScheduleVariant, horizon: f64, count: usize) -> Result<LRSchedule> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::domain("schedule horizon must be positive and finite"));
    }
    if count == 0 {
        return Err(Error::domain("schedule needs at least one time"));
    }
    let times = match variant {
        ScheduleVariant::Dyadic => {
            let (l, d) = (0.5 * horizon, 0.25 * horizon);
            (1..=count).map(|m| l + libm::scalbn(d, -(m as i32 - 1))).collect()
        }
        ScheduleVariant::Geometric { alpha } => {
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(Error::domain("geometric schedule needs alpha > 0"));
            }
            let eta = libm::exp2(-1.0 / alpha);
            (0..count).map(|k| horizon * libm::pow(eta, k as f64)).collect()
        }
    };
    Ok(LRSchedule { variant, horizon, times })
}

/// Predicted observability cost from a spectral fit.
#[derive(Clone, Debug, PartialEq)]
pub struct CostPrediction {
    pub beta: f64,
    /// `α = β/(1−β)`
    pub alpha: f64,
    /// `|β(α+1) − α|`
    pub identity_error: f64,
    /// Factor-1 observability constant `C₁`.
    pub c1: f64,
    /// Spectral constant `C₃` of the fit.
    pub c3: f64,
    /// Smallest root of `γ = 10(C₁ + C₃ γ^β)`.
    pub gamma: f64,
    pub eta: f64,
    /// `γ / (10 (1−η)^α)`
    pub exponent_constant: f64,
    /// `C′ = max(C₃, γ/(10(1−η)^α))`
    pub c_prime: f64,
}

impl CostPrediction {
    /// `C′ exp(C′/T^α)`
    pub fn bound(&self, horizon: f64) -> f64 {
        libm::exp(self.log_bound(horizon))
    }

    pub fn log_bound(&self, horizon: f64) -> f64 {
        libm::log(self.c_prime) + self.c_prime / libm::pow(horizon, self.alpha)
    }

    /// Frequency split `Λ = γ/τ^{α+1}` used for elapsed time `τ`.
    pub fn lambda_split(&self, tau: f64) -> f64 {
        self.gamma / libm::pow(tau, self.alpha + 1.0)
    }
}

/// `α = β/(1−β)` and the constants of the geometric telescoping. `c1` is
/// the factor observability constant (`C₁ e^{C₁/τ^α}`).
pub fn lr_predict_cost(fit: &SpectralFit, c1: f64) -> Result<CostPrediction> {
    let beta = fit.beta;
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::contract(format!(
            "cost prediction needs beta in (0, 1), got {beta}"
        )));
    }
    if !(c1 >= 0.0 && c1.is_finite()) {
        return Err(Error::domain("factor observability constant must be finite and >= 0"));
    }
    let alpha = beta / (1.0 - beta);
    let identity_error = (beta * (alpha + 1.0) - alpha).abs();
    let c3 = fit.c;
    let gamma = gamma_fixed_point(c1, c3, beta);
    let eta = libm::exp2(-1.0 / alpha);
    let exponent_constant = gamma / (10.0 * libm::pow(1.0 - eta, alpha));
    Ok(CostPrediction {
        beta,
        alpha,
        identity_error,
        c1,
        c3,
        gamma,
        eta,
        exponent_constant,
        c_prime: c3.max(exponent_constant),
    })
}

/// Smallest `γ > 0` with `γ ≥ 10(C₁ + C₃ γ^β)`; the map is convex with a
/// negative value at 0, so the root is unique.
pub fn gamma_fixed_point(c1: f64, c3: f64, beta: f64) -> f64 {
    let h = |g: f64| g - 10.0 * (c1 + c3 * libm::pow(g, beta));
    let mut hi = 1.0;
    while h(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Fit of measured observability values to `C exp(C/T^α)` at fixed `α`.
#[derive(Clone, Debug, PartialEq)]
pub struct ObsCostFit {
    pub c: f64,
    pub alpha: f64,
    pub residual: f64,
    pub samples: Vec<(f64, f64)>,
}

pub fn fit_obs_cost(samples: &[(f64, f64)], alpha: f64) -> Result<ObsCostFit> {
    if samples.len() < 2 {
        return Err(Error::contract("observability cost fit needs at least 2 samples"));
    }
    if samples.iter().any(|s| !s.1.is_finite()) {
        return Err(Error::contract("observability cost fit is undefined for infinite values"));
    }
    if samples.iter().any(|s| !(s.0 > 0.0 && s.1 > 0.0)) {
        return Err(Error::domain("observability cost fit needs positive horizons and values"));
    }
    let xs: Vec<f64> = samples.iter().map(|s| libm::pow(s.0, -alpha)).collect();
    let ys: Vec<f64> = samples.iter().map(|s| libm::log(s.1)).collect();
    let (u, sse) = crate::spectral::best_log_c(&xs, &ys);
    Ok(ObsCostFit { c: libm::exp(u), alpha, residual: libm::sqrt(sse), samples: samples.to_vec() })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TelescopingOptions {
    /// Constant `C` on the right of the two-point inequality.
    pub c_const: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub bisection_steps: usize,
    pub zero_trace_tol: f64,
    pub quadrature: TimeQuadrature,
}

impl Default for TelescopingOptions {
    fn default() -> Self {
        TelescopingOptions {
            c_const: 1.0,
            a_min: 1e-3,
            a_max: 1e3,
            bisection_steps: 60,
            zero_trace_tol: 1e-10,
            quadrature: TimeQuadrature::Gauss { points: 12, panel_floor: 1e-2, pieces: 1 },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TelescopingDatum {
    /// Smallest `A` in the search range for which every interval passes,
    /// `None` if none does.
    pub a: Option<f64>,
    pub zero_trace: bool,
    /// `‖u(l_1)‖`
    pub norm_l1: f64,
    /// `∫_0^T sup_ω |u| dt`
    pub trace_integral: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TelescopingReport {
    pub intervals: Vec<(f64, f64)>,
    pub data: Vec<TelescopingDatum>,
    /// Largest per-datum `A`; `None` if some datum has no finite `A`.
    pub empirical_a: Option<f64>,
    /// `C e^{8A/T}`, the constant of `‖u(l_1)‖ ≤ C e^{8A/T} ∫_0^T sup_ω|u|`.
    pub final_constant: Option<f64>,
    pub telescoped_holds: Option<bool>,
    /// `T^{-n/4}`, the reported L²→L∞ smoothing factor.
    pub regularization_factor: f64,
    pub non_observable: bool,
}

/// Smallest `A` such that, on every `(t1, t2)` of the dyadic schedule,
/// `e^{-A/τ}‖u(t2)‖ − e^{-2A/τ}‖u(t1)‖ ≤ C ∫_{t1}^{t2} sup_ω|u|`, `τ = t2 − t1`,
/// for every datum of the panel, followed by the telescoped check.
///
/// With `a = e^{-A/τ}` the left side `a N₂ − a² N₁` is not monotone in `A`;
/// the search uses the branch `a ≤ N₂/(2N₁)` on which it decreases with
/// growing `A`, so "passes" is monotone and bisection is valid.
pub fn telescoping_verify(
    slice: &SpectrumSlice,
    omega: &PointSet,
    schedule: &LRSchedule,
    panel: &[CoefVec],
    options: &TelescopingOptions,
) -> Result<TelescopingReport> {
    if schedule.variant != ScheduleVariant::Dyadic {
        return Err(Error::contract("telescoping_verify uses the dyadic schedule"));
    }
    if schedule.times.len() < 2 {
        return Err(Error::contract("schedule needs at least two times"));
    }
    if panel.is_empty() {
        return Err(Error::contract("telescoping panel is empty"));
    }
    let horizon = schedule.horizon;
    let exp = ObsExperiment::new(
        slice,
        omega,
        horizon,
        TerminalNorm::L2,
        TraceKind::SupL1,
        options.quadrature,
    )?;
    let intervals = schedule.intervals();
    let lambda_max = slice.modes().last().map_or(1.0, |m| m.eigenvalue());
    let mut data = Vec::with_capacity(panel.len());
    for u0 in panel {
        u0.check_aligned(slice)?;
        if u0.is_zero() {
            return Err(Error::contract("initial data must be nonzero"));
        }
        let c = u0.as_slice();
        let whole = obs_ratio(u0, &ObsExperiment { zero_trace_tol: options.zero_trace_tol, ..exp.clone() })?;
        let norm_l1 = norm2(&evolved(slice, c, schedule.times[0]));
        let mut per_interval = Vec::with_capacity(intervals.len());
        for &(t1, t2) in &intervals {
            // everything scaled by e^{λ_min t1}; the predicate is homogeneous
            let shifted = shift_coefficients(slice, c, t1);
            let n1 = norm2(&shifted);
            let n2 = norm2(&evolved(slice, &shifted, t2 - t1));
            let local = options.quadrature.rule(t2 - t1, lambda_max)?;
            let rhs = options.c_const * local.integrate(|s| exp.sup_trace(&shifted, s));
            per_interval.push((t2 - t1, n1, n2, rhs));
        }
        let passes = |a_val: f64| {
            per_interval.iter().all(|&(tau, n1, n2, rhs)| two_point_holds(a_val, tau, n1, n2, rhs))
        };
        let a = if whole.zero_trace {
            None
        } else if passes(options.a_min) {
            Some(options.a_min)
        } else if !passes(options.a_max) {
            None
        } else {
            let (mut lo, mut hi) = (libm::log(options.a_min), libm::log(options.a_max));
            for _ in 0..options.bisection_steps {
                let mid = 0.5 * (lo + hi);
                if passes(libm::exp(mid)) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Some(libm::exp(hi))
        };
        data.push(TelescopingDatum {
            a,
            zero_trace: whole.zero_trace,
            norm_l1,
            trace_integral: whole.denominator,
        });
    }
    let non_observable = data.iter().any(|d| d.zero_trace);
    let empirical_a = data.iter().try_fold(0.0f64, |acc, d| d.a.map(|a| acc.max(a)));
    let final_constant = empirical_a.map(|a| options.c_const * libm::exp(8.0 * a / horizon));
    let telescoped_holds = final_constant.map(|k| {
        data.iter().all(|d| {
            libm::log(d.norm_l1) <= libm::log(k) + libm::log(d.trace_integral)
        })
    });
    let n = slice.dimension() as f64;
    Ok(TelescopingReport {
        intervals,
        data,
        empirical_a,
        final_constant,
        telescoped_holds,
        regularization_factor: libm::pow(horizon, -n / 4.0),
        non_observable,
    })
}

/// `c_j e^{-(λ_j − λ_min) t}` with `λ_min` over the nonzero coefficients.
fn shift_coefficients(slice: &SpectrumSlice, c: &[f64], t: f64) -> Vec<f64> {
    let lambda_min = c
        .iter()
        .zip(slice.modes())
        .filter(|(cj, _)| **cj != 0.0)
        .map(|(_, m)| m.eigenvalue())
        .fold(f64::INFINITY, f64::min);
    c.iter()
        .zip(slice.modes())
        .map(|(cj, m)| cj * libm::exp(-(m.eigenvalue() - lambda_min) * t))
        .collect()
}

/// Monotone form of `a N₂ − a² N₁ ≤ R` with `a = e^{-A/τ}`; see
/// [`telescoping_verify`].
pub fn two_point_holds(a_val: f64, tau: f64, n1: f64, n2: f64, rhs: f64) -> bool {
    if n2 == 0.0 {
        return true;
    }
    // the left side never exceeds N₂²/(4N₁)
    if rhs > 0.0 && libm::log(rhs) >= 2.0 * libm::log(n2) - libm::log(4.0 * n1) {
        return true;
    }
    let ln_a = -a_val / tau;
    let ln_vertex = libm::log(n2) - libm::log(2.0 * n1);
    if ln_a > ln_vertex {
        return false;
    }
    if rhs <= 0.0 {
        return false;
    }
    let x = libm::exp(ln_a + libm::log(n1) - libm::log(n2));
    ln_a + libm::log(n2) + libm::log1p(-x) <= libm::log(rhs)
}

/// One row of [`product_obs_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct ProductObsRow {
    pub horizon: f64,
    pub measured: ObsConstant,
    pub predicted: f64,
    pub lambda_split: f64,
    pub holds: bool,
    pub inherited_infinite: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductObsReport {
    pub prediction: CostPrediction,
    pub product_modes: usize,
    /// Points of `ω₁×ω₂`; the sum-over-points trace is within this factor
    /// of the sup-over-points trace.
    pub points: usize,
    pub rows: Vec<ProductObsRow>,
}

pub struct ProductObsSetup<'a> {
    pub dims: (usize, usize),
    pub scale: f64,
    pub cutoff: f64,
    pub omega1: &'a PointSet,
    pub omega2: &'a PointSet,
    /// Spectral fit on the second factor.
    pub fit2: &'a SpectralFit,
    /// Cost fit `C₁ e^{C₁/T^α}` of the first factor.
    pub factor1: &'a ObsCostFit,
    pub horizons: &'a [f64],
    pub options: WorstCaseOptions,
}

/// Worst-case product observability at each horizon against the predicted
/// `C′ exp(C′/T^α)`.
pub fn product_obs_check(setup: &ProductObsSetup<'_>) -> Result<ProductObsReport> {
    let prediction = lr_predict_cost(setup.fit2, setup.factor1.c)?;
    if (prediction.alpha - setup.factor1.alpha).abs() > 1e-9 * prediction.alpha.max(1.0) {
        return Err(Error::contract(format!(
            "factor cost exponent {} does not match beta/(1-beta) = {}",
            setup.factor1.alpha, prediction.alpha
        )));
    }
    let (n1, n2) = setup.dims;
    if setup.omega1.dimension() != n1 || setup.omega2.dimension() != n2 {
        return Err(Error::contract("factor point sets do not match the factor dimensions"));
    }
    let points: Vec<Vec<f64>> = setup
        .omega1
        .points()
        .iter()
        .flat_map(|p| {
            setup.omega2.points().iter().map(move |q| {
                let mut r = p.clone();
                r.extend_from_slice(q);
                r
            })
        })
        .collect();
    let omega = PointSet::explicit(points)?;
    let slice = SpectrumSlice::enumerate(n1 + n2, setup.cutoff, setup.scale)?;
    let mut rows = Vec::with_capacity(setup.horizons.len());
    for &t in setup.horizons {
        let measured = worst_case_obs(&slice, &omega, t, &setup.options)?;
        let predicted = prediction.bound(t);
        let inherited = !measured.is_finite();
        rows.push(ProductObsRow {
            horizon: t,
            holds: measured.value <= predicted,
            lambda_split: prediction.lambda_split(t),
            predicted,
            inherited_infinite: inherited,
            measured,
        });
    }
    Ok(ProductObsReport { prediction, product_modes: slice.len(), points: omega.len(), rows })
}
