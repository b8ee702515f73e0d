//! Sup-norm spectral-inequality constants on finite observation sets.
//!
//! For a slice with evaluation matrix `E` (rows: points, columns: modes) the
//! best constant in `‖Π_Λ u‖_{L²} ≤ K sup_ω |Π_Λ u|` is
//! `K = sup_{c≠0} ‖c‖₂ / ‖Ec‖_∞`. Computing it exactly is hard, so it is
//! bracketed by `[1/σ_min, √m/σ_min]` and the lower end is raised by any
//! feasible `c`.

use alloc::format;
use alloc::vec::Vec;
use core::ops::Range;

use nalgebra::DMatrix;

use crate::eigenbasis::{check_point, CoefVec, SpectrumSlice};
use crate::linalg::{self, canonical_sign, mat_vec, norm2, norm_inf, right_singular};
use crate::pointsets::PointSet;
use crate::{default_nullspace_tol, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct EvalMatrix {
    matrix: DMatrix<f64>,
}

impl EvalMatrix {
    /// An arbitrary matrix given by rows of equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::contract("matrix rows differ in length"));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::domain("matrix entries must be finite"));
        }
        Ok(EvalMatrix { matrix: DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]) })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn apply(&self, c: &[f64]) -> Vec<f64> {
        mat_vec(&self.matrix, c)
    }

    /// `‖c‖₂ / ‖Ec‖_∞`, infinite when `Ec = 0`.
    pub fn ratio(&self, c: &[f64]) -> f64 {
        let den = norm_inf(&self.apply(c));
        if den == 0.0 {
            f64::INFINITY
        } else {
            norm2(c) / den
        }
    }

    fn columns(&self, range: Range<usize>) -> DMatrix<f64> {
        self.matrix.columns(range.start, range.len()).into_owned()
    }
}

/// `E[i][j] = φ_j(x_i)` in point order and slice order.
pub fn eval_matrix(slice: &SpectrumSlice, omega: &PointSet) -> Result<EvalMatrix> {
    if slice.dimension() != omega.dimension() {
        return Err(Error::contract(format!(
            "slice dimension {} differs from point set dimension {}",
            slice.dimension(),
            omega.dimension()
        )));
    }
    for p in omega.points() {
        check_point(p, slice.dimension())?;
    }
    let modes = slice.modes();
    let pts = omega.points();
    let matrix = DMatrix::from_fn(pts.len(), modes.len(), |i, j| modes[j].eval_unchecked(&pts[i]));
    Ok(EvalMatrix { matrix })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstantStatus {
    Finite,
    InfiniteNullspace,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralConstant {
    pub cutoff: f64,
    pub modes: usize,
    pub points: usize,
    pub sigma_min: f64,
    pub lower: f64,
    pub upper: f64,
    pub witness: CoefVec,
    pub status: ConstantStatus,
    pub tol: f64,
    /// Seeds of the local searches, index 0 being the `σ_min` direction.
    pub seeds: Vec<u64>,
}

impl SpectralConstant {
    pub fn is_finite(&self) -> bool {
        self.status == ConstantStatus::Finite
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOptions {
    /// `None` selects `1e-10·√N`.
    pub tol: Option<f64>,
    pub starts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { tol: None, starts: 32, iterations: 200, seed: 0 }
    }
}

pub fn spectral_constant(
    slice: &SpectrumSlice,
    omega: &PointSet,
    options: &SearchOptions,
) -> Result<SpectralConstant> {
    let e = eval_matrix(slice, omega)?;
    spectral_constant_of(&e, slice.cutoff(), options)
}

/// Bracket for an explicit evaluation matrix.
pub fn spectral_constant_of(
    e: &EvalMatrix,
    cutoff: f64,
    options: &SearchOptions,
) -> Result<SpectralConstant> {
    let (m, n) = (e.rows(), e.cols());
    if m == 0 || n == 0 {
        return Err(Error::contract("spectral constant needs at least one point and one mode"));
    }
    let tol = options.tol.unwrap_or_else(|| default_nullspace_tol(n));
    let rs = right_singular(&e.matrix);
    let sigma_min = if m < n { 0.0 } else { *rs.values.last().expect("n >= 1") };
    let mut v_min = rs.vectors.last().expect("n >= 1").clone();
    canonical_sign(&mut v_min);
    if m < n || sigma_min <= tol {
        return Ok(SpectralConstant {
            cutoff,
            modes: n,
            points: m,
            sigma_min,
            lower: f64::INFINITY,
            upper: f64::INFINITY,
            witness: CoefVec::new(v_min),
            status: ConstantStatus::InfiniteNullspace,
            tol,
            seeds: Vec::new(),
        });
    }
    let upper = libm::sqrt(m as f64) / sigma_min;
    let mut best = v_min.clone();
    let mut best_ratio = e.ratio(&best);
    let mut seeds = Vec::with_capacity(options.starts.max(1));
    for start in 0..options.starts.max(1) {
        let init = if start == 0 {
            v_min.clone()
        } else {
            let mut rng = crate::rng::substream(options.seed, start as u64);
            crate::rng::unit_vector(&mut rng, n)
        };
        seeds.push(if start == 0 { 0 } else { start as u64 });
        let c = minimize_sup(e, init, options.iterations, sigma_min);
        let r = e.ratio(&c);
        if r > best_ratio {
            best_ratio = r;
            best = c;
        }
    }
    Ok(SpectralConstant {
        cutoff,
        modes: n,
        points: m,
        sigma_min,
        lower: best_ratio,
        upper,
        witness: CoefVec::new(best),
        status: ConstantStatus::Finite,
        tol,
        seeds,
    })
}

/// Projected subgradient descent of `‖Ec‖_∞` on the unit sphere; returns
/// the best iterate seen.
fn minimize_sup(e: &EvalMatrix, mut c: Vec<f64>, iterations: usize, sigma_min: f64) -> Vec<f64> {
    let n = c.len();
    let row_norm_max = (0..e.rows())
        .map(|i| norm2(e.matrix.row(i).iter().copied().collect::<Vec<_>>().as_slice()))
        .fold(0.0f64, f64::max);
    let mut best = c.clone();
    let mut best_val = norm_inf(&e.apply(&c));
    // initial step on the scale of the achievable objective
    let step0 = sigma_min.max(1e-3 * row_norm_max) / row_norm_max.max(f64::MIN_POSITIVE);
    for t in 0..iterations {
        let ec = e.apply(&c);
        let (imax, val) = ec
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, v)| if v.abs() > acc.1 { (i, v.abs()) } else { acc });
        if val < best_val {
            best_val = val;
            best.clone_from(&c);
        }
        let sign = if ec[imax] >= 0.0 { 1.0 } else { -1.0 };
        let mut g: Vec<f64> = (0..n).map(|j| sign * e.matrix[(imax, j)]).collect();
        // tangential part only
        let radial = linalg::dot(&g, &c);
        g.iter_mut().zip(&c).for_each(|(gj, cj)| *gj -= radial * cj);
        let gn = norm2(&g);
        if gn == 0.0 {
            break;
        }
        let step = step0 / libm::sqrt(t as f64 + 1.0);
        c.iter_mut().zip(&g).for_each(|(cj, gj)| *cj -= step * gj / gn);
        if !linalg::normalize(&mut c) {
            break;
        }
    }
    let final_val = norm_inf(&e.apply(&c));
    if final_val < best_val {
        best = c;
    }
    best
}

/// A unit coefficient vector whose combination vanishes on `ω` up to `tol`.
#[derive(Clone, Debug, PartialEq)]
pub struct NodalWitness {
    pub coefficients: CoefVec,
    /// `max_i |(Ec)_i|`
    pub residual: f64,
    /// Set when the witness lives in a single eigenspace, hence is a genuine
    /// eigenfunction.
    pub eigenvalue: Option<f64>,
}

/// Searches each eigenspace (lowest first) for a combination vanishing on
/// `ω`, then falls back to the whole slice.
pub fn nullspace_witness(
    slice: &SpectrumSlice,
    omega: &PointSet,
    tol: Option<f64>,
) -> Result<Option<NodalWitness>> {
    let e = eval_matrix(slice, omega)?;
    let tol = tol.unwrap_or_else(|| default_nullspace_tol(slice.len()));
    for range in slice.eigenspaces() {
        if let Some(w) = witness_in_columns(&e, range.clone(), tol) {
            let eigenvalue = slice.modes()[range.start].eigenvalue();
            return Ok(Some(NodalWitness { eigenvalue: Some(eigenvalue), ..w }));
        }
    }
    Ok(witness_in_columns(&e, 0..slice.len(), tol))
}

/// Nullspace search restricted to the modes `range` of the slice.
pub fn eigenspace_witness(
    slice: &SpectrumSlice,
    range: Range<usize>,
    omega: &PointSet,
    tol: f64,
) -> Result<Option<NodalWitness>> {
    if range.end > slice.len() || range.is_empty() {
        return Err(Error::contract("mode range outside the slice"));
    }
    let e = eval_matrix(slice, omega)?;
    let levels = &slice.modes()[range.clone()];
    let single = levels.iter().all(|m| m.level() == levels[0].level());
    Ok(witness_in_columns(&e, range, tol).map(|w| NodalWitness {
        eigenvalue: single.then(|| levels[0].eigenvalue()),
        ..w
    }))
}

fn witness_in_columns(e: &EvalMatrix, range: Range<usize>, tol: f64) -> Option<NodalWitness> {
    let sub = e.columns(range.clone());
    let mut null = linalg::nullspace(&sub, tol);
    if null.is_empty() {
        return None;
    }
    let mut v = null.swap_remove(null.len() - 1);
    canonical_sign(&mut v);
    let mut full = alloc::vec![0.0; e.cols()];
    full[range].copy_from_slice(&v);
    let residual = norm_inf(&e.apply(&full));
    (residual <= tol).then(|| NodalWitness {
        coefficients: CoefVec::new(full),
        residual,
        eigenvalue: None,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralFit {
    /// `(Λ, constant)` samples.
    pub samples: Vec<(f64, f64)>,
    pub c: f64,
    pub beta: f64,
    /// Euclidean norm of the log-residuals at the optimum.
    pub residual: f64,
}

impl SpectralFit {
    /// `C exp(C Λ^β)`
    pub fn eval(&self, cutoff: f64) -> f64 {
        self.c * libm::exp(self.c * libm::pow(cutoff, self.beta))
    }

    pub fn log_eval(&self, cutoff: f64) -> f64 {
        libm::log(self.c) + self.c * libm::pow(cutoff, self.beta)
    }
}

/// β-grid values `0.01, 0.02, …, 1.00`.
pub fn beta_grid() -> impl Iterator<Item = f64> {
    (1..=100).map(|i| i as f64 / 100.0)
}

/// Least-squares fit of `ln K = ln C + C Λ^β` over the β grid.
pub fn fit_growth(samples: &[(f64, f64)]) -> Result<SpectralFit> {
    if samples.len() < 3 {
        return Err(Error::contract("growth fit needs at least 3 samples"));
    }
    if samples.iter().any(|s| !s.1.is_finite()) {
        return Err(Error::contract("growth fit is undefined for infinite constants"));
    }
    if samples.iter().any(|s| !(s.1 > 0.0) || !(s.0 > 0.0)) {
        return Err(Error::domain("growth fit needs positive cutoffs and constants"));
    }
    if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::contract("growth fit needs strictly increasing cutoffs"));
    }
    let ys: Vec<f64> = samples.iter().map(|s| libm::log(s.1)).collect();
    let mut best: Option<SpectralFit> = None;
    for beta in beta_grid() {
        let xs: Vec<f64> = samples.iter().map(|s| libm::pow(s.0, beta)).collect();
        let (u, sse) = best_log_c(&xs, &ys);
        let residual = libm::sqrt(sse);
        if best.as_ref().is_none_or(|b| residual < b.residual) {
            best = Some(SpectralFit { samples: samples.to_vec(), c: libm::exp(u), beta, residual });
        }
    }
    Ok(best.expect("grid is nonempty"))
}

/// Least-squares `C` of `ln K = ln C + C Λ^β` at a fixed `β`.
pub fn fit_growth_at(samples: &[(f64, f64)], beta: f64) -> Result<SpectralFit> {
    if samples.len() < 2 {
        return Err(Error::contract("fixed-beta fit needs at least 2 samples"));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::domain("beta must lie in (0, 1]"));
    }
    if samples.iter().any(|s| !s.1.is_finite()) {
        return Err(Error::contract("growth fit is undefined for infinite constants"));
    }
    if samples.iter().any(|s| !(s.1 > 0.0) || !(s.0 > 0.0)) {
        return Err(Error::domain("growth fit needs positive cutoffs and constants"));
    }
    let ys: Vec<f64> = samples.iter().map(|s| libm::log(s.1)).collect();
    let xs: Vec<f64> = samples.iter().map(|s| libm::pow(s.0, beta)).collect();
    let (u, sse) = best_log_c(&xs, &ys);
    Ok(SpectralFit { samples: samples.to_vec(), c: libm::exp(u), beta, residual: libm::sqrt(sse) })
}

fn sse(u: f64, xs: &[f64], ys: &[f64]) -> f64 {
    let c = libm::exp(u);
    xs.iter().zip(ys).map(|(x, y)| (u + c * x - y) * (u + c * x - y)).sum()
}

/// Minimizes the sum of squares over `u = ln C` by a scan followed by
/// golden-section refinement.
pub(crate) fn best_log_c(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let (lo, hi, step) = (-40.0, 12.0, 0.01);
    let steps = ((hi - lo) / step) as usize;
    let mut best_u = lo;
    let mut best_v = f64::INFINITY;
    for i in 0..=steps {
        let u = lo + i as f64 * step;
        let v = sse(u, xs, ys);
        if v < best_v {
            best_v = v;
            best_u = u;
        }
    }
    let (mut a, mut b) = (best_u - step, best_u + step);
    let phi = 0.5 * (libm::sqrt(5.0) - 1.0);
    for _ in 0..80 {
        let x1 = b - phi * (b - a);
        let x2 = a + phi * (b - a);
        if sse(x1, xs, ys) <= sse(x2, xs, ys) {
            b = x2;
        } else {
            a = x1;
        }
    }
    let u = 0.5 * (a + b);
    let v = sse(u, xs, ys);
    if v <= best_v {
        (u, v)
    } else {
        (best_u, best_v)
    }
}

/// Per-cutoff line of a product composition check.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductComposeRow {
    pub cutoff: f64,
    pub product_modes: usize,
    /// Mode count of the first factor below the cutoff.
    pub factor1_modes: usize,
    pub measured: SpectralConstant,
    /// `measured.lower`, or `‖c‖/‖Ec‖_∞` at the witness when the product
    /// matrix is numerically singular: the tolerance decides singularity,
    /// while this ratio is what was actually measured.
    pub measured_lower: f64,
    pub factor1: SpectralConstant,
    pub factor2: SpectralConstant,
    /// `√N₁(Λ)·K₁(Λ)·K₂(Λ)` with `K_i` from the factor fits.
    pub composed_bound: f64,
    /// Same product with the factors' measured upper brackets.
    pub composed_upper: f64,
    /// `C′ exp(C′ Λ^β)`
    pub c_prime_bound: f64,
    pub inherited_infinite: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductComposeReport {
    pub beta: Option<f64>,
    pub c_prime: Option<f64>,
    pub rows: Vec<ProductComposeRow>,
}

impl ProductComposeReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

/// Inputs of [`product_compose_check`].
pub struct ProductSetup<'a> {
    pub dims: (usize, usize),
    pub scale: f64,
    pub omega1: &'a PointSet,
    pub omega2: &'a PointSet,
    pub cutoffs: &'a [f64],
    /// Per-factor fits; `None` when a factor constant is infinite somewhere.
    pub fits: Option<(&'a SpectralFit, &'a SpectralFit)>,
    pub search: SearchOptions,
}

/// Measures the spectral constant of `ω₁×ω₂` on the product box and
/// compares it with the bound composed from the factors: for `u` in the
/// product band, `‖u‖ ≤ √N₁(Λ) K₁(Λ) K₂(Λ) sup_{ω₁×ω₂}|u|`.
pub fn product_compose_check(setup: &ProductSetup<'_>) -> Result<ProductComposeReport> {
    let (n1, n2) = setup.dims;
    if setup.omega1.dimension() != n1 || setup.omega2.dimension() != n2 {
        return Err(Error::contract("factor point sets do not match the factor dimensions"));
    }
    let beta = match setup.fits {
        Some((f1, f2)) => {
            if (f1.beta - f2.beta).abs() > 1e-12 {
                return Err(Error::contract(format!(
                    "factor fits disagree on beta: {} vs {}",
                    f1.beta, f2.beta
                )));
            }
            Some(f1.beta)
        }
        None => None,
    };
    let product_points: Vec<Vec<f64>> = setup
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
    let omega = PointSet::explicit(product_points)?;

    let mut rows = Vec::with_capacity(setup.cutoffs.len());
    for &cutoff in setup.cutoffs {
        let sp = SpectrumSlice::enumerate(n1 + n2, cutoff, setup.scale)?;
        let s1 = SpectrumSlice::enumerate(n1, cutoff, setup.scale)?;
        let s2 = SpectrumSlice::enumerate(n2, cutoff, setup.scale)?;
        if sp.is_empty() || s1.is_empty() || s2.is_empty() {
            return Err(Error::domain(format!("cutoff {cutoff} lies below the first eigenvalue")));
        }
        let e = eval_matrix(&sp, &omega)?;
        let measured = spectral_constant_of(&e, cutoff, &setup.search)?;
        let measured_lower =
            if measured.is_finite() { measured.lower } else { e.ratio(measured.witness.as_slice()) };
        let factor1 = spectral_constant(&s1, setup.omega1, &setup.search)?;
        let factor2 = spectral_constant(&s2, setup.omega2, &setup.search)?;
        let root_n1 = libm::sqrt(s1.len() as f64);
        let inherited = !factor1.is_finite() || !factor2.is_finite();
        let composed_upper = root_n1 * factor1.upper * factor2.upper;
        let composed_bound = match setup.fits {
            Some((f1, f2)) if !inherited => root_n1 * f1.eval(cutoff) * f2.eval(cutoff),
            _ => f64::INFINITY,
        };
        let holds = if inherited {
            !measured.is_finite()
        } else {
            measured_lower <= composed_bound
        };
        rows.push(ProductComposeRow {
            cutoff,
            product_modes: sp.len(),
            factor1_modes: s1.len(),
            measured,
            measured_lower,
            factor1,
            factor2,
            composed_bound,
            composed_upper,
            c_prime_bound: f64::INFINITY,
            inherited_infinite: inherited,
            holds,
        });
    }
    let c_prime = beta.and_then(|b| {
        let targets: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.composed_bound.is_finite())
            .map(|r| (r.cutoff, r.composed_bound))
            .collect();
        (!targets.is_empty()).then(|| absorb_constant(&targets, b))
    });
    if let (Some(cp), Some(b)) = (c_prime, beta) {
        for row in &mut rows {
            row.c_prime_bound = cp * libm::exp(cp * libm::pow(row.cutoff, b));
        }
    }
    Ok(ProductComposeReport { beta, c_prime, rows })
}

/// Smallest `C′` (to bisection accuracy, rounded up) with
/// `C′ exp(C′ Λ^β) ≥ target` at every sample.
pub fn absorb_constant(targets: &[(f64, f64)], beta: f64) -> f64 {
    let covers = |c: f64| {
        targets.iter().all(|&(cutoff, t)| libm::log(c) + c * libm::pow(cutoff, beta) >= libm::log(t))
    };
    let (mut lo, mut hi) = (1e-12f64, 1.0f64);
    while !covers(hi) {
        hi *= 2.0;
        if hi > 1e12 {
            return f64::INFINITY;
        }
    }
    for _ in 0..200 {
        let mid = libm::sqrt(lo * hi);
        if covers(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointsets::Generator;
    use crate::rng::substream;
    use crate::PI_SQUARED;
    use core::f64::consts::SQRT_2;
    use proptest::prelude::*;
    use rand::Rng;

    fn pts(xs: &[f64]) -> PointSet {
        PointSet::from_coords(xs).unwrap()
    }

    #[test]
    fn eval_matrix_examples() {
        let s1 = SpectrumSlice::enumerate(1, 1.0, 1.0).unwrap();
        assert_eq!(eval_matrix(&s1, &pts(&[0.5])).unwrap().matrix()[(0, 0)], SQRT_2);
        let s2 = SpectrumSlice::enumerate(2, 2.0, 1.0).unwrap();
        let w = PointSet::explicit(alloc::vec![alloc::vec![0.5, 0.5]]).unwrap();
        assert!((eval_matrix(&s2, &w).unwrap().matrix()[(0, 0)] - 2.0).abs() < 1e-15);
        let s12 = SpectrumSlice::enumerate(1, 4.0, 1.0).unwrap();
        let e = eval_matrix(&s12, &pts(&[1.0 / 3.0])).unwrap();
        let third = core::f64::consts::PI / 3.0;
        assert!((e.matrix()[(0, 0)] - SQRT_2 * third.sin()).abs() < 1e-14);
        assert!((e.matrix()[(0, 1)] - SQRT_2 * (2.0 * third).sin()).abs() < 1e-14);
        assert!(matches!(eval_matrix(&s2, &pts(&[0.5])), Err(Error::Contract(_))));
    }

    #[test]
    fn spectral_constant_examples() {
        let s1 = SpectrumSlice::enumerate(1, 1.0, 1.0).unwrap();
        let k = spectral_constant(&s1, &pts(&[0.5]), &SearchOptions::default()).unwrap();
        assert!((k.lower - 1.0 / SQRT_2).abs() < 1e-15);
        assert!((k.upper - 1.0 / SQRT_2).abs() < 1e-15);

        let s3 = SpectrumSlice::enumerate(1, 9.0, 1.0).unwrap();
        let k = spectral_constant(&s3, &pts(&[0.3, 0.6]), &SearchOptions::default()).unwrap();
        assert_eq!(k.status, ConstantStatus::InfiniteNullspace);
        assert!(k.lower.is_infinite());

        let s2 = SpectrumSlice::enumerate(1, 4.0, 1.0).unwrap();
        let k = spectral_constant(&s2, &pts(&[0.25, 0.75]), &SearchOptions::default()).unwrap();
        // E = [[1, √2], [1, -√2]] has singular values 2 and √2
        assert!((k.sigma_min - SQRT_2).abs() < 1e-14);
        assert!(k.lower >= 1.0 / SQRT_2 - 1e-14 && k.lower <= k.upper);
        let e = eval_matrix(&s2, &pts(&[0.25, 0.75])).unwrap();
        assert!((e.ratio(k.witness.as_slice()) - k.lower).abs() < 1e-10 * k.lower);
        // exact constant: max ‖c‖ over |c1 ± √2 c2| ≤ 1 is at c = (1, 0): ratio 1
        assert!((k.lower - 1.0).abs() < 1e-6);
    }

    #[test]
    fn antisymmetric_witness_on_the_diagonal() {
        let s = SpectrumSlice::enumerate(2, 5.0, 1.0).unwrap();
        let diag = PointSet::explicit(alloc::vec![alloc::vec![0.2, 0.2], alloc::vec![0.7, 0.7]])
            .unwrap();
        let w = nullspace_witness(&s, &diag, None).unwrap().unwrap();
        assert_eq!(w.eigenvalue, Some(5.0));
        let c = w.coefficients.as_slice();
        assert_eq!(c[0], 0.0);
        assert!((c[1].abs() - 1.0 / SQRT_2).abs() < 1e-12);
        assert!((c[1] + c[2]).abs() < 1e-12);
    }

    #[test]
    fn witness_when_modes_outnumber_points() {
        let s = SpectrumSlice::enumerate(1, 9.0, 1.0).unwrap();
        let w = nullspace_witness(&s, &pts(&[0.31, 0.62]), None).unwrap().unwrap();
        assert!(w.residual <= default_nullspace_tol(3));
        assert!((norm2(w.coefficients.as_slice()) - 1.0).abs() < 1e-14);
        assert_eq!(w.eigenvalue, None);
        assert!(nullspace_witness(&s, &pts(&[0.31, 0.62, 0.77]), None).unwrap().is_none());
    }

    #[test]
    fn level_fifty_witness_for_random_points() {
        let s = SpectrumSlice::enumerate(2, 50.0, 1.0).unwrap();
        let space = s.eigenspaces().pop().unwrap();
        assert_eq!(space.len(), 3);
        let mut rng = substream(21, 0);
        for _ in 0..10 {
            let w = PointSet::explicit(alloc::vec![
                alloc::vec![rng.random::<f64>(), rng.random::<f64>()],
                alloc::vec![rng.random::<f64>(), rng.random::<f64>()],
            ])
            .unwrap();
            let wit = eigenspace_witness(&s, space.clone(), &w, 1e-10).unwrap().unwrap();
            assert!(wit.residual <= 1e-10);
            assert_eq!(wit.eigenvalue, Some(50.0));
        }
    }

    #[test]
    fn fit_growth_recovers_model() {
        let samples: Vec<(f64, f64)> = [10.0, 20.0, 40.0, 80.0, 160.0, 320.0]
            .iter()
            .map(|&l: &f64| (l, 2.0 * (2.0 * l.sqrt()).exp()))
            .collect();
        let fit = fit_growth(&samples).unwrap();
        assert!((fit.beta - 0.5).abs() < 1e-12);
        assert!((fit.c - 2.0).abs() < 1e-6);
        assert!(fit.residual < 1e-6);
        let flat: Vec<(f64, f64)> = [1.0, 2.0, 3.0].iter().map(|&l| (l, 1.5)).collect();
        let fit = fit_growth(&flat).unwrap();
        assert_eq!(fit.beta, 0.01);
        assert!(fit_growth(&samples[..2]).is_err());
        let mut inf = samples.clone();
        inf[1].1 = f64::INFINITY;
        assert!(matches!(fit_growth(&inf), Err(Error::Contract(_))));
    }

    #[test]
    fn fixed_beta_fit_recovers_constant() {
        let samples: Vec<(f64, f64)> =
            [10.0, 40.0, 90.0, 160.0].iter().map(|&l: &f64| (l, 1.5 * (1.5 * l.powf(0.3)).exp())).collect();
        let f = fit_growth_at(&samples, 0.3).unwrap();
        assert!((f.c - 1.5).abs() < 1e-6 && f.residual < 1e-6);
        assert!(fit_growth_at(&samples, 0.0).is_err());
    }

    #[test]
    fn absorb_constant_dominates_targets() {
        let targets = [(10.0, 5.0), (40.0, 300.0), (90.0, 2000.0)];
        let c = absorb_constant(&targets, 0.5);
        for &(l, t) in &targets {
            assert!(c.ln() + c * l.sqrt() >= t.ln());
        }
        let smaller = c * (1.0 - 1e-9);
        assert!(targets.iter().any(|&(l, t)| smaller.ln() + smaller * l.sqrt() < t.ln()));
    }

    #[test]
    fn product_of_single_modes() {
        let g = PointSet::generate(&Generator::UniformGrid { per_axis: alloc::vec![9] }).unwrap();
        let cutoffs = [2.5 * PI_SQUARED, 3.0 * PI_SQUARED, 3.5 * PI_SQUARED];
        // factor constants are constant in Λ here: the fit is flat with C = K
        let mut search = SearchOptions::default();
        search.starts = 4;
        let report = product_compose_check(&ProductSetup {
            dims: (1, 1),
            scale: PI_SQUARED,
            omega1: &g,
            omega2: &g,
            cutoffs: &cutoffs,
            fits: None,
            search,
        })
        .unwrap();
        for row in &report.rows {
            assert_eq!(row.product_modes, 1);
            assert!((row.measured.lower - row.factor1.lower * row.factor2.lower).abs() < 1e-12);
        }
    }

    #[test]
    fn product_inherits_nullspace() {
        let one = pts(&[0.3]);
        let report = product_compose_check(&ProductSetup {
            dims: (1, 1),
            scale: 1.0,
            omega1: &one,
            omega2: &one,
            cutoffs: &[10.0],
            fits: None,
            search: SearchOptions { starts: 2, ..SearchOptions::default() },
        })
        .unwrap();
        let row = &report.rows[0];
        assert!(row.inherited_infinite);
        assert!(!row.measured.is_finite());
        assert!(row.holds);
    }

    #[test]
    fn beta_mismatch_is_a_contract_error() {
        let f1 = SpectralFit { samples: Vec::new(), c: 1.0, beta: 0.5, residual: 0.0 };
        let f2 = SpectralFit { beta: 0.6, ..f1.clone() };
        let one = pts(&[0.3]);
        let err = product_compose_check(&ProductSetup {
            dims: (1, 1),
            scale: 1.0,
            omega1: &one,
            omega2: &one,
            cutoffs: &[1.0],
            fits: Some((&f1, &f2)),
            search: SearchOptions::default(),
        })
        .unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }

    proptest! {
        #[test]
        fn witness_ratio_and_scale_covariance(seed in any::<u64>(), m in 3usize..7, p in -20i32..20) {
            let s = SpectrumSlice::enumerate(1, 9.0, 1.0).unwrap();
            let mut rng = substream(seed, 0);
            let mut xs: Vec<f64> = (0..m).map(|_| rng.random_range(0.01..0.99)).collect();
            xs.sort_by(|a, b| a.total_cmp(b));
            xs.dedup();
            prop_assume!(xs.len() >= 3);
            let w = pts(&xs);
            let opts = SearchOptions { starts: 4, iterations: 50, ..SearchOptions::default() };
            let k = spectral_constant(&s, &w, &opts).unwrap();
            prop_assume!(k.is_finite());
            let e = eval_matrix(&s, &w).unwrap();
            prop_assert!((e.ratio(k.witness.as_slice()) - k.lower).abs() <= 1e-10 * k.lower);
            prop_assert!(k.lower * (1.0 - 1e-12) <= k.upper);
            prop_assert!(k.lower >= 1.0 / k.sigma_min * (1.0 - 1e-12));
            // power-of-two scalings are exact, so the ratio must not move at all
            let scaled = k.witness.scaled(-libm::scalbn(1.0, p));
            prop_assert_eq!(e.ratio(scaled.as_slice()), e.ratio(k.witness.as_slice()));
            // adding a point cannot raise the ratio of the same witness
            let extra = 0.5 * (xs[0] + xs[1]);
            let mut more = xs.clone();
            more.push(extra);
            let e2 = eval_matrix(&s, &pts(&more)).unwrap();
            prop_assert!(e2.ratio(k.witness.as_slice()) <= k.lower);
        }
    }
}
