//! Observation sets and the transfinite-diameter quantity `γ_k`.
//!
//! `γ_k(E) = sup over k-subsets {x_1..x_k} ⊂ E of min_i ∏_{j≠i} |x_i − x_j|`.
//! Products are accumulated as sums of logarithms; for `ω_exp` the linear
//! value underflows long before `k = 14`.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Default ceiling on the number of k-subsets `gamma_exact` will visit.
pub const DEFAULT_SUBSET_BUDGET: u64 = 5_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    /// `{ i^{-α} : i = 1..count }`
    OmegaAlpha { alpha: f64, count: usize },
    /// `{ 2^{-k} : k = 1..count }`
    OmegaExp { count: usize },
    Singleton { point: Vec<f64> },
    /// Interior grid `i/(m+1)`, `i = 1..m`, per axis.
    UniformGrid { per_axis: Vec<usize> },
    /// Endpoints of the level-`level` intervals of the Cantor construction
    /// that keeps two end pieces of relative length `ratio`.
    Cantor { level: u32, ratio: f64 },
    Product { a: Box<Generator>, b: Box<Generator> },
    Explicit { points: Vec<Vec<f64>> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dimension: usize,
    points: Vec<Vec<f64>>,
    generator: Generator,
}

impl PointSet {
    pub fn generate(generator: &Generator) -> Result<Self> {
        let points = match generator {
            Generator::OmegaAlpha { alpha, count } => {
                if !(*alpha > 0.0 && alpha.is_finite()) {
                    return Err(Error::domain("omega_alpha needs alpha > 0"));
                }
                if *count == 0 {
                    return Err(Error::domain("omega_alpha needs count >= 1"));
                }
                (1..=*count).map(|i| vec![libm::pow(i as f64, -alpha)]).collect()
            }
            Generator::OmegaExp { count } => {
                if *count == 0 {
                    return Err(Error::domain("omega_exp needs count >= 1"));
                }
                if *count > 1000 {
                    return Err(Error::domain("omega_exp count beyond 1000 underflows"));
                }
                (1..=*count).map(|k| vec![libm::scalbn(1.0, -(k as i32))]).collect()
            }
            Generator::Singleton { point } => {
                if point.is_empty() {
                    return Err(Error::domain("singleton needs a point"));
                }
                if point.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
                    return Err(Error::domain("singleton point must lie in the open box"));
                }
                vec![point.clone()]
            }
            Generator::UniformGrid { per_axis } => {
                if per_axis.is_empty() || per_axis.contains(&0) {
                    return Err(Error::domain("uniform grid needs a positive count per axis"));
                }
                let axes: Vec<Vec<f64>> = per_axis
                    .iter()
                    .map(|&m| (1..=m).map(|i| i as f64 / (m + 1) as f64).collect())
                    .collect();
                let mut pts = vec![Vec::new()];
                for axis in &axes {
                    pts = pts
                        .into_iter()
                        .flat_map(|p: Vec<f64>| {
                            axis.iter().map(move |&x| {
                                let mut q = p.clone();
                                q.push(x);
                                q
                            })
                        })
                        .collect();
                }
                pts
            }
            Generator::Cantor { level, ratio } => {
                if !(*ratio > 0.0 && *ratio < 0.5) {
                    return Err(Error::domain("cantor ratio must lie in (0, 1/2)"));
                }
                if *level > 20 {
                    return Err(Error::domain("cantor level must be <= 20"));
                }
                let mut intervals = vec![(0.0f64, 1.0f64)];
                for _ in 0..*level {
                    intervals = intervals
                        .into_iter()
                        .flat_map(|(a, b)| {
                            let len = (b - a) * ratio;
                            [(a, a + len), (b - len, b)]
                        })
                        .collect();
                }
                let mut ends: Vec<f64> = intervals.iter().flat_map(|&(a, b)| [a, b]).collect();
                ends.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
                ends.dedup();
                ends.into_iter().map(|x| vec![x]).collect()
            }
            Generator::Product { a, b } => {
                let pa = PointSet::generate(a)?;
                let pb = PointSet::generate(b)?;
                let mut pts = Vec::with_capacity(pa.len() * pb.len());
                for p in &pa.points {
                    for q in &pb.points {
                        let mut r = p.clone();
                        r.extend_from_slice(q);
                        pts.push(r);
                    }
                }
                pts
            }
            Generator::Explicit { points } => {
                if points.is_empty() {
                    return Err(Error::domain("explicit point set is empty"));
                }
                points.clone()
            }
        };
        Self::from_parts(points, generator.clone())
    }

    pub fn explicit(points: Vec<Vec<f64>>) -> Result<Self> {
        Self::generate(&Generator::Explicit { points })
    }

    /// One-dimensional set from plain coordinates.
    pub fn from_coords(xs: &[f64]) -> Result<Self> {
        Self::explicit(xs.iter().map(|&x| vec![x]).collect())
    }

    fn from_parts(points: Vec<Vec<f64>>, generator: Generator) -> Result<Self> {
        let dimension = points.first().map_or(0, Vec::len);
        if dimension == 0 {
            return Err(Error::domain("points must have at least one coordinate"));
        }
        if points.iter().any(|p| p.len() != dimension) {
            return Err(Error::contract("points have mixed dimensions"));
        }
        if points.iter().flatten().any(|&x| !(0.0..=1.0).contains(&x)) {
            return Err(Error::domain("point lies outside the closed unit box"));
        }
        let mut sorted: Vec<&Vec<f64>> = points.iter().collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain("point set contains duplicate points"));
        }
        Ok(PointSet { dimension, points, generator })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Coordinates of a one-dimensional set.
    pub fn coords(&self) -> Result<Vec<f64>> {
        if self.dimension != 1 {
            return Err(Error::contract(format!(
                "expected a one-dimensional point set, got dimension {}",
                self.dimension
            )));
        }
        Ok(self.points.iter().map(|p| p[0]).collect())
    }

    /// The first `count` points, keeping the generator tag.
    pub fn truncated(&self, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::domain("truncation count must be >= 1"));
        }
        let points = self.points.iter().take(count).cloned().collect();
        Self::from_parts(points, self.generator.clone())
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i + 1..] {
                d = d.max(euclid(p, q));
            }
        }
        d
    }
}

fn euclid(p: &[f64], q: &[f64]) -> f64 {
    libm::sqrt(p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GammaMethod {
    Exact,
    GreedyLeja,
    /// The first `k` points of the set in generation order.
    FirstK,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GammaEstimate {
    pub k: usize,
    /// `ln` of the objective; `-∞` when two witness points coincide.
    pub log_value: f64,
    /// Indices into the set, ascending.
    pub witness: Vec<usize>,
    pub witness_points: Vec<f64>,
    pub method: GammaMethod,
}

impl GammaEstimate {
    /// The objective on the linear scale, when representable as a normal double.
    pub fn value(&self) -> Option<f64> {
        let v = libm::exp(self.log_value);
        if self.log_value == f64::NEG_INFINITY || (v.is_normal() && v.is_finite()) {
            Some(if self.log_value == f64::NEG_INFINITY { 0.0 } else { v })
        } else {
            None
        }
    }
}

/// `ln min_i ∏_{j≠i} |x_i − x_j|`, accumulated in the order given.
pub fn log_objective(xs: &[f64]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, &xi) in xs.iter().enumerate() {
        let mut s = 0.0;
        for (j, &xj) in xs.iter().enumerate() {
            if i != j {
                s += libm::log((xi - xj).abs());
            }
        }
        best = best.min(s);
    }
    best
}

fn objective_of(coords: &[f64], witness: &[usize]) -> f64 {
    let pts: Vec<f64> = witness.iter().map(|&i| coords[i]).collect();
    log_objective(&pts)
}

fn check_k(len: usize, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::domain("gamma needs k >= 2"));
    }
    if k > len {
        return Err(Error::contract(format!("gamma needs k <= |E| = {len}, got {k}")));
    }
    Ok(())
}

pub fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n.saturating_sub(k));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Exact `γ_k` by enumerating all k-subsets; ties keep the
/// lexicographically smallest index set.
pub fn gamma_exact(e: &PointSet, k: usize) -> Result<GammaEstimate> {
    gamma_exact_with_budget(e, k, DEFAULT_SUBSET_BUDGET)
}

pub fn gamma_exact_with_budget(e: &PointSet, k: usize, budget: u64) -> Result<GammaEstimate> {
    let coords = e.coords()?;
    check_k(coords.len(), k)?;
    let subsets = binomial(coords.len() as u64, k as u64);
    if subsets > budget {
        return Err(Error::resource(
            format!("gamma_exact subset count {subsets}; use the greedy Leja method"),
            budget,
        ));
    }
    let n = coords.len();
    let mut idx: Vec<usize> = (0..k).collect();
    let mut best = f64::NEG_INFINITY;
    let mut best_idx = idx.clone();
    let mut first = true;
    loop {
        let v = objective_of(&coords, &idx);
        if first || v > best {
            best = v;
            best_idx.clone_from(&idx);
            first = false;
        }
        // next combination in lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(estimate(&coords, k, best, best_idx, GammaMethod::Exact));
            }
            i -= 1;
            if idx[i] < n - k + i {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn estimate(
    coords: &[f64],
    k: usize,
    log_value: f64,
    witness: Vec<usize>,
    method: GammaMethod,
) -> GammaEstimate {
    let witness_points = witness.iter().map(|&i| coords[i]).collect();
    GammaEstimate { k, log_value, witness, witness_points, method }
}

/// Greedy Leja-type heuristic: seed with a diameter pair, then repeatedly
/// add the point that maximizes the objective of the enlarged witness.
/// Ties go to the smallest coordinate.
pub fn gamma_greedy_leja(e: &PointSet, k: usize) -> Result<GammaEstimate> {
    let coords = e.coords()?;
    check_k(coords.len(), k)?;
    let n = coords.len();
    let lo = (0..n).min_by(|&a, &b| coords[a].total_cmp(&coords[b])).expect("nonempty");
    let hi = (0..n).max_by(|&a, &b| coords[a].total_cmp(&coords[b])).expect("nonempty");
    let mut chosen = vec![lo.min(hi), lo.max(hi)];
    let mut in_set = vec![false; n];
    in_set[lo] = true;
    in_set[hi] = true;
    while chosen.len() < k {
        let mut best: Option<(f64, usize)> = None;
        for cand in 0..n {
            if in_set[cand] {
                continue;
            }
            let mut trial = chosen.clone();
            trial.push(cand);
            trial.sort_unstable();
            let v = objective_of(&coords, &trial);
            let better = match best {
                None => true,
                Some((bv, bi)) => v > bv || (v == bv && coords[cand] < coords[bi]),
            };
            if better {
                best = Some((v, cand));
            }
        }
        let (_, pick) = best.expect("k <= |E| leaves a candidate");
        in_set[pick] = true;
        chosen.push(pick);
        chosen.sort_unstable();
    }
    let v = objective_of(&coords, &chosen);
    Ok(estimate(&coords, k, v, chosen, GammaMethod::GreedyLeja))
}

/// Objective of the first `k` points in generation order.
pub fn gamma_first_k(e: &PointSet, k: usize) -> Result<GammaEstimate> {
    let coords = e.coords()?;
    check_k(coords.len(), k)?;
    let witness: Vec<usize> = (0..k).collect();
    let v = objective_of(&coords, &witness);
    Ok(estimate(&coords, k, v, witness, GammaMethod::FirstK))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrowthLaw {
    /// regress `ln γ_k` on `k ln k`
    KLogK,
    /// regress `ln γ_k` on `k²`
    KSquared,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthFit {
    pub law: GrowthLaw,
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    /// `(k, ln γ_k)` samples behind the fit.
    pub samples: Vec<(usize, f64)>,
}

/// Least-squares slope of `ln γ_k` against the law's abscissa over `ks`.
pub fn gamma_growth_fit(
    e: &PointSet,
    ks: core::ops::RangeInclusive<usize>,
    law: GrowthLaw,
    method: GammaMethod,
) -> Result<GrowthFit> {
    let mut samples = Vec::new();
    for k in ks {
        let est = match method {
            GammaMethod::Exact => gamma_exact(e, k)?,
            GammaMethod::GreedyLeja => gamma_greedy_leja(e, k)?,
            GammaMethod::FirstK => gamma_first_k(e, k)?,
        };
        samples.push((k, est.log_value));
    }
    fit_growth_samples(&samples, law)
}

pub fn fit_growth_samples(samples: &[(usize, f64)], law: GrowthLaw) -> Result<GrowthFit> {
    if samples.len() < 3 {
        return Err(Error::contract("growth fit needs at least 3 values of k"));
    }
    let xs: Vec<f64> = samples
        .iter()
        .map(|&(k, _)| {
            let k = k as f64;
            match law {
                GrowthLaw::KLogK => k * libm::log(k),
                GrowthLaw::KSquared => k * k,
            }
        })
        .collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let line = crate::stats::fit_line(&xs, &ys)?;
    Ok(GrowthFit {
        law,
        slope: line.slope,
        intercept: line.intercept,
        residual: line.residual,
        samples: samples.to_vec(),
    })
}

/// Least-squares slope of `ln|ln γ_k|` against `ln k`: the exponent `p` in
/// `|ln γ_k| ≈ c·k^p`.
pub fn log_log_exponent(samples: &[(usize, f64)]) -> Result<f64> {
    if samples.iter().any(|s| !(s.1 < 0.0) || !s.1.is_finite()) {
        return Err(Error::domain("log-log exponent needs finite ln γ_k < 0"));
    }
    let xs: Vec<f64> = samples.iter().map(|s| libm::log(s.0 as f64)).collect();
    let ys: Vec<f64> = samples.iter().map(|s| libm::log(-s.1)).collect();
    Ok(crate::stats::fit_line(&xs, &ys)?.slope)
}

/// Upper bound on the `s`-dimensional Hausdorff content from a greedy cover
/// by radius-`r` balls: `(ball count)·r^s`.
pub fn hausdorff_content_upper(e: &PointSet, s: f64, r: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::domain("content exponent must be positive"));
    }
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::domain("cover radius must lie in (0, 1]"));
    }
    Ok(cover_count(e, r) as f64 * libm::pow(r, s))
}

/// Balls used by the greedy cover. In one dimension the left-to-right sweep
/// with intervals `[x, x + 2r]` is optimal; in higher dimensions balls are
/// centred at the first uncovered point in set order.
pub fn cover_count(e: &PointSet, r: f64) -> usize {
    if e.dimension == 1 {
        let mut xs: Vec<f64> = e.points.iter().map(|p| p[0]).collect();
        xs.sort_by(|a, b| a.total_cmp(b));
        let mut count = 0;
        let mut reach = f64::NEG_INFINITY;
        for x in xs {
            if x > reach {
                count += 1;
                reach = x + 2.0 * r;
            }
        }
        return count;
    }
    let mut covered = vec![false; e.len()];
    let mut count = 0;
    for i in 0..e.len() {
        if covered[i] {
            continue;
        }
        count += 1;
        for j in i..e.len() {
            if !covered[j] && euclid(&e.points[i], &e.points[j]) <= r {
                covered[j] = true;
            }
        }
    }
    count
}
