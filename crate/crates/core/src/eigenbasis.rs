//! Dirichlet sine eigenbasis of the unit box `(0,1)^n`.
//!
//! Eigenfunctions are tensor products `∏ √2 sin(π k_i x_i)` indexed by
//! positive multi-indices; the eigenvalue of index `k` is `scale · Σ k_i²`.
//! With `scale = π²` these are the true Laplace eigenvalues; `scale = 1`
//! reproduces the integer spectrum `{r_1² + … + r_n²}`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use crate::{sin_pi, Error, Result};

/// Default cap on the number of modes a slice may hold.
pub const DEFAULT_MODE_LIMIT: usize = 100_000;

/// A tuple `(k_1, …, k_n)` of positive integers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(components: Vec<u32>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::domain("multi-index must have at least one component"));
        }
        if components.iter().any(|&k| k == 0) {
            return Err(Error::domain("multi-index components must be >= 1"));
        }
        Ok(MultiIndex(components))
    }

    pub fn components(&self) -> &[u32] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    /// `Σ k_i²`, the eigenvalue level in units of `scale`.
    pub fn level(&self) -> u64 {
        self.0.iter().map(|&k| u64::from(k) * u64::from(k)).sum()
    }

    pub fn max_component(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}")?;
        }
        f.write_str(")")
    }
}

/// One normalized Dirichlet eigenfunction together with its eigenvalue.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenMode {
    index: MultiIndex,
    level: u64,
    eigenvalue: f64,
}

impl EigenMode {
    pub fn new(index: MultiIndex, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::domain("eigenvalue scale must be positive and finite"));
        }
        let level = index.level();
        Ok(EigenMode { eigenvalue: scale * level as f64, level, index })
    }

    pub fn index(&self) -> &MultiIndex {
        &self.index
    }

    pub fn eigenvalue(&self) -> f64 {
        self.eigenvalue
    }

    /// Integer level `Σ k_i²`; two modes share an eigenspace iff their levels match.
    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn dimension(&self) -> usize {
        self.index.dimension()
    }

    /// Evaluates `∏ √2 sin(π k_i x_i)` at a point of the closed box.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_point(x, self.dimension())?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        let mut acc = 1.0;
        for (&k, &xi) in self.index.0.iter().zip(x) {
            acc *= core::f64::consts::SQRT_2 * sin_pi(f64::from(k) * xi);
        }
        acc
    }
}

/// Free-function form of [`EigenMode::eval`].
pub fn eval_mode(mode: &EigenMode, x: &[f64]) -> Result<f64> {
    mode.eval(x)
}

pub(crate) fn check_point(x: &[f64], dimension: usize) -> Result<()> {
    if x.len() != dimension {
        return Err(Error::contract(alloc::format!(
            "point has {} coordinates, expected {dimension}",
            x.len()
        )));
    }
    if x.iter().any(|&xi| !(0.0..=1.0).contains(&xi)) {
        return Err(Error::domain("point lies outside the closed unit box"));
    }
    Ok(())
}

/// Largest integer level admitted by `cutoff / scale`, forgiving a few ulps
/// so that `cutoff = r·scale` always admits level `r`.
fn max_level(cutoff: f64, scale: f64) -> u64 {
    let q = cutoff / scale * (1.0 + 16.0 * f64::EPSILON);
    if q < 1.0 {
        0
    } else {
        libm::floor(q) as u64
    }
}

/// All Dirichlet modes of `(0,1)^n` with eigenvalue at most the cutoff,
/// ordered by eigenvalue and then lexicographically by index.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSlice {
    dimension: usize,
    cutoff: f64,
    scale: f64,
    modes: Vec<EigenMode>,
}

impl SpectrumSlice {
    pub fn enumerate(dimension: usize, cutoff: f64, scale: f64) -> Result<Self> {
        Self::enumerate_with_limit(dimension, cutoff, scale, DEFAULT_MODE_LIMIT)
    }

    pub fn enumerate_with_limit(
        dimension: usize,
        cutoff: f64,
        scale: f64,
        limit: usize,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::domain("dimension must be >= 1"));
        }
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(Error::domain("cutoff must be positive and finite"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::domain("scale must be positive and finite"));
        }
        let budget = max_level(cutoff, scale);
        let mut indices = Vec::new();
        let mut current = vec![0u32; dimension];
        collect_indices(&mut current, 0, budget, limit, &mut indices)?;
        // depth-first order is already lexicographic; a stable sort by level keeps it
        let mut modes: Vec<EigenMode> = indices
            .into_iter()
            .map(|comps| {
                let index = MultiIndex(comps);
                let level = index.level();
                EigenMode { eigenvalue: scale * level as f64, level, index }
            })
            .collect();
        modes.sort_by_key(|m| m.level);
        Ok(SpectrumSlice { dimension, cutoff, scale, modes })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn modes(&self) -> &[EigenMode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Largest component over all mode indices (0 for an empty slice).
    pub fn max_frequency(&self) -> u32 {
        self.modes.iter().map(|m| m.index.max_component()).max().unwrap_or(0)
    }

    /// Largest index along one axis.
    pub fn max_frequency_along(&self, axis: usize) -> u32 {
        self.modes.iter().map(|m| m.index.0[axis]).max().unwrap_or(0)
    }

    /// Contiguous ranges of modes sharing one eigenvalue.
    pub fn eigenspaces(&self) -> Vec<Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..=self.modes.len() {
            if i == self.modes.len() || self.modes[i].level != self.modes[start].level {
                if i > start {
                    out.push(start..i);
                }
                start = i;
            }
        }
        out
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.eigenvalue).collect()
    }

    pub fn position(&self, index: &[u32]) -> Option<usize> {
        self.modes.iter().position(|m| m.index.0 == index)
    }
}

fn collect_indices(
    current: &mut Vec<u32>,
    axis: usize,
    remaining: u64,
    limit: usize,
    out: &mut Vec<Vec<u32>>,
) -> Result<()> {
    let axes_left = (current.len() - axis) as u64;
    // every later axis needs at least 1
    if remaining < axes_left {
        return Ok(());
    }
    let room = remaining - (axes_left - 1);
    let mut k: u64 = 1;
    while k * k <= room {
        current[axis] = k as u32;
        if axis + 1 == current.len() {
            if out.len() >= limit {
                return Err(Error::resource("spectrum slice mode count", limit as u64));
            }
            out.push(current.clone());
        } else {
            collect_indices(current, axis + 1, remaining - k * k, limit, out)?;
        }
        k += 1;
    }
    Ok(())
}

/// Free-function form of [`SpectrumSlice::enumerate`].
pub fn enumerate_modes(dimension: usize, cutoff: f64, scale: f64) -> Result<SpectrumSlice> {
    SpectrumSlice::enumerate(dimension, cutoff, scale)
}

/// Coefficients of a combination of slice modes, aligned with slice order.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefVec(Vec<f64>);

impl CoefVec {
    pub fn new(values: Vec<f64>) -> Self {
        CoefVec(values)
    }

    pub fn zeros(len: usize) -> Self {
        CoefVec(vec![0.0; len])
    }

    pub fn unit(len: usize, at: usize) -> Self {
        let mut v = vec![0.0; len];
        v[at] = 1.0;
        CoefVec(v)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> f64 {
        crate::linalg::norm2(&self.0)
    }

    pub fn scaled(&self, factor: f64) -> CoefVec {
        CoefVec(self.0.iter().map(|v| v * factor).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }

    pub(crate) fn check_aligned(&self, slice: &SpectrumSlice) -> Result<()> {
        if self.0.len() != slice.len() {
            return Err(Error::contract(alloc::format!(
                "coefficient vector has length {}, slice has {} modes",
                self.0.len(),
                slice.len()
            )));
        }
        Ok(())
    }
}

/// `Σ_j c_j φ_j(x)` over the modes of `slice`.
pub fn eval_combination(slice: &SpectrumSlice, c: &CoefVec, x: &[f64]) -> Result<f64> {
    c.check_aligned(slice)?;
    check_point(x, slice.dimension)?;
    Ok(slice
        .modes
        .iter()
        .zip(c.as_slice())
        .filter(|(_, &cj)| cj != 0.0)
        .map(|(m, &cj)| cj * m.eval_unchecked(x))
        .sum())
}

/// `s_n(r)`: the number of ordered tuples of positive integers with `Σ r_i² = r`.
pub fn multiplicity(dimension: usize, r: u64) -> u64 {
    fn count(axes: usize, remaining: u64) -> u64 {
        if axes == 0 {
            return u64::from(remaining == 0);
        }
        if remaining < axes as u64 {
            return 0;
        }
        let mut total = 0;
        let mut k: u64 = 1;
        while k * k <= remaining {
            total += count(axes - 1, remaining - k * k);
            k += 1;
        }
        total
    }
    if dimension == 0 {
        return 0;
    }
    count(dimension, r)
}

/// Smallest `r <= r_max` with `s_n(r) >= target`.
pub fn find_high_multiplicity(dimension: usize, target: u64, r_max: u64) -> Option<u64> {
    if dimension == 0 || r_max == 0 {
        return None;
    }
    // tabulate s_n(r) for all r <= r_max by convolving the squares
    let len = r_max as usize + 1;
    let mut counts = vec![0u64; len];
    counts[0] = 1;
    for _ in 0..dimension {
        let mut next = vec![0u64; len];
        for (base, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mut k = 1usize;
            while base + k * k < len {
                next[base + k * k] += c;
                k += 1;
            }
        }
        counts = next;
    }
    counts.iter().enumerate().skip(1).find(|(_, &c)| c >= target).map(|(r, _)| r as u64)
}
