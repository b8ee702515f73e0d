//! Remez-type inequality through Lagrange interpolation on `γ`-good nodes.
//!
//! If `sup |f^{(ℓ)}| ≤ M_ℓ` and `M_{ℓ0}/ℓ0! ≤ 1/2`, then
//! `sup_{[0,1]} |f| ≤ (4ℓ0 / γ_{ℓ0}(E)) · sup_E |f|`. For a sine combination
//! of maximal frequency `K` the Bernstein inequality gives `M_ℓ = (πK)^ℓ`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::eigenbasis::{eval_combination, CoefVec, SpectrumSlice};
use crate::pointsets::{
    binomial, gamma_exact_with_budget, gamma_greedy_leja, GammaMethod, PointSet,
    DEFAULT_SUBSET_BUDGET,
};
use crate::{Error, Result};

/// A rule for the derivative bounds `M_ℓ`.
#[derive(Clone, Debug, PartialEq)]
pub enum DerivBoundSeq {
    /// `M_ℓ = (c·K)^ℓ`
    Bernstein { constant: f64, max_frequency: u32 },
    /// `M_ℓ = m` for every `ℓ ≥ 1`
    Constant(f64),
    /// `M_ℓ = values[ℓ]`; queries past the end are unbounded.
    Table(Vec<f64>),
}

impl DerivBoundSeq {
    /// The default rule for Dirichlet sine combinations `sin(πkx)`.
    pub fn bernstein(max_frequency: u32) -> Self {
        DerivBoundSeq::Bernstein { constant: PI, max_frequency }
    }

    /// `ln M_ℓ` (`-∞` for a zero bound, `+∞` when unknown).
    pub fn log_bound(&self, ell: u32) -> f64 {
        match self {
            DerivBoundSeq::Bernstein { constant, max_frequency } => {
                let w = constant * f64::from(*max_frequency);
                if w == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    f64::from(ell) * libm::log(w)
                }
            }
            DerivBoundSeq::Constant(m) => libm::log(*m),
            DerivBoundSeq::Table(v) => v.get(ell as usize).map_or(f64::INFINITY, |&m| libm::log(m)),
        }
    }
}

/// Smallest `ℓ0 ∈ [1, ℓ_max]` with `M_{ℓ0}/ℓ0! ≤ 1/2`.
pub fn choose_ell0(m: &DerivBoundSeq, ell_max: u32) -> Option<u32> {
    let half = -libm::log(2.0);
    let mut log_fact = 0.0;
    for ell in 1..=ell_max {
        log_fact += libm::log(f64::from(ell));
        if m.log_bound(ell) - log_fact <= half {
            return Some(ell);
        }
    }
    None
}

/// Value at `x` of the polynomial of degree `< k` through `(nodes, values)`.
pub fn lagrange_interp(nodes: &[f64], values: &[f64], x: f64) -> Result<f64> {
    if nodes.len() != values.len() {
        return Err(Error::contract("nodes and values differ in length"));
    }
    if nodes.is_empty() {
        return Err(Error::contract("interpolation needs at least one node"));
    }
    for (i, a) in nodes.iter().enumerate() {
        if nodes[i + 1..].contains(a) {
            return Err(Error::domain("interpolation nodes must be distinct"));
        }
    }
    let mut total = 0.0;
    for (i, (&xi, &yi)) in nodes.iter().zip(values).enumerate() {
        let mut basis = 1.0;
        for (j, &xj) in nodes.iter().enumerate() {
            if i != j {
                basis *= (x - xj) / (xi - xj);
            }
        }
        total += yi * basis;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RemezCertificate {
    pub ell0: u32,
    pub bound_rule: DerivBoundSeq,
    pub nodes: Vec<f64>,
    pub node_method: GammaMethod,
    /// `ln γ_{ℓ0}` of the nodes.
    pub log_gamma: f64,
    /// `ln(4ℓ0/γ_{ℓ0})`
    pub log_factor: f64,
    /// Largest `|f|` on the uniform grid.
    pub lhs: f64,
    /// `lhs / (1 − πK h/2)`, an upper bound for `sup |f|` on `[0,1]`.
    pub lhs_upper: f64,
    pub sup_on_set: f64,
    /// `ln(factor · sup_E |f|)`, `-∞` when `f` vanishes on `E`.
    pub log_rhs: f64,
    pub grid_size: usize,
    pub holds: bool,
}

impl RemezCertificate {
    pub fn factor(&self) -> f64 {
        libm::exp(self.log_factor)
    }

    pub fn rhs(&self) -> f64 {
        libm::exp(self.log_rhs)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RemezOptions {
    pub grid_size: usize,
    pub subset_budget: u64,
    pub ell_max: u32,
}

impl Default for RemezOptions {
    fn default() -> Self {
        RemezOptions { grid_size: 10_000, subset_budget: DEFAULT_SUBSET_BUDGET, ell_max: 100_000 }
    }
}

/// Builds and checks the Remez certificate for `f = Σ c_j φ_j` on `E`.
pub fn remez_verify(
    slice: &SpectrumSlice,
    c: &CoefVec,
    e: &PointSet,
    options: &RemezOptions,
) -> Result<RemezCertificate> {
    if slice.dimension() != 1 {
        return Err(Error::contract("remez_verify needs a one-dimensional slice"));
    }
    if options.grid_size < 2 {
        return Err(Error::domain("grid_size must be >= 2"));
    }
    let coords = e.coords()?;
    let k_max = slice.max_frequency();
    let rule = DerivBoundSeq::bernstein(k_max);
    let ell0 = choose_ell0(&rule, options.ell_max).ok_or_else(|| {
        Error::resource("derivative-bound scan for ell0", u64::from(options.ell_max))
    })?;
    if (ell0 as usize) > coords.len() {
        return Err(Error::contract(format!(
            "observation set has {} points but the certificate needs ell0 = {ell0} nodes",
            coords.len()
        )));
    }
    let (nodes, node_method, log_gamma) = if ell0 == 1 {
        // empty product
        (alloc::vec![coords[0]], GammaMethod::Exact, 0.0)
    } else if binomial(coords.len() as u64, u64::from(ell0)) <= options.subset_budget {
        let g = gamma_exact_with_budget(e, ell0 as usize, options.subset_budget)?;
        (g.witness_points, GammaMethod::Exact, g.log_value)
    } else {
        let g = gamma_greedy_leja(e, ell0 as usize)?;
        (g.witness_points, GammaMethod::GreedyLeja, g.log_value)
    };
    let log_factor = libm::log(4.0 * f64::from(ell0)) - log_gamma;

    let f = |x: f64| eval_combination(slice, c, &[x]);
    let mut sup_on_set: f64 = 0.0;
    for &x in &coords {
        sup_on_set = sup_on_set.max(f(x)?.abs());
    }
    let n = options.grid_size;
    let mut lhs: f64 = 0.0;
    for i in 0..n {
        let x = i as f64 / (n - 1) as f64;
        lhs = lhs.max(f(x)?.abs());
    }
    // any x is within h/2 of a node, and sup|f'| ≤ πK sup|f|
    let h = 1.0 / (n - 1) as f64;
    let shrink = 1.0 - PI * f64::from(k_max) * h / 2.0;
    let lhs_upper = if lhs == 0.0 {
        0.0
    } else if shrink > 0.0 {
        lhs / shrink
    } else {
        f64::INFINITY
    };
    let log_rhs = if sup_on_set == 0.0 {
        f64::NEG_INFINITY
    } else {
        log_factor + libm::log(sup_on_set)
    };
    let holds = lhs_upper == 0.0 || libm::log(lhs_upper) <= log_rhs;
    Ok(RemezCertificate {
        ell0,
        bound_rule: rule,
        nodes,
        node_method,
        log_gamma,
        log_factor,
        lhs,
        lhs_upper,
        sup_on_set,
        log_rhs,
        grid_size: n,
        holds,
    })
}
