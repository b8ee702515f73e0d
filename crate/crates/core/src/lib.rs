//! Numerical laboratory for spectral inequalities and observability of the
//! heat equation on boxes `(0,1)^n`.
//!
//! Everything here is pure computation over immutable inputs and builds
//! without `std`; file formats, configuration and the command line live in
//! the `heatscope` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod diophantine;
pub mod eigenbasis;
mod error;
pub mod heat;
pub mod linalg;
pub mod pointsets;
pub mod quadrature;
pub mod remez;
pub mod rng;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};

/// `π²`, the Dirichlet eigenvalue scale of the unit interval.
pub const PI_SQUARED: f64 = core::f64::consts::PI * core::f64::consts::PI;

/// Default relative tolerance used to call a matrix numerically singular,
/// before the `√N` factor is applied.
pub const NULLSPACE_TOL_BASE: f64 = 1e-10;

/// `1e-10·√N`, the default nullspace tolerance for `N` unknowns.
pub fn default_nullspace_tol(n: usize) -> f64 {
    NULLSPACE_TOL_BASE * libm::sqrt(n.max(1) as f64)
}

/// `sin(π y)` with exact zeros at the integers.
pub fn sin_pi(y: f64) -> f64 {
    if !y.is_finite() {
        return f64::NAN;
    }
    // reduce to r in [-1, 1], exact for |y| < 2^52
    let mut r = y - 2.0 * libm::round(y * 0.5);
    if r > 1.0 {
        r -= 2.0;
    } else if r < -1.0 {
        r += 2.0;
    }
    // sin(π r) = sin(π (1 - r)) folds [1/2, 1] onto [0, 1/2]
    if r > 0.5 {
        r = 1.0 - r;
    } else if r < -0.5 {
        r = -1.0 - r;
    }
    libm::sin(core::f64::consts::PI * r)
}
