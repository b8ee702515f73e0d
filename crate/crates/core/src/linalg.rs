//! Small dense linear-algebra helpers on top of `nalgebra`.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm, scaled to avoid overflow and underflow.
pub fn norm2(v: &[f64]) -> f64 {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let s: f64 = v.iter().map(|x| (x / scale) * (x / scale)).sum();
    scale * libm::sqrt(s)
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Scales `v` to unit Euclidean norm; returns `false` for the zero vector.
pub fn normalize(v: &mut [f64]) -> bool {
    let n = norm2(v);
    if n == 0.0 || !n.is_finite() {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= n);
    true
}

pub fn mat_vec(a: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (a * DVector::from_column_slice(x)).as_slice().to_vec()
}

/// Singular values in decreasing order together with the matching right
/// singular vectors (columns of `V`), padded so that every column of a
/// wide matrix gets a vector; padded directions carry singular value 0.
pub struct RightSingular {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

pub fn right_singular(a: &DMatrix<f64>) -> RightSingular {
    let (m, n) = a.shape();
    // nalgebra returns min(m, n) singular triplets; pad with zero rows so the
    // full right singular basis is available for wide matrices
    let square;
    let work = if m < n {
        square = DMatrix::from_fn(n, n, |i, j| if i < m { a[(i, j)] } else { 0.0 });
        &square
    } else {
        a
    };
    let svd = work.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| {
        svd.singular_values[j]
            .partial_cmp(&svd.singular_values[i])
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let values = order.iter().map(|&i| svd.singular_values[i]).collect();
    let vectors = order.iter().map(|&i| v_t.row(i).iter().copied().collect()).collect();
    RightSingular { values, vectors }
}

/// Orthonormal basis of the numerical nullspace `{v : ‖Av‖ ≤ tol}`.
pub fn nullspace(a: &DMatrix<f64>, tol: f64) -> Vec<Vec<f64>> {
    let rs = right_singular(a);
    rs.values
        .iter()
        .zip(rs.vectors)
        .filter(|(&s, _)| s <= tol)
        .map(|(_, v)| v)
        .collect()
}

/// Fixes the sign of a direction so that its largest-magnitude entry
/// (first one on ties) is positive.
pub fn canonical_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Largest singular value of `a` with a matching unit right singular vector.
pub fn top_right_singular(a: &DMatrix<f64>) -> (f64, Vec<f64>) {
    let rs = right_singular(a);
    let mut v = rs.vectors.into_iter().next().unwrap_or_default();
    canonical_sign(&mut v);
    (rs.values.first().copied().unwrap_or(0.0), v)
}

/// Solves `R x = b` for upper-triangular `R` by back-substitution.
pub fn solve_upper(r: &DMatrix<f64>, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in i + 1..n {
            s -= r[(i, j)] * x[j];
        }
        x[i] = s / r[(i, i)];
    }
    x
}

/// Solves `Rᵀ x = b` for upper-triangular `R` by forward substitution.
pub fn solve_upper_transpose(r: &DMatrix<f64>, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut x = b.to_vec();
    for i in 0..n {
        let mut s = x[i];
        for j in 0..i {
            s -= r[(j, i)] * x[j];
        }
        x[i] = s / r[(i, i)];
    }
    x
}
