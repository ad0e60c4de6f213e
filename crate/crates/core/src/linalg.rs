//! Small dense linear algebra: closed-form 2x2 symmetric routines and a
//! dense generalized symmetric eigensolver.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub type Mat2 = [[f64; 2]; 2];

pub fn mat2_mul_vec(a: &Mat2, v: [f64; 2]) -> [f64; 2] {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

pub fn mat2_quadratic(a: &Mat2, u: [f64; 2], v: [f64; 2]) -> f64 {
    let av = mat2_mul_vec(a, v);
    u[0] * av[0] + u[1] * av[1]
}

pub fn mat2_det(a: &Mat2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn mat2_inverse(a: &Mat2) -> Option<Mat2> {
    let det = mat2_det(a);
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some([[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]])
}

/// Eigenvalues (ascending) and unit eigenvectors of a symmetric 2x2 matrix.
pub fn sym2_eigen(a: &Mat2) -> ([f64; 2], [[f64; 2]; 2]) {
    let (p, q, r) = (a[0][0], 0.5 * (a[0][1] + a[1][0]), a[1][1]);
    let mean = 0.5 * (p + r);
    let rad = (0.25 * (p - r) * (p - r) + q * q).sqrt();
    let (l0, l1) = (mean - rad, mean + rad);
    if rad <= 1e-15 * (mean.abs() + 1e-300) || rad == 0.0 {
        return ([l0, l1], [[1.0, 0.0], [0.0, 1.0]]);
    }
    // eigenvector for the larger eigenvalue, numerically stable branch
    let v1 = if p >= r { [l1 - r, q] } else { [q, l1 - p] };
    let n = (v1[0] * v1[0] + v1[1] * v1[1]).sqrt();
    let v1 = [v1[0] / n, v1[1] / n];
    let v0 = [-v1[1], v1[0]];
    ([l0, l1], [v0, v1])
}

pub fn sym2_min_eigenvalue(a: &Mat2) -> f64 {
    sym2_eigen(a).0[0]
}

/// Principal square root of an SPD 2x2 matrix:
/// `A^{1/2} = (A + sqrt(det) I) / sqrt(tr + 2 sqrt(det))`.
pub fn sym2_sqrt(a: &Mat2) -> Option<Mat2> {
    let det = mat2_det(a);
    let tr = a[0][0] + a[1][1];
    if !(det > 0.0 && tr > 0.0) {
        return None;
    }
    let s = det.sqrt();
    let t = (tr + 2.0 * s).sqrt();
    Some([[(a[0][0] + s) / t, a[0][1] / t], [a[1][0] / t, (a[1][1] + s) / t]])
}

pub fn sym2_inv_sqrt(a: &Mat2) -> Option<Mat2> {
    sym2_sqrt(a).and_then(|r| mat2_inverse(&r))
}

/// All eigenpairs of the symmetric definite pencil `(k, m)`, ascending.
/// Eigenvectors are `m`-orthonormal columns.
pub fn dense_generalized_eigen(k: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = k.nrows();
    let chol = m.clone().cholesky().ok_or(Error::NotPositiveDefinite {
        pivot: 0,
        value: f64::NAN,
    })?;
    let l = chol.l();
    // C = L^{-1} K L^{-T}
    let y = l
        .solve_lower_triangular(k)
        .ok_or_else(|| Error::NotPositiveDefinite { pivot: 0, value: 0.0 })?;
    let c = l
        .solve_lower_triangular(&y.transpose())
        .ok_or_else(|| Error::NotPositiveDefinite { pivot: 0, value: 0.0 })?;
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let z = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    let x = l
        .transpose()
        .solve_upper_triangular(&z)
        .ok_or_else(|| Error::NotPositiveDefinite { pivot: 0, value: 0.0 })?;
    Ok((vals, x))
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return f64::INFINITY;
    }
    SymmetricEigen::new(a.clone()).eigenvalues.min()
}
