//! Lowest eigenpairs of the generalized symmetric problem `K x = lambda M x`,
//! a finite-difference oracle for 1D problems, and Richardson extrapolation.

mod extrapolate;
mod krylov;
mod ode;

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fem::{BoundaryCondition, OperatorPair};
use crate::geometry::Mesh;
use crate::linalg::dense_generalized_eigen;

pub use extrapolate::{extrapolate, track_eigenvalue, ExtrapolatedValue};
pub use ode::{solve_interval_ode, MIN_ODE_GRID};

/// Bound on `||K x - lambda M x|| / ||M x||` asserted after every solve.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Bound on `|x_i^T M x_j - delta_ij|` asserted after every solve.
pub const ORTHONORMALITY_TOL: f64 = 1e-8;
/// Consecutive eigenvalues closer than this (relative) share a cluster.
pub const CLUSTER_TOL: f64 = 1e-6;
/// Problems up to this size are solved densely.
pub const DEFAULT_DENSE_LIMIT: usize = 400;

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub dense_limit: usize,
    /// Residual target of the iterative solver.
    pub tolerance: f64,
    pub max_restarts: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { dense_limit: DEFAULT_DENSE_LIMIT, tolerance: 1e-10, max_restarts: 60 }
    }
}

/// Lowest eigenpairs, ascending, with `M`-orthonormal eigenvectors over the
/// degrees of freedom of the operator they came from.
#[derive(Clone, Debug, Serialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub cluster_ids: Vec<usize>,
    pub bc: BoundaryCondition,
    pub mesh_size: f64,
    pub method: String,
    pub orthonormality_error: f64,
    /// Per-eigenvalue error estimates, when the solver provides them.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_estimates: Option<Vec<f64>>,
    #[serde(skip)]
    pub dof_map: Vec<usize>,
    #[serde(skip)]
    mesh: Option<Arc<Mesh>>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn mesh(&self) -> Option<&Arc<Mesh>> {
        self.mesh.as_ref()
    }

    /// Nodal values of eigenvector `k`, zero on eliminated nodes.
    pub fn nodal(&self, k: usize) -> Vec<f64> {
        let n = self.mesh.as_ref().map_or(self.dof_map.iter().max().map_or(0, |m| m + 1), |m| m.n_nodes());
        let mut out = vec![0.0; n];
        for (&i, &v) in self.dof_map.iter().zip(&self.eigenvectors[k]) {
            out[i] = v;
        }
        out
    }

    /// Eigenvalue `k` (0-based).
    pub fn value(&self, k: usize) -> f64 {
        self.eigenvalues[k]
    }

    /// `index,eigenvalue,residual,cluster_id` rows with 1-based indices.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,eigenvalue,residual,cluster_id\n");
        for i in 0..self.len() {
            out.push_str(&format!(
                "{},{:.16e},{:.3e},{}\n",
                i + 1,
                self.eigenvalues[i],
                self.residuals[i],
                self.cluster_ids[i]
            ));
        }
        out
    }
}

/// Cluster labels: consecutive values within [`CLUSTER_TOL`] (relative to
/// the larger magnitude, with an absolute floor tied to the largest value)
/// share a label.
pub fn cluster_ids(values: &[f64]) -> Vec<usize> {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut ids = Vec::with_capacity(values.len());
    let mut id = 0;
    for (i, &v) in values.iter().enumerate() {
        if i > 0 {
            let u = values[i - 1];
            let tol = CLUSTER_TOL * u.abs().max(v.abs()).max(1e-6 * scale);
            if (v - u).abs() > tol {
                id += 1;
            }
        }
        ids.push(id);
    }
    ids
}

/// Fixes signs (largest-magnitude entry positive), `M`-normalizes, computes
/// residuals and orthonormality, and asserts both against the tolerances.
pub(crate) fn finalize(
    pair: &OperatorPair,
    values: Vec<f64>,
    mut vectors: Vec<Vec<f64>>,
    method: String,
) -> Result<Spectrum> {
    for v in vectors.iter_mut() {
        normalize_sign(v);
        let nrm = pair.mass_norm(v);
        v.iter_mut().for_each(|x| *x /= nrm);
    }
    let residuals: Vec<f64> = values
        .iter()
        .zip(&vectors)
        .map(|(&l, v)| residual(&pair.stiffness.mul_vec(v), &pair.mass.mul_vec(v), l))
        .collect();
    let mv: Vec<Vec<f64>> = vectors.iter().map(|v| pair.mass.mul_vec(v)).collect();
    let mut ortho: f64 = 0.0;
    for i in 0..vectors.len() {
        for j in 0..=i {
            let g: f64 = vectors[i].iter().zip(&mv[j]).map(|(a, b)| a * b).sum();
            ortho = ortho.max((g - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    if !(worst <= RESIDUAL_TOL) || !(ortho <= ORTHONORMALITY_TOL) {
        return Err(Error::NotConverged(format!(
            "{method}: residual {worst:e}, orthonormality error {ortho:e}"
        )));
    }
    Ok(Spectrum {
        cluster_ids: cluster_ids(&values),
        eigenvalues: values,
        eigenvectors: vectors,
        residuals,
        bc: pair.bc,
        mesh_size: pair.mesh().mesh_size(),
        method,
        orthonormality_error: ortho,
        error_estimates: None,
        dof_map: pair.dof_map.clone(),
        mesh: Some(Arc::clone(pair.mesh())),
    })
}

pub(crate) fn normalize_sign(v: &mut [f64]) {
    let mut best = 0.0f64;
    let mut sign = 1.0;
    for &x in v.iter() {
        if x.abs() > best {
            best = x.abs();
            sign = x.signum();
        }
    }
    if sign < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

pub(crate) fn residual(kx: &[f64], mx: &[f64], lambda: f64) -> f64 {
    let num: f64 = kx.iter().zip(mx).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
    let den: f64 = mx.iter().map(|b| b * b).sum::<f64>().sqrt();
    num / den
}

/// Lowest `count` eigenpairs with default options.
pub fn solve_lowest(pair: &OperatorPair, count: usize) -> Result<Spectrum> {
    solve_lowest_with(pair, count, &SolverOptions::default())
}

/// Dense Cholesky-reduced solve up to `options.dense_limit` unknowns,
/// shift-invert block Krylov iteration beyond.
pub fn solve_lowest_with(pair: &OperatorPair, count: usize, options: &SolverOptions) -> Result<Spectrum> {
    let n = pair.dim();
    if count == 0 || count > n {
        return Err(Error::InvalidInput(format!("cannot compute {count} eigenpairs of a {n}-dimensional problem")));
    }
    if n <= options.dense_limit {
        let (vals, x) = dense_generalized_eigen(&pair.stiffness.to_dense(), &pair.mass.to_dense())?;
        let values: Vec<f64> = vals.iter().take(count).cloned().collect();
        let vectors: Vec<Vec<f64>> = (0..count).map(|j| x.column(j).iter().cloned().collect()).collect();
        finalize(pair, values, vectors, "dense".into())
    } else {
        let (values, vectors, method) = krylov::shift_invert(pair, count, options)?;
        finalize(pair, values, vectors, method)
    }
}

#[cfg(test)]
mod tests;
