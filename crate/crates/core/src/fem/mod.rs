//! P1 finite elements: stiffness `K_ij = int A grad phi_i . grad phi_j + V phi_i phi_j`
//! and mass `M_ij = int rho phi_i phi_j`, in Neumann (all nodes) and
//! Dirichlet (interior nodes) variants.

pub mod quadrature;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::CoefficientSet;
use crate::geometry::{Mesh, Point};
use crate::sparse::{CsrMatrix, EnvelopeCholesky};

pub use quadrature::Rule;

/// Default quadrature order for assembly.
pub const DEFAULT_QUADRATURE: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

impl std::fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Neumann => "neumann",
        })
    }
}

/// Quadrature rule for the cells of `mesh`.
pub fn rule_for(mesh: &Mesh, order: usize) -> Result<Rule> {
    match mesh.dim() {
        1 => quadrature::segment(order),
        _ => quadrature::triangle(order),
    }
}

/// Physical quadrature points and weights (weights include the cell measure).
pub fn cell_quadrature(mesh: &Mesh, e: usize, rule: &Rule) -> Vec<(Point, f64, Vec<f64>)> {
    let c = mesh.cell(e);
    let meas = mesh.cell_measure(e);
    rule.points
        .iter()
        .zip(&rule.weights)
        .map(|(lam, w)| {
            let mut x = [0.0, 0.0];
            for (&i, l) in c.iter().zip(lam) {
                let p = mesh.nodes()[i];
                x[0] += l * p[0];
                x[1] += l * p[1];
            }
            (x, w * meas, lam.clone())
        })
        .collect()
}

/// `int_Omega f` by cell quadrature.
pub fn integrate(mesh: &Mesh, order: usize, f: impl Fn(Point) -> f64 + Sync) -> Result<f64> {
    let rule = rule_for(mesh, order)?;
    let parts: Vec<f64> = (0..mesh.n_cells())
        .into_par_iter()
        .map(|e| cell_quadrature(mesh, e, &rule).iter().map(|(x, w, _)| w * f(*x)).sum())
        .collect();
    Ok(parts.iter().sum())
}

/// `int_{boundary} f(x, facet)` by Gauss quadrature on the boundary facets.
pub fn integrate_boundary(mesh: &Mesh, order: usize, f: impl Fn(Point, usize) -> f64) -> Result<f64> {
    if mesh.dim() != 2 {
        return Err(Error::InvalidInput("boundary integrals need a 2D mesh".into()));
    }
    let rule = quadrature::segment(order)?;
    let mut total = 0.0;
    for (k, fac) in mesh.facets().iter().enumerate() {
        let (a, b) = (mesh.nodes()[fac.nodes[0]], mesh.nodes()[fac.nodes[1]]);
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        for (lam, w) in rule.points.iter().zip(&rule.weights) {
            let x = [lam[0] * a[0] + lam[1] * b[0], lam[0] * a[1] + lam[1] * b[1]];
            total += w * len * f(x, k);
        }
    }
    Ok(total)
}

/// Stiffness and mass matrices on one mesh for one coefficient set.
#[derive(Clone, Debug)]
pub struct OperatorPair {
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
    /// Matrix index to mesh node.
    pub dof_map: Vec<usize>,
    pub bc: BoundaryCondition,
    pub coefficients_id: String,
    pub quadrature_order: usize,
    /// Smallest density value met at a quadrature point.
    pub min_density: f64,
    /// Smallest `V / rho` over quadrature points: a lower bound for every
    /// discrete eigenvalue, since `A` is positive definite.
    pub min_potential_ratio: f64,
    mesh: Arc<Mesh>,
}

impl OperatorPair {
    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn dim(&self) -> usize {
        self.dof_map.len()
    }

    /// Restriction of a nodal vector to the degrees of freedom.
    pub fn restrict(&self, nodal: &[f64]) -> Vec<f64> {
        self.dof_map.iter().map(|&i| nodal[i]).collect()
    }

    /// Nodal vector of a dof vector, zero at eliminated nodes.
    pub fn extend(&self, dofs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.mesh.n_nodes()];
        for (&i, &v) in self.dof_map.iter().zip(dofs) {
            out[i] = v;
        }
        out
    }

    /// Dof vector of the nodal interpolant of `f`.
    pub fn interpolate(&self, f: impl Fn(Point) -> f64) -> Vec<f64> {
        self.dof_map.iter().map(|&i| f(self.mesh.nodes()[i])).collect()
    }

    pub fn mass_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.mass.bilinear(u, v)
    }

    pub fn mass_norm(&self, u: &[f64]) -> f64 {
        self.mass.bilinear(u, u).max(0.0).sqrt()
    }

    /// Checks that `M` admits a Cholesky factorization.
    pub fn check_mass_definite(&self) -> Result<()> {
        EnvelopeCholesky::factor(&self.mass).map(|_| ())
    }
}

/// A P1 function given by its degrees of freedom on an operator pair.
#[derive(Clone, Debug)]
pub struct FeFunction {
    pub values: Vec<f64>,
    pub bc: BoundaryCondition,
    mesh: Arc<Mesh>,
    dof_map: Arc<Vec<usize>>,
}

impl FeFunction {
    pub fn new(pair: &OperatorPair, values: Vec<f64>) -> Result<FeFunction> {
        if values.len() != pair.dim() {
            return Err(Error::InvalidInput(format!("expected {} dofs, got {}", pair.dim(), values.len())));
        }
        Ok(FeFunction { values, bc: pair.bc, mesh: Arc::clone(&pair.mesh), dof_map: Arc::new(pair.dof_map.clone()) })
    }

    pub fn interpolate(pair: &OperatorPair, f: impl Fn(Point) -> f64) -> FeFunction {
        FeFunction::new(pair, pair.interpolate(f)).expect("interpolant has the right length")
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    /// Nodal values; Dirichlet functions are extended by zero.
    pub fn nodal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.mesh.n_nodes()];
        for (&i, &v) in self.dof_map.iter().zip(&self.values) {
            out[i] = v;
        }
        out
    }
}

fn check_matrix(coeffs: &CoefficientSet, x: Point) -> Result<[[f64; 2]; 2]> {
    coeffs.matrix.eval(x)
}

/// Assembles the Neumann pair.
pub fn assemble(mesh: &Arc<Mesh>, coeffs: &CoefficientSet, quadrature_order: usize) -> Result<OperatorPair> {
    let rule = rule_for(mesh, quadrature_order)?;
    let dim = mesh.dim();
    let lower = coeffs.rho.lower_bound();
    let locals: Vec<(Vec<(usize, usize, f64)>, Vec<(usize, usize, f64)>, f64, f64)> = (0..mesh.n_cells())
        .into_par_iter()
        .map(|e| -> Result<_> {
            let c = mesh.cell(e);
            let grads = mesh.shape_gradients(e);
            let nl = c.len();
            let mut kl = vec![0.0; nl * nl];
            let mut ml = vec![0.0; nl * nl];
            let mut min_rho = f64::INFINITY;
            let mut min_ratio = f64::INFINITY;
            for (x, w, lam) in cell_quadrature(mesh, e, &rule) {
                coeffs.check_point(x)?;
                let rho = coeffs.rho.eval(x)?;
                if !(rho > 0.0) || rho < lower * (1.0 - 1e-12) {
                    return Err(Error::Coefficient {
                        point: x,
                        reason: format!("density {rho:e} below its lower bound {lower:e}"),
                    });
                }
                min_rho = min_rho.min(rho);
                let v = coeffs.potential.eval(x)?;
                min_ratio = min_ratio.min(v / rho);
                let a = check_matrix(coeffs, x)?;
                for i in 0..nl {
                    let agi = if dim == 1 {
                        [a[0][0] * grads[i][0], 0.0]
                    } else {
                        [a[0][0] * grads[i][0] + a[0][1] * grads[i][1], a[1][0] * grads[i][0] + a[1][1] * grads[i][1]]
                    };
                    for j in 0..nl {
                        let gg = agi[0] * grads[j][0] + agi[1] * grads[j][1];
                        kl[i * nl + j] += w * (gg + v * lam[i] * lam[j]);
                        ml[i * nl + j] += w * rho * lam[i] * lam[j];
                    }
                }
            }
            let mut kt = Vec::with_capacity(nl * nl);
            let mut mt = Vec::with_capacity(nl * nl);
            for i in 0..nl {
                for j in 0..nl {
                    // symmetrize exactly
                    let k = 0.5 * (kl[i * nl + j] + kl[j * nl + i]);
                    let m = 0.5 * (ml[i * nl + j] + ml[j * nl + i]);
                    kt.push((c[i], c[j], k));
                    mt.push((c[i], c[j], m));
                }
            }
            Ok((kt, mt, min_rho, min_ratio))
        })
        .collect::<Result<_>>()?;
    let n = mesh.n_nodes();
    let mut kt = Vec::with_capacity(locals.iter().map(|l| l.0.len()).sum());
    let mut mt = Vec::with_capacity(kt.capacity());
    let mut min_density = f64::INFINITY;
    let mut min_potential_ratio = f64::INFINITY;
    for (k, m, r, q) in locals {
        kt.extend(k);
        mt.extend(m);
        min_density = min_density.min(r);
        min_potential_ratio = min_potential_ratio.min(q);
    }
    Ok(OperatorPair {
        stiffness: CsrMatrix::from_triplets(n, kt),
        mass: CsrMatrix::from_triplets(n, mt),
        dof_map: (0..n).collect(),
        bc: BoundaryCondition::Neumann,
        coefficients_id: coeffs.id(),
        quadrature_order,
        min_density,
        min_potential_ratio,
        mesh: Arc::clone(mesh),
    })
}

/// Deletes boundary rows and columns. Restricting a Dirichlet pair returns it unchanged.
pub fn restrict_dirichlet(pair: &OperatorPair) -> Result<OperatorPair> {
    if pair.bc == BoundaryCondition::Dirichlet {
        return Ok(pair.clone());
    }
    let keep = pair.mesh.interior_nodes();
    if keep.is_empty() {
        return Err(Error::InvalidInput("mesh has no interior nodes".into()));
    }
    Ok(OperatorPair {
        stiffness: pair.stiffness.submatrix(&keep),
        mass: pair.mass.submatrix(&keep),
        dof_map: keep,
        bc: BoundaryCondition::Dirichlet,
        ..pair.clone()
    })
}

/// Both variants at once.
pub fn assemble_both(mesh: &Arc<Mesh>, coeffs: &CoefficientSet, quadrature_order: usize) -> Result<(OperatorPair, OperatorPair)> {
    let neumann = assemble(mesh, coeffs, quadrature_order)?;
    let dirichlet = restrict_dirichlet(&neumann)?;
    Ok((dirichlet, neumann))
}

/// `u^T K u / u^T M u`.
pub fn rayleigh_quotient(u: &[f64], pair: &OperatorPair) -> Result<f64> {
    if u.len() != pair.dim() {
        return Err(Error::InvalidInput(format!("expected {} dofs, got {}", pair.dim(), u.len())));
    }
    let m = pair.mass.bilinear(u, u);
    if !(m > 0.0) {
        return Err(Error::InvalidInput("function has zero mass norm".into()));
    }
    Ok(pair.stiffness.bilinear(u, u) / m)
}

/// Nodal gradient by measure-weighted averaging of the cell gradients of
/// the P1 function with nodal values `u`. Returns one nodal field per
/// coordinate direction (the second is zero in 1D).
pub fn gradient_recovery(mesh: &Mesh, u: &[f64]) -> [Vec<f64>; 2] {
    let n = mesh.n_nodes();
    let mut gx = vec![0.0; n];
    let mut gy = vec![0.0; n];
    let mut wsum = vec![0.0; n];
    for e in 0..mesh.n_cells() {
        let c = mesh.cell(e);
        let grads = mesh.shape_gradients(e);
        let meas = mesh.cell_measure(e);
        let g = c.iter().zip(&grads).fold([0.0, 0.0], |acc, (&i, gr)| [acc[0] + u[i] * gr[0], acc[1] + u[i] * gr[1]]);
        for &i in c {
            gx[i] += meas * g[0];
            gy[i] += meas * g[1];
            wsum[i] += meas;
        }
    }
    for i in 0..n {
        gx[i] /= wsum[i];
        gy[i] /= wsum[i];
    }
    [gx, gy]
}

#[cfg(test)]
mod tests;
