//! Numerical check of the boundary integration-by-parts identity
//! `int |D^2 phi b|^2 = int lap(phi) b^T D^2 phi b - 1/2 int_bdry |grad phi|^2 b^T B b`
//! for `phi` vanishing on the boundary, `B` the curvature matrix.

use serde::Serialize;

use super::DomainSpec;
use crate::error::{Error, Result};
use crate::fem::{integrate, integrate_boundary};
use crate::fields::ScalarField;
use crate::geometry::{Domain, Mesh, Point};

/// Quadrature order used for cells and facets.
pub const IBP_QUADRATURE: usize = 4;
/// Relative residual accepted on the finest mesh of an experiment.
pub const IBP_RESIDUAL_TOL: f64 = 1e-3;

#[derive(Clone, Debug, Serialize)]
pub struct IbpReport {
    pub mesh_size: f64,
    pub lhs: f64,
    /// `int lap(phi) (b^T D^2 phi b)`.
    pub interior: f64,
    /// `1/2 int_bdry |grad phi|^2 (b^T B b)`.
    pub boundary: f64,
    pub rhs: f64,
    /// `|lhs - rhs| / |lhs|`.
    pub residual: f64,
    pub boundary_max_phi: f64,
}

/// Evaluates both sides of the identity on `mesh`. `phi` must carry an
/// analytic gradient and Hessian and vanish at the boundary nodes.
pub fn verify_ibp_identity(mesh: &Mesh, phi: &ScalarField, b: Point) -> Result<IbpReport> {
    if mesh.dim() != 2 {
        return Err(Error::InvalidInput("the identity is checked on planar domains".into()));
    }
    if !phi.has_gradient() || !phi.has_hessian() {
        return Err(Error::InvalidInput(format!("{} needs an analytic gradient and Hessian", phi.name())));
    }
    let scale = mesh.nodes().iter().map(|&p| phi.value(p).abs()).fold(0.0, f64::max).max(1.0);
    let boundary_max_phi = mesh.boundary_nodes().iter().map(|&i| phi.value(mesh.nodes()[i]).abs()).fold(0.0, f64::max);
    if boundary_max_phi > 1e-10 * scale {
        return Err(Error::InvalidInput(format!(
            "{} does not vanish on the boundary (max {boundary_max_phi:e})",
            phi.name()
        )));
    }
    let hess = |p: Point| phi.analytic_hessian(p).expect("checked above");
    let lhs = integrate(mesh, IBP_QUADRATURE, |p| {
        let h = hess(p);
        let v = [h[0][0] * b[0] + h[0][1] * b[1], h[1][0] * b[0] + h[1][1] * b[1]];
        v[0] * v[0] + v[1] * v[1]
    })?;
    let interior = integrate(mesh, IBP_QUADRATURE, |p| {
        let h = hess(p);
        let bhb = b[0] * (h[0][0] * b[0] + h[0][1] * b[1]) + b[1] * (h[1][0] * b[0] + h[1][1] * b[1]);
        (h[0][0] + h[1][1]) * bhb
    })?;
    let curvature_error = std::cell::RefCell::new(None::<String>);
    let boundary = match mesh.domain() {
        Domain::Disk { center, radius, .. } => {
            let (c, r) = (*center, *radius);
            integrate_boundary(mesh, IBP_QUADRATURE, |x, k| {
                let f = &mesh.facets()[k];
                let (a, e) = (mesh.nodes()[f.nodes[0]], mesh.nodes()[f.nodes[1]]);
                let chord = (e[0] - a[0]).hypot(e[1] - a[1]);
                // map the chord onto its arc
                let stretch = 2.0 * r * (chord / (2.0 * r)).asin() / chord;
                let d = [x[0] - c[0], x[1] - c[1]];
                let n = d[0].hypot(d[1]);
                let y = [c[0] + r * d[0] / n, c[1] + r * d[1] / n];
                let g = phi.analytic_gradient(y).expect("checked above");
                let bbb = match mesh.curvature_at(x) {
                    Ok(k) => k.quadratic_form(b),
                    Err(e) => {
                        curvature_error.borrow_mut().get_or_insert(e.to_string());
                        0.0
                    }
                };
                0.5 * stretch * (g[0] * g[0] + g[1] * g[1]) * bbb
            })?
        }
        // flat edges: B = 0
        _ => 0.0,
    };
    if let Some(e) = curvature_error.into_inner() {
        return Err(Error::Geometry(e));
    }
    let rhs = interior - boundary;
    Ok(IbpReport {
        mesh_size: mesh.mesh_size(),
        lhs,
        interior,
        boundary,
        rhs,
        residual: (lhs - rhs).abs() / lhs.abs().max(1e-300),
        boundary_max_phi,
    })
}

/// The identity on a sequence of meshes with observed convergence orders.
#[derive(Clone, Debug, Serialize)]
pub struct IbpConvergence {
    pub phi: String,
    pub b: Point,
    pub reports: Vec<IbpReport>,
    /// `log2(res_{l-1} / res_l)` between consecutive levels.
    pub orders: Vec<f64>,
}

impl IbpConvergence {
    pub fn finest(&self) -> &IbpReport {
        self.reports.last().expect("at least one level")
    }

    /// Smallest order between consecutive levels.
    pub fn observed_order(&self) -> Option<f64> {
        self.orders.iter().cloned().reduce(f64::min)
    }
}

/// Checks the identity on `levels` meshes starting from size `h`.
pub fn ibp_convergence(domain: &DomainSpec, phi: &ScalarField, b: Point, h: f64, levels: usize) -> Result<IbpConvergence> {
    let meshes = domain.meshes(h, levels)?;
    let reports = meshes.iter().map(|m| verify_ibp_identity(m, phi, b)).collect::<Result<Vec<_>>>()?;
    let orders = reports.windows(2).map(|w| (w[0].residual / w[1].residual).log2()).collect();
    Ok(IbpConvergence { phi: phi.name().to_string(), b, reports, orders })
}
