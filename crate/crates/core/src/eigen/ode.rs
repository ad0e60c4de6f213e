//! Second-order finite differences for `-(a u')' + V u = lambda rho u` on an
//! interval, solved by Sturm bisection and inverse iteration.

use std::sync::Arc;

use super::{cluster_ids, normalize_sign, Spectrum};
use crate::error::{Error, Result};
use crate::fem::BoundaryCondition;
use crate::fields::CoefficientSet;
use crate::geometry::{make_interval, Mesh};

/// Grid size at which the oracle is meant to be used.
pub const MIN_ODE_GRID: usize = 10_000;

/// Symmetric tridiagonal `D^{-1/2} K D^{-1/2}` with the lumped mass `D`.
struct Problem {
    diag: Vec<f64>,
    off: Vec<f64>,
    k_diag: Vec<f64>,
    k_off: Vec<f64>,
    mass: Vec<f64>,
    nodes: Vec<usize>,
}

fn discretize(coeffs: &CoefficientSet, a: f64, b: f64, bc: BoundaryCondition, n: usize) -> Result<Problem> {
    let h = (b - a) / n as f64;
    let x = |i: usize| if i == n { b } else { a + i as f64 * h };
    let nodes: Vec<usize> = match bc {
        BoundaryCondition::Dirichlet => (1..n).collect(),
        BoundaryCondition::Neumann => (0..=n).collect(),
    };
    let mut flux = Vec::with_capacity(n);
    for i in 0..n {
        let mid = [0.5 * (x(i) + x(i + 1)), 0.0];
        coeffs.check_point(mid)?;
        flux.push(coeffs.matrix.eval(mid)?[0][0] / h);
    }
    let mut k_diag = Vec::with_capacity(nodes.len());
    let mut mass = Vec::with_capacity(nodes.len());
    for &i in &nodes {
        let p = [x(i), 0.0];
        coeffs.check_point(p)?;
        let w = if i == 0 || i == n { 0.5 * h } else { h };
        let rho = coeffs.rho.eval(p)?;
        if !(rho > 0.0) {
            return Err(Error::Coefficient { point: p, reason: format!("density {rho:e} is not positive") });
        }
        let v = coeffs.potential.eval(p)?;
        let left = if i > 0 { flux[i - 1] } else { 0.0 };
        let right = if i < n { flux[i] } else { 0.0 };
        k_diag.push(left + right + w * v);
        mass.push(w * rho);
    }
    let k_off: Vec<f64> = nodes.windows(2).map(|w| -flux[w[0]]).collect();
    let diag = k_diag.iter().zip(&mass).map(|(k, m)| k / m).collect();
    let off = k_off.iter().enumerate().map(|(i, k)| k / (mass[i] * mass[i + 1]).sqrt()).collect();
    Ok(Problem { diag, off, k_diag, k_off, mass, nodes })
}

impl Problem {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn pivmin(&self) -> f64 {
        let m = self.off.iter().fold(0.0f64, |m, e| m.max(e * e));
        f64::MIN_POSITIVE.max(m * f64::EPSILON * f64::EPSILON)
    }

    /// Number of eigenvalues below `x`.
    fn sturm_count(&self, x: f64) -> usize {
        let pivmin = self.pivmin();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..self.dim() {
            if i > 0 {
                q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / q;
            }
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    fn bisect(&self, j: usize, bounds: (f64, f64)) -> f64 {
        let (mut lo, mut hi) = bounds;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + self.pivmin() || mid <= lo || mid >= hi {
                break;
            }
            if self.sturm_count(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn mul(&self, y: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * y[i];
                if i > 0 {
                    s += self.off[i - 1] * y[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * y[i + 1];
                }
                s
            })
            .collect()
    }

    /// Solves `(T - shift) y = rhs` by Gaussian elimination with partial
    /// pivoting; tiny pivots are perturbed.
    fn shifted_solve(&self, shift: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let tiny = f64::EPSILON * self.gershgorin().1.abs().max(1.0);
        // row i holds u0 (diag), u1, u2 (fill-in) after elimination
        let mut d: Vec<f64> = self.diag.iter().map(|v| v - shift).collect();
        let mut du: Vec<f64> = self.off.clone();
        du.push(0.0);
        let dl: Vec<f64> = self.off.clone();
        let mut du2 = vec![0.0; n];
        let mut b = rhs.to_vec();
        for i in 0..n.saturating_sub(1) {
            if dl[i].abs() > d[i].abs() {
                // swap rows i and i+1
                let f = d[i] / dl[i];
                d[i] = dl[i];
                let t = d[i + 1];
                d[i + 1] = du[i] - f * t;
                du[i] = t;
                du2[i] = du[i + 1];
                du[i + 1] = -f * du2[i];
                b.swap(i, i + 1);
                b[i + 1] -= f * b[i];
            } else {
                if d[i].abs() < tiny {
                    d[i] = tiny;
                }
                let f = dl[i] / d[i];
                d[i + 1] -= f * du[i];
                b[i + 1] -= f * b[i];
            }
        }
        if d[n - 1].abs() < tiny {
            d[n - 1] = tiny;
        }
        let mut y = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s -= du[i] * y[i + 1];
            }
            if i + 2 < n {
                s -= du2[i] * y[i + 2];
            }
            y[i] = s / d[i];
        }
        y
    }

    /// Eigenvalue `j` refined by inverse iteration; returns the value and a
    /// unit eigenvector of `T`.
    fn eigenpair(&self, j: usize, bounds: (f64, f64)) -> (f64, Vec<f64>) {
        let n = self.dim();
        let lambda = self.bisect(j, bounds);
        let mut y: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919 + j * 104729) % 1009) as f64 / 1009.0).collect();
        for _ in 0..3 {
            y = self.shifted_solve(lambda, &y);
            let nrm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            y.iter_mut().for_each(|v| *v /= nrm);
        }
        let ty = self.mul(&y);
        let rq: f64 = y.iter().zip(&ty).map(|(a, b)| a * b).sum();
        (rq, y)
    }

    fn solve(&self, count: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        if count == 0 || count > self.dim() {
            return Err(Error::InvalidInput(format!("cannot compute {count} eigenpairs of a {}-point grid", self.dim())));
        }
        let bounds = self.gershgorin();
        let mut values = Vec::with_capacity(count);
        let mut vectors = Vec::with_capacity(count);
        for j in 0..count {
            let (l, y) = self.eigenpair(j, bounds);
            values.push(l);
            vectors.push(y);
        }
        // Rayleigh quotients of well separated pairs stay ordered; enforce it
        let mut order: Vec<usize> = (0..count).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        Ok((order.iter().map(|&i| values[i]).collect(), order.iter().map(|&i| vectors[i].clone()).collect()))
    }

    /// `||K x - lambda D x|| / ||D x||` in the original variables.
    fn residual(&self, lambda: f64, x: &[f64]) -> f64 {
        let n = self.dim();
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            let mut kx = self.k_diag[i] * x[i];
            if i > 0 {
                kx += self.k_off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                kx += self.k_off[i] * x[i + 1];
            }
            let mx = self.mass[i] * x[i];
            num += (kx - lambda * mx).powi(2);
            den += mx * mx;
        }
        (num / den).sqrt()
    }
}

fn eigenvalues_on(coeffs: &CoefficientSet, a: f64, b: f64, bc: BoundaryCondition, count: usize, n: usize) -> Result<(Problem, Vec<f64>, Vec<Vec<f64>>)> {
    let p = discretize(coeffs, a, b, bc, n)?;
    let (vals, ys) = p.solve(count)?;
    Ok((p, vals, ys))
}

/// Lowest `count` eigenpairs on `[a, b]` from a `grid_n`-cell finite
/// difference scheme (flux form with midpoint coefficients, lumped mass).
/// Error estimates come from a second solve on `grid_n / 2` cells.
pub fn solve_interval_ode(
    coeffs: &CoefficientSet,
    a: f64,
    b: f64,
    bc: BoundaryCondition,
    count: usize,
    grid_n: usize,
) -> Result<Spectrum> {
    if grid_n < 4 {
        return Err(Error::InvalidInput(format!("grid_n must be at least 4, got {grid_n}")));
    }
    let (p, values, ys) = eigenvalues_on(coeffs, a, b, bc, count, grid_n)?;
    let (_, coarse, _) = eigenvalues_on(coeffs, a, b, bc, count, grid_n / 2)?;
    let mut vectors = Vec::with_capacity(count);
    let mut residuals = Vec::with_capacity(count);
    for (l, y) in values.iter().zip(&ys) {
        let mut x: Vec<f64> = y.iter().zip(&p.mass).map(|(v, m)| v / m.sqrt()).collect();
        normalize_sign(&mut x);
        residuals.push(p.residual(*l, &x));
        vectors.push(x);
    }
    let mut ortho: f64 = 0.0;
    for i in 0..count {
        for j in 0..=i {
            let g: f64 = (0..p.dim()).map(|t| vectors[i][t] * p.mass[t] * vectors[j][t]).sum();
            ortho = ortho.max((g - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    // the residual of a rounded exact eigenvector is of order eps * ||T||
    let (lo, hi) = p.gershgorin();
    let floor = 64.0 * f64::EPSILON * lo.abs().max(hi.abs());
    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    if !(worst <= super::RESIDUAL_TOL.max(floor)) || !(ortho <= super::ORTHONORMALITY_TOL) {
        return Err(Error::NotConverged(format!(
            "finite differences: residual {worst:e}, orthonormality error {ortho:e}"
        )));
    }
    let errors = values.iter().zip(&coarse).map(|(f, c)| (f - c).abs() / 3.0).collect();
    let mesh: Arc<Mesh> = Arc::new(make_interval(a, b, grid_n)?);
    Ok(Spectrum {
        cluster_ids: cluster_ids(&values),
        eigenvalues: values,
        eigenvectors: vectors,
        residuals,
        bc,
        mesh_size: (b - a) / grid_n as f64,
        method: format!("finite differences ({grid_n} cells)"),
        orthonormality_error: ortho,
        error_estimates: Some(errors),
        dof_map: p.nodes,
        mesh: Some(mesh),
    })
}
