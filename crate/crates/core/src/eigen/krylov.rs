//! Thick-restart block Krylov iteration on `(K - sigma M)^{-1} M` with
//! Rayleigh-Ritz extraction and an inertia check on the result.

use nalgebra::DMatrix;
use rand::{rngs::StdRng, Rng, SeedableRng};
use rayon::prelude::*;

use super::SolverOptions;
use crate::error::{Error, Result};
use crate::fem::OperatorPair;
use crate::linalg::dense_generalized_eigen;
use crate::sparse::{negative_inertia, EnvelopeCholesky};

const SEED: u64 = 0x5eed_d1a6;

struct Basis<'a> {
    pair: &'a OperatorPair,
    v: Vec<Vec<f64>>,
    kv: Vec<Vec<f64>>,
    mv: Vec<Vec<f64>>,
}

impl<'a> Basis<'a> {
    fn new(pair: &'a OperatorPair) -> Self {
        Basis { pair, v: Vec::new(), kv: Vec::new(), mv: Vec::new() }
    }

    fn len(&self) -> usize {
        self.v.len()
    }

    /// `M`-orthogonalizes `w` against the basis (two passes) and appends it
    /// unless it is numerically dependent.
    fn push(&mut self, mut w: Vec<f64>) -> Option<usize> {
        let m = &self.pair.mass;
        let before = m.bilinear(&w, &w).max(0.0).sqrt();
        if !(before > 0.0) {
            return None;
        }
        for _ in 0..2 {
            let c: Vec<f64> = self.mv.par_iter().map(|mv| dot(mv, &w)).collect();
            for (cj, vj) in c.iter().zip(&self.v) {
                axpy(-cj, vj, &mut w);
            }
        }
        let mw = m.mul_vec(&w);
        let nrm = dot(&w, &mw).max(0.0).sqrt();
        if nrm <= 1e-13 * before {
            return None;
        }
        let inv = 1.0 / nrm;
        w.iter_mut().for_each(|x| *x *= inv);
        let kw = self.pair.stiffness.mul_vec(&w);
        self.v.push(w);
        self.kv.push(kw);
        self.mv.push(mw.into_iter().map(|x| x * inv).collect());
        Some(self.v.len() - 1)
    }

    /// Ritz values and coefficient vectors, ascending.
    fn ritz(&self) -> Result<(Vec<f64>, DMatrix<f64>)> {
        let n = self.len();
        let mut h = DMatrix::zeros(n, n);
        let mut g = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let hij = 0.5 * (dot(&self.v[i], &self.kv[j]) + dot(&self.v[j], &self.kv[i]));
                let gij = 0.5 * (dot(&self.v[i], &self.mv[j]) + dot(&self.v[j], &self.mv[i]));
                h[(i, j)] = hij;
                h[(j, i)] = hij;
                g[(i, j)] = gij;
                g[(j, i)] = gij;
            }
        }
        let (vals, y) = dense_generalized_eigen(&h, &g)?;
        Ok((vals.iter().cloned().collect(), y))
    }

    fn combine(vs: &[Vec<f64>], y: &DMatrix<f64>, col: usize) -> Vec<f64> {
        let mut out = vec![0.0; vs[0].len()];
        for (j, v) in vs.iter().enumerate() {
            axpy(y[(j, col)], v, &mut out);
        }
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += a * xi);
}

/// Typical size of the lowest eigenvalues: the median diagonal Rayleigh
/// quotient rescaled from the mesh scale to the domain scale.
fn eigen_scale(pair: &OperatorPair) -> f64 {
    let kd = pair.stiffness.diagonal();
    let md = pair.mass.diagonal();
    let mut r: Vec<f64> = kd.iter().zip(&md).map(|(k, m)| k / m).filter(|x| x.is_finite()).collect();
    if r.is_empty() {
        return 1.0;
    }
    r.sort_by(|a, b| a.total_cmp(b));
    let med = r[r.len() / 2].abs();
    let mesh = pair.mesh();
    let ratio = mesh.mesh_size() / mesh.domain().diameter();
    (med * ratio * ratio).max(1e-12)
}

/// Low-degree monomials in normalized coordinates plus seeded random
/// vectors, so that no symmetry class of the operator is missed.
fn start_vectors(pair: &OperatorPair, rng: &mut StdRng, random: usize) -> Vec<Vec<f64>> {
    let mesh = pair.mesh();
    let (lo, hi) = mesh.domain().bounding_box();
    let c = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
    let w = [(0.5 * (hi[0] - lo[0])).max(1e-300), (0.5 * (hi[1] - lo[1])).max(1e-300)];
    let pts: Vec<[f64; 2]> = pair
        .dof_map
        .iter()
        .map(|&i| {
            let p = mesh.nodes()[i];
            [(p[0] - c[0]) / w[0], (p[1] - c[1]) / w[1]]
        })
        .collect();
    let exps: &[(i32, i32)] = if mesh.dim() == 1 {
        &[(0, 0), (1, 0), (2, 0)]
    } else {
        &[(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    };
    let mut out: Vec<Vec<f64>> = exps
        .iter()
        .map(|&(a, b)| pts.iter().map(|p| p[0].powi(a) * p[1].powi(b)).collect())
        .collect();
    for _ in 0..random {
        out.push(pts.iter().map(|_| rng.random::<f64>() - 0.5).collect());
    }
    out
}

pub(super) fn shift_invert(
    pair: &OperatorPair,
    count: usize,
    options: &SolverOptions,
) -> Result<(Vec<f64>, Vec<Vec<f64>>, String)> {
    let n = pair.dim();
    let scale = eigen_scale(pair);
    let floor = if pair.min_potential_ratio.is_finite() { pair.min_potential_ratio.min(0.0) } else { 0.0 };
    let mut sigma = floor - scale;
    let mut attempt = 0;
    let chol = loop {
        match EnvelopeCholesky::factor(&pair.stiffness.add_scaled(-sigma, &pair.mass)) {
            Ok(c) => break c,
            Err(e) if attempt >= 5 => return Err(e),
            Err(_) => {
                attempt += 1;
                sigma -= 10f64.powi(attempt) * scale;
            }
        }
    };
    let op = |x: &Vec<f64>| chol.solve(&pair.mass.mul_vec(x));

    let mut rng = StdRng::seed_from_u64(SEED);
    let block = if pair.mesh().dim() == 1 { 4 } else { 8 };
    let mut wanted = count;
    let mut basis = Basis::new(pair);
    let mut frontier: Vec<usize> = Vec::new();
    for w in start_vectors(pair, &mut rng, block - if pair.mesh().dim() == 1 { 3 } else { 6 })
        .par_iter()
        .map(op)
        .collect::<Vec<_>>()
    {
        if let Some(i) = basis.push(w) {
            frontier.push(i);
        }
    }

    let mut restarts = 0;
    let mut checks = 0;
    let mut inject = false;
    let mut previous = f64::INFINITY;
    loop {
        let max_dim = n.min((wanted + 40).max(2 * wanted + 20));
        while !frontier.is_empty() && basis.len() < max_dim {
            let room = max_dim - basis.len();
            let images: Vec<Vec<f64>> = frontier.iter().take(room).collect::<Vec<_>>().par_iter().map(|&&i| op(&basis.v[i])).collect();
            frontier.clear();
            for w in images {
                if let Some(i) = basis.push(w) {
                    frontier.push(i);
                }
            }
        }
        let (theta, y) = basis.ritz()?;
        let keep = basis.len().min(wanted + block);
        let mut xs = Vec::with_capacity(keep);
        let mut kxs = Vec::with_capacity(keep);
        let mut mxs = Vec::with_capacity(keep);
        let mut res = Vec::with_capacity(keep);
        for j in 0..keep {
            let x = Basis::combine(&basis.v, &y, j);
            let kx = Basis::combine(&basis.kv, &y, j);
            let mx = Basis::combine(&basis.mv, &y, j);
            res.push(super::residual(&kx, &mx, theta[j]));
            xs.push(x);
            kxs.push(kx);
            mxs.push(mx);
        }
        if wanted > theta.len() {
            return Err(Error::NotConverged(format!("Krylov space exhausted at dimension {}", basis.len())));
        }
        let worst = res[..wanted].iter().cloned().fold(0.0, f64::max);
        // residuals bottom out at roundoff level somewhat above the target
        let stalled = worst <= super::RESIDUAL_TOL && worst > 0.5 * previous;
        previous = worst;
        let converged = worst <= options.tolerance
            || stalled
            || (restarts >= options.max_restarts && worst <= super::RESIDUAL_TOL)
            || (basis.len() == n && worst <= super::RESIDUAL_TOL);
        if converged {
            let top = theta[wanted - 1];
            let tau = top + 1e-8 * top.abs().max(scale);
            let below = negative_inertia(&pair.stiffness.add_scaled(-tau, &pair.mass));
            let found = theta.iter().filter(|&&t| t < tau).count();
            if below <= found {
                let values = theta[..count].to_vec();
                xs.truncate(count);
                let method = format!("shift-invert block Krylov (sigma {sigma:.6e}, {restarts} restarts, {} inertia checks)", checks + 1);
                return Ok((values, xs, method));
            }
            checks += 1;
            if checks > 4 {
                return Err(Error::NotConverged(format!(
                    "inertia reports {below} eigenvalues below {tau:e}, iteration found {found}"
                )));
            }
            wanted = below.max(wanted + 1).min(n);
            inject = true;
        } else if restarts >= options.max_restarts {
            return Err(Error::NotConverged(format!(
                "block Krylov: residual {worst:e} after {restarts} restarts"
            )));
        }
        restarts += 1;

        let unconverged: Vec<usize> = (0..keep.min(wanted + block / 2).min(res.len()))
            .filter(|&j| j >= wanted || res[j] > options.tolerance)
            .collect();
        let mut next = Basis::new(pair);
        for j in 0..keep {
            next.v.push(std::mem::take(&mut xs[j]));
            next.kv.push(std::mem::take(&mut kxs[j]));
            next.mv.push(std::mem::take(&mut mxs[j]));
        }
        basis = next;
        frontier = unconverged.into_iter().take(block).collect();
        if inject {
            inject = false;
            for w in start_vectors(pair, &mut rng, block).par_iter().map(op).collect::<Vec<_>>() {
                if let Some(i) = basis.push(w) {
                    frontier.push(i);
                }
            }
        }
        if frontier.is_empty() {
            frontier = (0..basis.len().min(block)).collect();
        }
    }
}
