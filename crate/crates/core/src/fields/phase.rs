//! Harmonic phases `h = Re(e^{i theta} Phi)` for holomorphic potentials
//! `Phi`, and the mesh-based construction of `Phi` from a log-harmonic
//! density.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::{cplx, fd, Guard, ScalarField};
use crate::error::{Error, Result};
use crate::geometry::{Mesh, Point};
use crate::sampling::halton_points;

type PointToComplex = Arc<dyn Fn(Point) -> Complex64 + Send + Sync>;

/// Tolerance on the relative finite-difference residual of `Delta log rho`.
pub const LOG_HARMONIC_TOL: f64 = 1e-4;

/// A holomorphic potential `Phi` with its first two derivatives, given as
/// functions of the planar point. Each rotation `h_theta = Re(e^{i theta} Phi)`
/// is harmonic with `|grad h_theta|^2 = |Phi'|^2`.
#[derive(Clone)]
pub struct HarmonicPhase {
    name: String,
    potential: PointToComplex,
    derivative: PointToComplex,
    second: PointToComplex,
    guard: Option<Guard>,
}

impl fmt::Debug for HarmonicPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HarmonicPhase({})", self.name)
    }
}

impl HarmonicPhase {
    pub fn new(
        name: impl Into<String>,
        potential: impl Fn(Point) -> Complex64 + Send + Sync + 'static,
        derivative: impl Fn(Point) -> Complex64 + Send + Sync + 'static,
        second: impl Fn(Point) -> Complex64 + Send + Sync + 'static,
    ) -> HarmonicPhase {
        HarmonicPhase {
            name: name.into(),
            potential: Arc::new(potential),
            derivative: Arc::new(derivative),
            second: Arc::new(second),
            guard: None,
        }
    }

    /// `h(x) = xi . x`, i.e. `Phi(z) = conj(xi) z`.
    pub fn linear(xi: Point) -> HarmonicPhase {
        let c = Complex64::new(xi[0], -xi[1]);
        HarmonicPhase::new(format!("linear({xi:?})"), move |p| c * cplx(p), move |_| c, |_| Complex64::new(0.0, 0.0))
    }

    /// `h(x) = (x1^2 - x2^2)/2`, i.e. `Phi(z) = z^2/2`.
    pub fn saddle() -> HarmonicPhase {
        HarmonicPhase::new("saddle", |p| 0.5 * cplx(p) * cplx(p), cplx, |_| Complex64::new(1.0, 0.0))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn potential(&self, p: Point) -> Complex64 {
        (self.potential)(p)
    }

    pub fn derivative(&self, p: Point) -> Complex64 {
        (self.derivative)(p)
    }

    /// `h_theta = Re(e^{i theta} Phi)` with its analytic gradient and Hessian.
    pub fn field(&self, theta: f64) -> ScalarField {
        let rot = Complex64::from_polar(1.0, theta);
        let (p0, p1, p2) = (self.potential.clone(), self.derivative.clone(), self.second.clone());
        let f = ScalarField::new(format!("{}@{theta:.4}", self.name), move |p| (rot * p0(p)).re)
            .with_gradient(move |p| {
                let w = rot * p1(p);
                [w.re, -w.im]
            })
            .with_hessian(move |p| {
                let w = rot * p2(p);
                [[w.re, -w.im], [-w.im, -w.re]]
            });
        match self.guard {
            Some(g) => f.with_guard(g),
            None => f,
        }
    }

    /// The density `|Phi'|^2` the phase is adapted to.
    pub fn density(&self) -> ScalarField {
        let d = self.derivative.clone();
        ScalarField::new(format!("|{}'|^2", self.name), move |p| d(p).norm_sqr())
    }
}

/// Diagnostics of [`construct_harmonic_phase`].
#[derive(Clone, Debug, Serialize)]
pub struct PhaseDiagnostics {
    pub euler_characteristic: i64,
    pub log_harmonic_residual: f64,
    /// Largest disagreement when integrating along edges not in the
    /// spanning tree.
    pub cycle_closure_residual: f64,
    /// `max |(K h)_i|` over interior nodes, `K` the P1 Laplacian.
    pub laplacian_residual: f64,
    /// `max | |grad h|^2 / rho - 1 |` over cell centroids.
    pub gradient_residual: f64,
    pub mesh_size: f64,
}

/// Relative residual `|Delta log rho| / max(1, |d11 log rho| + |d22 log rho|)`
/// by five-point differences.
pub(crate) fn log_laplacian_residual(rho: &ScalarField, p: Point, s: f64) -> f64 {
    let g = |q: Point| rho.value(q).ln();
    let ok = |q: Point| rho.allows(q);
    let dxx = fd::second_directional(&g, p, [1.0, 0.0], s, &ok);
    let dyy = fd::second_directional(&g, p, [0.0, 1.0], s, &ok);
    (dxx + dyy).abs() / (dxx.abs() + dyy.abs()).max(1.0)
}

struct EdgeOde<'a> {
    rho: &'a ScalarField,
    step: f64,
}

impl EdgeOde<'_> {
    fn log_and_gradient(&self, p: Point) -> (f64, Point) {
        let r = self.rho.value(p);
        let g = self.rho.gradient(p, self.step, 2);
        (r.ln(), [g[0] / r, g[1] / r])
    }

    /// Right-hand side for the state `(conj_g, Psi)` at `p` moving with velocity `d`.
    fn rhs(&self, p: Point, gt: f64, d: Point) -> (f64, Complex64) {
        let (g, dg) = self.log_and_gradient(p);
        let dgt = -dg[1] * d[0] + dg[0] * d[1];
        let psi_prime = (Complex64::new(g, gt) * 0.5).exp();
        (dgt, psi_prime * Complex64::new(d[0], d[1]))
    }

    /// RK4 from `a` to `b` in `n` steps.
    fn integrate(&self, a: Point, b: Point, gt0: f64, psi0: Complex64, n: usize) -> (f64, Complex64) {
        let d = [b[0] - a[0], b[1] - a[1]];
        let dt = 1.0 / n as f64;
        let at = |t: f64| [a[0] + t * d[0], a[1] + t * d[1]];
        let (mut gt, mut psi) = (gt0, psi0);
        for i in 0..n {
            let t = i as f64 * dt;
            let (k1g, k1p) = self.rhs(at(t), gt, d);
            let (k2g, k2p) = self.rhs(at(t + 0.5 * dt), gt + 0.5 * dt * k1g, d);
            let (k3g, k3p) = self.rhs(at(t + 0.5 * dt), gt + 0.5 * dt * k2g, d);
            let (k4g, k4p) = self.rhs(at(t + dt), gt + dt * k3g, d);
            gt += dt / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
            psi += (k1p + 2.0 * k2p + 2.0 * k3p + k4p) * (dt / 6.0);
        }
        (gt, psi)
    }
}

fn p1_interpolant(mesh: &Arc<Mesh>, values: Arc<Vec<Complex64>>) -> impl Fn(Point) -> Complex64 + Send + Sync {
    let mesh = Arc::clone(mesh);
    move |p| {
        let e = mesh.locate_nearest(p);
        let lam = mesh.barycentric(e, p);
        mesh.cell(e).iter().zip(&lam).map(|(&i, &l)| values[i] * l).sum()
    }
}

/// Builds a harmonic phase `h` with `|grad h|^2 = rho` for a log-harmonic
/// density on a simply connected planar mesh.
///
/// With `g = log rho`, the harmonic conjugate `g~` and the primitive `Psi` of
/// `exp((g + i g~)/2)` are integrated jointly (RK4) along a breadth-first
/// spanning tree of the mesh edges rooted at the node nearest `basepoint`,
/// starting from `g~ = 0`, `Psi = 0` at `basepoint`. The result stores nodal
/// `Psi`, `Psi'` and `Psi''` and interpolates them linearly, so `h = Re Psi`
/// and `grad h = (Re Psi', -Im Psi')` are accurate to `O(h_mesh^2)`.
pub fn construct_harmonic_phase(
    rho: &ScalarField,
    basepoint: Point,
    mesh: &Arc<Mesh>,
) -> Result<(HarmonicPhase, PhaseDiagnostics)> {
    if mesh.dim() != 2 {
        return Err(Error::InvalidInput("harmonic phases need a 2D mesh".into()));
    }
    let chi = mesh.euler_characteristic();
    if chi != 1 {
        return Err(Error::Hypothesis(format!("mesh is not simply connected (Euler characteristic {chi})")));
    }
    let diam = mesh.domain().diameter();
    let s = 1e-4 * diam;
    let samples = halton_points(mesh.domain(), 200, |p| rho.allows(p));
    let log_res = samples.iter().map(|&p| log_laplacian_residual(rho, p, s)).fold(0.0, f64::max);
    if log_res > LOG_HARMONIC_TOL {
        return Err(Error::Hypothesis(format!("log rho is not harmonic (residual {log_res:e})")));
    }
    let ode = EdgeOde { rho, step: 1e-5 * diam };
    let nodes = mesh.nodes();
    let n = nodes.len();
    let root = (0..n)
        .min_by(|&a, &b| {
            let da = (nodes[a][0] - basepoint[0]).hypot(nodes[a][1] - basepoint[1]);
            let db = (nodes[b][0] - basepoint[0]).hypot(nodes[b][1] - basepoint[1]);
            da.total_cmp(&db)
        })
        .ok_or_else(|| Error::InvalidInput("empty mesh".into()))?;
    let mut adj = vec![Vec::new(); n];
    let edges = mesh.edges();
    for &[a, b] in &edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    for list in adj.iter_mut() {
        list.sort_unstable();
    }
    let mut gt = vec![0.0; n];
    let mut psi = vec![Complex64::new(0.0, 0.0); n];
    let mut seen = vec![false; n];
    let mut tree_parent = vec![usize::MAX; n];
    let (g0, p0) = ode.integrate(basepoint, nodes[root], 0.0, Complex64::new(0.0, 0.0), 4);
    gt[root] = g0;
    psi[root] = p0;
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                tree_parent[v] = u;
                let (g, p) = ode.integrate(nodes[u], nodes[v], gt[u], psi[u], 1);
                gt[v] = g;
                psi[v] = p;
                queue.push_back(v);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Hypothesis("mesh edge graph is disconnected".into()));
    }
    let mut closure: f64 = 0.0;
    for &[a, b] in &edges {
        if tree_parent[b] == a || tree_parent[a] == b {
            continue;
        }
        let (g, p) = ode.integrate(nodes[a], nodes[b], gt[a], psi[a], 1);
        closure = closure.max((g - gt[b]).abs()).max((p - psi[b]).norm());
    }
    let mut d1 = Vec::with_capacity(n);
    let mut d2 = Vec::with_capacity(n);
    for i in 0..n {
        let (g, dg) = ode.log_and_gradient(nodes[i]);
        let w = (Complex64::new(g, gt[i]) * 0.5).exp();
        d1.push(w);
        d2.push(Complex64::new(dg[0], -dg[1]) * 0.5 * w);
    }
    // weak Laplacian of the nodal h
    let mut kh = vec![0.0; n];
    for e in 0..mesh.n_cells() {
        let c = mesh.cell(e);
        let grads = mesh.shape_gradients(e);
        let area = mesh.cell_measure(e);
        let gh = c.iter().zip(&grads).fold([0.0, 0.0], |acc, (&i, gr)| {
            [acc[0] + psi[i].re * gr[0], acc[1] + psi[i].re * gr[1]]
        });
        for (&i, gr) in c.iter().zip(&grads) {
            kh[i] += area * (gh[0] * gr[0] + gh[1] * gr[1]);
        }
    }
    let laplacian_residual = mesh.interior_nodes().iter().map(|&i| kh[i].abs()).fold(0.0, f64::max);
    let psi = Arc::new(psi);
    let d1 = Arc::new(d1);
    let d2 = Arc::new(d2);
    let potential = p1_interpolant(mesh, psi);
    let derivative = p1_interpolant(mesh, d1);
    let second = p1_interpolant(mesh, d2);
    let gradient_residual = (0..mesh.n_cells())
        .map(|e| {
            let c = mesh.cell_centroid(e);
            (derivative(c).norm_sqr() / rho.value(c) - 1.0).abs()
        })
        .fold(0.0, f64::max);
    let mut phase = HarmonicPhase::new(format!("constructed({})", rho.name()), potential, derivative, second);
    phase.guard = rho.guard();
    Ok((
        phase,
        PhaseDiagnostics {
            euler_characteristic: chi,
            log_harmonic_residual: log_res,
            cycle_closure_residual: closure,
            laplacian_residual,
            gradient_residual,
            mesh_size: mesh.mesh_size(),
        },
    ))
}
