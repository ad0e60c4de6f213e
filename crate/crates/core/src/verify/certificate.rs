//! Trial-space certificates: the largest Rayleigh quotient of the Neumann
//! pencil over `span(U + W)`, with `U` the first `k` Dirichlet
//! eigenvectors and `W` trial functions outside the Dirichlet space.
//!
//! Trials may be complex (`re + i im`); the pencil is then Hermitian and is
//! handled through its real symmetric embedding `[[X, -Y], [Y, X]]`, whose
//! eigenvalues are those of `X + iY`, each doubled.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::{extrapolated_eigenvalue, Ladder};
use crate::conditions::{check_harmonic_gradient, ANALYTIC_TOL};
use crate::eigen::Spectrum;
use crate::error::{Error, Result};
use crate::fem::{gradient_recovery, OperatorPair};
use crate::fields::{CoefficientSet, HarmonicPhase};
use crate::geometry::Point;
use crate::linalg::{dense_generalized_eigen, mat2_mul_vec};
use crate::sampling::{sample_points, DEFAULT_SAMPLES};

/// Relative slack of `q_max <= target (1 + tol)`.
pub const CERTIFICATE_TOL: f64 = 1e-6;
/// Smallest admissible eigenvalue of the normalized Gram matrix.
pub const INDEPENDENCE_TOL: f64 = 1e-8;
const TRACE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrialTag {
    /// `exp(i sqrt(mu) h)` for the rotated phase `h`.
    PlaneWave { phase: String, theta: f64, mu: f64 },
    /// `b . grad(phi_index)` (1-based index).
    Derivative { index: usize, b: Point },
    Other { label: String },
}

/// A trial function as nodal values on the mesh.
#[derive(Clone, Debug)]
pub struct Trial {
    pub re: Vec<f64>,
    pub im: Option<Vec<f64>>,
    pub tag: TrialTag,
    /// Root mean square of `|w|` over boundary nodes.
    pub boundary_trace: f64,
}

impl Trial {
    pub fn real(re: Vec<f64>, tag: TrialTag, pair: &OperatorPair) -> Trial {
        let boundary_trace = trace(pair, &re, None);
        Trial { re, im: None, tag, boundary_trace }
    }

    /// Rayleigh quotient on the pair (real and imaginary parts summed).
    pub fn rayleigh_quotient(&self, pair: &OperatorPair) -> f64 {
        let re = pair.restrict(&self.re);
        let mut num = pair.stiffness.bilinear(&re, &re);
        let mut den = pair.mass.bilinear(&re, &re);
        if let Some(im) = &self.im {
            let im = pair.restrict(im);
            num += pair.stiffness.bilinear(&im, &im);
            den += pair.mass.bilinear(&im, &im);
        }
        num / den
    }
}

fn trace(pair: &OperatorPair, re: &[f64], im: Option<&[f64]>) -> f64 {
    let b = pair.mesh().boundary_nodes();
    if b.is_empty() {
        return 0.0;
    }
    let s: f64 = b.iter().map(|&i| re[i] * re[i] + im.map_or(0.0, |v| v[i] * v[i])).sum();
    (s / b.len() as f64).sqrt()
}

/// Source of the phase of plane-wave trials.
#[derive(Clone, Debug)]
pub enum PhaseSource {
    /// Rotations `Re(e^{i theta} Phi)` of a holomorphic potential.
    Harmonic(HarmonicPhase),
    /// A constant eigenpair `A xi = lambda xi`: phase `xi . x / sqrt(lambda)`.
    Eigenpair { lambda: f64, xi: Point },
}

/// `cos(sqrt(mu) h) + i sin(sqrt(mu) h)` interpolated at the mesh nodes,
/// one trial per rotation (eigenpair sources give a single trial).
pub fn build_plane_wave_trials(
    pair: &OperatorPair,
    coeffs: &CoefficientSet,
    mu: f64,
    source: &PhaseSource,
    rotations: &[f64],
) -> Result<Vec<Trial>> {
    if !(mu > 0.0) {
        return Err(Error::InvalidInput(format!("plane-wave frequency must be positive, got {mu}")));
    }
    let mesh = pair.mesh();
    let points = sample_points(mesh, DEFAULT_SAMPLES, |p| coeffs.allows(p));
    let diam = mesh.domain().diameter();
    let s = mu.sqrt();
    let mut phases: Vec<(Box<dyn Fn(Point) -> Result<f64>>, TrialTag)> = Vec::new();
    match source {
        PhaseSource::Harmonic(phase) => {
            if rotations.is_empty() {
                return Err(Error::InvalidInput("no rotations given".into()));
            }
            for &theta in rotations {
                let h = phase.field(theta);
                let rep = check_harmonic_gradient(&h, &coeffs.rho, &points, diam)?;
                if !rep.passed {
                    return Err(Error::Hypothesis(format!(
                        "phase {} is not a harmonic gradient phase for the density (residual {:e})",
                        h.name(),
                        rep.max_residual
                    )));
                }
                let tag = TrialTag::PlaneWave { phase: phase.name().to_string(), theta, mu };
                phases.push((Box::new(move |p| h.eval(p)), tag));
            }
        }
        PhaseSource::Eigenpair { lambda, xi } => {
            let n = xi[0].hypot(xi[1]);
            if !(n > 0.0) || !(*lambda > 0.0) {
                return Err(Error::InvalidInput("eigenpair needs lambda > 0 and xi != 0".into()));
            }
            let xi = [xi[0] / n, xi[1] / n];
            let worst = points
                .iter()
                .map(|&p| {
                    let w = mat2_mul_vec(&coeffs.matrix.value(p), xi);
                    (w[0] - lambda * xi[0]).hypot(w[1] - lambda * xi[1])
                })
                .fold(0.0, f64::max);
            if worst > ANALYTIC_TOL {
                return Err(Error::Hypothesis(format!("A xi = lambda xi fails by {worst:e}")));
            }
            let c = 1.0 / lambda.sqrt();
            let tag = TrialTag::PlaneWave { phase: format!("eigenpair({lambda}, {xi:?})"), theta: 0.0, mu };
            phases.push((Box::new(move |p: Point| Ok(c * (xi[0] * p[0] + xi[1] * p[1]))), tag));
        }
    }
    let mut out = Vec::with_capacity(phases.len());
    for (h, tag) in phases {
        let mut re = Vec::with_capacity(mesh.n_nodes());
        let mut im = Vec::with_capacity(mesh.n_nodes());
        for &p in mesh.nodes() {
            let t = s * h(p)?;
            re.push(t.cos());
            im.push(t.sin());
        }
        let boundary_trace = trace(pair, &re, Some(&im));
        if boundary_trace <= TRACE_TOL {
            return Err(Error::Degenerate("plane-wave trial vanishes on the boundary".into()));
        }
        out.push(Trial { re, im: Some(im), tag, boundary_trace });
    }
    Ok(out)
}

/// The four default rotations `0, pi/4, pi/2, 3 pi/4`.
pub fn default_rotations() -> Vec<f64> {
    (0..4).map(|j| j as f64 * PI / 4.0).collect()
}

/// `b . grad phi` for the recovered gradient of Dirichlet eigenvector
/// `index` (0-based), one trial per direction.
pub fn build_derivative_trials(
    pair: &OperatorPair,
    dirichlet: &Spectrum,
    index: usize,
    directions: &[Point],
) -> Result<Vec<Trial>> {
    if index >= dirichlet.len() {
        return Err(Error::InvalidInput(format!("eigenfunction {index} not computed")));
    }
    let mesh = pair.mesh();
    let phi = dirichlet.nodal(index);
    if phi.len() != mesh.n_nodes() {
        return Err(Error::InvalidInput("spectrum and operator pair live on different meshes".into()));
    }
    let phi_norm = pair.mass_norm(&pair.restrict(&phi));
    let [gx, gy] = gradient_recovery(mesh, &phi);
    let mut out = Vec::with_capacity(directions.len());
    for &b in directions {
        if b[0] == 0.0 && b[1] == 0.0 {
            return Err(Error::InvalidInput("derivative direction must be nonzero".into()));
        }
        let v: Vec<f64> = gx.iter().zip(&gy).map(|(x, y)| b[0] * x + b[1] * y).collect();
        let nrm = pair.mass_norm(&pair.restrict(&v));
        if nrm < 1e-10 * phi_norm {
            return Err(Error::Degenerate(format!("derivative trial along {b:?} vanishes")));
        }
        out.push(Trial::real(v, TrialTag::Derivative { index: index + 1, b }, pair));
    }
    Ok(out)
}

/// Result of [`assemble_certificate`].
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub target: f64,
    pub tolerance: f64,
    pub k: usize,
    /// Number of trials kept.
    pub r: usize,
    pub requested_r: usize,
    pub trial_tags: Vec<TrialTag>,
    pub dropped: Vec<TrialTag>,
    /// Rayleigh quotient of each kept trial on its own.
    pub trial_quotients: Vec<f64>,
    pub trial_boundary_traces: Vec<f64>,
    /// Smallest eigenvalue of the Gram matrix of the unit-normalized basis.
    pub gram_min_singular: f64,
    pub independent: bool,
    /// Eigenvalues of the projected pencil, ascending.
    pub pencil_eigenvalues: Vec<f64>,
    pub q_max: f64,
    pub passes: bool,
}

struct Column {
    re: Vec<f64>,
    im: Vec<f64>,
}

fn embed(x: &DMatrix<f64>, y: &DMatrix<f64>) -> DMatrix<f64> {
    let m = x.nrows();
    let mut out = DMatrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            out[(i, j)] = x[(i, j)];
            out[(i + m, j + m)] = x[(i, j)];
            out[(i, j + m)] = -y[(i, j)];
            out[(i + m, j)] = y[(i, j)];
        }
    }
    out
}

/// `(X, Y)` with `X + iY = C^* A C` for complex columns `C`.
fn hermitian(cols: &[Column], a: &crate::sparse::CsrMatrix) -> (DMatrix<f64>, DMatrix<f64>) {
    let m = cols.len();
    let ar: Vec<Vec<f64>> = cols.iter().map(|c| a.mul_vec(&c.re)).collect();
    let ai: Vec<Vec<f64>> = cols.iter().map(|c| a.mul_vec(&c.im)).collect();
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(x, y)| x * y).sum::<f64>();
    let mut x = DMatrix::zeros(m, m);
    let mut y = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            x[(i, j)] = 0.5 * (dot(&cols[i].re, &ar[j]) + dot(&cols[i].im, &ai[j]) + dot(&cols[j].re, &ar[i]) + dot(&cols[j].im, &ai[i]));
            y[(i, j)] = 0.5 * ((dot(&cols[i].re, &ai[j]) - dot(&cols[i].im, &ar[j])) - (dot(&cols[j].re, &ai[i]) - dot(&cols[j].im, &ar[i])));
        }
    }
    (x, y)
}

/// Builds the projected Neumann pencil over the first `k` Dirichlet
/// eigenvectors (zero-extended) and the trials, drops trials greedily
/// while the Gram matrix is near singular, and reports the largest
/// generalized eigenvalue `q_max`. Passes iff the basis is independent and
/// `q_max <= target (1 + tol)`.
pub fn assemble_certificate(
    neumann: &OperatorPair,
    dirichlet: &Spectrum,
    k: usize,
    trials: &[Trial],
    target: f64,
    tol: f64,
) -> Result<Certificate> {
    if k > dirichlet.len() {
        return Err(Error::InvalidInput(format!("k = {k} exceeds the {} Dirichlet eigenvectors", dirichlet.len())));
    }
    if k + trials.len() == 0 {
        return Err(Error::InvalidInput("empty trial space".into()));
    }
    let mesh = neumann.mesh();
    if let Some(dm) = dirichlet.mesh() {
        if !Arc::ptr_eq(dm, mesh) && dm.n_nodes() != mesh.n_nodes() {
            return Err(Error::InvalidInput("Dirichlet spectrum and Neumann pair live on different meshes".into()));
        }
    }
    for t in trials {
        if t.re.len() != mesh.n_nodes() || t.im.as_ref().is_some_and(|v| v.len() != mesh.n_nodes()) {
            return Err(Error::InvalidInput(format!("trial {:?} has the wrong length", t.tag)));
        }
    }
    let n = neumann.dim();
    let mut cols: Vec<Column> = (0..k)
        .map(|j| Column { re: neumann.restrict(&dirichlet.nodal(j)), im: vec![0.0; n] })
        .collect();
    let mut kept: Vec<usize> = (0..trials.len()).collect();
    for t in trials {
        cols.push(Column {
            re: neumann.restrict(&t.re),
            im: t.im.as_ref().map_or_else(|| vec![0.0; n], |v| neumann.restrict(v)),
        });
    }
    // unit M-norm columns make the Gram diagnostic scale free
    for c in cols.iter_mut() {
        let s = (neumann.mass.bilinear(&c.re, &c.re) + neumann.mass.bilinear(&c.im, &c.im)).sqrt();
        if !(s > 0.0) {
            return Err(Error::Degenerate("zero basis vector".into()));
        }
        c.re.iter_mut().chain(c.im.iter_mut()).for_each(|v| *v /= s);
    }
    let mut dropped = Vec::new();
    let (mut gx, mut gy) = hermitian(&cols, &neumann.mass);
    let mut gram_min;
    loop {
        let g = embed(&gx, &gy);
        let eig = SymmetricEigen::new(g);
        let (imin, &lmin) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty basis");
        gram_min = lmin;
        if lmin > INDEPENDENCE_TOL || kept.is_empty() {
            break;
        }
        let m = cols.len();
        let v = eig.eigenvectors.column(imin);
        let worst = (k..m)
            .max_by(|&a, &b| v[a].hypot(v[a + m]).total_cmp(&v[b].hypot(v[b + m])))
            .expect("at least one trial");
        dropped.push(trials[kept[worst - k]].tag.clone());
        kept.remove(worst - k);
        cols.remove(worst);
        let (x, y) = hermitian(&cols, &neumann.mass);
        gx = x;
        gy = y;
    }
    let independent = gram_min > INDEPENDENCE_TOL;
    let (hx, hy) = hermitian(&cols, &neumann.stiffness);
    let (vals, _) = dense_generalized_eigen(&embed(&hx, &hy), &embed(&gx, &gy))?;
    let pencil: Vec<f64> = vals.iter().step_by(2).cloned().collect();
    let q_max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let passes = independent && q_max <= target * (1.0 + tol);
    Ok(Certificate {
        target,
        tolerance: tol,
        k,
        r: kept.len(),
        requested_r: trials.len(),
        trial_tags: kept.iter().map(|&i| trials[i].tag.clone()).collect(),
        dropped,
        trial_quotients: kept.iter().map(|&i| trials[i].rayleigh_quotient(neumann)).collect(),
        trial_boundary_traces: kept.iter().map(|&i| trials[i].boundary_trace).collect(),
        gram_min_singular: gram_min,
        independent,
        pencil_eigenvalues: pencil,
        q_max,
        passes,
    })
}

/// One certificate per rotation (a single one for eigenpair sources), each
/// over the first `k` Dirichlet eigenvectors and one plane wave on the
/// finest mesh. The wave frequency is the extrapolated `lambda_k`; the
/// target is the finest-mesh `lambda_k^h`.
pub fn plane_wave_certificates(
    ladder: &Ladder,
    coeffs: &CoefficientSet,
    k: usize,
    source: &PhaseSource,
    rotations: &[f64],
) -> Result<Vec<Certificate>> {
    if k == 0 {
        return Err(Error::InvalidInput("k is 1-based".into()));
    }
    let neumann = ladder.finest_neumann_pair();
    let dirichlet = ladder.finest_dirichlet();
    if k > dirichlet.len() {
        return Err(Error::InvalidInput(format!("k = {k} exceeds the {} Dirichlet eigenvalues", dirichlet.len())));
    }
    let mu = extrapolated_eigenvalue(&ladder.dirichlet, k - 1)?.value;
    let target = dirichlet.value(k - 1);
    let single = [0.0];
    let rotations = match source {
        PhaseSource::Harmonic(_) => rotations,
        PhaseSource::Eigenpair { .. } => &single[..],
    };
    rotations
        .iter()
        .map(|&theta| {
            let trials = build_plane_wave_trials(neumann, coeffs, mu, source, &[theta])?;
            assemble_certificate(neumann, dirichlet, k, &trials, target, CERTIFICATE_TOL)
        })
        .collect()
}
