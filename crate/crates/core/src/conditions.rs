//! Sampled checks of the coefficient hypotheses.
//!
//! Every check evaluates a residual at each sample point and passes iff the
//! largest residual is within tolerance. Analytic derivatives are used when
//! a field supplies them (tolerance [`ANALYTIC_TOL`]); otherwise central
//! differences with step `FD_STEP * diam` (tolerance [`FD_TOL`]).

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::fields::{fd, MatrixField, ScalarField};
use crate::geometry::{Domain, Mesh, Point};
use crate::linalg::{sym2_eigen, sym2_inv_sqrt, sym2_min_eigenvalue, sym2_sqrt, mat2_mul_vec, Mat2};

pub const ANALYTIC_TOL: f64 = 1e-6;
pub const FD_TOL: f64 = 1e-4;
pub const FD_STEP: f64 = 1e-4;

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub condition: String,
    pub passed: bool,
    pub max_residual: f64,
    pub sample_count: usize,
    pub tolerance: f64,
    pub witness: Option<Point>,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
}

impl ConditionReport {
    /// Reduces `(point, residual)` pairs to a report; ties keep the first.
    pub fn from_residuals(condition: &str, tolerance: f64, residuals: impl IntoIterator<Item = (Point, f64)>) -> ConditionReport {
        let mut worst = (None, 0.0f64);
        let mut count = 0;
        for (p, r) in residuals {
            count += 1;
            let r = if r.is_nan() { f64::INFINITY } else { r };
            if worst.0.is_none() || r > worst.1 {
                worst = (Some(p), r);
            }
        }
        ConditionReport {
            condition: condition.to_string(),
            passed: worst.1 <= tolerance,
            max_residual: worst.1,
            sample_count: count,
            tolerance,
            witness: worst.0,
            details: serde_json::Value::Null,
        }
    }

    pub fn with_details(mut self, details: serde_json::Value) -> ConditionReport {
        self.details = details;
        self
    }
}

fn min_eig(h: &Mat2, dim: usize) -> f64 {
    if dim == 1 {
        h[0][0]
    } else {
        sym2_min_eigenvalue(h)
    }
}

/// Convexity of `lambda1 rho - V`: residual `max(0, -min eig D^2(lambda1 rho - V))`.
/// The details record whether the Hessian is positive definite (beyond the
/// tolerance) at some sample, which by continuity gives an open ball.
pub fn check_convexity_combination(
    rho: &ScalarField,
    v: &ScalarField,
    lambda1: f64,
    points: &[Point],
    dim: usize,
    diam: f64,
) -> ConditionReport {
    let analytic = rho.has_hessian() && v.has_hessian();
    let tol = if analytic { ANALYTIC_TOL } else { FD_TOL };
    let s = FD_STEP * diam;
    let mut strict = 0usize;
    let mut best = (None::<Point>, f64::NEG_INFINITY);
    let eigs: Vec<(Point, f64)> = points
        .iter()
        .map(|&p| {
            let (hr, hv) = (rho.hessian(p, s, dim), v.hessian(p, s, dim));
            let m = [
                [lambda1 * hr[0][0] - hv[0][0], lambda1 * hr[0][1] - hv[0][1]],
                [lambda1 * hr[1][0] - hv[1][0], lambda1 * hr[1][1] - hv[1][1]],
            ];
            (p, min_eig(&m, dim))
        })
        .collect();
    for &(p, e) in &eigs {
        if e > tol {
            strict += 1;
        }
        if e > best.1 {
            best = (Some(p), e);
        }
    }
    ConditionReport::from_residuals("convexity_combination", tol, eigs.iter().map(|&(p, e)| (p, (-e).max(0.0))))
        .with_details(json!({
            "lambda1": lambda1,
            "strictly_convex_somewhere": strict > 0,
            "strict_samples": strict,
            "largest_min_eigenvalue": best.1,
            "largest_min_eigenvalue_at": best.0,
            "hessians": if analytic { "analytic" } else { "finite-difference" },
        }))
}

/// Vanishing of `d_b rho` and `d_b V` for every `b` in `basis`, by central
/// differences. Residuals are `|d_b f| diam / max(|f|, 1)`. The details
/// report `r`, the dimension spanned by the passing directions.
pub fn check_directional_invariance(
    rho: &ScalarField,
    v: &ScalarField,
    basis: &[Point],
    points: &[Point],
    diam: f64,
) -> Result<ConditionReport> {
    if basis.is_empty() {
        return Err(Error::InvalidInput("empty direction basis".into()));
    }
    let s = FD_STEP * diam;
    let mut per_direction = Vec::new();
    let mut all = Vec::new();
    for &b in basis {
        let n = b[0].hypot(b[1]);
        if !(n > 0.0) {
            return Err(Error::InvalidInput("zero direction".into()));
        }
        let u = [b[0] / n, b[1] / n];
        let mut worst: f64 = 0.0;
        for &p in points {
            let mut r: f64 = 0.0;
            for f in [rho, v] {
                let d = fd::directional(&|q| f.value(q), p, u, s, &|q| f.allows(q));
                r = r.max(d.abs() * diam / f.value(p).abs().max(1.0));
            }
            worst = worst.max(r);
            all.push((p, r));
        }
        per_direction.push((u, worst));
    }
    let passing: Vec<Point> = per_direction.iter().filter(|d| d.1 <= FD_TOL).map(|d| d.0).collect();
    let rank = span_dimension(&passing);
    Ok(ConditionReport::from_residuals("directional_invariance", FD_TOL, all).with_details(json!({
        "r": rank,
        "directions": per_direction.iter().map(|(u, w)| json!({"b": u, "max_residual": w})).collect::<Vec<_>>(),
    })))
}

fn span_dimension(vs: &[Point]) -> usize {
    match vs.len() {
        0 => 0,
        _ => {
            let mut g = [[0.0; 2]; 2];
            for v in vs {
                for i in 0..2 {
                    for j in 0..2 {
                        g[i][j] += v[i] * v[j];
                    }
                }
            }
            let (vals, _) = sym2_eigen(&g);
            vals.iter().filter(|&&l| l > 1e-8 * vs.len() as f64).count()
        }
    }
}

fn positive_density(rho: &ScalarField, points: &[Point]) -> Result<()> {
    for &p in points {
        let r = rho.value(p);
        if !(r > 0.0) {
            return Err(Error::Coefficient { point: p, reason: format!("density {} = {r} is not positive", rho.name()) });
        }
    }
    Ok(())
}

fn log_second_differences(rho: &ScalarField, p: Point, s: f64) -> (f64, f64) {
    let g = |q: Point| rho.value(q).ln();
    let ok = |q: Point| rho.allows(q);
    (
        fd::second_directional(&g, p, [1.0, 0.0], s, &ok),
        fd::second_directional(&g, p, [0.0, 1.0], s, &ok),
    )
}

/// `Delta log rho = 0` by five-point differences, residual
/// `|Delta log rho| / max(1, |d11 log rho| + |d22 log rho|)`.
pub fn check_log_harmonic(rho: &ScalarField, points: &[Point], diam: f64) -> Result<ConditionReport> {
    positive_density(rho, points)?;
    let s = FD_STEP * diam;
    Ok(ConditionReport::from_residuals(
        "log_harmonic",
        FD_TOL,
        points.iter().map(|&p| {
            let (a, b) = log_second_differences(rho, p, s);
            (p, (a + b).abs() / (a.abs() + b.abs()).max(1.0))
        }),
    ))
}

/// `-Delta log rho <= 0`, residual `max(0, -Delta log rho)` relative as in
/// [`check_log_harmonic`].
pub fn check_log_subharmonic(rho: &ScalarField, points: &[Point], diam: f64) -> Result<ConditionReport> {
    positive_density(rho, points)?;
    let s = FD_STEP * diam;
    Ok(ConditionReport::from_residuals(
        "log_subharmonic",
        FD_TOL,
        points.iter().map(|&p| {
            let (a, b) = log_second_differences(rho, p, s);
            (p, (-(a + b)).max(0.0) / (a.abs() + b.abs()).max(1.0))
        }),
    ))
}

/// `Delta h = 0` and `|grad h|^2 = rho`. The Laplacian is the trace of the
/// analytic Hessian when `h` has one, five-point differences otherwise.
/// Residuals: `|Delta h| / max(1, |h11| + |h22|)` and `| |grad h|^2 / rho - 1 |`.
pub fn check_harmonic_gradient(h: &ScalarField, rho: &ScalarField, points: &[Point], diam: f64) -> Result<ConditionReport> {
    if !h.has_gradient() {
        return Err(Error::InvalidInput(format!("phase {} has no gradient", h.name())));
    }
    let tol = if h.has_hessian() { ANALYTIC_TOL } else { FD_TOL };
    let s = FD_STEP * diam;
    let (mut lap_worst, mut grad_worst): (f64, f64) = (0.0, 0.0);
    let res: Vec<(Point, f64)> = points
        .iter()
        .map(|&p| {
            let hs = h.hessian(p, s, 2);
            let lap = (hs[0][0] + hs[1][1]).abs() / (hs[0][0].abs() + hs[1][1].abs()).max(1.0);
            let g = h.analytic_gradient(p).unwrap();
            let gr = ((g[0] * g[0] + g[1] * g[1]) / rho.value(p) - 1.0).abs();
            lap_worst = lap_worst.max(lap);
            grad_worst = grad_worst.max(gr);
            (p, lap.max(gr))
        })
        .collect();
    Ok(ConditionReport::from_residuals("harmonic_gradient", tol, res).with_details(json!({
        "laplacian_residual": lap_worst,
        "gradient_residual": grad_worst,
    })))
}

/// Searches constant eigenpairs of `A`: candidates come from the
/// eigendecomposition at the first sample (both unit vectors when the
/// eigenvalue is double) and are kept if `max |A(x) xi - lambda xi| <= tol`.
pub fn check_constant_eigenpair(a: &MatrixField, points: &[Point]) -> (ConditionReport, Vec<(f64, Point)>) {
    let Some(&p0) = points.first() else {
        return (ConditionReport::from_residuals("constant_eigenpair", ANALYTIC_TOL, []), Vec::new());
    };
    let a0 = a.value(p0);
    let (vals, vecs) = sym2_eigen(&a0);
    let candidates: Vec<(f64, Point)> = vec![(vals[0], vecs[0]), (vals[1], vecs[1])];
    let mut found = Vec::new();
    let mut best: Option<ConditionReport> = None;
    let mut per_candidate = Vec::new();
    for (lambda, xi) in candidates {
        let rep = ConditionReport::from_residuals(
            "constant_eigenpair",
            ANALYTIC_TOL,
            points.iter().map(|&p| {
                let w = mat2_mul_vec(&a.value(p), xi);
                (p, (w[0] - lambda * xi[0]).hypot(w[1] - lambda * xi[1]))
            }),
        );
        per_candidate.push(json!({"lambda": lambda, "xi": xi, "max_residual": rep.max_residual}));
        if rep.passed {
            found.push((lambda, xi));
        }
        if best.as_ref().map_or(true, |b| rep.max_residual < b.max_residual) {
            best = Some(rep);
        }
    }
    let mut report = best.unwrap();
    report.passed = !found.is_empty();
    let report = report.with_details(json!({
        "pairs_found": found.len(),
        "pairs": found.iter().map(|(l, x)| json!({"lambda": l, "xi": x})).collect::<Vec<_>>(),
        "candidates": per_candidate,
    }));
    (report, found)
}

/// `|xi| = 1`, `div A^{1/2} xi = 0` and `curl A^{-1/2} xi = 0` at cell
/// centroids, derivatives by central differences.
pub fn check_div_curl_conditions(
    a: &MatrixField,
    xi: &dyn Fn(Point) -> Point,
    mesh: &Mesh,
) -> Result<ConditionReport> {
    let diam = mesh.domain().diameter();
    let s = FD_STEP * diam;
    let all = |_: Point| true;
    let half = |p: Point| -> Result<(Point, Point)> {
        let m = a.value(p);
        let (r, ri) = (sym2_sqrt(&m), sym2_inv_sqrt(&m));
        match (r, ri) {
            (Some(r), Some(ri)) => Ok((mat2_mul_vec(&r, xi(p)), mat2_mul_vec(&ri, xi(p)))),
            _ => Err(Error::Coefficient { point: p, reason: format!("{} is not positive definite", a.name()) }),
        }
    };
    let (mut w_unit, mut w_div, mut w_curl): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut res = Vec::with_capacity(mesh.n_cells());
    for e in 0..mesh.n_cells() {
        let p = mesh.cell_centroid(e);
        half(p)?;
        let x = xi(p);
        let unit = (x[0].hypot(x[1]) - 1.0).abs();
        let comp = |k: usize, which: usize| {
            move |q: Point| {
                let (u, v) = half(q).unwrap_or(([f64::NAN; 2], [f64::NAN; 2]));
                if which == 0 {
                    u[k]
                } else {
                    v[k]
                }
            }
        };
        let div = fd::directional(&comp(0, 0), p, [1.0, 0.0], s, &all) + fd::directional(&comp(1, 0), p, [0.0, 1.0], s, &all);
        let curl = fd::directional(&comp(1, 1), p, [1.0, 0.0], s, &all) - fd::directional(&comp(0, 1), p, [0.0, 1.0], s, &all);
        w_unit = w_unit.max(unit);
        w_div = w_div.max(div.abs());
        w_curl = w_curl.max(curl.abs());
        res.push((p, unit.max(div.abs()).max(curl.abs())));
    }
    Ok(ConditionReport::from_residuals("div_curl", FD_TOL, res).with_details(json!({
        "unit_residual": w_unit,
        "div_residual": w_div,
        "curl_residual": w_curl,
    })))
}

fn reflect(p: Point, axis: usize) -> Point {
    let mut q = p;
    q[axis] = -q[axis];
    q
}

/// Evenness of `rho` and `V` under each coordinate reflection, plus
/// reflection invariance of the domain outline.
pub fn check_axis_symmetry(domain: &Domain, rho: &ScalarField, v: &ScalarField, points: &[Point]) -> ConditionReport {
    let dim = domain.dim();
    let diam = domain.diameter();
    let outline: Vec<Point> = match domain {
        Domain::Disk { center, .. } => vec![*center],
        _ => domain.outline(),
    };
    let mut vertex_res: f64 = 0.0;
    for axis in 0..dim {
        for &p in &outline {
            let q = reflect(p, axis);
            let d = outline.iter().map(|&o| (o[0] - q[0]).hypot(o[1] - q[1])).fold(f64::INFINITY, f64::min);
            vertex_res = vertex_res.max(d / diam);
        }
    }
    let vertex_tol = 1e-12;
    let mut res: Vec<(Point, f64)> = Vec::new();
    for &p in points {
        let mut r: f64 = 0.0;
        for axis in 0..dim {
            let q = reflect(p, axis);
            for f in [rho, v] {
                let scale = f.value(p).abs().max(1.0);
                r = r.max((f.value(p) - f.value(q)).abs() / scale);
            }
        }
        res.push((p, r));
    }
    let mut rep = ConditionReport::from_residuals("axis_symmetry", ANALYTIC_TOL, res);
    let vertex_ok = vertex_res <= vertex_tol;
    rep.passed = rep.passed && vertex_ok;
    if !vertex_ok {
        rep.max_residual = rep.max_residual.max(vertex_res.max(ANALYTIC_TOL * (1.0 + 1e-9)));
        rep.witness = outline.first().copied().or(rep.witness);
    }
    rep.with_details(json!({"vertex_residual": vertex_res, "vertex_tolerance": vertex_tol}))
}

/// Strictly positive boundary curvature. Only exact circles qualify; the
/// polygonal boundaries have zero curvature on every edge.
pub fn check_strict_boundary_curvature(mesh: &Mesh) -> ConditionReport {
    let res: Vec<(Point, f64)> = mesh
        .facets()
        .iter()
        .map(|f| {
            let a = mesh.nodes()[f.nodes[0]];
            let b = mesh.nodes()[f.nodes[1]];
            let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            let probe = match mesh.domain() {
                Domain::Disk { center, radius, .. } => {
                    let d = [a[0] - center[0], a[1] - center[1]];
                    let n = d[0].hypot(d[1]);
                    [center[0] + radius * d[0] / n, center[1] + radius * d[1] / n]
                }
                _ => mid,
            };
            let kappa = mesh.curvature_at(probe).map(|c| c.kappa).unwrap_or(0.0);
            (probe, if kappa > 0.0 { 0.0 } else { 1.0 })
        })
        .collect();
    ConditionReport::from_residuals("strict_boundary_curvature", 0.5, res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{
        block_matrix_field, constant_matrix_field, directional_field, exp_inverse_density, power_density,
        quadratic_potential, rotated_diagonal_field, shifted_power_density, sin_squared_field, HarmonicPhase, Profile,
    };
    use crate::geometry::{make_disk_mesh, make_rectangle};
    use crate::sampling::sample_points;

    fn sq(x0: f64, x1: f64) -> Domain {
        Domain::Polygon { vertices: vec![[x0, x0], [x1, x0], [x1, x1], [x0, x1]] }
    }

    fn pts(d: &Domain) -> Vec<Point> {
        crate::sampling::halton_points(d, 200, |_| true)
    }

    #[test]
    fn convexity_examples() {
        let d = sq(-1.0, 1.0);
        let p = pts(&d);
        let rho = shifted_power_density(1.0, 2.0, &d).unwrap();
        let r = check_convexity_combination(&rho, &ScalarField::zero(), 5.0, &p, 2, d.diameter());
        assert!(r.passed && r.details["strictly_convex_somewhere"] == true);
        let r = check_convexity_combination(&ScalarField::constant(1.0), &quadratic_potential(-1.0, &d), 5.0, &p, 2, d.diameter());
        assert!(r.passed);
        let concave = ScalarField::new("3-|x|^2", |p| 3.0 - p[0] * p[0] - p[1] * p[1]);
        let r = check_convexity_combination(&concave, &ScalarField::zero(), 5.0, &p, 2, d.diameter());
        assert!(!r.passed && r.witness.is_some() && r.max_residual > 9.0);
    }

    #[test]
    fn directional_examples() {
        let d = sq(-1.0, 1.0);
        let p = pts(&d);
        let rho = directional_field(&Profile::exp(1.0), [1.0, 0.0], &d).unwrap();
        let r = check_directional_invariance(&rho, &ScalarField::zero(), &[[0.0, 1.0]], &p, d.diameter()).unwrap();
        assert!(r.passed && r.details["r"] == 1);
        let sq2 = shifted_power_density(1.0, 2.0, &d).unwrap();
        assert!(!check_directional_invariance(&sq2, &ScalarField::zero(), &[[0.0, 1.0]], &p, d.diameter()).unwrap().passed);
        let r = check_directional_invariance(&ScalarField::constant(2.0), &ScalarField::constant(1.0), &[[1.0, 0.0], [0.0, 1.0]], &p, d.diameter()).unwrap();
        assert!(r.passed && r.details["r"] == 2);
        assert!(check_directional_invariance(&sq2, &ScalarField::zero(), &[], &p, 1.0).is_err());
    }

    #[test]
    fn log_harmonic_examples() {
        let d = sq(1.0, 2.0);
        let p = pts(&d);
        let r = check_log_harmonic(&ScalarField::constant(3.0), &p, d.diameter()).unwrap();
        assert!(r.passed && r.max_residual == 0.0);
        assert!(check_log_harmonic(&exp_inverse_density(&d).unwrap(), &p, d.diameter()).unwrap().passed);
        let f = shifted_power_density(1.0, 2.0, &d).unwrap();
        assert!(!check_log_harmonic(&f, &p, d.diameter()).unwrap().passed);
        let neg = ScalarField::new("neg", |_| -1.0);
        assert!(check_log_harmonic(&neg, &p, d.diameter()).is_err());
    }

    #[test]
    fn log_harmonic_is_scale_invariant() {
        let d = sq(1.0, 2.0);
        let p = pts(&d);
        let f = exp_inverse_density(&d).unwrap();
        let a = check_log_harmonic(&f, &p, d.diameter()).unwrap();
        let b = check_log_harmonic(&f.scaled(2.0), &p, d.diameter()).unwrap();
        assert_eq!(a.passed, b.passed);
        assert_eq!(a.witness, b.witness);
    }

    #[test]
    fn harmonic_gradient_examples() {
        let d = sq(1.0, 2.0);
        let p = pts(&d);
        let lin = HarmonicPhase::linear([0.6, 0.8]).field(0.0);
        assert!(check_harmonic_gradient(&lin, &ScalarField::constant(1.0), &p, d.diameter()).unwrap().passed);
        let rho = power_density(2.0, &d).unwrap();
        let saddle = HarmonicPhase::saddle().field(0.0);
        assert!(check_harmonic_gradient(&saddle, &rho, &p, d.diameter()).unwrap().passed);
        let bowl = ScalarField::new("|x|^2/2", |p| 0.5 * (p[0] * p[0] + p[1] * p[1]))
            .with_gradient(|p| p)
            .with_hessian(|_| [[1.0, 0.0], [0.0, 1.0]]);
        assert!(!check_harmonic_gradient(&bowl, &rho, &p, d.diameter()).unwrap().passed);
    }

    #[test]
    fn constant_eigenpair_examples() {
        let d = sq(0.0, 1.0);
        let p = pts(&d);
        let (r, pairs) = check_constant_eigenpair(&block_matrix_field(1.0, &sin_squared_field(0.5)).unwrap(), &p);
        assert!(r.passed);
        assert_eq!(pairs.len(), 1);
        assert!((pairs[0].0 - 1.0).abs() < 1e-12 && (pairs[0].1[0].abs() - 1.0).abs() < 1e-12);
        let (_, pairs) = check_constant_eigenpair(&constant_matrix_field(2.0, 1.0, 2.0).unwrap(), &p);
        assert_eq!(pairs.len(), 2);
        let (_, pairs) = check_constant_eigenpair(&MatrixField::identity(), &p);
        assert_eq!(pairs.len(), 2);
        let (r, pairs) = check_constant_eigenpair(&rotated_diagonal_field(1.0, 2.0).unwrap(), &p);
        assert!(!r.passed && pairs.is_empty() && r.max_residual > 1e-3);
    }

    #[test]
    fn div_curl_examples() {
        let m = make_rectangle(1.0, 2.0, 1.0, 2.0, 0.25).unwrap();
        let e1 = |_: Point| [1.0, 0.0];
        assert!(check_div_curl_conditions(&MatrixField::identity(), &e1, &m).unwrap().passed);
        let a = block_matrix_field(1.0, &sin_squared_field(0.5)).unwrap();
        assert!(check_div_curl_conditions(&a, &e1, &m).unwrap().passed);
        let radial = |p: Point| {
            let n = p[0].hypot(p[1]);
            [p[0] / n, p[1] / n]
        };
        let r = check_div_curl_conditions(&MatrixField::identity(), &radial, &m).unwrap();
        assert!(!r.passed && r.details["div_residual"].as_f64().unwrap() > 0.1);
    }

    #[test]
    fn axis_symmetry_examples() {
        let d = sq(-1.0, 1.0);
        let p = pts(&d);
        let rho = shifted_power_density(1.0, 2.0, &d).unwrap();
        assert!(check_axis_symmetry(&d, &rho, &ScalarField::zero(), &p).passed);
        let e = directional_field(&Profile::exp(1.0), [1.0, 0.0], &d).unwrap();
        assert!(!check_axis_symmetry(&d, &e, &ScalarField::zero(), &p).passed);
        let off = sq(0.0, 2.0);
        let r = check_axis_symmetry(&off, &ScalarField::constant(1.0), &ScalarField::zero(), &pts(&off));
        assert!(!r.passed && r.details["vertex_residual"].as_f64().unwrap() > 0.1);
    }

    #[test]
    fn log_subharmonic_examples() {
        let d = sq(1.0, 2.0);
        let p = pts(&d);
        assert!(check_log_subharmonic(&exp_inverse_density(&d).unwrap(), &p, d.diameter()).unwrap().passed);
        let up = ScalarField::new("e^|x|^2", |p| (p[0] * p[0] + p[1] * p[1]).exp());
        assert!(check_log_subharmonic(&up, &p, d.diameter()).unwrap().passed);
        let down = ScalarField::new("e^-|x|^2", |p| (-(p[0] * p[0] + p[1] * p[1])).exp());
        assert!(!check_log_subharmonic(&down, &p, d.diameter()).unwrap().passed);
    }

    #[test]
    fn strict_curvature_only_on_disks() {
        let disk = make_disk_mesh([0.0, 0.0], 1.0, 0.3).unwrap();
        assert!(check_strict_boundary_curvature(&disk).passed);
        let sqm = make_rectangle(0.0, 1.0, 0.0, 1.0, 0.5).unwrap();
        assert!(!check_strict_boundary_curvature(&sqm).passed);
    }

    #[test]
    fn checks_are_equivariant_under_isometries() {
        let d = sq(1.0, 2.0);
        let m = make_rectangle(1.0, 2.0, 1.0, 2.0, 0.25).unwrap();
        let p = sample_points(&m, 100, |_| true);
        let rho = exp_inverse_density(&d).unwrap();
        let v = quadratic_potential(0.5, &d);
        let transforms: [(Mat2, Point); 3] = [
            ([[1.0, 0.0], [0.0, 1.0]], [0.7, -0.3]),
            ([[-1.0, 0.0], [0.0, 1.0]], [0.0, 0.0]),
            ([[0.6, -0.8], [0.8, 0.6]], [1.0, 2.0]),
        ];
        let base = (
            check_log_harmonic(&rho, &p, d.diameter()).unwrap().passed,
            check_convexity_combination(&rho, &v, 3.0, &p, 2, d.diameter()).passed,
        );
        for (q, t) in transforms {
            let tp: Vec<Point> = p.iter().map(|x| {
                let y = mat2_mul_vec(&q, *x);
                [y[0] + t[0], y[1] + t[1]]
            }).collect();
            let (r2, v2) = (rho.transformed(q, t), v.transformed(q, t));
            assert_eq!(check_log_harmonic(&r2, &tp, d.diameter()).unwrap().passed, base.0);
            assert_eq!(check_convexity_combination(&r2, &v2, 3.0, &tp, 2, d.diameter()).passed, base.1);
        }
    }
}
