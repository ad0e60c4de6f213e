//! Coefficient fields `rho`, `V` and `A`, evaluated as closures over
//! analytic formulas, with constructors for the standard example families.

pub mod fd;
mod phase;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};
use crate::linalg::{mat2_mul_vec, sym2_eigen, sym2_min_eigenvalue, Mat2};
use crate::sampling::halton_points;

pub use phase::{construct_harmonic_phase, HarmonicPhase, PhaseDiagnostics};

pub type ScalarFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(Point) -> Point + Send + Sync>;
pub type MatrixFn = Arc<dyn Fn(Point) -> Mat2 + Send + Sync>;
pub type ComplexFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// Relative finite-difference step used when checking analytic derivatives.
pub const DERIVATIVE_CHECK_STEP: f64 = 1e-5;

/// Exclusion ball: admissible points keep distance at least `min_distance`
/// from `center`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Guard {
    pub center: Point,
    pub min_distance: f64,
}

impl Guard {
    pub fn origin(min_distance: f64) -> Guard {
        Guard { center: [0.0, 0.0], min_distance }
    }

    /// Default guard for a field singular at the origin: half the distance
    /// from the domain's convex hull to the origin.
    pub fn for_domain(domain: &Domain) -> Result<Guard> {
        let d = domain.hull_distance_to_origin();
        if !(d > 0.0) {
            return Err(Error::InvalidInput(
                "field is singular at the origin but the domain's convex hull contains it".into(),
            ));
        }
        Ok(Guard::origin(0.5 * d))
    }

    pub fn allows(&self, p: Point) -> bool {
        let (dx, dy) = (p[0] - self.center[0], p[1] - self.center[1]);
        (dx * dx + dy * dy).sqrt() >= self.min_distance
    }

    pub fn check(&self, p: Point) -> Result<()> {
        if self.allows(p) {
            Ok(())
        } else {
            Err(Error::GuardViolation {
                point: p,
                reason: format!("closer than {:e} to {:?}", self.min_distance, self.center),
            })
        }
    }

    fn transformed(&self, q: &Mat2, t: Point) -> Guard {
        let c = mat2_mul_vec(q, self.center);
        Guard { center: [c[0] + t[0], c[1] + t[1]], min_distance: self.min_distance }
    }
}

/// A real field with optional analytic derivatives and bounds valid on the
/// domain it was built for.
#[derive(Clone)]
pub struct ScalarField {
    name: String,
    value: ScalarFn,
    gradient: Option<VectorFn>,
    hessian: Option<MatrixFn>,
    lower: f64,
    upper: f64,
    guard: Option<Guard>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("name", &self.name)
            .field("gradient", &self.gradient.is_some())
            .field("hessian", &self.hessian.is_some())
            .field("bounds", &(self.lower, self.upper))
            .field("guard", &self.guard)
            .finish()
    }
}

impl ScalarField {
    pub fn new(name: impl Into<String>, value: impl Fn(Point) -> f64 + Send + Sync + 'static) -> ScalarField {
        ScalarField {
            name: name.into(),
            value: Arc::new(value),
            gradient: None,
            hessian: None,
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
            guard: None,
        }
    }

    pub fn with_gradient(mut self, g: impl Fn(Point) -> Point + Send + Sync + 'static) -> ScalarField {
        self.gradient = Some(Arc::new(g));
        self
    }

    pub fn with_hessian(mut self, h: impl Fn(Point) -> Mat2 + Send + Sync + 'static) -> ScalarField {
        self.hessian = Some(Arc::new(h));
        self
    }

    pub fn with_bounds(mut self, lower: f64, upper: f64) -> ScalarField {
        self.lower = lower;
        self.upper = upper;
        self
    }

    pub fn with_guard(mut self, guard: Guard) -> ScalarField {
        self.guard = Some(guard);
        self
    }

    pub fn constant(c: f64) -> ScalarField {
        ScalarField::new(format!("const({c})"), move |_| c)
            .with_gradient(|_| [0.0, 0.0])
            .with_hessian(|_| [[0.0; 2]; 2])
            .with_bounds(c, c)
    }

    pub fn zero() -> ScalarField {
        ScalarField::constant(0.0)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lower_bound(&self) -> f64 {
        self.lower
    }

    pub fn upper_bound(&self) -> f64 {
        self.upper
    }

    pub fn guard(&self) -> Option<Guard> {
        self.guard
    }

    pub fn allows(&self, p: Point) -> bool {
        self.guard.map_or(true, |g| g.allows(p))
    }

    pub fn has_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    pub fn has_hessian(&self) -> bool {
        self.hessian.is_some()
    }

    /// Unchecked evaluation.
    pub fn value(&self, p: Point) -> f64 {
        (self.value)(p)
    }

    /// Evaluation that enforces the guard and rejects non-finite values.
    pub fn eval(&self, p: Point) -> Result<f64> {
        if let Some(g) = &self.guard {
            g.check(p)?;
        }
        let v = self.value(p);
        if !v.is_finite() {
            return Err(Error::Coefficient { point: p, reason: format!("{} is not finite", self.name) });
        }
        Ok(v)
    }

    pub fn analytic_gradient(&self, p: Point) -> Option<Point> {
        self.gradient.as_ref().map(|g| g(p))
    }

    pub fn analytic_hessian(&self, p: Point) -> Option<Mat2> {
        self.hessian.as_ref().map(|h| h(p))
    }

    /// Analytic gradient if available, else central differences with step `s`.
    pub fn gradient(&self, p: Point, s: f64, dim: usize) -> Point {
        match &self.gradient {
            Some(g) => g(p),
            None => fd::gradient(&|q| self.value(q), p, s, dim, &|q| self.allows(q)),
        }
    }

    pub fn hessian(&self, p: Point, s: f64, dim: usize) -> Mat2 {
        match &self.hessian {
            Some(h) => h(p),
            None => fd::hessian(&|q| self.value(q), p, s, dim, &|q| self.allows(q)),
        }
    }

    /// `c * self`.
    pub fn scaled(&self, c: f64) -> ScalarField {
        let (v, g, h) = (self.value.clone(), self.gradient.clone(), self.hessian.clone());
        let (lo, hi) = if c >= 0.0 { (c * self.lower, c * self.upper) } else { (c * self.upper, c * self.lower) };
        ScalarField {
            name: format!("{c}*{}", self.name),
            value: Arc::new(move |p| c * v(p)),
            gradient: g.map(|g| -> VectorFn {
                Arc::new(move |p| {
                    let d = g(p);
                    [c * d[0], c * d[1]]
                })
            }),
            hessian: h.map(|h| -> MatrixFn {
                Arc::new(move |p| {
                    let m = h(p);
                    [[c * m[0][0], c * m[0][1]], [c * m[1][0], c * m[1][1]]]
                })
            }),
            lower: lo,
            upper: hi,
            guard: self.guard,
        }
    }

    /// The field carried along the isometry `x -> q x + t`:
    /// `y -> f(q^T (y - t))`.
    pub fn transformed(&self, q: Mat2, t: Point) -> ScalarField {
        let qt = [[q[0][0], q[1][0]], [q[0][1], q[1][1]]];
        let back = move |y: Point| mat2_mul_vec(&qt, [y[0] - t[0], y[1] - t[1]]);
        let v = self.value.clone();
        let g = self.gradient.clone();
        let h = self.hessian.clone();
        ScalarField {
            name: format!("{}∘T", self.name),
            value: Arc::new(move |y| v(back(y))),
            gradient: g.map(|g| -> VectorFn { Arc::new(move |y| mat2_mul_vec(&q, g(back(y)))) }),
            hessian: h.map(|h| -> MatrixFn { Arc::new(move |y| conjugate(&q, &h(back(y)))) }),
            lower: self.lower,
            upper: self.upper,
            guard: self.guard.map(|gd| gd.transformed(&q, t)),
        }
    }

    /// Largest relative disagreement between analytic first and second
    /// derivatives and central differences with step `rel_step * diam`.
    /// Missing derivatives contribute nothing.
    pub fn derivative_mismatch(&self, points: &[Point], diam: f64, dim: usize, rel_step: f64) -> f64 {
        let s = rel_step * diam;
        let f = |q: Point| self.value(q);
        let ok = |q: Point| self.allows(q);
        let mut worst: f64 = 0.0;
        for &p in points {
            let scale = self.value(p).abs().max(1e-300);
            if let Some(g) = self.analytic_gradient(p) {
                let n = fd::gradient(&f, p, s, dim, &ok);
                let den = (g[0].hypot(g[1])).max(scale / diam);
                worst = worst.max((g[0] - n[0]).hypot(g[1] - n[1]) / den);
            }
            if let Some(h) = self.analytic_hessian(p) {
                let n = fd::hessian(&f, p, s.max(1e-4 * diam), dim, &ok);
                let mut diff: f64 = 0.0;
                let mut mag: f64 = 0.0;
                for i in 0..dim {
                    for j in 0..dim {
                        diff = diff.max((h[i][j] - n[i][j]).abs());
                        mag = mag.max(h[i][j].abs());
                    }
                }
                worst = worst.max(diff / mag.max(scale / (diam * diam)));
            }
        }
        worst
    }
}

fn conjugate(q: &Mat2, m: &Mat2) -> Mat2 {
    // q m q^T
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = (0..2).map(|k| (0..2).map(|l| q[i][k] * m[k][l] * q[j][l]).sum::<f64>()).sum();
        }
    }
    out
}

/// A symmetric positive definite matrix field.
#[derive(Clone)]
pub struct MatrixField {
    name: String,
    value: MatrixFn,
    ellipticity: f64,
    constant_pairs: Vec<(f64, Point)>,
}

impl fmt::Debug for MatrixField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixField")
            .field("name", &self.name)
            .field("ellipticity", &self.ellipticity)
            .field("constant_pairs", &self.constant_pairs)
            .finish()
    }
}

impl MatrixField {
    pub fn new(name: impl Into<String>, ellipticity: f64, value: impl Fn(Point) -> Mat2 + Send + Sync + 'static) -> MatrixField {
        MatrixField { name: name.into(), value: Arc::new(value), ellipticity, constant_pairs: Vec::new() }
    }

    pub fn identity() -> MatrixField {
        let mut m = MatrixField::new("identity", 1.0, |_| [[1.0, 0.0], [0.0, 1.0]]);
        m.constant_pairs = vec![(1.0, [1.0, 0.0]), (1.0, [0.0, 1.0])];
        m
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ellipticity(&self) -> f64 {
        self.ellipticity
    }

    /// Constant eigenpairs known by construction.
    pub fn recorded_pairs(&self) -> &[(f64, Point)] {
        &self.constant_pairs
    }

    pub fn value(&self, p: Point) -> Mat2 {
        (self.value)(p)
    }

    /// Evaluation that checks symmetry and the ellipticity bound.
    pub fn eval(&self, p: Point) -> Result<Mat2> {
        let a = self.value(p);
        let scale = a[0][0].abs().max(a[1][1].abs()).max(1e-300);
        if (a[0][1] - a[1][0]).abs() > 1e-12 * scale {
            return Err(Error::Coefficient { point: p, reason: format!("{} is not symmetric", self.name) });
        }
        let lmin = sym2_min_eigenvalue(&a);
        if !(lmin >= self.ellipticity * (1.0 - 1e-12)) || !lmin.is_finite() {
            return Err(Error::Coefficient {
                point: p,
                reason: format!("{} has eigenvalue {lmin:e} below ellipticity {:e}", self.name, self.ellipticity),
            });
        }
        Ok(a)
    }

    pub fn transformed(&self, q: Mat2, t: Point) -> MatrixField {
        let qt = [[q[0][0], q[1][0]], [q[0][1], q[1][1]]];
        let v = self.value.clone();
        MatrixField {
            name: format!("{}∘T", self.name),
            value: Arc::new(move |y| conjugate(&q, &v(mat2_mul_vec(&qt, [y[0] - t[0], y[1] - t[1]])))),
            ellipticity: self.ellipticity,
            constant_pairs: self.constant_pairs.iter().map(|&(l, xi)| (l, mat2_mul_vec(&q, xi))).collect(),
        }
    }
}

/// The coefficients of `L = (1/rho)(-div A grad + V)`.
#[derive(Clone, Debug)]
pub struct CoefficientSet {
    pub rho: ScalarField,
    pub potential: ScalarField,
    pub matrix: MatrixField,
}

impl CoefficientSet {
    /// `rho` with `V = 0` and `A = I`.
    pub fn new(rho: ScalarField) -> CoefficientSet {
        CoefficientSet { rho, potential: ScalarField::zero(), matrix: MatrixField::identity() }
    }

    pub fn laplacian() -> CoefficientSet {
        CoefficientSet::new(ScalarField::constant(1.0))
    }

    pub fn with_potential(mut self, v: ScalarField) -> CoefficientSet {
        self.potential = v;
        self
    }

    pub fn with_matrix(mut self, a: MatrixField) -> CoefficientSet {
        self.matrix = a;
        self
    }

    pub fn guards(&self) -> Vec<Guard> {
        [self.rho.guard(), self.potential.guard()].into_iter().flatten().collect()
    }

    pub fn allows(&self, p: Point) -> bool {
        self.guards().iter().all(|g| g.allows(p))
    }

    pub fn check_point(&self, p: Point) -> Result<()> {
        self.guards().iter().try_for_each(|g| g.check(p))
    }

    /// Identifier recorded in assembled operators.
    pub fn id(&self) -> String {
        format!("rho={};V={};A={}", self.rho.name(), self.potential.name(), self.matrix.name())
    }

    pub fn scaled_density(&self, c: f64) -> CoefficientSet {
        CoefficientSet { rho: self.rho.scaled(c), ..self.clone() }
    }

    pub fn transformed(&self, q: Mat2, t: Point) -> CoefficientSet {
        CoefficientSet {
            rho: self.rho.transformed(q, t),
            potential: self.potential.transformed(q, t),
            matrix: self.matrix.transformed(q, t),
        }
    }
}

fn radius(p: Point) -> f64 {
    p[0].hypot(p[1])
}

fn power_bounds(alpha: f64, rmin: f64, rmax: f64) -> (f64, f64) {
    let (a, b) = (rmin.powf(alpha), rmax.powf(alpha));
    (a.min(b), a.max(b))
}

/// `rho(x) = |x|^alpha` on a domain bounded away from the origin.
pub fn power_density(alpha: f64, domain: &Domain) -> Result<ScalarField> {
    let guard = Guard::for_domain(domain)?;
    let (lo, hi) = power_bounds(alpha, domain.hull_distance_to_origin(), domain.circumradius_about_origin());
    Ok(ScalarField::new(format!("power(alpha={alpha})"), move |p| radius(p).powf(alpha))
        .with_gradient(move |p| {
            let r = radius(p);
            let c = alpha * r.powf(alpha - 2.0);
            [c * p[0], c * p[1]]
        })
        .with_hessian(move |p| power_hessian(alpha, p))
        .with_bounds(lo, hi)
        .with_guard(guard))
}

fn power_hessian(alpha: f64, p: Point) -> Mat2 {
    let r = radius(p);
    if r == 0.0 {
        let d = if alpha == 2.0 { 2.0 } else if alpha > 2.0 { 0.0 } else { f64::NAN };
        return [[d, 0.0], [0.0, d]];
    }
    let c = alpha * r.powf(alpha - 2.0);
    let t = (alpha - 2.0) / (r * r);
    [
        [c * (1.0 + t * p[0] * p[0]), c * t * p[0] * p[1]],
        [c * t * p[0] * p[1], c * (1.0 + t * p[1] * p[1])],
    ]
}

/// `rho(x) = c + |x|^alpha`. A guard is installed only when the power is
/// singular at the origin (`alpha < 0`).
pub fn shifted_power_density(c: f64, alpha: f64, domain: &Domain) -> Result<ScalarField> {
    if !(c > 0.0) {
        return Err(Error::InvalidInput(format!("shift c = {c} must be positive")));
    }
    let (plo, phi) = power_bounds(alpha, domain.hull_distance_to_origin(), domain.circumradius_about_origin());
    let field = ScalarField::new(format!("shifted_power(c={c},alpha={alpha})"), move |p| c + radius(p).powf(alpha))
        .with_gradient(move |p| {
            let r = radius(p);
            if r == 0.0 {
                return [0.0, 0.0];
            }
            let k = alpha * r.powf(alpha - 2.0);
            [k * p[0], k * p[1]]
        })
        .with_hessian(move |p| power_hessian(alpha, p))
        .with_bounds(c + plo, c + phi);
    if alpha < 0.0 {
        Ok(field.with_guard(Guard::for_domain(domain)?))
    } else {
        Ok(field)
    }
}

/// A real function of one variable with optional derivatives and a rule
/// for bounding it on an interval.
#[derive(Clone)]
pub struct Profile {
    name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    df: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
    d2f: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
    bounds: Arc<dyn Fn(f64, f64) -> (f64, f64) + Send + Sync>,
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Profile({})", self.name)
    }
}

impl Profile {
    /// A profile without derivatives; bounds are estimated by sampling.
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Profile {
        let f: Arc<dyn Fn(f64) -> f64 + Send + Sync> = Arc::new(f);
        let g = f.clone();
        Profile {
            name: name.into(),
            f,
            df: None,
            d2f: None,
            bounds: Arc::new(move |a, b| {
                (0..=1000).map(|i| g(a + (b - a) * i as f64 / 1000.0)).fold(
                    (f64::INFINITY, f64::NEG_INFINITY),
                    |(lo, hi), v| (lo.min(v), hi.max(v)),
                )
            }),
        }
    }

    /// `t -> exp(s t)`.
    pub fn exp(s: f64) -> Profile {
        Profile {
            name: format!("exp({s}t)"),
            f: Arc::new(move |t| (s * t).exp()),
            df: Some(Arc::new(move |t| s * (s * t).exp())),
            d2f: Some(Arc::new(move |t| s * s * (s * t).exp())),
            bounds: Arc::new(move |a, b| {
                let (u, v) = ((s * a).exp(), (s * b).exp());
                (u.min(v), u.max(v))
            }),
        }
    }

    /// `t -> c0 + c1 t + c2 t^2`.
    pub fn quadratic(c0: f64, c1: f64, c2: f64) -> Profile {
        let f = move |t: f64| c0 + c1 * t + c2 * t * t;
        Profile {
            name: format!("{c0}+{c1}t+{c2}t^2"),
            f: Arc::new(f),
            df: Some(Arc::new(move |t| c1 + 2.0 * c2 * t)),
            d2f: Some(Arc::new(move |_| 2.0 * c2)),
            bounds: Arc::new(move |a, b| {
                let mut vals = vec![f(a), f(b)];
                if c2 != 0.0 {
                    let t = -c1 / (2.0 * c2);
                    if t > a && t < b {
                        vals.push(f(t));
                    }
                }
                vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
            }),
        }
    }

    pub fn constant(c: f64) -> Profile {
        Profile::quadratic(c, 0.0, 0.0)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn bounds_on(&self, a: f64, b: f64) -> (f64, f64) {
        (self.bounds)(a, b)
    }
}

/// `x -> profile(xi . x)` for a unit vector `xi`.
pub fn directional_field(profile: &Profile, xi: Point, domain: &Domain) -> Result<ScalarField> {
    if (radius(xi) - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!("direction {xi:?} is not a unit vector")));
    }
    let (tmin, tmax) = match domain {
        Domain::Disk { center, radius: r, .. } => {
            let c = xi[0] * center[0] + xi[1] * center[1];
            (c - r, c + r)
        }
        _ => domain.outline().iter().map(|p| xi[0] * p[0] + xi[1] * p[1]).fold(
            (f64::INFINITY, f64::NEG_INFINITY),
            |(lo, hi), t| (lo.min(t), hi.max(t)),
        ),
    };
    let (lo, hi) = profile.bounds_on(tmin, tmax);
    let f = profile.f.clone();
    let mut field = ScalarField::new(format!("directional({}, xi={xi:?})", profile.name), move |p| {
        f(xi[0] * p[0] + xi[1] * p[1])
    })
    .with_bounds(lo, hi);
    if let Some(df) = profile.df.clone() {
        field = field.with_gradient(move |p| {
            let d = df(xi[0] * p[0] + xi[1] * p[1]);
            [d * xi[0], d * xi[1]]
        });
    }
    if let Some(d2f) = profile.d2f.clone() {
        field = field.with_hessian(move |p| {
            let d = d2f(xi[0] * p[0] + xi[1] * p[1]);
            [[d * xi[0] * xi[0], d * xi[0] * xi[1]], [d * xi[0] * xi[1], d * xi[1] * xi[1]]]
        });
    }
    Ok(field)
}

/// `rho(x) = exp(x1 / |x|^2)`, the modulus squared of `exp(1/(2z))`.
pub fn exp_inverse_density(domain: &Domain) -> Result<ScalarField> {
    let guard = Guard::for_domain(domain)?;
    let d = domain.hull_distance_to_origin();
    let (lo, hi) = ((-1.0 / d).exp(), (1.0 / d).exp());
    Ok(ScalarField::new("exp_inverse", |p| (p[0] / (p[0] * p[0] + p[1] * p[1])).exp())
        .with_gradient(|p| {
            let rho = (p[0] / (p[0] * p[0] + p[1] * p[1])).exp();
            let g = exp_inverse_log_gradient(p);
            [rho * g[0], rho * g[1]]
        })
        .with_hessian(|p| {
            let (x, y) = (p[0], p[1]);
            let r2 = x * x + y * y;
            let rho = (x / r2).exp();
            let g = exp_inverse_log_gradient(p);
            let r6 = r2 * r2 * r2;
            let g11 = 2.0 * (x * x * x - 3.0 * x * y * y) / r6;
            let g12 = 2.0 * (3.0 * x * x * y - y * y * y) / r6;
            [
                [rho * (g[0] * g[0] + g11), rho * (g[0] * g[1] + g12)],
                [rho * (g[0] * g[1] + g12), rho * (g[1] * g[1] - g11)],
            ]
        })
        .with_bounds(lo, hi)
        .with_guard(guard))
}

fn exp_inverse_log_gradient(p: Point) -> Point {
    let (x, y) = (p[0], p[1]);
    let r2 = x * x + y * y;
    [(y * y - x * x) / (r2 * r2), -2.0 * x * y / (r2 * r2)]
}

/// A holomorphic function `f` with optional first and second derivatives.
#[derive(Clone)]
pub struct Holomorphic {
    name: String,
    f: ComplexFn,
    df: Option<ComplexFn>,
    d2f: Option<ComplexFn>,
    singular_at_origin: bool,
}

impl fmt::Debug for Holomorphic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Holomorphic({})", self.name)
    }
}

impl Holomorphic {
    pub fn new(name: impl Into<String>, f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> Holomorphic {
        Holomorphic { name: name.into(), f: Arc::new(f), df: None, d2f: None, singular_at_origin: false }
    }

    pub fn with_derivatives(
        mut self,
        df: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        d2f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Holomorphic {
        self.df = Some(Arc::new(df));
        self.d2f = Some(Arc::new(d2f));
        self
    }

    pub fn singular_at_origin(mut self) -> Holomorphic {
        self.singular_at_origin = true;
        self
    }

    /// `f(z) = 1`.
    pub fn one() -> Holomorphic {
        Holomorphic::new("1", |_| Complex64::new(1.0, 0.0))
            .with_derivatives(|_| Complex64::new(0.0, 0.0), |_| Complex64::new(0.0, 0.0))
    }

    /// `f(z) = z`.
    pub fn identity() -> Holomorphic {
        Holomorphic::new("z", |z| z).with_derivatives(|_| Complex64::new(1.0, 0.0), |_| Complex64::new(0.0, 0.0))
    }

    /// `f(z) = exp(1/(2z))`.
    pub fn exp_half_inverse() -> Holomorphic {
        Holomorphic::new("exp(1/(2z))", |z| (0.5 / z).exp())
            .with_derivatives(
                |z| -(0.5 / z).exp() / (2.0 * z * z),
                |z| (0.5 / z).exp() * (1.0 / (4.0 * z * z * z * z) + 1.0 / (z * z * z)),
            )
            .singular_at_origin()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.f)(z)
    }
}

fn cplx(p: Point) -> Complex64 {
    Complex64::new(p[0], p[1])
}

/// `rho(x) = |f(x1 + i x2)|^2` for a holomorphic `f` without zeros on the
/// domain. Zeros are detected by the winding number along the outline and
/// by the smallest modulus over Halton samples and outline vertices;
/// the bounds are the sampled extremes widened by a factor of two.
pub fn holomorphic_modulus_density(phi_prime: &Holomorphic, domain: &Domain) -> Result<ScalarField> {
    if domain.dim() != 2 {
        return Err(Error::InvalidInput("holomorphic densities need a 2D domain".into()));
    }
    let guard = if phi_prime.singular_at_origin { Some(Guard::for_domain(domain)?) } else { None };
    let mut pts = halton_points(domain, 500, |p| guard.map_or(true, |g| g.allows(p)));
    pts.extend(domain.outline());
    let mods: Vec<f64> = pts.iter().map(|&p| phi_prime.eval(cplx(p)).norm()).collect();
    let max = mods.iter().cloned().fold(0.0, f64::max);
    let (imin, min) = mods.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, &m)| if m < acc.1 { (i, m) } else { acc });
    let winding = winding_number(phi_prime, &domain.outline());
    if !(min > 1e-10 * max) || winding != 0 {
        return Err(Error::Coefficient {
            point: pts[imin],
            reason: format!("{} vanishes inside the domain (winding number {winding})", phi_prime.name),
        });
    }
    let f = phi_prime.f.clone();
    let mut field = ScalarField::new(format!("|{}|^2", phi_prime.name), move |p| f(cplx(p)).norm_sqr())
        .with_bounds(0.5 * min * min, 2.0 * max * max);
    if let (Some(df), Some(d2f)) = (phi_prime.df.clone(), phi_prime.d2f.clone()) {
        let f1 = phi_prime.f.clone();
        let f2 = phi_prime.f.clone();
        let df2 = df.clone();
        field = field
            .with_gradient(move |p| {
                let z = cplx(p);
                let w = df(z) * f1(z).conj();
                [2.0 * w.re, -2.0 * w.im]
            })
            .with_hessian(move |p| {
                let z = cplx(p);
                let (f0, f1v, f2v) = (f2(z), df2(z), d2f(z));
                let a = 2.0 * f1v.norm_sqr();
                let w = f2v * f0.conj();
                [[a + 2.0 * w.re, -2.0 * w.im], [-2.0 * w.im, a - 2.0 * w.re]]
            });
    }
    Ok(match guard {
        Some(g) => field.with_guard(g),
        None => field,
    })
}

/// Winding number of `f` along the closed polygon `outline`; counts the
/// zeros of `f` inside when `f` has no poles there.
fn winding_number(f: &Holomorphic, outline: &[Point]) -> i64 {
    let n = outline.len();
    let per_edge = 4000 / n.max(1) + 16;
    let mut total = 0.0;
    let mut prev = f.eval(cplx(outline[0])).arg();
    for i in 0..n {
        let (a, b) = (outline[i], outline[(i + 1) % n]);
        for j in 1..=per_edge {
            let t = j as f64 / per_edge as f64;
            let arg = f.eval(cplx([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])])).arg();
            let mut d = arg - prev;
            while d > std::f64::consts::PI {
                d -= 2.0 * std::f64::consts::PI;
            }
            while d < -std::f64::consts::PI {
                d += 2.0 * std::f64::consts::PI;
            }
            total += d;
            prev = arg;
        }
    }
    (total / (2.0 * std::f64::consts::PI)).round() as i64
}

/// `V(x) = a |x|^2`.
pub fn quadratic_potential(a: f64, domain: &Domain) -> ScalarField {
    let r0 = domain.hull_distance_to_origin();
    let r1 = domain.circumradius_about_origin();
    let (u, v) = (a * r0 * r0, a * r1 * r1);
    ScalarField::new(format!("quadratic(a={a})"), move |p| a * (p[0] * p[0] + p[1] * p[1]))
        .with_gradient(move |p| [2.0 * a * p[0], 2.0 * a * p[1]])
        .with_hessian(move |_| [[2.0 * a, 0.0], [0.0, 2.0 * a]])
        .with_bounds(u.min(v), u.max(v))
}

/// The constant SPD matrix `[[a, b], [b, d]]` with both eigenpairs recorded.
pub fn constant_matrix_field(a: f64, b: f64, d: f64) -> Result<MatrixField> {
    let m = [[a, b], [b, d]];
    let (vals, vecs) = sym2_eigen(&m);
    if !(vals[0] > 0.0) {
        return Err(Error::InvalidInput(format!("matrix [[{a}, {b}], [{b}, {d}]] is not positive definite")));
    }
    let mut f = MatrixField::new(format!("const[[{a},{b}],[{b},{d}]]"), vals[0], move |_| m);
    f.constant_pairs = vec![(vals[1], vecs[1]), (vals[0], vecs[0])];
    Ok(f)
}

/// `A(x) = diag(lead, trailing(x))`: a constant leading block with the
/// eigenpair `(lead, e1)` and a varying trailing entry.
pub fn block_matrix_field(lead: f64, trailing: &ScalarField) -> Result<MatrixField> {
    if !(lead > 0.0) {
        return Err(Error::InvalidInput(format!("constant block {lead} is not positive")));
    }
    if !(trailing.lower_bound() > 0.0) {
        return Err(Error::InvalidInput(format!(
            "varying block {} is not uniformly positive (lower bound {})",
            trailing.name(),
            trailing.lower_bound()
        )));
    }
    let t = trailing.clone();
    let mut f = MatrixField::new(format!("block({lead}, {})", trailing.name()), lead.min(trailing.lower_bound()), move |p| {
        [[lead, 0.0], [0.0, t.value(p)]]
    });
    f.constant_pairs = vec![(lead, [1.0, 0.0])];
    Ok(f)
}

/// `x -> 1 + amp sin^2(x2)`.
pub fn sin_squared_field(amp: f64) -> ScalarField {
    let (lo, hi) = if amp >= 0.0 { (1.0, 1.0 + amp) } else { (1.0 + amp, 1.0) };
    ScalarField::new(format!("1+{amp}sin^2(x2)"), move |p| 1.0 + amp * p[1].sin().powi(2))
        .with_gradient(move |p| [0.0, amp * (2.0 * p[1]).sin()])
        .with_hessian(move |p| [[0.0, 0.0], [0.0, 2.0 * amp * (2.0 * p[1]).cos()]])
        .with_bounds(lo, hi)
}

/// `R(x1) diag(l1, l2) R(x1)^T` with `R(t)` the rotation by angle `t`.
pub fn rotated_diagonal_field(l1: f64, l2: f64) -> Result<MatrixField> {
    if !(l1 > 0.0 && l2 > 0.0) {
        return Err(Error::InvalidInput("diagonal entries must be positive".into()));
    }
    Ok(MatrixField::new(format!("rot(x1)diag({l1},{l2})"), l1.min(l2), move |p| {
        let (s, c) = p[0].sin_cos();
        [
            [l1 * c * c + l2 * s * s, (l1 - l2) * c * s],
            [(l1 - l2) * c * s, l1 * s * s + l2 * c * c],
        ]
    }))
}

#[cfg(test)]
mod tests;
