//! Experiment configuration files.
//!
//! One `key = value` per line, `#` starts a comment. Structured values name a
//! family with parameters, `rho = power{alpha=2}`; parameters are separated
//! by commas and points are written as space-separated coordinates
//! (`xi=1 0`), point lists with semicolons (`vertices=0 0; 1 0; 0 1`).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fields::{
    block_matrix_field, constant_matrix_field, construct_harmonic_phase, directional_field, exp_inverse_density,
    holomorphic_modulus_density, power_density, quadratic_potential, rotated_diagonal_field, shifted_power_density,
    sin_squared_field, CoefficientSet, HarmonicPhase, Holomorphic, MatrixField, Profile, ScalarField,
};
use crate::geometry::{Mesh, Point};
use crate::verify::{DomainSpec, Theorem};

/// A family name with its parameters, as written on line `line`.
#[derive(Clone, Debug, PartialEq)]
pub struct Family {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub line: usize,
}

impl Family {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Config { line: self.line, message: message.into() }
    }

    fn parse(text: &str, line: usize) -> Result<Family> {
        let err = |m: String| Error::Config { line, message: m };
        let text = text.trim();
        let (name, body) = match text.find('{') {
            Some(i) => {
                let body = text[i + 1..].strip_suffix('}').ok_or_else(|| err(format!("missing closing brace in `{text}`")))?;
                (text[..i].trim(), Some(body))
            }
            None => (text, None),
        };
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(err(format!("bad family name `{name}`")));
        }
        let mut params = BTreeMap::new();
        for item in body.into_iter().flat_map(|b| b.split(',')).map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| err(format!("parameter `{item}` is not key=value")))?;
            if params.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(err(format!("parameter `{}` given twice", k.trim())));
            }
        }
        Ok(Family { name: name.to_string(), params, line })
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(self.err(format!("{}: unknown parameter `{k}` (expected one of {allowed:?})", self.name))),
            None => Ok(()),
        }
    }

    fn f64_or(&self, key: &str, default: Option<f64>) -> Result<f64> {
        match self.params.get(key) {
            Some(v) => parse_f64(v).ok_or_else(|| self.err(format!("{}: `{key}` = `{v}` is not a number", self.name))),
            None => default.ok_or_else(|| self.err(format!("{}: missing parameter `{key}`", self.name))),
        }
    }

    fn num(&self, key: &str) -> Result<f64> {
        self.f64_or(key, None)
    }

    fn point_or(&self, key: &str, default: Option<Point>) -> Result<Point> {
        match self.params.get(key) {
            Some(v) => parse_point(v).ok_or_else(|| self.err(format!("{}: `{key}` = `{v}` is not a point `x y`", self.name))),
            None => default.ok_or_else(|| self.err(format!("{}: missing parameter `{key}`", self.name))),
        }
    }

    fn text_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.params.get(key).map_or(default, String::as_str)
    }
}

fn parse_f64(s: &str) -> Option<f64> {
    match s.trim() {
        "pi" => Some(std::f64::consts::PI),
        t => t.parse().ok().filter(|v: &f64| v.is_finite()),
    }
}

fn parse_point(s: &str) -> Option<Point> {
    let v: Vec<f64> = s.split_whitespace().map(parse_f64).collect::<Option<_>>()?;
    match v.as_slice() {
        [x] => Some([*x, 0.0]),
        [x, y] => Some([*x, *y]),
        _ => None,
    }
}

/// What an experiment verifies.
#[derive(Clone, Debug)]
pub enum Claim {
    /// `mu_{k+r} <= lambda_k` on a mesh ladder.
    Inequality(Theorem),
    NehariBandle,
    /// `mu_2` against `lambda_1` on an interval with the difference oracle.
    Polya1d { reversed: bool },
    /// The boundary integration-by-parts identity.
    Ibp { phi: ScalarField, b: Point },
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub name: String,
    pub source: String,
    pub domain: Family,
    pub rho: Family,
    pub potential: Option<Family>,
    pub matrix: Option<Family>,
    pub phase: Option<Family>,
    pub theorem: Family,
    /// 1-based Dirichlet indices.
    pub k: Vec<usize>,
    /// Offsets `r`; several give one inequality per `(k, r)`.
    pub r: Option<Vec<usize>>,
    pub count: Option<usize>,
    pub h: f64,
    pub levels: usize,
    pub quadrature: usize,
    pub grid_n: usize,
    pub certify: Option<bool>,
    pub rotations: Option<Vec<f64>>,
    pub output: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

const KEYS: &[&str] = &[
    "name", "domain", "rho", "V", "A", "phase", "theorem", "k", "r", "count", "h", "levels", "quadrature", "grid_n",
    "certify", "rotations", "output", "csv",
];

/// Parses the text of a configuration file.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut entries: BTreeMap<&str, (usize, String)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::Config { line, message: format!("expected `key = value`, got `{content}`") })?;
        let key = key.trim();
        let Some(&known) = KEYS.iter().find(|k| **k == key) else {
            return Err(Error::Config { line, message: format!("unknown key `{key}`") });
        };
        if value.trim().is_empty() {
            return Err(Error::Config { line, message: format!("`{key}` has no value") });
        }
        if entries.insert(known, (line, value.trim().to_string())).is_some() {
            return Err(Error::Config { line, message: format!("`{key}` given twice") });
        }
    }
    let last = text.lines().count();
    let family = |key: &str| -> Result<Option<Family>> {
        entries.get(key).map(|(l, v)| Family::parse(v, *l)).transpose()
    };
    let required = |key: &str| -> Result<Family> {
        family(key)?.ok_or_else(|| Error::Config { line: last, message: format!("missing required key `{key}`") })
    };
    fn scalar<T: std::str::FromStr>(entries: &BTreeMap<&str, (usize, String)>, key: &str) -> Result<Option<T>> {
        entries
            .get(key)
            .map(|(l, v)| v.parse().map_err(|_| Error::Config { line: *l, message: format!("`{key}` = `{v}` is not valid") }))
            .transpose()
    }
    let list = |key: &str| -> Result<Option<Vec<f64>>> {
        entries
            .get(key)
            .map(|(l, v)| {
                v.split(',')
                    .map(|s| parse_f64(s).ok_or_else(|| Error::Config { line: *l, message: format!("`{key}`: `{s}` is not a number") }))
                    .collect()
            })
            .transpose()
    };
    let indices = |key: &str, min: f64| -> Result<Option<Vec<usize>>> {
        let Some(vals) = list(key)? else { return Ok(None) };
        let line = entries[key].0;
        vals.iter()
            .map(|&v| {
                if v >= min && v.fract() == 0.0 {
                    Ok(v as usize)
                } else {
                    Err(Error::Config { line, message: format!("`{key}`: {v} is not an integer >= {min}") })
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    };
    let k = indices("k", 1.0)?.unwrap_or_else(|| vec![1]);
    let r = indices("r", 0.0)?;
    let h: f64 = scalar(&entries, "h")?.unwrap_or(0.125);
    if !(h > 0.0) {
        return Err(Error::Config { line: entries["h"].0, message: "`h` must be positive".into() });
    }
    let levels: usize = scalar(&entries, "levels")?.unwrap_or(3);
    if levels == 0 {
        return Err(Error::Config { line: entries["levels"].0, message: "`levels` must be at least 1".into() });
    }
    Ok(ExperimentConfig {
        name: entries.get("name").map_or_else(|| "experiment".to_string(), |(_, v)| v.clone()),
        source: text.to_string(),
        domain: required("domain")?,
        rho: family("rho")?.unwrap_or(Family { name: "const".into(), params: BTreeMap::new(), line: 0 }),
        potential: family("V")?,
        matrix: family("A")?,
        phase: family("phase")?,
        // without a theorem only `mu_k <= lambda_k` is checked
        theorem: family("theorem")?.unwrap_or(Family { name: "trivial".into(), params: BTreeMap::new(), line: 0 }),
        k,
        r,
        count: scalar(&entries, "count")?,
        h,
        levels,
        quadrature: scalar(&entries, "quadrature")?.unwrap_or(crate::fem::DEFAULT_QUADRATURE),
        grid_n: scalar(&entries, "grid_n")?.unwrap_or(crate::eigen::MIN_ODE_GRID),
        certify: scalar(&entries, "certify")?,
        rotations: list("rotations")?,
        output: entries.get("output").map(|(_, v)| PathBuf::from(v)),
        csv: entries.get("csv").map(|(_, v)| PathBuf::from(v)),
    })
}

/// Parses a domain written as a family, `rect{x0=0, x1=2}`.
pub fn parse_domain_spec(text: &str) -> Result<DomainSpec> {
    parse_domain(&Family::parse(text, 1)?)
}

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}

impl ExperimentConfig {
    pub fn domain_spec(&self) -> Result<DomainSpec> {
        parse_domain(&self.domain)
    }

    /// The harmonic phase named by `phase`; `construct` integrates it from
    /// `rho` on `mesh`.
    pub fn harmonic_phase(&self, rho: Option<&ScalarField>, mesh: &Arc<Mesh>) -> Result<HarmonicPhase> {
        let f = self.phase.as_ref().ok_or_else(|| Error::Config { line: self.theorem.line, message: "`phase` is required".into() })?;
        match f.name.as_str() {
            "linear" => {
                f.check_keys(&["xi"])?;
                Ok(HarmonicPhase::linear(f.point_or("xi", Some([1.0, 0.0]))?))
            }
            "saddle" => {
                f.check_keys(&[])?;
                Ok(HarmonicPhase::saddle())
            }
            "construct" => {
                f.check_keys(&["base"])?;
                let rho = rho.ok_or_else(|| f.err("construct needs a density that is not itself defined by the phase"))?;
                let (lo, hi) = mesh.domain().bounding_box();
                let base = f.point_or("base", Some([0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])]))?;
                Ok(construct_harmonic_phase(rho, base, mesh)?.0)
            }
            other => Err(f.err(format!("unknown phase `{other}` (linear, saddle, construct)"))),
        }
    }

    /// The coefficient set on the given coarse mesh.
    pub fn coefficients(&self, mesh: &Arc<Mesh>) -> Result<CoefficientSet> {
        let domain = mesh.domain();
        let rho = parse_density(&self.rho, domain, || self.harmonic_phase(None, mesh))?;
        let mut set = CoefficientSet::new(rho);
        if let Some(v) = &self.potential {
            set = set.with_potential(parse_potential(v, domain)?);
        }
        if let Some(a) = &self.matrix {
            set = set.with_matrix(parse_matrix(a)?);
        }
        Ok(set)
    }

    /// The claim to verify, with `coeffs` used by phase construction.
    pub fn claim(&self, coeffs: &CoefficientSet, mesh: &Arc<Mesh>) -> Result<Claim> {
        let t = &self.theorem;
        let claim = match t.name.as_str() {
            "trivial" => Claim::Inequality(Theorem::Trivial),
            "convex_density" => Claim::Inequality(Theorem::ConvexDensity),
            "low_dim_gradient" => {
                t.check_keys(&["d1", "d2"])?;
                let mut directions = Vec::new();
                for key in ["d1", "d2"] {
                    if t.params.contains_key(key) {
                        let d = t.point_or(key, None)?;
                        let n = d[0].hypot(d[1]);
                        if !(n > 0.0) {
                            return Err(t.err(format!("`{key}` must be nonzero")));
                        }
                        directions.push([d[0] / n, d[1] / n]);
                    }
                }
                if directions.is_empty() {
                    return Err(t.err("low_dim_gradient needs at least one direction `d1`"));
                }
                Claim::Inequality(Theorem::LowDimGradient { directions })
            }
            "harmonic_gradient" => {
                let phase = self.harmonic_phase(Some(&coeffs.rho), mesh)?;
                Claim::Inequality(Theorem::HarmonicGradient { phase })
            }
            "constant_eigenpair" => Claim::Inequality(Theorem::ConstantEigenpair),
            "nehari_bandle" => Claim::NehariBandle,
            "polya_1d" => {
                t.check_keys(&["expect"])?;
                let reversed = match t.text_or("expect", "forward") {
                    "reversed" => true,
                    "forward" => false,
                    o => return Err(t.err(format!("polya_1d: expect must be forward or reversed, got `{o}`"))),
                };
                Claim::Polya1d { reversed }
            }
            "ibp" => {
                t.check_keys(&["phi", "b"])?;
                let b = t.point_or("b", Some([1.0, 0.0]))?;
                let phi = match t.text_or("phi", "sine_product") {
                    "sine_product" => sine_product(&self.domain_spec()?).map_err(|e| t.err(e.to_string()))?,
                    "bubble" => disk_bubble(&self.domain_spec()?).map_err(|e| t.err(e.to_string()))?,
                    o => return Err(t.err(format!("ibp: unknown phi `{o}` (sine_product, bubble)"))),
                };
                Claim::Ibp { phi, b }
            }
            other => return Err(t.err(format!("unknown theorem `{other}`"))),
        };
        if matches!(claim, Claim::Inequality(Theorem::Trivial)) {
            t.check_keys(&[])?;
        }
        Ok(claim)
    }

    /// Offsets `r` for the claim (configured, or the theorem's default).
    pub fn r_for(&self, theorem: &Theorem, dim: usize) -> Vec<usize> {
        self.r.clone().unwrap_or_else(|| {
            vec![match theorem {
                Theorem::Trivial => 0,
                Theorem::ConvexDensity => dim.saturating_sub(1).max(1),
                Theorem::LowDimGradient { directions } => directions.len(),
                _ => 1,
            }]
        })
    }
}

fn parse_domain(f: &Family) -> Result<DomainSpec> {
    let d = match f.name.as_str() {
        "interval" => {
            f.check_keys(&["a", "b"])?;
            DomainSpec::Interval { a: f.f64_or("a", Some(0.0))?, b: f.f64_or("b", Some(1.0))? }
        }
        "rect" => {
            f.check_keys(&["x0", "x1", "y0", "y1"])?;
            DomainSpec::Rect {
                x0: f.f64_or("x0", Some(0.0))?,
                x1: f.f64_or("x1", Some(1.0))?,
                y0: f.f64_or("y0", Some(0.0))?,
                y1: f.f64_or("y1", Some(1.0))?,
            }
        }
        "disk" => {
            f.check_keys(&["cx", "cy", "r"])?;
            DomainSpec::Disk { center: [f.f64_or("cx", Some(0.0))?, f.f64_or("cy", Some(0.0))?], radius: f.f64_or("r", Some(1.0))? }
        }
        "polygon" => {
            f.check_keys(&["vertices"])?;
            let text = f.params.get("vertices").ok_or_else(|| f.err("polygon: missing `vertices`"))?;
            let vertices = text
                .split(';')
                .map(|s| parse_point(s).ok_or_else(|| f.err(format!("polygon: bad vertex `{}`", s.trim()))))
                .collect::<Result<Vec<_>>>()?;
            DomainSpec::Polygon { vertices }
        }
        other => return Err(f.err(format!("unknown domain `{other}` (interval, rect, disk, polygon)"))),
    };
    let ok = match &d {
        DomainSpec::Interval { a, b } => a < b,
        DomainSpec::Rect { x0, x1, y0, y1 } => x0 < x1 && y0 < y1,
        DomainSpec::Disk { radius, .. } => *radius > 0.0,
        DomainSpec::Polygon { vertices } => vertices.len() >= 3,
    };
    if !ok {
        return Err(f.err(format!("degenerate domain {d:?}")));
    }
    Ok(d)
}

fn wrap<T>(f: &Family, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        e @ Error::Config { .. } => e,
        e => f.err(format!("{}: {e}", f.name)),
    })
}

fn parse_density(
    f: &Family,
    domain: &crate::geometry::Domain,
    phase: impl FnOnce() -> Result<HarmonicPhase>,
) -> Result<ScalarField> {
    let field = match f.name.as_str() {
        "const" => {
            f.check_keys(&["c"])?;
            let c = f.f64_or("c", Some(1.0))?;
            if !(c > 0.0) {
                return Err(f.err("const: density must be positive"));
            }
            ScalarField::constant(c)
        }
        "power" => {
            f.check_keys(&["alpha"])?;
            wrap(f, power_density(f.num("alpha")?, domain))?
        }
        "shifted_power" => {
            f.check_keys(&["c", "alpha"])?;
            wrap(f, shifted_power_density(f.f64_or("c", Some(1.0))?, f.num("alpha")?, domain))?
        }
        "exp_inverse" => {
            f.check_keys(&[])?;
            wrap(f, exp_inverse_density(domain))?
        }
        "directional" => {
            f.check_keys(&["profile", "s", "c0", "c1", "c2", "xi"])?;
            let profile = match f.text_or("profile", "exp") {
                "exp" => Profile::exp(f.f64_or("s", Some(1.0))?),
                "quadratic" => Profile::quadratic(f.f64_or("c0", Some(1.0))?, f.f64_or("c1", Some(0.0))?, f.f64_or("c2", Some(0.0))?),
                o => return Err(f.err(format!("directional: unknown profile `{o}` (exp, quadratic)"))),
            };
            let xi = f.point_or("xi", Some([1.0, 0.0]))?;
            let n = xi[0].hypot(xi[1]);
            if !(n > 0.0) {
                return Err(f.err("directional: `xi` must be nonzero"));
            }
            wrap(f, directional_field(&profile, [xi[0] / n, xi[1] / n], domain))?
        }
        "holomorphic" => {
            f.check_keys(&["f"])?;
            let g = match f.text_or("f", "identity") {
                "one" => Holomorphic::one(),
                "identity" => Holomorphic::identity(),
                "exp_half_inverse" => Holomorphic::exp_half_inverse(),
                o => return Err(f.err(format!("holomorphic: unknown f `{o}` (one, identity, exp_half_inverse)"))),
            };
            wrap(f, holomorphic_modulus_density(&g, domain))?
        }
        "harmonic_phase" => {
            f.check_keys(&[])?;
            wrap(f, phase())?.density()
        }
        other => return Err(f.err(format!("unknown density `{other}`"))),
    };
    Ok(field)
}

fn parse_potential(f: &Family, domain: &crate::geometry::Domain) -> Result<ScalarField> {
    match f.name.as_str() {
        "zero" => {
            f.check_keys(&[])?;
            Ok(ScalarField::zero())
        }
        "const" => {
            f.check_keys(&["c"])?;
            Ok(ScalarField::constant(f.num("c")?))
        }
        "quadratic" => {
            f.check_keys(&["a"])?;
            Ok(quadratic_potential(f.num("a")?, domain))
        }
        other => Err(f.err(format!("unknown potential `{other}` (zero, const, quadratic)"))),
    }
}

fn parse_matrix(f: &Family) -> Result<MatrixField> {
    match f.name.as_str() {
        "identity" => {
            f.check_keys(&[])?;
            Ok(MatrixField::identity())
        }
        "const" | "block_const" => {
            f.check_keys(&["a", "b", "d"])?;
            wrap(f, constant_matrix_field(f.num("a")?, f.f64_or("b", Some(0.0))?, f.num("d")?))
        }
        "diag_sin" => {
            f.check_keys(&["lead", "amp"])?;
            wrap(f, block_matrix_field(f.f64_or("lead", Some(1.0))?, &sin_squared_field(f.f64_or("amp", Some(0.5))?)))
        }
        "rotated" => {
            f.check_keys(&["l1", "l2"])?;
            wrap(f, rotated_diagonal_field(f.num("l1")?, f.num("l2")?))
        }
        other => Err(f.err(format!("unknown matrix field `{other}` (identity, const, diag_sin, rotated)"))),
    }
}

/// `sin(pi (x - x0)/w) sin(pi (y - y0)/h)` on a rectangle, with analytic
/// derivatives.
pub fn sine_product(domain: &DomainSpec) -> Result<ScalarField> {
    let DomainSpec::Rect { x0, x1, y0, y1 } = *domain else {
        return Err(Error::InvalidInput("sine_product is defined on rectangles".into()));
    };
    let (a, b) = (std::f64::consts::PI / (x1 - x0), std::f64::consts::PI / (y1 - y0));
    let sc = move |p: Point| {
        let (s1, c1) = (a * (p[0] - x0)).sin_cos();
        let (s2, c2) = (b * (p[1] - y0)).sin_cos();
        (s1, c1, s2, c2)
    };
    Ok(ScalarField::new("sine_product", move |p| {
        let (s1, _, s2, _) = sc(p);
        s1 * s2
    })
    .with_gradient(move |p| {
        let (s1, c1, s2, c2) = sc(p);
        [a * c1 * s2, b * s1 * c2]
    })
    .with_hessian(move |p| {
        let (s1, c1, s2, c2) = sc(p);
        [[-a * a * s1 * s2, a * b * c1 * c2], [a * b * c1 * c2, -b * b * s1 * s2]]
    }))
}

/// `1 - |x - c|^2 / R^2` on a disk.
pub fn disk_bubble(domain: &DomainSpec) -> Result<ScalarField> {
    let DomainSpec::Disk { center: c, radius } = *domain else {
        return Err(Error::InvalidInput("bubble is defined on disks".into()));
    };
    let s = 1.0 / (radius * radius);
    Ok(ScalarField::new("bubble", move |p| 1.0 - s * ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)))
        .with_gradient(move |p| [-2.0 * s * (p[0] - c[0]), -2.0 * s * (p[1] - c[1])])
        .with_hessian(move |_| [[-2.0 * s, 0.0], [0.0, -2.0 * s]]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_families_and_scalars() {
        let cfg = parse_config(
            "# comment\nname = demo\ndomain = rect{x0=-1, x1=1, y0=-1, y1=1}\nrho = shifted_power{c=1, alpha=2}\n\
             theorem = convex_density\nk = 1\nr = 2\nh = 0.25  # trailing\nlevels = 3\n",
        )
        .unwrap();
        assert_eq!(cfg.name, "demo");
        assert_eq!(cfg.rho.params["alpha"], "2");
        assert_eq!(cfg.r, Some(vec![2]));
        assert_eq!(cfg.h, 0.25);
        assert_eq!(cfg.domain_spec().unwrap(), DomainSpec::Rect { x0: -1.0, x1: 1.0, y0: -1.0, y1: 1.0 });
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_config("domain = rect\n\ntheorem = trivial\nfoo = 1\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 4, .. }), "{e}");
        let e = parse_config("domain = rect{x0=1\ntheorem = trivial\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 1, .. }), "{e}");
        let e = parse_config("domain = rect\nh = -1\ntheorem = trivial\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 2, .. }), "{e}");
        let e = parse_config("rho = const\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 1, .. }), "{e}");
        let cfg = parse_config("domain = rect{x0=0, z=1}\ntheorem = trivial\n").unwrap();
        assert!(matches!(cfg.domain_spec(), Err(Error::Config { line: 1, .. })));
    }

    #[test]
    fn polygon_vertices_and_points() {
        let cfg = parse_config("domain = polygon{vertices=0 0; 2 0; 0 1}\ntheorem = low_dim_gradient{d1=0 2}\n").unwrap();
        assert_eq!(cfg.domain_spec().unwrap(), DomainSpec::Polygon { vertices: vec![[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]] });
        let mesh = Arc::new(cfg.domain_spec().unwrap().mesh(0.5).unwrap());
        let coeffs = cfg.coefficients(&mesh).unwrap();
        match cfg.claim(&coeffs, &mesh).unwrap() {
            Claim::Inequality(Theorem::LowDimGradient { directions }) => assert_eq!(directions, vec![[0.0, 1.0]]),
            c => panic!("{c:?}"),
        }
    }

    #[test]
    fn sine_product_derivatives_match_differences() {
        let phi = sine_product(&DomainSpec::Rect { x0: 0.0, x1: 1.0, y0: 0.0, y1: 2.0 }).unwrap();
        let pts = [[0.3, 0.7], [0.81, 1.4]];
        assert!(phi.derivative_mismatch(&pts, 2.0, 2, 1e-4) < 1e-5);
        let bubble = disk_bubble(&DomainSpec::Disk { center: [0.5, 0.0], radius: 2.0 }).unwrap();
        assert!(bubble.derivative_mismatch(&pts, 4.0, 2, 1e-4) < 1e-5);
        assert!(bubble.value([2.5, 0.0]).abs() < 1e-15);
    }
}
