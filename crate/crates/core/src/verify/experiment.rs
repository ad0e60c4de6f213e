//! Runs a configured experiment end to end and writes its report.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;

use super::{
    assemble_certificate, build_derivative_trials, plane_wave_certificates, check_hypotheses,
    extrapolated_eigenvalue, ibp_convergence, inequality_from_ladder, nehari_bandle_from_ladder, polya_from_spectra,
    solve_ladder, Certificate, DomainSpec, IbpConvergence, InequalityReport, Ladder, NehariBandleReport, PhaseSource,
    Problem, Theorem, CERTIFICATE_TOL,
};
use crate::conditions::{check_constant_eigenpair, ConditionReport};
use crate::config::{load_config, Claim, ExperimentConfig};
use crate::eigen::{solve_interval_ode, Spectrum};
use crate::error::{Error, Result};
use crate::fem::BoundaryCondition;
use crate::fields::CoefficientSet;
use crate::sampling::{sample_points, DEFAULT_SAMPLES};

/// Tolerance of the discrete inequality `mu_k^h <= lambda_k^h`.
pub const TRIVIAL_TOL: f64 = 1e-10;
/// Number of eigenvalue indices the discrete inequality is checked for.
pub const TRIVIAL_COUNT: usize = 10;

#[derive(Clone, Debug, Serialize)]
pub struct CoefficientNames {
    pub rho: String,
    pub potential: String,
    pub matrix: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelSpectra {
    pub level: usize,
    pub mesh_size: f64,
    pub nodes: usize,
    pub dirichlet: Spectrum,
    pub neumann: Spectrum,
}

/// `mu_k^h <= lambda_k^h` on every level.
#[derive(Clone, Debug, Serialize)]
pub struct TrivialCheck {
    pub indices: usize,
    /// Largest `(mu_k - lambda_k) / max(|lambda_k|, 1)`.
    pub max_excess: f64,
    pub tolerance: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub config: String,
    pub domain: DomainSpec,
    pub coefficients: CoefficientNames,
    pub theorem: String,
    pub mesh_sizes: Vec<f64>,
    pub conditions: Vec<ConditionReport>,
    pub spectra: Vec<LevelSpectra>,
    pub trivial_inequality: Option<TrivialCheck>,
    pub inequalities: Vec<InequalityReport>,
    pub certificates: Vec<Certificate>,
    pub ibp: Option<IbpConvergence>,
    pub nehari_bandle: Option<NehariBandleReport>,
    /// Failures of individual stages.
    pub errors: Vec<String>,
    pub success: bool,
}

impl ExperimentReport {
    fn finish(mut self) -> ExperimentReport {
        self.success = self.errors.is_empty()
            && self.inequalities.iter().all(|r| r.verdict.is_ok())
            && self.certificates.iter().all(|c| c.passes)
            && self.trivial_inequality.as_ref().is_none_or(|t| t.holds)
            && self.nehari_bandle.as_ref().is_none_or(|n| n.holds())
            && self.ibp.as_ref().is_none_or(|i| i.finest().residual <= super::ibp::IBP_RESIDUAL_TOL);
        self
    }
}

/// A finished experiment and the files it wrote.
#[derive(Debug)]
pub struct ExperimentOutcome {
    pub report: ExperimentReport,
    pub written: Vec<PathBuf>,
}

impl ExperimentOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.report.success {
            0
        } else {
            1
        }
    }
}

fn trivial_check(pairs: impl Iterator<Item = (f64, f64)>, indices: usize) -> TrivialCheck {
    let max_excess = pairs.map(|(mu, la)| (mu - la) / la.abs().max(1.0)).fold(f64::NEG_INFINITY, f64::max);
    TrivialCheck { indices, max_excess, tolerance: TRIVIAL_TOL, holds: max_excess <= TRIVIAL_TOL }
}

fn ladder_trivial(ladder: &Ladder) -> TrivialCheck {
    let mut pairs = Vec::new();
    for (d, n) in ladder.dirichlet.iter().zip(&ladder.neumann) {
        for k in 0..TRIVIAL_COUNT.min(d.len()).min(n.len()) {
            pairs.push((n.value(k), d.value(k)));
        }
    }
    trivial_check(pairs.into_iter(), TRIVIAL_COUNT)
}

fn certificates(
    cfg: &ExperimentConfig,
    problem: &Problem,
    ladder: &Ladder,
    theorem: &Theorem,
    k: usize,
    r: usize,
) -> Result<Vec<Certificate>> {
    let default = matches!(theorem, Theorem::HarmonicGradient { .. } | Theorem::ConstantEigenpair);
    if !cfg.certify.unwrap_or(default) {
        return Ok(Vec::new());
    }
    let neumann = ladder.finest_neumann_pair();
    let dirichlet = ladder.finest_dirichlet();
    let derivative = |dirs: &[crate::geometry::Point]| -> Result<Vec<Certificate>> {
        let trials = build_derivative_trials(neumann, dirichlet, k - 1, dirs)?;
        Ok(vec![assemble_certificate(neumann, dirichlet, k, &trials, dirichlet.value(k - 1), CERTIFICATE_TOL)?])
    };
    match theorem {
        Theorem::HarmonicGradient { phase } => {
            let rotations = cfg.rotations.clone().unwrap_or_else(|| vec![0.0]);
            plane_wave_certificates(ladder, &problem.coeffs, k, &PhaseSource::Harmonic(phase.clone()), &rotations)
        }
        Theorem::ConstantEigenpair => {
            let points = sample_points(neumann.mesh(), DEFAULT_SAMPLES, |p| problem.coeffs.allows(p));
            let (_, pairs) = check_constant_eigenpair(&problem.coeffs.matrix, &points);
            let &(lambda, xi) = pairs.first().ok_or_else(|| Error::Hypothesis("no constant eigenpair of A".into()))?;
            plane_wave_certificates(ladder, &problem.coeffs, k, &PhaseSource::Eigenpair { lambda, xi }, &[])
        }
        Theorem::ConvexDensity => derivative(&[[1.0, 0.0], [0.0, 1.0]][..r.min(problem.domain.dim())]),
        Theorem::LowDimGradient { directions } => derivative(&directions[..r.min(directions.len())]),
        Theorem::Trivial => Ok(Vec::new()),
    }
}

fn names(coeffs: &CoefficientSet) -> CoefficientNames {
    CoefficientNames {
        rho: coeffs.rho.name().to_string(),
        potential: coeffs.potential.name().to_string(),
        matrix: coeffs.matrix.name().to_string(),
    }
}

/// Runs the experiment described by `cfg`. Configuration errors are
/// returned; failures of later stages are recorded in the report.
pub fn run_config(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let domain = cfg.domain_spec()?;
    let coarse = Arc::new(domain.mesh(cfg.h)?);
    let coeffs = cfg.coefficients(&coarse)?;
    let claim = cfg.claim(&coeffs, &coarse)?;
    let mut problem = Problem::new(domain.clone(), coeffs.clone(), cfg.h);
    problem.quadrature = cfg.quadrature;
    let mut report = ExperimentReport {
        name: cfg.name.clone(),
        config: cfg.source.clone(),
        domain: domain.clone(),
        coefficients: names(&coeffs),
        theorem: cfg.theorem.name.clone(),
        mesh_sizes: Vec::new(),
        conditions: Vec::new(),
        spectra: Vec::new(),
        trivial_inequality: None,
        inequalities: Vec::new(),
        certificates: Vec::new(),
        ibp: None,
        nehari_bandle: None,
        errors: Vec::new(),
        success: false,
    };
    match claim {
        Claim::Polya1d { reversed } => {
            let DomainSpec::Interval { a, b } = domain else {
                return Err(Error::Config { line: cfg.domain.line, message: "polya_1d needs an interval".into() });
            };
            let count = cfg.count.unwrap_or(TRIVIAL_COUNT);
            let solved = solve_interval_ode(&coeffs, a, b, BoundaryCondition::Dirichlet, count, cfg.grid_n)
                .and_then(|d| Ok((d, solve_interval_ode(&coeffs, a, b, BoundaryCondition::Neumann, count, cfg.grid_n)?)));
            match solved {
                Ok((d, n)) => {
                    report.mesh_sizes.push(d.mesh_size);
                    report.trivial_inequality =
                        Some(trivial_check((0..count.min(d.len()).min(n.len())).map(|k| (n.value(k), d.value(k))), count));
                    match polya_from_spectra(&d, &n, reversed) {
                        Ok(r) => report.inequalities.push(r),
                        Err(e) => report.errors.push(format!("polya: {e}")),
                    }
                    let nodes = d.mesh().map_or(0, |m| m.n_nodes());
                    report.spectra.push(LevelSpectra { level: 0, mesh_size: d.mesh_size, nodes, dirichlet: d, neumann: n });
                }
                Err(e) => report.errors.push(format!("solve: {e}")),
            }
        }
        Claim::Ibp { phi, b } => match ibp_convergence(&domain, &phi, b, cfg.h, cfg.levels) {
            Ok(c) => {
                report.mesh_sizes = c.reports.iter().map(|r| r.mesh_size).collect();
                report.ibp = Some(c);
            }
            Err(e) => report.errors.push(format!("ibp: {e}")),
        },
        Claim::NehariBandle => {
            let count = cfg.count.unwrap_or(TRIVIAL_COUNT);
            match solve_ladder(&problem, cfg.levels, count) {
                Ok(ladder) => {
                    record_ladder(&mut report, &ladder);
                    match nehari_bandle_from_ladder(&problem, &ladder) {
                        Ok(n) => {
                            report.conditions.extend(n.hypotheses.iter().cloned());
                            report.nehari_bandle = Some(n);
                        }
                        Err(e) => report.errors.push(format!("nehari_bandle: {e}")),
                    }
                }
                Err(e) => report.errors.push(format!("solve: {e}")),
            }
        }
        Claim::Inequality(theorem) => {
            let dim = domain.dim();
            let rs = cfg.r_for(&theorem, dim);
            for &k in &cfg.k {
                for &r in &rs {
                    theorem.check_indices(dim, k, r)?;
                }
            }
            let needed = cfg.k.iter().max().copied().unwrap_or(1) + rs.iter().max().copied().unwrap_or(0) + 4;
            let count = cfg.count.unwrap_or(needed.max(TRIVIAL_COUNT));
            match solve_ladder(&problem, cfg.levels, count) {
                Ok(ladder) => {
                    record_ladder(&mut report, &ladder);
                    let lambda1 = extrapolated_eigenvalue(&ladder.dirichlet, 0).map(|v| v.value);
                    match lambda1.and_then(|l| check_hypotheses(&theorem, &coeffs, &ladder.meshes[0], l, *rs.iter().max().unwrap_or(&0))) {
                        Ok(c) => report.conditions = c,
                        Err(e) => report.errors.push(format!("hypotheses: {e}")),
                    }
                    for &k in &cfg.k {
                        for &r in &rs {
                            match inequality_from_ladder(&problem, &ladder, &theorem, k, r) {
                                Ok(rep) => report.inequalities.push(rep),
                                Err(e) => report.errors.push(format!("inequality (k={k}, r={r}): {e}")),
                            }
                            match certificates(cfg, &problem, &ladder, &theorem, k, r) {
                                Ok(c) => report.certificates.extend(c),
                                Err(e) => report.errors.push(format!("certificate (k={k}, r={r}): {e}")),
                            }
                        }
                    }
                }
                Err(e) => report.errors.push(format!("solve: {e}")),
            }
        }
    }
    Ok(report.finish())
}

fn record_ladder(report: &mut ExperimentReport, ladder: &Ladder) {
    report.mesh_sizes = ladder.meshes.iter().map(|m| m.mesh_size()).collect();
    report.trivial_inequality = Some(ladder_trivial(ladder));
    report.spectra = ladder
        .meshes
        .iter()
        .zip(ladder.dirichlet.iter().zip(&ladder.neumann))
        .enumerate()
        .map(|(level, (m, (d, n)))| LevelSpectra {
            level,
            mesh_size: m.mesh_size(),
            nodes: m.n_nodes(),
            dirichlet: d.clone(),
            neumann: n.clone(),
        })
        .collect();
}

/// Per-level eigenvalues, `level,mesh_size,bc,index,eigenvalue`.
pub fn levels_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("level,mesh_size,bc,index,eigenvalue\n");
    for l in &report.spectra {
        for (bc, s) in [("dirichlet", &l.dirichlet), ("neumann", &l.neumann)] {
            for (i, v) in s.eigenvalues.iter().enumerate() {
                out.push_str(&format!("{},{:.6e},{bc},{},{v:.16e}\n", l.level, l.mesh_size, i + 1));
            }
        }
    }
    out
}

fn with_suffix(base: &Path, suffix: &str) -> PathBuf {
    let stem = base.file_stem().map_or_else(|| "eigenvalues".into(), |s| s.to_string_lossy().into_owned());
    base.with_file_name(format!("{stem}_{suffix}.csv"))
}

/// Writes the JSON report to `json` and the CSV tables next to `csv`
/// (`<stem>_dirichlet.csv`, `<stem>_neumann.csv`, `<stem>_levels.csv`).
pub fn write_outputs(report: &ExperimentReport, json: Option<&Path>, csv: Option<&Path>) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut write = |path: PathBuf, text: String| -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(&path, text)?;
        written.push(path);
        Ok(())
    };
    if let Some(path) = json {
        let text = serde_json::to_string_pretty(report).map_err(|e| Error::InvalidInput(e.to_string()))?;
        write(path.to_path_buf(), text)?;
    }
    if let (Some(base), Some(finest)) = (csv, report.spectra.last()) {
        write(with_suffix(base, "dirichlet"), finest.dirichlet.to_csv())?;
        write(with_suffix(base, "neumann"), finest.neumann.to_csv())?;
        write(with_suffix(base, "levels"), levels_csv(report))?;
    }
    Ok(written)
}

/// Loads the configuration at `path`, runs it and writes the outputs it
/// names.
pub fn run_experiment(path: &Path) -> Result<ExperimentOutcome> {
    let cfg = load_config(path)?;
    let report = run_config(&cfg)?;
    let written = write_outputs(&report, cfg.output.as_deref(), cfg.csv.as_deref())?;
    Ok(ExperimentOutcome { report, written })
}
