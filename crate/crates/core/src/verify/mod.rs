//! Eigenvalue inequalities checked on computed spectra: verdicts with
//! extrapolated error bars, trial-space certificates, the boundary
//! integration-by-parts identity, the disk comparison chain and the
//! experiment runner.

mod bessel;
mod certificate;
mod experiment;
mod ibp;
mod nehari;
mod problem;

use serde::Serialize;
use serde_json::json;

use crate::conditions::{
    check_axis_symmetry, check_constant_eigenpair, check_convexity_combination, check_directional_invariance,
    check_harmonic_gradient, ConditionReport, ANALYTIC_TOL,
};
use crate::eigen::{solve_interval_ode, track_eigenvalue, ExtrapolatedValue, Spectrum};
use crate::error::{Error, Result};
use crate::fem::BoundaryCondition;
use crate::fields::{CoefficientSet, HarmonicPhase};
use crate::geometry::{Mesh, Point};
use crate::sampling::{sample_points, DEFAULT_SAMPLES};

pub use bessel::{bessel_j0, bessel_j1, bessel_j1_prime, first_zero_j0, first_zero_j1_prime, BesselZero, BESSEL_TOL};
pub use certificate::{
    assemble_certificate, build_derivative_trials, build_plane_wave_trials, Certificate, PhaseSource, Trial, TrialTag,
    default_rotations, plane_wave_certificates, CERTIFICATE_TOL, INDEPENDENCE_TOL,
};
pub use experiment::{
    levels_csv, run_config, run_experiment, write_outputs, CoefficientNames, ExperimentOutcome, ExperimentReport, LevelSpectra,
    TrivialCheck, TRIVIAL_COUNT, TRIVIAL_TOL,
};
pub use ibp::{ibp_convergence, verify_ibp_identity, IbpConvergence, IbpReport, IBP_QUADRATURE, IBP_RESIDUAL_TOL};
pub use nehari::{nehari_bandle_check, nehari_bandle_from_ladder, NehariBandleReport};
pub use problem::{solve_ladder, DomainSpec, Ladder, Problem};

/// Absolute slack added to the combined error of a verdict.
pub const VERDICT_FLOOR: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "holds")]
    Holds,
    #[serde(rename = "holds-within-tolerance")]
    HoldsWithinTolerance,
    #[serde(rename = "violated")]
    Violated,
}

impl Verdict {
    /// Classifies `margin` (claimed non-negative) against `error`.
    pub fn classify(margin: f64, error: f64) -> Verdict {
        if margin > error {
            Verdict::Holds
        } else if margin < -error {
            Verdict::Violated
        } else {
            Verdict::HoldsWithinTolerance
        }
    }

    pub fn is_ok(self) -> bool {
        self != Verdict::Violated
    }
}

/// An inequality `mu_{k+r} <= lambda_k` (or its reverse) between two
/// extrapolated eigenvalues.
#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub theorem_name: String,
    pub statement: String,
    pub k: usize,
    pub r: usize,
    /// The side claimed to be larger in the forward direction.
    pub lambda_k: ExtrapolatedValue,
    pub mu_k_plus_r: ExtrapolatedValue,
    /// `lambda_k - mu_{k+r}`.
    pub margin: f64,
    pub combined_error: f64,
    /// Whether the claim is the reversed inequality `mu_{k+r} >= lambda_k`.
    pub reversed: bool,
    pub verdict: Verdict,
    pub hypotheses: Vec<ConditionReport>,
    pub hypotheses_hold: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl InequalityReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        theorem_name: &str,
        statement: String,
        k: usize,
        r: usize,
        lambda_k: ExtrapolatedValue,
        mu_k_plus_r: ExtrapolatedValue,
        reversed: bool,
        hypotheses: Vec<ConditionReport>,
    ) -> InequalityReport {
        let margin = lambda_k.value - mu_k_plus_r.value;
        let combined_error = lambda_k.error_estimate + mu_k_plus_r.error_estimate + VERDICT_FLOOR;
        let verdict = Verdict::classify(if reversed { -margin } else { margin }, combined_error);
        let mut notes = Vec::new();
        for (name, v) in [("lambda", &lambda_k), ("mu", &mu_k_plus_r)] {
            if v.flagged {
                notes.push(format!("{name}: non-monotone refinement triple, finest value used"));
            }
        }
        let hypotheses_hold = hypotheses.iter().all(|h| h.passed);
        if !hypotheses_hold {
            notes.push("unsupported hypothesis".into());
        }
        InequalityReport {
            theorem_name: theorem_name.to_string(),
            statement,
            k,
            r,
            lambda_k,
            mu_k_plus_r,
            margin,
            combined_error,
            reversed,
            verdict,
            hypotheses,
            hypotheses_hold,
            notes,
        }
    }
}

/// The inequality families that can be verified, with the data their
/// hypotheses need.
#[derive(Clone, Debug)]
pub enum Theorem {
    /// `mu_k <= lambda_k` (no hypotheses).
    Trivial,
    /// Convex `lambda_1 rho - V` on a convex domain: `mu_d <= lambda_1`,
    /// and `mu_{d+1} <= lambda_1` under axis symmetry.
    ConvexDensity,
    /// `rho` and `V` invariant along the given directions on a convex
    /// domain: `mu_{k+r} <= lambda_k` with `r` at most their number.
    LowDimGradient { directions: Vec<Point> },
    /// `rho = |grad h|^2` with `h` harmonic: `mu_{k+1} <= lambda_k`.
    HarmonicGradient { phase: HarmonicPhase },
    /// `A` with a constant eigenpair: `mu_{k+1} <= lambda_k`.
    ConstantEigenpair,
}

impl Theorem {
    pub fn name(&self) -> &'static str {
        match self {
            Theorem::Trivial => "trivial",
            Theorem::ConvexDensity => "convex_density",
            Theorem::LowDimGradient { .. } => "low_dim_gradient",
            Theorem::HarmonicGradient { .. } => "harmonic_gradient",
            Theorem::ConstantEigenpair => "constant_eigenpair",
        }
    }

    /// Checks that `(k, r)` is an index pair the theorem speaks about.
    pub fn check_indices(&self, dim: usize, k: usize, r: usize) -> Result<()> {
        let bad = |why: &str| Err(Error::InvalidInput(format!("{}: (k={k}, r={r}) {why}", self.name())));
        if k == 0 {
            return bad("k is 1-based");
        }
        match self {
            Theorem::Trivial if r != 0 => bad("requires r = 0"),
            Theorem::ConvexDensity if k != 1 => bad("requires k = 1"),
            Theorem::ConvexDensity if r == 0 || r > dim => bad("requires 1 <= r <= d"),
            Theorem::LowDimGradient { directions } if r == 0 || r > directions.len() => {
                bad("requires 1 <= r <= number of invariant directions")
            }
            Theorem::HarmonicGradient { .. } | Theorem::ConstantEigenpair if r != 1 => bad("requires r = 1"),
            _ => Ok(()),
        }
    }
}

fn flag_report(name: &str, ok: bool, details: serde_json::Value) -> ConditionReport {
    ConditionReport::from_residuals(name, 0.0, [([0.0, 0.0], if ok { 0.0 } else { 1.0 })])
        .with_details(details)
}

fn zero_potential(coeffs: &CoefficientSet, points: &[Point]) -> ConditionReport {
    ConditionReport::from_residuals("zero_potential", ANALYTIC_TOL, points.iter().map(|&p| (p, coeffs.potential.value(p).abs())))
}

fn identity_matrix(coeffs: &CoefficientSet, points: &[Point]) -> ConditionReport {
    ConditionReport::from_residuals(
        "identity_principal_part",
        ANALYTIC_TOL,
        points.iter().map(|&p| {
            let a = coeffs.matrix.value(p);
            (p, (a[0][0] - 1.0).abs().max((a[1][1] - 1.0).abs()).max(a[0][1].abs()).max(a[1][0].abs()))
        }),
    )
}

fn constant_density(coeffs: &CoefficientSet, points: &[Point]) -> ConditionReport {
    let r0 = points.first().map_or(1.0, |&p| coeffs.rho.value(p));
    ConditionReport::from_residuals(
        "constant_density",
        ANALYTIC_TOL,
        points.iter().map(|&p| (p, (coeffs.rho.value(p) - r0).abs() / r0.abs().max(1e-300))),
    )
}

/// Hypothesis reports of `theorem` for `(k, r)` on `mesh`. `lambda1` is
/// the first Dirichlet eigenvalue (needed by the convexity condition).
pub fn check_hypotheses(
    theorem: &Theorem,
    coeffs: &CoefficientSet,
    mesh: &Mesh,
    lambda1: f64,
    r: usize,
) -> Result<Vec<ConditionReport>> {
    let domain = mesh.domain();
    let dim = mesh.dim();
    let diam = domain.diameter();
    let points = sample_points(mesh, DEFAULT_SAMPLES, |p| coeffs.allows(p));
    let convex = || flag_report("convex_domain", domain.is_convex(), json!({ "convex": domain.is_convex() }));
    let mut out = Vec::new();
    match theorem {
        Theorem::Trivial => {}
        Theorem::ConvexDensity => {
            out.push(convex());
            out.push(identity_matrix(coeffs, &points));
            out.push(check_convexity_combination(&coeffs.rho, &coeffs.potential, lambda1, &points, dim, diam));
            if r == dim {
                out.push(check_axis_symmetry(domain, &coeffs.rho, &coeffs.potential, &points));
            }
        }
        Theorem::LowDimGradient { directions } => {
            out.push(convex());
            out.push(identity_matrix(coeffs, &points));
            out.push(check_directional_invariance(&coeffs.rho, &coeffs.potential, directions, &points, diam)?);
        }
        Theorem::HarmonicGradient { phase } => {
            out.push(zero_potential(coeffs, &points));
            out.push(identity_matrix(coeffs, &points));
            out.push(check_harmonic_gradient(&phase.field(0.0), &coeffs.rho, &points, diam)?);
        }
        Theorem::ConstantEigenpair => {
            out.push(zero_potential(coeffs, &points));
            out.push(constant_density(coeffs, &points));
            out.push(check_constant_eigenpair(&coeffs.matrix, &points).0);
        }
    }
    Ok(out)
}

/// Eigenvalue `index` (0-based on the finest spectrum): extrapolated over
/// the three finest levels, or the finest raw value (flagged, with the
/// last increment as error bar) when fewer levels exist.
pub fn extrapolated_eigenvalue(spectra: &[Spectrum], index: usize) -> Result<ExtrapolatedValue> {
    match spectra {
        [.., a, b, c] => track_eigenvalue([a, b, c], index),
        [] => Err(Error::InvalidInput("no spectra".into())),
        [.., last] => {
            if index >= last.len() {
                return Err(Error::InvalidInput(format!("eigenvalue index {index} beyond the {} computed", last.len())));
            }
            let v = last.value(index);
            let err = if spectra.len() == 2 { (spectra[0].value(index) - v).abs() } else { v.abs() };
            let raw = spectra.iter().map(|s| s.value(index)).collect();
            Ok(ExtrapolatedValue { value: v, error_estimate: err, observed_order: None, raw, flagged: true })
        }
    }
}

/// Verdict for `mu_{k+r} <= lambda_k` (1-based `k`) from solved spectra.
pub fn inequality_from_ladder(
    problem: &Problem,
    ladder: &Ladder,
    theorem: &Theorem,
    k: usize,
    r: usize,
) -> Result<InequalityReport> {
    theorem.check_indices(problem.domain.dim(), k, r)?;
    let lambda = extrapolated_eigenvalue(&ladder.dirichlet, k - 1)?;
    let mu = extrapolated_eigenvalue(&ladder.neumann, k + r - 1)?;
    let lambda1 = extrapolated_eigenvalue(&ladder.dirichlet, 0)?.value;
    let hypotheses = check_hypotheses(theorem, &problem.coeffs, &ladder.meshes[0], lambda1, r)?;
    let statement = format!("mu_{} <= lambda_{}", k + r, k);
    Ok(InequalityReport::new(theorem.name(), statement, k, r, lambda, mu, false, hypotheses))
}

/// Solves both spectra on `levels` nested meshes and reports the verdict
/// for `mu_{k+r} <= lambda_k`.
pub fn verify_inequality(
    problem: &Problem,
    theorem: &Theorem,
    k: usize,
    r: usize,
    levels: usize,
) -> Result<InequalityReport> {
    theorem.check_indices(problem.domain.dim(), k, r)?;
    let ladder = solve_ladder(problem, levels, k + r + 4)?;
    inequality_from_ladder(problem, &ladder, theorem, k, r)
}

/// Compares `mu_2` and `lambda_1` on an interval with the finite-difference
/// oracle; the error bars are the oracle's own estimates. With
/// `reversed` the claim is `mu_2 >= lambda_1`.
pub fn polya_interval(coeffs: &CoefficientSet, a: f64, b: f64, grid_n: usize, reversed: bool) -> Result<InequalityReport> {
    let d = solve_interval_ode(coeffs, a, b, BoundaryCondition::Dirichlet, 1, grid_n)?;
    let n = solve_interval_ode(coeffs, a, b, BoundaryCondition::Neumann, 2, grid_n)?;
    polya_from_spectra(&d, &n, reversed)
}

/// [`polya_interval`] on spectra from [`solve_interval_ode`].
pub fn polya_from_spectra(d: &Spectrum, n: &Spectrum, reversed: bool) -> Result<InequalityReport> {
    if d.is_empty() || n.len() < 2 {
        return Err(Error::InvalidInput("need lambda_1 and mu_2".into()));
    }
    let ev = |s: &Spectrum, i: usize| {
        ExtrapolatedValue::with_error(s.value(i), s.error_estimates.as_ref().map_or(0.0, |e| e[i]))
    };
    let statement = if reversed { "mu_2 >= lambda_1" } else { "mu_2 <= lambda_1" };
    Ok(InequalityReport::new("polya_1d", statement.into(), 1, 1, ev(d, 0), ev(n, 1), reversed, Vec::new()))
}

#[cfg(test)]
mod tests;
