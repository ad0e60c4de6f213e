//! Comparison of `mu_2` and `lambda_1` of an inhomogeneous membrane with the
//! Laplacian on the disk of area `int rho`:
//! `mu_2 <= j'_{1,1}^2 / R^2 < j_{0,1}^2 / R^2 <= lambda_1`.

use std::f64::consts::PI;

use serde::Serialize;
use serde_json::json;

use super::{
    extrapolated_eigenvalue, flag_report, identity_matrix, solve_ladder, zero_potential, BesselZero, InequalityReport,
    Ladder, Problem, Verdict,
};
use crate::conditions::{check_log_subharmonic, ConditionReport};
use crate::eigen::{extrapolate, ExtrapolatedValue};
use crate::error::{Error, Result};
use crate::fem::integrate;
use crate::sampling::{sample_points, DEFAULT_SAMPLES};

#[derive(Clone, Debug, Serialize)]
pub struct NehariBandleReport {
    /// `int rho`, extrapolated over the mesh levels.
    pub rho_integral: ExtrapolatedValue,
    /// Radius of the disk with area `int rho`.
    pub radius: f64,
    pub j0_zero: BesselZero,
    pub j1_prime_zero: BesselZero,
    pub disk_lambda1: ExtrapolatedValue,
    pub disk_mu2: ExtrapolatedValue,
    pub hypotheses: Vec<ConditionReport>,
    /// The three links of the chain, left to right.
    pub links: Vec<InequalityReport>,
    pub verdict: Verdict,
}

impl NehariBandleReport {
    pub fn holds(&self) -> bool {
        self.verdict.is_ok()
    }
}

fn disk_value(zero: &BesselZero, integral: &ExtrapolatedValue) -> ExtrapolatedValue {
    // j^2 / R^2 = pi j^2 / I
    let j = zero.value;
    let i = integral.value;
    let value = PI * j * j / i;
    let zero_err = zero.tolerance.max(zero.rerun_difference);
    let err = value * integral.error_estimate / i + 2.0 * PI * j * zero_err / i;
    ExtrapolatedValue::with_error(value, err)
}

/// Runs the chain on `levels` meshes of `problem` (planar, simply
/// connected, `V = 0`, `A = I`, `rho` log-subharmonic).
pub fn nehari_bandle_check(problem: &Problem, levels: usize) -> Result<NehariBandleReport> {
    if problem.domain.dim() != 2 {
        return Err(Error::InvalidInput("the disk comparison needs a planar domain".into()));
    }
    nehari_bandle_from_ladder(problem, &solve_ladder(problem, levels, 6)?)
}

/// The chain from already solved spectra (at least two per level).
pub fn nehari_bandle_from_ladder(problem: &Problem, ladder: &Ladder) -> Result<NehariBandleReport> {
    if problem.domain.dim() != 2 {
        return Err(Error::InvalidInput("the disk comparison needs a planar domain".into()));
    }
    let coarse = &ladder.meshes[0];
    let coeffs = &problem.coeffs;
    let points = sample_points(coarse, DEFAULT_SAMPLES, |p| coeffs.allows(p));
    let chi = coarse.euler_characteristic();
    let hypotheses = vec![
        flag_report("simply_connected", chi == 1, json!({ "euler_characteristic": chi })),
        zero_potential(coeffs, &points),
        identity_matrix(coeffs, &points),
        check_log_subharmonic(&coeffs.rho, &points, coarse.domain().diameter())?,
    ];
    if let Some(h) = hypotheses.iter().find(|h| !h.passed) {
        return Err(Error::Hypothesis(format!(
            "{} fails (max residual {:e}, tolerance {:e})",
            h.condition, h.max_residual, h.tolerance
        )));
    }

    let integrals = ladder
        .meshes
        .iter()
        .map(|m| integrate(m, problem.quadrature, |p| coeffs.rho.value(p)))
        .collect::<Result<Vec<_>>>()?;
    let rho_integral = match integrals.as_slice() {
        [.., a, b, c] => extrapolate([*a, *b, *c]),
        [.., a, b] => ExtrapolatedValue::with_error(*b, (a - b).abs()),
        [a] => ExtrapolatedValue::with_error(*a, a.abs()),
        [] => unreachable!("ladder has at least one level"),
    };
    let radius = (rho_integral.value / PI).sqrt();
    let j0_zero = super::first_zero_j0();
    let j1_prime_zero = super::first_zero_j1_prime();
    let disk_lambda1 = disk_value(&j0_zero, &rho_integral);
    let disk_mu2 = disk_value(&j1_prime_zero, &rho_integral);

    let mu2 = extrapolated_eigenvalue(&ladder.neumann, 1)?;
    let lambda1 = extrapolated_eigenvalue(&ladder.dirichlet, 0)?;
    let links = vec![
        InequalityReport::new("nehari_bandle", "mu_2 <= mu_2(disk)".into(), 1, 1, disk_mu2.clone(), mu2, false, Vec::new()),
        InequalityReport::new(
            "nehari_bandle",
            "mu_2(disk) < lambda_1(disk)".into(),
            1,
            1,
            disk_lambda1.clone(),
            disk_mu2.clone(),
            false,
            Vec::new(),
        ),
        InequalityReport::new(
            "nehari_bandle",
            "lambda_1(disk) <= lambda_1".into(),
            1,
            0,
            lambda1,
            disk_lambda1.clone(),
            false,
            hypotheses.clone(),
        ),
    ];
    let verdict = if links.iter().any(|l| l.verdict == Verdict::Violated) {
        Verdict::Violated
    } else if links.iter().all(|l| l.verdict == Verdict::Holds) {
        Verdict::Holds
    } else {
        Verdict::HoldsWithinTolerance
    };
    Ok(NehariBandleReport {
        rho_integral,
        radius,
        j0_zero,
        j1_prime_zero,
        disk_lambda1,
        disk_mu2,
        hypotheses,
        links,
        verdict,
    })
}
