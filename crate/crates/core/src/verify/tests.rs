use super::*;
use crate::config::{disk_bubble, sine_product};
use crate::fields::{shifted_power_density, ScalarField};
use std::f64::consts::PI;
use std::sync::Arc;

fn square(a: f64, b: f64) -> DomainSpec {
    DomainSpec::Rect { x0: a, x1: b, y0: a, y1: b }
}

#[test]
fn verdicts_classify_by_margin_and_error() {
    assert_eq!(Verdict::classify(1.0, 0.1), Verdict::Holds);
    assert_eq!(Verdict::classify(0.05, 0.1), Verdict::HoldsWithinTolerance);
    assert_eq!(Verdict::classify(-0.05, 0.1), Verdict::HoldsWithinTolerance);
    assert_eq!(Verdict::classify(-1.0, 0.1), Verdict::Violated);
    assert_eq!(serde_json::to_string(&Verdict::HoldsWithinTolerance).unwrap(), "\"holds-within-tolerance\"");
}

#[test]
fn index_rules_per_theorem() {
    assert!(Theorem::Trivial.check_indices(2, 3, 0).is_ok());
    assert!(Theorem::Trivial.check_indices(2, 3, 1).is_err());
    assert!(Theorem::ConvexDensity.check_indices(2, 1, 2).is_ok());
    assert!(Theorem::ConvexDensity.check_indices(2, 2, 1).is_err());
    assert!(Theorem::ConvexDensity.check_indices(2, 1, 3).is_err());
    let lw = Theorem::LowDimGradient { directions: vec![[0.0, 1.0]] };
    assert!(lw.check_indices(2, 4, 1).is_ok());
    assert!(lw.check_indices(2, 4, 2).is_err());
    assert!(Theorem::ConstantEigenpair.check_indices(2, 0, 1).is_err());
}

#[test]
fn interval_laplacian_margins_are_equalities() {
    let problem = Problem::new(DomainSpec::Interval { a: 0.0, b: 1.0 }, CoefficientSet::laplacian(), 1.0 / 64.0);
    let ladder = solve_ladder(&problem, 3, 10).unwrap();
    let theorem = Theorem::LowDimGradient { directions: vec![[1.0, 0.0]] };
    for k in 1..=5 {
        let rep = inequality_from_ladder(&problem, &ladder, &theorem, k, 1).unwrap();
        assert!(rep.margin.abs() <= rep.combined_error, "k={k}: {} vs {}", rep.margin, rep.combined_error);
        assert_eq!(rep.verdict, Verdict::HoldsWithinTolerance);
        assert!(rep.hypotheses_hold);
        let exact = (k as f64 * PI).powi(2);
        assert!((rep.lambda_k.value / exact - 1.0).abs() < 1e-6);
    }
    assert!(ladder.trivial_inequality_excess(10) <= 1e-10);
}

#[test]
fn ibp_on_square_converges() {
    let domain = DomainSpec::unit_square();
    let phi = sine_product(&domain).unwrap();
    let b = [0.5f64.sqrt(), 0.5f64.sqrt()];
    let c = ibp_convergence(&domain, &phi, b, 1.0 / 16.0, 3).unwrap();
    // |D^2 phi b|^2 = pi^4 cos^2(pi (x + y)) for this b
    let exact = PI.powi(4) / 2.0;
    let fin = c.finest();
    assert!((fin.lhs / exact - 1.0).abs() < 1e-3, "{} vs {exact}", fin.lhs);
    assert_eq!(fin.boundary, 0.0);
    assert!(fin.residual <= 1e-3, "{fin:?}");
    assert!(c.observed_order().unwrap() >= 1.8, "{:?}", c.orders);
}

#[test]
fn ibp_on_disk_gives_four_pi() {
    let domain = DomainSpec::Disk { center: [0.0, 0.0], radius: 1.0 };
    let phi = disk_bubble(&domain).unwrap();
    let c = ibp_convergence(&domain, &phi, [1.0, 0.0], 1.0 / 16.0, 3).unwrap();
    let fin = c.finest();
    assert!((fin.lhs / (4.0 * PI) - 1.0).abs() < 1e-3, "{fin:?}");
    assert!((fin.interior / (8.0 * PI) - 1.0).abs() < 1e-3);
    assert!((fin.boundary / (4.0 * PI) - 1.0).abs() < 1e-3);
    assert!(fin.residual <= 1e-3);
    assert!(c.observed_order().unwrap() >= 1.8, "{:?}", c.orders);
}

#[test]
fn ibp_rejects_functions_not_vanishing_on_boundary() {
    let mesh = DomainSpec::unit_square().mesh(0.25).unwrap();
    let phi = ScalarField::new("x", |p| p[0]).with_gradient(|_| [1.0, 0.0]).with_hessian(|_| [[0.0; 2]; 2]);
    assert!(matches!(verify_ibp_identity(&mesh, &phi, [1.0, 0.0]), Err(Error::InvalidInput(_))));
    let no_hessian = ScalarField::new("bubble", |p| p[0] * (1.0 - p[0]));
    assert!(verify_ibp_identity(&mesh, &no_hessian, [1.0, 0.0]).is_err());
}

#[test]
fn polya_reverses_for_concave_density() {
    let concave = CoefficientSet::new(ScalarField::new("1+x(1-x)", |p| 1.0 + p[0] * (1.0 - p[0])).with_bounds(1.0, 1.25));
    let rep = polya_interval(&concave, 0.0, 1.0, 10_000, true).unwrap();
    assert_eq!(rep.verdict, Verdict::Holds);
    assert!(-rep.margin > 10.0 * (rep.lambda_k.error_estimate + rep.mu_k_plus_r.error_estimate));
    let convex =
        CoefficientSet::new(ScalarField::new("1+(x-1/2)^2", |p| 1.0 + (p[0] - 0.5).powi(2)).with_bounds(1.0, 1.25));
    let rep = polya_interval(&convex, 0.0, 1.0, 10_000, false).unwrap();
    assert_eq!(rep.verdict, Verdict::Holds);
    assert!(rep.margin > 10.0 * (rep.lambda_k.error_estimate + rep.mu_k_plus_r.error_estimate));
}

#[test]
fn convex_density_on_square() {
    let domain = square(-1.0, 1.0);
    let rho = shifted_power_density(1.0, 2.0, &domain.domain(0.5).unwrap()).unwrap();
    let problem = Problem::new(domain, CoefficientSet::new(rho), 0.25);
    let ladder = solve_ladder(&problem, 3, 8).unwrap();
    for r in [1, 2] {
        let rep = inequality_from_ladder(&problem, &ladder, &Theorem::ConvexDensity, 1, r).unwrap();
        eprintln!("r={r} lambda={:?} mu={:?} verdict={:?}", rep.lambda_k, rep.mu_k_plus_r, rep.verdict);
        assert!(rep.hypotheses_hold, "{:#?}", rep.hypotheses);
        assert!(rep.verdict.is_ok());
    }
}

#[test]
fn harmonic_gradient_certificate_on_offset_square() {
    let phase = HarmonicPhase::saddle();
    let problem = Problem::new(square(1.0, 2.0), CoefficientSet::new(phase.density()), 1.0 / 8.0);
    let ladder = solve_ladder(&problem, 3, 6).unwrap();
    let rep = inequality_from_ladder(&problem, &ladder, &Theorem::HarmonicGradient { phase: phase.clone() }, 1, 1).unwrap();
    assert!(rep.hypotheses_hold, "{:#?}", rep.hypotheses);
    assert_eq!(rep.verdict, Verdict::Holds);
    let neu = ladder.finest_neumann_pair();
    let dir = ladder.finest_dirichlet();
    let lambda = dir.value(0);
    let certs = plane_wave_certificates(&ladder, &problem.coeffs, 1, &PhaseSource::Harmonic(phase), &default_rotations()).unwrap();
    assert_eq!(certs.len(), 4);
    for cert in &certs {
        assert_eq!(cert.r, 1);
        assert!(cert.independent);
        assert_eq!(cert.target, lambda);
        // O(h^2) coupling between the eigenfunction and the interpolated wave
        assert!(cert.q_max / lambda - 1.0 < 2e-4, "{}", cert.q_max / lambda - 1.0);
        assert!(ladder.finest_neumann().value(1) <= cert.q_max + 1e-9);
    }
    // all rotations together are coupled and certify nothing
    let all = build_plane_wave_trials(neu, &problem.coeffs, lambda, &PhaseSource::Harmonic(HarmonicPhase::saddle()), &default_rotations()).unwrap();
    let joint = assemble_certificate(neu, dir, 1, &all, lambda, CERTIFICATE_TOL).unwrap();
    assert!(!joint.passes);
    assert!(ladder.finest_neumann().value(joint.k + joint.r - 1) <= joint.q_max + 1e-9);
}

#[test]
fn constant_eigenpair_certificate_matches_plane_wave_quotient() {
    let a = crate::fields::block_matrix_field(1.0, &crate::fields::sin_squared_field(0.5)).unwrap();
    let problem = Problem::new(DomainSpec::unit_square(), CoefficientSet::laplacian().with_matrix(a), 1.0 / 8.0);
    let ladder = solve_ladder(&problem, 3, 6).unwrap();
    let certs = plane_wave_certificates(&ladder, &problem.coeffs, 2, &PhaseSource::Eigenpair { lambda: 1.0, xi: [1.0, 0.0] }, &[]).unwrap();
    assert_eq!(certs.len(), 1);
    let c = &certs[0];
    assert_eq!(c.k, 2);
    assert!(c.q_max / c.target - 1.0 < 1e-3, "{}", c.q_max / c.target - 1.0);
    assert!(ladder.finest_neumann().value(2) <= c.q_max + 1e-9);
}

#[test]
fn certificate_rejects_dependent_trials() {
    let problem = Problem::new(DomainSpec::unit_square(), CoefficientSet::laplacian(), 0.25);
    let ladder = solve_ladder(&problem, 1, 4).unwrap();
    let neu = ladder.finest_neumann_pair();
    let dir = ladder.finest_dirichlet();
    let ones = vec![1.0; neu.mesh().n_nodes()];
    let t = Trial::real(ones.clone(), TrialTag::Other { label: "one".into() }, neu);
    let t2 = Trial::real(ones.iter().map(|v| 3.0 * v).collect(), TrialTag::Other { label: "three".into() }, neu);
    let cert = assemble_certificate(neu, dir, 1, &[t, t2], dir.value(0), CERTIFICATE_TOL).unwrap();
    assert_eq!(cert.requested_r, 2);
    assert_eq!(cert.r, 1);
    assert_eq!(cert.dropped.len(), 1);
    // pencil over span{phi_1, 1}: K = diag(lambda, 0), so q_max = lambda / (1 - m^2 / c)
    let phi = neu.restrict(&dir.nodal(0));
    let one = neu.restrict(&ones);
    let m = neu.mass_inner(&phi, &one);
    let c = neu.mass_inner(&one, &one);
    let expected = dir.value(0) / (1.0 - m * m / (neu.mass_inner(&phi, &phi) * c));
    assert!((cert.q_max / expected - 1.0).abs() < 1e-9, "{} vs {expected}", cert.q_max);
    assert!(!cert.passes);
}

#[test]
fn nehari_bandle_on_unit_disk_is_sharp() {
    let problem = Problem::new(DomainSpec::Disk { center: [0.0, 0.0], radius: 1.0 }, CoefficientSet::laplacian(), 0.2);
    let rep = nehari_bandle_check(&problem, 3).unwrap();
    assert!((rep.rho_integral.value / PI - 1.0).abs() < 1e-3, "{:?}", rep.rho_integral);
    let j0 = first_zero_j0().value;
    let j1 = first_zero_j1_prime().value;
    assert!((rep.disk_lambda1.value / (j0 * j0) - 1.0).abs() < 1e-3);
    for l in &rep.links {
        eprintln!("{}: margin {:e} err {:e} {:?}", l.statement, l.margin, l.combined_error, l.verdict);
    }
    assert!(rep.holds());
    assert!((rep.links[0].mu_k_plus_r.value / (j1 * j1) - 1.0).abs() < 1e-3);
}

#[test]
fn nehari_bandle_requires_log_subharmonic_density() {
    let rho = ScalarField::new("exp(-|x|^2)", |p| (-(p[0] * p[0] + p[1] * p[1])).exp()).with_bounds(0.1, 1.0);
    let problem = Problem::new(square(-1.0, 1.0), CoefficientSet::new(rho), 0.5);
    assert!(matches!(nehari_bandle_check(&problem, 1), Err(Error::Hypothesis(_))));
}

#[test]
fn extrapolated_eigenvalue_flags_short_ladders() {
    let problem = Problem::new(DomainSpec::unit_square(), CoefficientSet::laplacian(), 0.25);
    let ladder = solve_ladder(&problem, 2, 3).unwrap();
    let v = extrapolated_eigenvalue(&ladder.dirichlet, 0).unwrap();
    assert!(v.flagged);
    assert!((v.error_estimate - (ladder.dirichlet[0].value(0) - ladder.dirichlet[1].value(0)).abs()).abs() < 1e-12);
    let _ = Arc::clone(&ladder.meshes[0]);
}

