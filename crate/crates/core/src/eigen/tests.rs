use super::*;
use crate::fem::{assemble, restrict_dirichlet, BoundaryCondition};
use crate::fields::{CoefficientSet, ScalarField};
use crate::geometry::{make_interval, make_rectangle};
use std::f64::consts::PI;

fn interval_pairs(n: usize, coeffs: &CoefficientSet) -> (OperatorPair, OperatorPair) {
    let mesh = Arc::new(make_interval(0.0, 1.0, n).unwrap());
    let neu = assemble(&mesh, coeffs, 2).unwrap();
    (restrict_dirichlet(&neu).unwrap(), neu)
}

fn bump() -> CoefficientSet {
    CoefficientSet::new(ScalarField::new("1+|x|^2", |p| 1.0 + p[0] * p[0] + p[1] * p[1]).with_bounds(1.0, 3.0))
}

#[test]
fn interval_laplacian_matches_k2_pi2() {
    let (dir, neu) = interval_pairs(512, &CoefficientSet::laplacian());
    let l = solve_lowest(&dir, 5).unwrap();
    let m = solve_lowest(&neu, 6).unwrap();
    assert!(m.eigenvalues[0].abs() < 1e-9);
    for k in 1..=5 {
        let exact = (k as f64 * PI).powi(2);
        assert!((l.eigenvalues[k - 1] / exact - 1.0).abs() < 1e-4);
        assert!((m.eigenvalues[k] / exact - 1.0).abs() < 1e-4);
    }
    let c = &m.eigenvectors[0];
    assert!(c.iter().all(|v| (v - c[0]).abs() < 1e-8 && *v > 0.0));
}

#[test]
fn iterative_path_matches_dense_on_interval() {
    let (dir, neu) = interval_pairs(300, &bump());
    let dense_opts = SolverOptions { dense_limit: 1000, ..Default::default() };
    let opts = SolverOptions { dense_limit: 0, ..Default::default() };
    for pair in [&dir, &neu] {
        let dense = solve_lowest_with(pair, 6, &dense_opts).unwrap();
        let it = solve_lowest_with(pair, 6, &opts).unwrap();
        assert!(it.method.contains("Krylov"));
        for (a, b) in dense.eigenvalues.iter().zip(&it.eigenvalues) {
            assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0), "{a} vs {b}");
        }
    }
}

#[test]
fn dense_and_iterative_agree_on_thousand_dofs() {
    let mesh = Arc::new(make_rectangle(-1.0, 1.0, -1.0, 1.0, 0.094).unwrap());
    let neu = assemble(&mesh, &bump(), 2).unwrap();
    let dir = restrict_dirichlet(&neu).unwrap();
    assert!(dir.dim() >= 900 && dir.dim() <= 1500, "dim {}", dir.dim());
    let dense = solve_lowest_with(&dir, 5, &SolverOptions { dense_limit: 2000, ..Default::default() }).unwrap();
    let it = solve_lowest_with(&dir, 5, &SolverOptions { dense_limit: 0, ..Default::default() }).unwrap();
    for (a, b) in dense.eigenvalues.iter().zip(&it.eigenvalues) {
        assert!((a - b).abs() <= 1e-8 * a.abs(), "{a} vs {b}");
    }
    assert!(it.residuals.iter().all(|r| *r <= RESIDUAL_TOL));
    assert!(it.orthonormality_error <= ORTHONORMALITY_TOL);
}

#[test]
fn degenerate_square_modes_are_found() {
    // lambda_2 = lambda_3 = 5 pi^2 on the unit square
    let mesh = Arc::new(make_rectangle(0.0, 1.0, 0.0, 1.0, 0.03).unwrap());
    let dir = restrict_dirichlet(&assemble(&mesh, &CoefficientSet::laplacian(), 2).unwrap()).unwrap();
    assert!(dir.dim() > DEFAULT_DENSE_LIMIT);
    let s = solve_lowest(&dir, 6).unwrap();
    let exact = [2.0, 5.0, 5.0, 8.0, 10.0, 10.0].map(|c| c * PI * PI);
    for (v, e) in s.eigenvalues.iter().zip(exact) {
        assert!((v / e - 1.0).abs() < 2e-2, "{v} vs {e}");
    }
    assert_eq!(s.cluster_ids[0], 0);
    assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn density_scaling_divides_eigenvalues() {
    let (dir, _) = interval_pairs(200, &bump());
    let mesh = Arc::clone(dir.mesh());
    let c = 3.7;
    let scaled = restrict_dirichlet(&assemble(&mesh, &bump().scaled_density(c), 2).unwrap()).unwrap();
    let a = solve_lowest(&dir, 5).unwrap();
    let b = solve_lowest(&scaled, 5).unwrap();
    for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
        assert!((y * c / x - 1.0).abs() < 1e-9);
    }
}

#[test]
fn refinement_lowers_dirichlet_eigenvalues() {
    let m0 = Arc::new(make_rectangle(0.0, 1.0, 0.0, 1.0, 0.25).unwrap());
    let m1 = Arc::new(m0.refine());
    let solve = |m: &Arc<Mesh>| solve_lowest(&restrict_dirichlet(&assemble(m, &bump(), 2).unwrap()).unwrap(), 4).unwrap();
    let (a, b) = (solve(&m0), solve(&m1));
    for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
        assert!(*y <= x + 1e-10 * x.abs());
    }
}

#[test]
fn extrapolation_of_quadratic_model() {
    let v = |h: f64| 5.0 + 3.0 * h * h;
    let e = extrapolate([v(0.1), v(0.05), v(0.025)]);
    assert!((e.value - 5.0).abs() < 1e-12);
    assert!((e.observed_order.unwrap() - 2.0).abs() < 1e-9);
    assert!(!e.flagged);
    assert!(e.error_estimate >= (e.value - e.finest()).abs() - 1e-15);
    let c = extrapolate([2.0, 2.0, 2.0]);
    assert_eq!(c.error_estimate, 0.0);
    assert_eq!(c.value, 2.0);
    let bad = extrapolate([1.0, 1.2, 1.1]);
    assert!(bad.flagged);
    assert_eq!(bad.value, 1.1);
    assert!(bad.error_estimate >= 0.2 - 1e-12);
}

#[test]
fn extrapolation_error_covers_cubic_term() {
    let v = |h: f64| 1.0 + h * h + 4.0 * h * h * h;
    let e = extrapolate([v(0.2), v(0.1), v(0.05)]);
    assert!((e.value - 1.0).abs() <= e.error_estimate);
}

#[test]
fn clusters_group_close_values() {
    assert_eq!(cluster_ids(&[1.0, 2.0, 2.0 + 1e-9, 3.0]), vec![0, 1, 1, 2]);
    assert_eq!(cluster_ids(&[0.0, 1e-12, 5.0]), vec![0, 0, 1]);
}

#[test]
fn ode_oracle_matches_pi_squared() {
    let s = solve_interval_ode(&CoefficientSet::laplacian(), 0.0, 1.0, BoundaryCondition::Dirichlet, 3, MIN_ODE_GRID).unwrap();
    for k in 1..=3 {
        let exact = (k as f64 * PI).powi(2);
        assert!((s.eigenvalues[k - 1] / exact - 1.0).abs() < 1e-6);
        let err = s.error_estimates.as_ref().unwrap()[k - 1];
        assert!((s.eigenvalues[k - 1] - exact).abs() <= 2.0 * err);
    }
    let n = solve_interval_ode(&CoefficientSet::laplacian(), 0.0, 1.0, BoundaryCondition::Neumann, 3, MIN_ODE_GRID).unwrap();
    assert!(n.eigenvalues[0].abs() < 1e-9);
    assert!((n.eigenvalues[1] / (PI * PI) - 1.0).abs() < 1e-6);
}

#[test]
fn ode_oracle_agrees_with_fem() {
    let c = bump().with_potential(ScalarField::new("x", |p| p[0]));
    let (dir, _) = interval_pairs(512, &c);
    let fem = solve_lowest(&dir, 3).unwrap();
    let ode = solve_interval_ode(&c, 0.0, 1.0, BoundaryCondition::Dirichlet, 3, MIN_ODE_GRID).unwrap();
    for (a, b) in fem.eigenvalues.iter().zip(&ode.eigenvalues) {
        assert!((a / b - 1.0).abs() < 1e-4, "{a} vs {b}");
    }
}

#[test]
fn tracking_across_nested_meshes() {
    let m0 = Arc::new(make_rectangle(0.0, 1.0, 0.0, 1.0, 1.0 / 8.0).unwrap());
    let m1 = Arc::new(m0.refine());
    let m2 = Arc::new(m1.refine());
    let s: Vec<Spectrum> = [&m0, &m1, &m2]
        .iter()
        .map(|m| solve_lowest(&restrict_dirichlet(&assemble(m, &CoefficientSet::laplacian(), 2).unwrap()).unwrap(), 4).unwrap())
        .collect();
    let e = track_eigenvalue([&s[0], &s[1], &s[2]], 0).unwrap();
    assert!((e.value / (2.0 * PI * PI) - 1.0).abs() < 1e-3);
    assert!(e.observed_order.unwrap() > 1.5);
    let e3 = track_eigenvalue([&s[0], &s[1], &s[2]], 3).unwrap();
    assert!((e3.value / (8.0 * PI * PI) - 1.0).abs() < 1e-2);
}

#[test]
fn csv_has_one_row_per_eigenvalue() {
    let (dir, _) = interval_pairs(64, &CoefficientSet::laplacian());
    let s = solve_lowest(&dir, 3).unwrap();
    let csv = s.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "index,eigenvalue,residual,cluster_id");
    assert_eq!(lines.len(), 4);
    let v: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(v, s.eigenvalues[0]);
}
