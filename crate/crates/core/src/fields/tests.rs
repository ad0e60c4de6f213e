use super::*;
use crate::geometry::{make_rectangle, Domain};
use crate::sampling::halton_points;

fn square(x0: f64, x1: f64) -> Domain {
    Domain::Polygon { vertices: vec![[x0, x0], [x1, x0], [x1, x1], [x0, x1]] }
}

#[test]
fn power_density_values() {
    let d = square(1.0, 2.0);
    let f = power_density(2.0, &d).unwrap();
    assert!((f.value([1.0, 1.0]) - 2.0).abs() < 1e-15);
    let g = power_density(-2.0, &square(1.0, 3.0)).unwrap();
    assert!((g.value([2.0, 0.0]) - 0.25).abs() < 1e-15);
    let h = power_density(1.0, &d).unwrap();
    for p in halton_points(&d, 50, |_| true) {
        assert!(crate::linalg::sym2_min_eigenvalue(&h.analytic_hessian(p).unwrap()) >= -1e-14);
    }
    assert!(f.eval([0.1, 0.1]).is_err());
    assert!(power_density(2.0, &square(-1.0, 1.0)).is_err());
}

#[test]
fn shifted_power_is_even() {
    let d = square(-1.0, 1.0);
    let f = shifted_power_density(1.0, 2.0, &d).unwrap();
    assert_eq!(f.value([0.0, 0.0]), 1.0);
    assert_eq!(f.analytic_gradient([0.0, 0.0]).unwrap(), [0.0, 0.0]);
    for p in halton_points(&d, 50, |_| true) {
        assert_eq!(f.value(p), f.value([-p[0], p[1]]));
        assert_eq!(f.value(p), f.value([p[0], -p[1]]));
    }
    assert_eq!((f.lower_bound(), f.upper_bound()), (1.0, 3.0000000000000004));
}

#[test]
fn directional_field_is_invariant_across() {
    let d = square(-1.0, 1.0);
    let f = directional_field(&Profile::exp(1.0), [1.0, 0.0], &d).unwrap();
    assert!((f.value([2f64.ln(), 7.0]) - 2.0).abs() < 1e-15);
    let s = 1e-4;
    for p in halton_points(&d, 100, |_| true) {
        let db = fd::directional(&|q| f.value(q), p, [0.0, 1.0], s, &|_| true);
        assert!(db.abs() < 1e-12);
    }
    let c = directional_field(&Profile::constant(3.0), [0.6, 0.8], &d).unwrap();
    assert_eq!(c.value([0.3, -0.9]), 3.0);
    assert!(directional_field(&Profile::exp(1.0), [1.0, 1.0], &d).is_err());
}

#[test]
fn exp_inverse_values_and_log_harmonicity() {
    let d = square(1.0, 2.0);
    let f = exp_inverse_density(&d).unwrap();
    assert!((f.value([1.0, 0.0]) - std::f64::consts::E).abs() < 1e-15);
    assert_eq!(f.value([0.0, 1.0]), 1.0);
    for p in halton_points(&d, 100, |_| true) {
        let lap = fd::laplacian(&|q| f.value(q).ln(), p, 1e-3, &|_| true);
        assert!(lap.abs() < 1e-5, "{lap}");
    }
}

#[test]
fn holomorphic_modulus_matches_closed_forms() {
    let d = square(1.0, 2.0);
    let one = holomorphic_modulus_density(&Holomorphic::one(), &d).unwrap();
    assert_eq!(one.value([1.3, 1.7]), 1.0);
    let z = holomorphic_modulus_density(&Holomorphic::identity(), &d).unwrap();
    let e = holomorphic_modulus_density(&Holomorphic::exp_half_inverse(), &d).unwrap();
    let ei = exp_inverse_density(&d).unwrap();
    for p in halton_points(&d, 100, |_| true) {
        assert!((z.value(p) - (p[0] * p[0] + p[1] * p[1])).abs() < 1e-12);
        assert!((e.value(p) - ei.value(p)).abs() < 1e-12 * ei.value(p));
        let (ga, gb) = (e.analytic_gradient(p).unwrap(), ei.analytic_gradient(p).unwrap());
        assert!((ga[0] - gb[0]).abs() < 1e-12 && (ga[1] - gb[1]).abs() < 1e-12);
    }
    let err = holomorphic_modulus_density(&Holomorphic::identity(), &square(-1.0, 1.0));
    assert!(matches!(err, Err(Error::Coefficient { .. })));
}

#[test]
fn analytic_derivatives_match_differences() {
    let d = square(1.0, 2.0);
    let pts = halton_points(&d, 100, |_| true);
    let fields = vec![
        power_density(2.0, &d).unwrap(),
        power_density(-2.0, &d).unwrap(),
        shifted_power_density(1.0, 3.0, &d).unwrap(),
        exp_inverse_density(&d).unwrap(),
        holomorphic_modulus_density(&Holomorphic::exp_half_inverse(), &d).unwrap(),
        directional_field(&Profile::quadratic(1.0, 1.0, -1.0), [0.6, 0.8], &d).unwrap(),
        sin_squared_field(0.5),
        quadratic_potential(-1.0, &d),
    ];
    for f in fields {
        let m = f.derivative_mismatch(&pts, d.diameter(), 2, DERIVATIVE_CHECK_STEP);
        assert!(m < 1e-6, "{}: {m:e}", f.name());
    }
}

#[test]
fn matrix_fields_and_pairs() {
    let b = block_matrix_field(1.0, &sin_squared_field(0.5)).unwrap();
    for p in halton_points(&square(0.0, 1.0), 50, |_| true) {
        let a = b.eval(p).unwrap();
        assert_eq!(crate::linalg::mat2_mul_vec(&a, [1.0, 0.0]), [1.0, 0.0]);
    }
    let c = constant_matrix_field(2.0, 1.0, 2.0).unwrap();
    let pairs = c.recorded_pairs();
    assert!((pairs[0].0 - 3.0).abs() < 1e-15 && (pairs[1].0 - 1.0).abs() < 1e-15);
    assert!(constant_matrix_field(1.0, 2.0, 1.0).is_err());
    assert_eq!(MatrixField::identity().recorded_pairs().len(), 2);
    let r = rotated_diagonal_field(1.0, 2.0).unwrap();
    assert!(r.eval([0.3, 0.1]).is_ok());
}

#[test]
fn transformed_field_moves_with_isometry() {
    let d = square(1.0, 2.0);
    let f = exp_inverse_density(&d).unwrap();
    let q = [[0.0, -1.0], [1.0, 0.0]];
    let t = [0.5, -2.0];
    let g = f.transformed(q, t);
    let x = [1.3, 1.6];
    let y = [q[0][0] * x[0] + q[0][1] * x[1] + t[0], q[1][0] * x[0] + q[1][1] * x[1] + t[1]];
    assert!((g.value(y) - f.value(x)).abs() < 1e-15);
    let gx = f.analytic_gradient(x).unwrap();
    let gy = g.analytic_gradient(y).unwrap();
    assert!((gy[0] - (q[0][0] * gx[0] + q[0][1] * gx[1])).abs() < 1e-14);
    assert!(g.allows(y));
}

#[test]
fn linear_phase_for_constant_density() {
    let m = Arc::new(make_rectangle(0.0, 1.0, 0.0, 1.0, 0.25).unwrap());
    let (phase, diag) = construct_harmonic_phase(&ScalarField::constant(1.0), [0.0, 0.0], &m).unwrap();
    let h = phase.field(0.0);
    for &p in m.nodes() {
        assert!((h.value(p) - p[0]).abs() < 1e-12);
    }
    assert!(diag.gradient_residual < 1e-12 && diag.laplacian_residual < 1e-12);
}

#[test]
fn saddle_phase_rotations() {
    let ph = HarmonicPhase::saddle();
    let rho = power_density(2.0, &square(1.0, 2.0)).unwrap();
    for k in 0..4 {
        let h = ph.field(k as f64 * std::f64::consts::FRAC_PI_4);
        let p = [1.2, 1.7];
        let g = h.analytic_gradient(p).unwrap();
        assert!((g[0] * g[0] + g[1] * g[1] - rho.value(p)).abs() < 1e-13);
        let hs = h.analytic_hessian(p).unwrap();
        assert!((hs[0][0] + hs[1][1]).abs() < 1e-15);
    }
    assert!((ph.field(0.0).value([2.0, 1.0]) - 1.5).abs() < 1e-15);
}

#[test]
fn constructed_phase_converges_quadratically() {
    let d = square(1.0, 2.0);
    let rho = holomorphic_modulus_density(&Holomorphic::identity(), &d).unwrap();
    let mut m = Arc::new(make_rectangle(1.0, 2.0, 1.0, 2.0, 0.25).unwrap());
    let mut res = Vec::new();
    for _ in 0..3 {
        let (_, diag) = construct_harmonic_phase(&rho, [1.0, 1.0], &m).unwrap();
        assert!(diag.cycle_closure_residual < 1e-5, "{diag:?}");
        res.push((diag.gradient_residual, diag.laplacian_residual));
        m = Arc::new(m.refine());
    }
    for w in res.windows(2) {
        assert!((w[0].0 / w[1].0).log2() >= 1.8, "{res:?}");
        assert!((w[0].1 / w[1].1).log2() >= 1.8, "{res:?}");
    }
    // oracle: the conjugate vanishes at z0 = 1 + i, so Psi' = z e^{-i arg z0}
    // and h = Re(e^{-i pi/4} (z^2 - z0^2) / 2)
    let (ph, _) = construct_harmonic_phase(&rho, [1.0, 1.0], &m).unwrap();
    let h = ph.field(0.0);
    let z0 = Complex64::new(1.0, 1.0);
    for p in [[1.55, 1.35], [1.9, 1.1], [1.2, 1.8]] {
        let z = Complex64::new(p[0], p[1]);
        let exact = (Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4) * (z * z - z0 * z0) * 0.5).re;
        assert!((h.value(p) - exact).abs() < 1e-3, "{} vs {exact}", h.value(p));
    }
}

#[test]
fn constructed_phase_for_exp_inverse() {
    let d = square(1.0, 2.0);
    let rho = exp_inverse_density(&d).unwrap();
    let m = Arc::new(make_rectangle(1.0, 2.0, 1.0, 2.0, 1.0 / 32.0).unwrap());
    let (ph, diag) = construct_harmonic_phase(&rho, [1.5, 1.5], &m).unwrap();
    assert!(diag.gradient_residual < 1e-3, "{diag:?}");
    let h = ph.field(0.0);
    assert!(h.value([1.5, 1.5]).abs() < 1e-3);
}

#[test]
fn phase_rejects_non_log_harmonic_density() {
    let d = square(1.0, 2.0);
    let rho = shifted_power_density(1.0, 2.0, &d).unwrap();
    let m = Arc::new(make_rectangle(1.0, 2.0, 1.0, 2.0, 0.25).unwrap());
    assert!(matches!(construct_harmonic_phase(&rho, [1.0, 1.0], &m), Err(Error::Hypothesis(_))));
}
