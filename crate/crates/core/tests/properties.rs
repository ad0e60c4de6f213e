//! Property tests of the invariants: derivative consistency, Galerkin
//! monotonicity, orthonormality, density scaling, certificate invariances.

use std::sync::Arc;

use proptest::prelude::*;

use dn_spectra::config::parse_config;
use dn_spectra::eigen::{cluster_ids, extrapolate, solve_lowest, Spectrum};
use dn_spectra::fem::{assemble, restrict_dirichlet, OperatorPair};
use dn_spectra::fields::{directional_field, power_density, CoefficientSet, Profile, ScalarField};
use dn_spectra::geometry::{make_interval, Mesh};
use dn_spectra::verify::{assemble_certificate, DomainSpec, Trial, TrialTag, Verdict, CERTIFICATE_TOL};
use dn_spectra::Error;

fn interval_density(a: f64, b: f64) -> CoefficientSet {
    // 1 + a x^2 + b x stays positive on [0, 1] for the sampled ranges
    CoefficientSet::new(ScalarField::new("poly", move |p| 1.0 + a * p[0] * p[0] + b * p[0]).with_bounds(0.2, 4.0))
}

fn interval_pairs(mesh: &Arc<Mesh>, coeffs: &CoefficientSet) -> (OperatorPair, OperatorPair) {
    let neu = assemble(mesh, coeffs, 3).unwrap();
    (restrict_dirichlet(&neu).unwrap(), neu)
}

fn lowest(pair: &OperatorPair, n: usize) -> Spectrum {
    solve_lowest(pair, n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn power_density_derivatives_match_differences(alpha in -2.5f64..3.0, x in 1.0f64..2.0, y in 1.0f64..2.0) {
        let d = DomainSpec::Rect { x0: 1.0, x1: 2.0, y0: 1.0, y1: 2.0 }.domain(0.5).unwrap();
        let rho = power_density(alpha, &d).unwrap();
        prop_assert!(rho.derivative_mismatch(&[[x, y]], d.diameter(), 2, 1e-4) < 1e-4);
    }

    #[test]
    fn directional_derivatives_match_differences(
        c1 in -1.0f64..1.0, c2 in -0.3f64..0.3, angle in 0.0f64..6.28, x in 0.0f64..1.0, y in 0.0f64..1.0,
    ) {
        let d = DomainSpec::unit_square().domain(0.5).unwrap();
        let xi = [angle.cos(), angle.sin()];
        let rho = directional_field(&Profile::quadratic(2.0, c1, c2), xi, &d).unwrap();
        prop_assert!(rho.derivative_mismatch(&[[x, y]], d.diameter(), 2, 1e-4) < 1e-4);
    }

    #[test]
    fn extrapolation_is_exact_for_quadratic_models(limit in -10.0f64..10.0, c in -5.0f64..5.0, h in 0.01f64..0.2) {
        let v = |s: f64| limit + c * s * s;
        let e = extrapolate([v(h), v(h / 2.0), v(h / 4.0)]);
        prop_assert!((e.value - limit).abs() <= 1e-9 * (1.0 + limit.abs() + c.abs()));
    }

    #[test]
    fn refinement_never_raises_eigenvalues(a in -0.5f64..2.0, b in -0.3f64..1.0) {
        let coeffs = interval_density(a, b);
        let coarse = Arc::new(make_interval(0.0, 1.0, 24).unwrap());
        let fine = Arc::new(coarse.refine());
        let (dc, nc) = interval_pairs(&coarse, &coeffs);
        let (df, nf) = interval_pairs(&fine, &coeffs);
        for (c, f) in [(lowest(&dc, 6), lowest(&df, 6)), (lowest(&nc, 6), lowest(&nf, 6))] {
            for k in 0..6 {
                prop_assert!(f.value(k) <= c.value(k) + 1e-10 * c.value(k).abs().max(1.0));
            }
        }
    }

    #[test]
    fn spectra_are_mass_orthonormal_and_ordered(a in -0.5f64..2.0, b in -0.3f64..1.0, n in 16usize..80) {
        let coeffs = interval_density(a, b);
        let mesh = Arc::new(make_interval(0.0, 1.0, n).unwrap());
        let (dir, neu) = interval_pairs(&mesh, &coeffs);
        let (l, m) = (lowest(&dir, 8), lowest(&neu, 8));
        prop_assert!(l.orthonormality_error <= 1e-8 && m.orthonormality_error <= 1e-8);
        for k in 0..8 {
            prop_assert!(m.value(k) <= l.value(k) + 1e-10 * l.value(k));
        }
        prop_assert!(l.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn density_scaling_divides_the_spectrum(c in 0.01f64..100.0, a in 0.0f64..2.0) {
        let mesh = Arc::new(make_interval(0.0, 1.0, 40).unwrap());
        let base = interval_density(a, 0.0);
        let scaled = CoefficientSet::new(base.rho.scaled(c));
        let (d1, _) = interval_pairs(&mesh, &base);
        let (d2, _) = interval_pairs(&mesh, &scaled);
        let (s1, s2) = (lowest(&d1, 5), lowest(&d2, 5));
        for k in 0..5 {
            prop_assert!((c * s2.value(k) / s1.value(k) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn certificates_bound_the_spectrum_and_ignore_scaling(
        seed in proptest::collection::vec(-1.0f64..1.0, 4), scale in prop_oneof![-50.0f64..-0.02, 0.02f64..50.0], mix in -3.0f64..3.0,
    ) {
        let mesh = Arc::new(make_interval(0.0, 1.0, 48).unwrap());
        let (dir, neu) = interval_pairs(&mesh, &interval_density(1.0, 0.0));
        let spec = lowest(&dir, 3);
        let f = |x: f64| seed[0] + seed[1] * x + seed[2] * (3.0 * x).cos() + seed[3] * x * x * x;
        let nodal: Vec<f64> = mesh.nodes().iter().map(|p| f(p[0])).collect();
        prop_assume!(nodal.iter().any(|v| v.abs() > 1e-3));
        let tag = TrialTag::Other { label: "poly".into() };
        let base = assemble_certificate(&neu, &spec, 2, &[Trial::real(nodal.clone(), tag.clone(), &neu)], spec.value(1), CERTIFICATE_TOL).unwrap();
        // min-max: the pencil certifies k + r Neumann eigenvalues below q_max
        let mu = lowest(&neu, 4);
        prop_assert!(mu.value(base.k + base.r - 1) <= base.q_max + 1e-9);

        let scaled: Vec<f64> = nodal.iter().map(|v| scale * v).collect();
        let c = assemble_certificate(&neu, &spec, 2, &[Trial::real(scaled, tag.clone(), &neu)], spec.value(1), CERTIFICATE_TOL).unwrap();
        prop_assert!((c.q_max / base.q_max - 1.0).abs() < 1e-12);

        // same span: add a multiple of the first Dirichlet eigenvector
        let phi = spec.nodal(0);
        let mixed: Vec<f64> = nodal.iter().zip(&phi).map(|(v, p)| v + mix * p).collect();
        let c = assemble_certificate(&neu, &spec, 2, &[Trial::real(mixed, tag, &neu)], spec.value(1), CERTIFICATE_TOL).unwrap();
        prop_assert!((c.q_max / base.q_max - 1.0).abs() < 1e-12);
    }

    #[test]
    fn verdicts_are_antisymmetric(margin in -10.0f64..10.0, err in 0.0f64..5.0) {
        let v = Verdict::classify(margin, err);
        let w = Verdict::classify(-margin, err);
        prop_assert_eq!(v == Verdict::Holds, w == Verdict::Violated);
        prop_assert_eq!(v == Verdict::HoldsWithinTolerance, w == Verdict::HoldsWithinTolerance);
    }

    #[test]
    fn cluster_ids_are_nondecreasing(mut values in proptest::collection::vec(0.0f64..100.0, 1..30)) {
        values.sort_by(f64::total_cmp);
        let ids = cluster_ids(&values);
        prop_assert_eq!(ids[0], 0);
        prop_assert!(ids.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1));
    }

    #[test]
    fn config_errors_report_the_offending_line(pos in 0usize..5) {
        let mut lines = vec!["domain = rect", "rho = const{c=2}", "theorem = trivial", "h = 0.5", "levels = 1"];
        lines.insert(pos, "no equals sign here");
        match parse_config(&lines.join("\n")) {
            Err(Error::Config { line, .. }) => prop_assert_eq!(line, pos + 1),
            other => prop_assert!(false, "unexpected {:?}", other.map(|c| c.name)),
        }
    }
}
