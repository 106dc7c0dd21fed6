mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tubelab::fields::{min_boundary_flux, node_deviations, sup_deviations, FieldKind, MultiplierField, DEFAULT_STEP};
use tubelab::geometry::{build_tube_grid, centerline_grid, GridResolution, Manifold};
use tubelab::Vector;

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    loop {
        let v = Vector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let norm = v.norm();
        if norm > 0.1 && norm <= 1.0 {
            return v / norm;
        }
    }
}

#[test]
fn trace_matches_reported_divergence() {
    let tube = build_tube_grid(&common::circle_arc(), 0.1, GridResolution::COARSE).unwrap();
    let field = MultiplierField::for_tube(FieldKind::CurveFieldV, &tube).unwrap();
    let nodes = node_deviations(&field, &tube, DEFAULT_STEP).unwrap();
    for (node, dev) in tube.grid().interior.iter().zip(&nodes) {
        let jac = field.jacobian(&node.point, DEFAULT_STEP, Some(node.param)).unwrap();
        assert!((jac.matrix.trace() - dev.divergence).abs() < 1e-8);
    }
}

#[test]
fn centerline_quadratic_form_of_the_curve_field_is_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for center in [common::circle_arc(), common::stereographic_arc()] {
        let field = MultiplierField::new(FieldKind::CurveFieldV, &center).unwrap();
        let curve = field.center().as_curve().unwrap().clone();
        for t in curve.samples(20) {
            let jac = field.jacobian(&curve.eval(t), DEFAULT_STEP, Some(t)).unwrap();
            for _ in 0..20 {
                let eta = random_unit(&mut rng, 3);
                assert!((jac.quadratic_form(&eta) - 1.0).abs() < 1e-5);
            }
        }
    }
}

#[test]
fn projection_field_quadratic_form_drops_the_tangent() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let field = MultiplierField::new(FieldKind::ProjectionField, &common::manifold("circle", 3)).unwrap();
    let curve = field.center().as_curve().unwrap().clone();
    for t in curve.samples(20) {
        let jac = field.jacobian(&curve.eval(t), DEFAULT_STEP, Some(t)).unwrap();
        let tangent = curve.d1(t);
        assert!((&jac.matrix * &tangent).norm() < 1e-6);
        for _ in 0..20 {
            let eta = random_unit(&mut rng, 3);
            let expected = 1.0 - eta.dot(&tangent).powi(2);
            assert!((jac.quadratic_form(&eta) - expected).abs() < 1e-6);
        }
    }
}

#[test]
fn centerline_divergence_targets() {
    let cases: Vec<(FieldKind, Manifold, f64)> = vec![
        (FieldKind::CurveFieldV, common::circle_arc(), 3.0),
        (FieldKind::ProjectionField, common::manifold("circle", 4), 3.0),
        (FieldKind::ManifoldField, common::manifold("sphere 2 1", 5), 3.0),
        (
            FieldKind::ManifoldField,
            common::manifold("stereographic-cap 2 1", 6),
            4.0,
        ),
    ];
    for (kind, center, m) in cases {
        let tube = centerline_grid(&center, 16).unwrap();
        let field = MultiplierField::for_tube(kind, &tube).unwrap();
        let bounds = sup_deviations(&field, &tube).unwrap();
        assert_eq!(bounds.target_m as f64, m);
        assert!(bounds.mu_div < 1e-6, "{kind:?}: {}", bounds.mu_div);
    }
}

#[test]
fn finite_differences_converge_at_second_order() {
    let field = MultiplierField::new(FieldKind::CurveFieldV, &common::circle_arc()).unwrap();
    let curve = field.center().as_curve().unwrap().clone();
    let t = 0.5;
    let x = curve.eval(t);
    let exact = curve.d1(t) + curve.d2(t) * t;
    let errors: Vec<f64> = [4e-2, 2e-2, 1e-2]
        .iter()
        .map(|&h| {
            let jac = field.jacobian(&x, h, Some(t)).unwrap();
            (&jac.matrix * curve.d1(t) - &exact).norm()
        })
        .collect();
    for pair in errors.windows(2) {
        let order = (pair[0] / pair[1]).log2();
        assert!(order > 1.8, "{errors:?}");
    }
}

#[test]
fn flux_minimum_matches_dense_boundary_sampling() {
    let eps = 0.1;
    let tube = build_tube_grid(&common::circle_arc(), eps, GridResolution::DEFAULT).unwrap();
    let field = MultiplierField::for_tube(FieldKind::CurveFieldV, &tube).unwrap();
    let curve = tube.curve().unwrap();
    let frame = tube.frame().unwrap();
    let (a, b) = curve.interval();
    let mut oracle = f64::INFINITY;
    // lateral surface
    for i in 0..=400 {
        let t = a + (b - a) * i as f64 / 400.0;
        for j in 0..64 {
            let angle = 2.0 * std::f64::consts::PI * j as f64 / 64.0;
            let psi = frame.offset(curve, t, &[eps * angle.cos(), eps * angle.sin()]);
            oracle = oracle.min(field.eval_tube_coords(t, &psi).dot(&(&psi / eps)));
        }
    }
    // end caps
    for (t, sign) in [(a, -1.0), (b, 1.0)] {
        for i in 0..=20 {
            for j in 0..64 {
                let rho = eps * i as f64 / 20.0;
                let angle = 2.0 * std::f64::consts::PI * j as f64 / 64.0;
                let psi = frame.offset(curve, t, &[rho * angle.cos(), rho * angle.sin()]);
                oracle = oracle.min(field.eval_tube_coords(t, &psi).dot(&(curve.d1(t) * sign)));
            }
        }
    }
    let computed = min_boundary_flux(&field, &tube);
    assert!(computed > 0.0);
    assert!((computed - oracle).abs() < 1e-9, "{computed} vs {oracle}");
}

#[test]
fn straight_tube_bounds_vanish() {
    let tube = build_tube_grid(&common::manifold("segment", 3), 0.2, GridResolution::COARSE).unwrap();
    let field = MultiplierField::for_tube(FieldKind::CurveFieldV, &tube).unwrap();
    let bounds = sup_deviations(&field, &tube).unwrap();
    assert!(bounds.mu_div < 1e-9 && bounds.mu_quad < 1e-9);
    assert!((bounds.flux_min - 0.2).abs() < 1e-12);
}

#[test]
fn deviations_shrink_with_the_thickness() {
    for center in [common::circle_arc(), common::stereographic_arc()] {
        let mut previous: Option<(f64, f64)> = None;
        for eps in [0.1, 0.05, 0.025, 0.01] {
            let tube = build_tube_grid(&center, eps, GridResolution::COARSE).unwrap();
            let field = MultiplierField::for_tube(FieldKind::CurveFieldV, &tube).unwrap();
            let b = sup_deviations(&field, &tube).unwrap();
            assert!(b.mu_div >= 0.0 && b.mu_quad >= 0.0);
            if let Some((div, quad)) = previous {
                assert!(b.mu_div <= div + 1e-6 && b.mu_quad <= quad + 1e-6);
            }
            previous = Some((b.mu_div, b.mu_quad));
            if eps == 0.01 {
                assert!(b.mu_div < 0.05 && b.mu_quad < 0.05, "{b:?}");
            }
        }
    }
}
