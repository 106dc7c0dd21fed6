mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use tubelab::fields::{FieldBounds, FieldKind};
use tubelab::geometry::{shell_grid, GridResolution};
use tubelab::identity::{
    ball_eigenfunction, base_coefficient, certificate_sweep, check_growth_condition, critical_exponent,
    identity_residual, nonexistence_certificate, residual_tolerance, Nonlinearity, PositionField, RadialData,
    TheoremTag, Threshold, Verdict,
};
use tubelab::radial::{find_radial_solution, AnnulusProblem};

fn bounds(mu_div: f64, mu_quad: f64, flux_min: f64) -> FieldBounds {
    let mut b = FieldBounds::zero(FieldKind::CurveFieldV, 3);
    b.mu_div = mu_div;
    b.mu_quad = mu_quad;
    b.flux_min = flux_min;
    b
}

proptest! {
    #[test]
    fn total_decreases_strictly_in_p(
        n in 3usize..9,
        p in 2.01f64..20.0,
        dp in 0.01f64..5.0,
        mu_div in 0.0f64..0.5,
        mu_quad in 0.0f64..0.5,
    ) {
        let b = bounds(mu_div, mu_quad, 0.1);
        let low = nonexistence_certificate(n, TheoremTag::CurveTube, 0, p, &b).unwrap();
        let high = nonexistence_certificate(n, TheoremTag::CurveTube, 0, p + dp, &b).unwrap();
        prop_assert!(high.total < low.total);
        if low.verdict == Verdict::CertifiedNonexistence {
            prop_assert_eq!(high.verdict, Verdict::CertifiedNonexistence);
        }
    }

    #[test]
    fn zero_bounds_certify_exactly_above_the_critical_exponent(
        m in 3usize..12,
        p in 2.01f64..12.0,
    ) {
        let b = FieldBounds::zero(FieldKind::ManifoldField, m);
        let n = m + 2;
        let cert = nonexistence_certificate(n, TheoremTag::ManifoldTube, 2, p, &b).unwrap();
        let critical = critical_exponent(m).unwrap();
        prop_assert_eq!(cert.verdict == Verdict::CertifiedNonexistence, p > critical);
        prop_assert_eq!(base_coefficient(m, p) < 0.0, p > critical);
    }

    // 2m/(m − 2) = 2 + 4/(m − 2) is an exact double when m − 2 is a power of
    // two; elsewhere the rounded exponent is genuinely on one side of the tie.
    #[test]
    fn exact_ties_are_inconclusive(shift in 0u32..6) {
        let m = 2 + (1usize << shift);
        let b = FieldBounds::zero(FieldKind::ManifoldField, m);
        let critical = critical_exponent(m).unwrap();
        let at = nonexistence_certificate(m + 2, TheoremTag::ManifoldTube, 2, critical, &b).unwrap();
        prop_assert_eq!(at.total, 0.0);
        prop_assert_eq!(at.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn scaling_the_nonlinearity_keeps_every_verdict(
        c in 0.01f64..100.0,
        p in 2.5f64..10.0,
        mu in 0.0f64..0.2,
    ) {
        let power = Nonlinearity::Power { p };
        // c·|t|^{p−2}t through a piecewise-linear table of its samples
        let table = |scale: f64| {
            let points: Vec<f64> = (0..=40).map(|i| -10.0 + 0.5 * i as f64).collect();
            let values = points.iter().map(|&t| scale * power.f(t)).collect();
            Nonlinearity::Table { points, values, p }
        };
        let base = check_growth_condition(&table(1.0), 101).unwrap();
        let scaled = check_growth_condition(&table(c), 101).unwrap();
        prop_assert_eq!(base.holds, scaled.holds);
        let b = bounds(mu, mu, 0.05);
        let first = nonexistence_certificate(3, TheoremTag::CurveTube, 0, p, &b).unwrap();
        let second = nonexistence_certificate(3, TheoremTag::CurveTube, 0, p, &b).unwrap();
        prop_assert_eq!(first, second);
    }
}

#[test]
fn ball_identity_converges() {
    let nl = Nonlinearity::Linear {
        lambda: PI * PI,
        p: 2.5,
    };
    let target = 2.0 * PI.powi(3);
    let mut errors = Vec::new();
    for (radial, angular) in [(3, 4), (6, 8), (12, 16)] {
        let grid = shell_grid(3, 0.0, 1.0, radial, angular).unwrap();
        let report = identity_residual(&ball_eigenfunction(1.0), &nl, &grid, &PositionField { dim: 3 }, "").unwrap();
        errors.push(((report.lhs - target).abs() + (report.rhs - target).abs()) / target);
    }
    assert!(errors[2] < 1e-10, "{errors:?}");
    assert!(errors[1] <= errors[0] / 4.0, "{errors:?}");
}

#[test]
fn annulus_solution_satisfies_the_identity_in_four_dimensions() {
    let problem = AnnulusProblem::new(4, 1.0, 2.0, 5.0).unwrap();
    let solution = find_radial_solution(&problem, 0).unwrap();
    let data = RadialData(|r: f64| solution.sample(r));
    let nl = Nonlinearity::Power { p: 5.0 };
    let field = PositionField { dim: 4 };
    let coarse = identity_residual(&data, &nl, &shell_grid(4, 1.0, 2.0, 16, 8).unwrap(), &field, "16x8").unwrap();
    let fine = identity_residual(&data, &nl, &shell_grid(4, 1.0, 2.0, 32, 16).unwrap(), &field, "32x16").unwrap();
    assert!(fine.relative_residual < residual_tolerance(&coarse, &fine), "{fine:?}");
    assert!(fine.relative_residual < 1e-4);
    assert!(fine.warnings.is_empty());
}

#[test]
fn segment_sweep_certifies_everything() {
    let sweep = certificate_sweep(
        &common::manifold("segment", 3),
        TheoremTag::CurveTube,
        7.0,
        &[0.3, 0.1, 0.05],
        GridResolution::COARSE,
    )
    .unwrap();
    assert_eq!(sweep.certificates.len(), 3);
    for cert in &sweep.certificates {
        assert_eq!(cert.verdict, Verdict::CertifiedNonexistence);
        assert!((cert.total + 1.0 / 14.0).abs() < 1e-12);
    }
    assert_eq!(sweep.threshold, Threshold::Certified { epsilon: 0.3 });
}

#[test]
fn closed_circle_with_projection_field_certifies_for_thin_tubes() {
    let sweep = certificate_sweep(
        &common::manifold("circle", 4),
        TheoremTag::ClosedCurveTube,
        12.0,
        &[0.1, 0.05],
        GridResolution::COARSE,
    )
    .unwrap();
    assert_eq!(
        sweep.certificates[1].verdict,
        Verdict::CertifiedNonexistence,
        "{:?}",
        sweep.certificates
    );
    assert!(matches!(sweep.threshold, Threshold::Certified { .. }));
}

#[test]
fn manifold_tag_rejects_low_codimension() {
    let b = FieldBounds::zero(FieldKind::ManifoldField, 2);
    assert!(nonexistence_certificate(4, TheoremTag::ManifoldTube, 2, 7.0, &b).is_err());
    assert!(critical_exponent(2).is_err());
}
