mod common;

use std::f64::consts::PI;
use std::sync::OnceLock;

use proptest::prelude::*;
use tubelab::geometry::{
    build_tube_grid, normal_transport, Curve, CurveKind, GridResolution, Region, TransportedFrame,
};
use tubelab::Vector;

fn frames() -> &'static Vec<(Curve, TransportedFrame)> {
    static FRAMES: OnceLock<Vec<(Curve, TransportedFrame)>> = OnceLock::new();
    FRAMES.get_or_init(|| {
        common::transport_curves()
            .into_iter()
            .map(|c| {
                let f = normal_transport(&c, 801).unwrap();
                (c, f)
            })
            .collect()
    })
}

/// A vector in the normal space at t = 0.
fn normal_at_origin(curve: &Curve, v: [f64; 3]) -> Vector {
    let tangent = curve.d1(0.0);
    let v = Vector::from_row_slice(&v);
    &v - &tangent * tangent.dot(&v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn transport_preserves_inner_products(
        which in 0usize..3,
        a in prop::array::uniform3(-1.0f64..1.0),
        b in prop::array::uniform3(-1.0f64..1.0),
        node in 0usize..801,
    ) {
        let (curve, frame) = &frames()[which];
        let xi1 = normal_at_origin(curve, a);
        let xi2 = normal_at_origin(curve, b);
        let t = frame.params()[node];
        let psi1 = frame.transport(curve, &xi1, t);
        let psi2 = frame.transport(curve, &xi2, t);
        prop_assert!((psi1.dot(&psi2) - xi1.dot(&xi2)).abs() < 1e-7);
        prop_assert!(psi1.dot(&curve.d1(t)).abs() < 1e-8);
    }

    #[test]
    fn projection_of_a_foot_is_itself(
        which in 0usize..4,
        a in prop::array::uniform3(-0.3f64..0.3),
    ) {
        let m = match which {
            0 => common::manifold("circle", 3),
            1 => common::manifold("sphere 2 1.5", 3),
            2 => common::stereographic_arc(),
            _ => common::manifold("stereographic-cap 2 1", 4),
        };
        let base = match which {
            0 => Vector::from_vec(vec![1.0, 0.0, 0.0]),
            1 => Vector::from_vec(vec![0.0, 0.0, 1.5]),
            2 => Vector::from_vec(vec![0.0, -1.0, 0.0]),
            _ => Vector::from_vec(vec![0.0, 0.0, -1.0, 0.0]),
        };
        let mut x = base.clone();
        for (i, d) in a.iter().enumerate() {
            x[i] += d;
        }
        let foot = m.project(&x).unwrap();
        let again = m.project(&foot.foot).unwrap();
        prop_assert!(again.offset.norm() < 1e-10, "{}", again.offset.norm());
    }
}

/// Adaptive Simpson, independent of the library's Gauss–Legendre tables.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    step(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 40)
}

#[test]
fn helix_length_matches_independent_quadrature() {
    let raw = Curve::new(
        CurveKind::Helix {
            radius: 1.0,
            pitch: 1.0,
        },
        3,
        (0.0, 2.0 * PI),
        false,
    )
    .unwrap();
    let oracle = simpson(&|t| raw.d1(t).norm(), 0.0, 2.0 * PI, 1e-13);
    let unit = raw.reparametrize_arclength(1e-12).unwrap();
    assert!((unit.parameter_length() - oracle).abs() < 1e-9);
    assert!((oracle - 2.0 * PI * 2f64.sqrt()).abs() < 1e-10);
    let (a, b) = unit.interval();
    assert!(a <= 0.0 && 0.0 <= b);
}

#[test]
fn unit_speed_invariants_on_builtins() {
    for curve in common::transport_curves()
        .into_iter()
        .chain([common::unit_curve("circle", 3)])
    {
        for t in curve.samples(500) {
            assert!((curve.d1(t).norm() - 1.0).abs() < 1e-9);
            assert!(curve.d1(t).dot(&curve.d2(t)).abs() < 1e-8);
        }
    }
    let circle = common::unit_curve("circle", 3);
    let (a, b) = circle.interval();
    assert!((circle.eval(a) - circle.eval(b)).norm() < 1e-10);
    assert!((circle.d1(a) - circle.d1(b)).norm() < 1e-10);
}

#[test]
fn half_circle_of_radius_two_has_length_two_pi() {
    let raw = Curve::new(CurveKind::Circle { radius: 2.0 }, 3, (0.0, PI), false).unwrap();
    let unit = raw.reparametrize_arclength(1e-12).unwrap();
    assert!((unit.parameter_length() - 2.0 * PI).abs() < 1e-10);
}

#[test]
fn circle_of_radius_two_in_four_dimensions_matches_weyl_volume() {
    let tube = build_tube_grid(&common::manifold("circle 2", 4), 0.1, GridResolution::DEFAULT).unwrap();
    let exact = 2.0 * PI * 2.0 * (4.0 / 3.0) * PI * 1e-3;
    assert!((tube.grid().volume() / exact - 1.0).abs() < 5e-3);
}

#[test]
fn torus_lateral_area_matches_pappus() {
    let tube = build_tube_grid(&common::manifold("circle", 3), 0.1, GridResolution::DEFAULT).unwrap();
    let area = tube.grid().boundary_area(Some(Region::Lateral));
    assert!((area / (4.0 * PI * PI * 0.1) - 1.0).abs() < 5e-3);
}

#[test]
fn circle_reach_is_close_to_one() {
    let reach = common::manifold("circle", 3).reach_estimate();
    assert!((0.9..=1.0).contains(&reach), "{reach}");
}

#[test]
fn interior_nodes_stay_inside_and_normals_are_unit() {
    for m in [
        common::circle_arc(),
        common::stereographic_arc(),
        common::manifold("helix-arc", 3),
    ] {
        let tube = build_tube_grid(&m, 0.05, GridResolution::COARSE).unwrap();
        let curve = tube.curve().unwrap();
        for node in &tube.grid().interior {
            let foot = curve.project_from(&node.point, node.param).unwrap();
            assert!(foot.offset.norm() <= 0.05 + 1e-10);
        }
        for node in &tube.grid().boundary {
            assert!((node.normal.norm() - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn cap_projection_agrees_with_dense_search() {
    let cap = common::stereographic_arc();
    let chart = |y: f64| cap.chart(&[y]);
    let points = [
        [0.9, -0.6, 0.2],
        [-0.4, -1.2, -0.1],
        [1.1, 0.1, 0.05],
        [-0.2, -0.9, 0.3],
    ];
    for p in points {
        let x = Vector::from_row_slice(&p);
        let foot = cap.project(&x).unwrap();
        // dense argmin over the chart domain, then golden-section polish
        let count = 20_001;
        let (mut best, mut best_d) = (0.0, f64::INFINITY);
        for i in 0..count {
            let y = -2.0 + 4.0 * i as f64 / (count - 1) as f64;
            let d = (chart(y) - &x).norm();
            if d < best_d {
                best = y;
                best_d = d;
            }
        }
        let (mut lo, mut hi) = (best - 4.0 / count as f64, best + 4.0 / count as f64);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..100 {
            let (m1, m2) = (hi - g * (hi - lo), lo + g * (hi - lo));
            if (chart(m1) - &x).norm() < (chart(m2) - &x).norm() {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        let oracle = chart(0.5 * (lo + hi));
        assert!((oracle - &foot.foot).norm() < 1e-7, "{p:?}");
        let y = foot.chart.clone().unwrap();
        let tangent = cap.tangent_basis(&y);
        assert!((tangent.transpose() * &foot.offset).norm() < 1e-10);
    }
}

#[test]
fn chart_images_lie_on_the_sphere() {
    for (k, n) in [(1, 3), (2, 4), (3, 5)] {
        let cap = common::manifold(&format!("stereographic-cap {k} 3"), n);
        for i in 0..200 {
            let y: Vec<f64> = (0..k).map(|j| 2.9 * ((i * (j + 3)) as f64 * 0.37).sin()).collect();
            assert!((cap.chart(&y).norm() - 1.0).abs() < 1e-12);
            let basis = cap.tangent_basis(&y);
            let smallest = basis.clone().svd(false, false).singular_values.min();
            assert!(smallest > 1e-8);
        }
    }
}
