#![allow(dead_code)]

use tubelab::geometry::{normalize_center, Curve, GeometryConfig, Manifold};

pub fn manifold(descriptor: &str, n: usize) -> Manifold {
    GeometryConfig::named(descriptor, n).build().unwrap()
}

/// Unit-speed version of a named curve.
pub fn unit_curve(descriptor: &str, n: usize) -> Curve {
    match normalize_center(&manifold(descriptor, n)).unwrap() {
        Manifold::Curve(c) => c,
        _ => panic!("{descriptor} is not a curve"),
    }
}

pub fn circle_arc() -> Manifold {
    manifold("circle-arc", 3)
}

pub fn stereographic_arc() -> Manifold {
    manifold("stereographic-cap 1 2", 3)
}

/// The three curves used for transport checks.
pub fn transport_curves() -> Vec<Curve> {
    vec![
        unit_curve("circle-arc", 3),
        unit_curve("helix-arc", 3),
        unit_curve("stereographic-cap 1 2", 3),
    ]
}
