//! One-dimensional rules and the rotationally symmetric rules used for
//! normal disks and spheres.

use std::f64::consts::PI;

/// A quadrature rule as parallel node and weight vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        super::compensated_sum(self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)))
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1], nodes ascending.
///
/// Newton iteration on the three-term recurrence, started from the
/// Tricomi approximation of the roots.
pub fn gauss_legendre(count: usize) -> Rule {
    assert!(count >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; count];
    let mut weights = vec![0.0; count];
    let n = count as f64;
    for i in 0..count.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(count, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(count, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[count - 1 - i] = x;
        weights[i] = w;
        weights[count - 1 - i] = w;
    }
    if count % 2 == 1 {
        nodes[count / 2] = 0.0;
    }
    Rule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss–Legendre rule mapped to [a, b].
pub fn gauss_legendre_on(count: usize, a: f64, b: f64) -> Rule {
    let base = gauss_legendre(count);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    Rule {
        nodes: base.nodes.iter().map(|x| mid + half * x).collect(),
        weights: base.weights.iter().map(|w| half * w).collect(),
    }
}

/// Composite trapezoid rule with `intervals` equal panels (intervals + 1 nodes).
pub fn trapezoid(intervals: usize, a: f64, b: f64) -> Rule {
    assert!(intervals >= 1);
    let h = (b - a) / intervals as f64;
    let nodes = (0..=intervals).map(|j| a + h * j as f64).collect();
    let weights = (0..=intervals)
        .map(|j| if j == 0 || j == intervals { 0.5 * h } else { h })
        .collect();
    Rule { nodes, weights }
}

/// Periodic trapezoid rule: `count` equally spaced nodes, the endpoint b omitted.
pub fn periodic_trapezoid(count: usize, a: f64, b: f64) -> Rule {
    assert!(count >= 1);
    let h = (b - a) / count as f64;
    Rule {
        nodes: (0..count).map(|j| a + h * j as f64).collect(),
        weights: vec![h; count],
    }
}

/// Radial rule on [0, radius] for the measure r^(dim-1) dr.
pub fn radial_rule(count: usize, radius: f64, dim: usize) -> Rule {
    let base = gauss_legendre_on(count, 0.0, radius);
    let weights = base
        .nodes
        .iter()
        .zip(&base.weights)
        .map(|(&r, &w)| w * r.powi(dim as i32 - 1))
        .collect();
    Rule {
        nodes: base.nodes,
        weights,
    }
}

/// Unit vectors on the sphere S^(dim-1) ⊂ ℝ^dim with surface weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

/// Product rule on S^(dim-1): uniform in the azimuth, an exact Gauss-type rule
/// in the cosine of each polar angle, two points for dim = 1.
///
/// `angular` is the number of azimuthal nodes; polar angles use
/// `angular / 2` nodes rounded up to odd so the equator is always sampled.
pub fn sphere_rule(dim: usize, angular: usize) -> SphereRule {
    assert!(dim >= 1);
    match dim {
        1 => SphereRule {
            dim,
            points: vec![vec![1.0], vec![-1.0]],
            weights: vec![1.0, 1.0],
        },
        2 => {
            let m = angular.max(1);
            let h = 2.0 * PI / m as f64;
            SphereRule {
                dim,
                points: (0..m)
                    .map(|j| {
                        let phi = h * j as f64;
                        vec![phi.cos(), phi.sin()]
                    })
                    .collect(),
                weights: vec![h; m],
            }
        }
        _ => {
            let lower = sphere_rule(dim - 1, angular);
            let polar_count = (angular / 2).max(1) | 1;
            let polar = polar_rule(dim, polar_count);
            let mut points = Vec::with_capacity(polar.len() * lower.points.len());
            let mut weights = Vec::with_capacity(points.capacity());
            for (&z, &wz) in polar.nodes.iter().zip(&polar.weights) {
                let s = (1.0 - z * z).max(0.0).sqrt();
                for (y, &wy) in lower.points.iter().zip(&lower.weights) {
                    let mut p: Vec<f64> = y.iter().map(|v| v * s).collect();
                    p.push(z);
                    points.push(p);
                    weights.push(wz * wy);
                }
            }
            SphereRule { dim, points, weights }
        }
    }
}

/// Rule in z = cos θ for the measure (1 - z²)^((dim-3)/2) dz on [-1, 1].
///
/// Odd `dim` gives a polynomial weight, handled by Gauss–Legendre; even `dim`
/// factors out √(1 - z²) and uses the Chebyshev rule of the second kind.
fn polar_rule(dim: usize, count: usize) -> Rule {
    if dim % 2 == 1 {
        let power = ((dim - 3) / 2) as i32;
        let base = gauss_legendre(count);
        let weights = base
            .nodes
            .iter()
            .zip(&base.weights)
            .map(|(&z, &w)| w * (1.0 - z * z).powi(power))
            .collect();
        Rule {
            nodes: base.nodes,
            weights,
        }
    } else {
        let power = ((dim - 4) / 2) as i32;
        let m = count as f64;
        let (nodes, weights) = (1..=count)
            .map(|j| {
                let angle = j as f64 * PI / (m + 1.0);
                let z = angle.cos();
                let w = PI / (m + 1.0) * angle.sin().powi(2);
                (z, w * (1.0 - z * z).powi(power))
            })
            .unzip();
        Rule { nodes, weights }
    }
}

/// Surface area of the unit sphere S^(dim-1).
pub fn unit_sphere_area(dim: usize) -> f64 {
    // |S^(d-1)| = 2 π^(d/2) / Γ(d/2), via the recurrence |S^(d+1)| = 2π/d |S^(d-1)|.
    match dim {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        d => 2.0 * PI / (d as f64 - 2.0) * unit_sphere_area(d - 2),
    }
}

/// Volume of the unit ball in ℝ^dim.
pub fn unit_ball_volume(dim: usize) -> f64 {
    if dim == 0 {
        1.0
    } else {
        unit_sphere_area(dim) / dim as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        for count in 1..12 {
            let rule = gauss_legendre(count);
            assert_relative_eq!(rule.weights.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
            for degree in 0..(2 * count) {
                let exact = if degree % 2 == 1 {
                    0.0
                } else {
                    2.0 / (degree as f64 + 1.0)
                };
                let got = rule.integrate(|x| x.powi(degree as i32));
                assert!((got - exact).abs() < 1e-13, "n={count} deg={degree}");
            }
        }
    }

    #[test]
    fn known_three_point_rule() {
        let rule = gauss_legendre(3);
        assert_relative_eq!(rule.nodes[2], (0.6f64).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(rule.weights[0], 5.0 / 9.0, epsilon = 1e-15);
        assert_relative_eq!(rule.weights[1], 8.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn sphere_rules_integrate_area_and_moments() {
        for dim in 1..=5 {
            let rule = sphere_rule(dim, 12);
            let area: f64 = rule.weights.iter().sum();
            assert_relative_eq!(area, unit_sphere_area(dim), epsilon = 1e-12);
            for p in &rule.points {
                let norm: f64 = p.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert_relative_eq!(norm, 1.0, epsilon = 1e-14);
            }
            // ∫ x_0^2 = |S| / dim
            let second: f64 = rule
                .points
                .iter()
                .zip(&rule.weights)
                .map(|(p, w)| w * p[0] * p[0])
                .sum();
            assert_relative_eq!(second, unit_sphere_area(dim) / dim as f64, epsilon = 1e-12);
        }
    }

    #[test]
    fn ball_volumes() {
        assert_relative_eq!(unit_ball_volume(3), 4.0 * PI / 3.0, epsilon = 1e-15);
        assert_relative_eq!(unit_ball_volume(2), PI, epsilon = 1e-15);
        assert_relative_eq!(unit_ball_volume(4), PI * PI / 2.0, epsilon = 1e-15);
        let r = radial_rule(4, 0.5, 3);
        assert_relative_eq!(r.weights.iter().sum::<f64>(), 0.125 / 3.0, epsilon = 1e-15);
    }
}
