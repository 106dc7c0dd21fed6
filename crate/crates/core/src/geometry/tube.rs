//! Quadrature grids for tubular domains and for balls and annuli.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::curve::Curve;
use crate::geometry::frame::{normal_transport, TransportedFrame};
use crate::geometry::manifold::Manifold;
use crate::numerics::compensated_sum;
use crate::numerics::quadrature::{
    gauss_legendre_on, periodic_trapezoid, radial_rule, sphere_rule, trapezoid, Rule, SphereRule,
};
use crate::Vector;

/// Node counts per grid direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridResolution {
    /// Intervals along the center (curve parameter, chart radius or sphere azimuth).
    pub center: usize,
    /// Gauss–Legendre nodes in the normal radius.
    pub radial: usize,
    /// Azimuthal nodes of the normal-sphere rule.
    pub angular: usize,
}

impl GridResolution {
    pub const COARSE: Self = Self {
        center: 32,
        radial: 3,
        angular: 8,
    };
    pub const DEFAULT: Self = Self {
        center: 64,
        radial: 4,
        angular: 12,
    };
    pub const FINE: Self = Self {
        center: 128,
        radial: 6,
        angular: 16,
    };

    pub fn new(center: usize, radial: usize, angular: usize) -> Result<Self> {
        if center < 2 || radial < 1 || angular < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid resolution {center}x{radial}x{angular} is too small (need at least 2x1x2)"
            )));
        }
        Ok(Self {
            center,
            radial,
            angular,
        })
    }

    /// Every direction doubled.
    pub fn doubled(self) -> Self {
        Self {
            center: 2 * self.center,
            radial: 2 * self.radial,
            angular: 2 * self.angular,
        }
    }
}

impl Default for GridResolution {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl fmt::Display for GridResolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.center, self.radial, self.angular)
    }
}

/// Accepts `coarse`, `default`, `fine` or an explicit `CxRxA` triple.
impl FromStr for GridResolution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "coarse" => Ok(Self::COARSE),
            "default" => Ok(Self::DEFAULT),
            "fine" => Ok(Self::FINE),
            other => {
                let parts: Vec<&str> = other.split('x').collect();
                let parsed: Option<Vec<usize>> = parts.iter().map(|p| p.trim().parse().ok()).collect();
                match parsed.as_deref() {
                    Some([c, r, a]) => Self::new(*c, *r, *a),
                    _ => Err(Error::Parse(format!(
                        "resolution must be coarse, default, fine or CxRxA, got '{s}'"
                    ))),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    Interior,
    Lateral,
    CapA,
    CapB,
    /// Boundary of a cap-shaped center swept by the normal disks.
    Rim,
    /// Outer or inner sphere of a ball or annulus grid.
    Sphere,
}

impl Region {
    pub fn tag(self) -> &'static str {
        match self {
            Region::Interior => "interior",
            Region::Lateral => "lateral",
            Region::CapA => "cap-a",
            Region::CapB => "cap-b",
            Region::Rim => "rim",
            Region::Sphere => "sphere",
        }
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "interior" => Region::Interior,
            "lateral" => Region::Lateral,
            "cap-a" => Region::CapA,
            "cap-b" => Region::CapB,
            "rim" => Region::Rim,
            "sphere" => Region::Sphere,
            other => return Err(Error::Parse(format!("unknown region tag '{other}'"))),
        })
    }
}

/// Interior quadrature node.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadNode {
    pub point: Vector,
    pub weight: f64,
    /// Curve parameter of the center sample (NaN when the center is not a curve).
    pub param: f64,
    /// Normal offset ψ from the center sample.
    pub offset: Vector,
}

/// Boundary quadrature node with its outward unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryNode {
    pub point: Vector,
    pub weight: f64,
    pub normal: Vector,
    pub region: Region,
    pub param: f64,
    pub offset: Vector,
}

/// Interior and boundary nodes of a bounded domain.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuadGrid {
    pub interior: Vec<QuadNode>,
    pub boundary: Vec<BoundaryNode>,
}

impl QuadGrid {
    pub fn volume(&self) -> f64 {
        compensated_sum(self.interior.iter().map(|q| q.weight))
    }

    /// Total boundary weight, optionally restricted to one region.
    pub fn boundary_area(&self, region: Option<Region>) -> f64 {
        compensated_sum(
            self.boundary
                .iter()
                .filter(|b| region.is_none_or(|r| b.region == r))
                .map(|b| b.weight),
        )
    }
}

/// A tube of thickness ε around a curve or manifold with its quadrature grid.
#[derive(Debug, Clone)]
pub struct TubeDomain {
    center: Manifold,
    frame: Option<TransportedFrame>,
    epsilon: f64,
    reach: f64,
    resolution: Option<GridResolution>,
    grid: QuadGrid,
}

impl TubeDomain {
    /// Center geometry; curves are always unit-speed here.
    pub fn center(&self) -> &Manifold {
        &self.center
    }

    pub fn curve(&self) -> Option<&Curve> {
        self.center.as_curve()
    }

    pub fn frame(&self) -> Option<&TransportedFrame> {
        self.frame.as_ref()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn reach(&self) -> f64 {
        self.reach
    }

    /// None for centerline-only grids.
    pub fn resolution(&self) -> Option<GridResolution> {
        self.resolution
    }

    pub fn grid(&self) -> &QuadGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.center.ambient_dim()
    }

    pub fn is_centerline(&self) -> bool {
        self.resolution.is_none()
    }
}

/// Unit-speed curve for a one-dimensional center, or the manifold unchanged.
pub fn normalize_center(center: &Manifold) -> Result<Manifold> {
    match center {
        Manifold::Curve(c) if c.is_unit_speed() => Ok(center.clone()),
        Manifold::Curve(c) => Ok(Manifold::Curve(c.reparametrize_arclength(1e-12)?)),
        m if m.k() == 1 => Ok(Manifold::Curve(m.to_curve()?)),
        m => Ok(m.clone()),
    }
}

fn frame_nodes(resolution: GridResolution) -> usize {
    (16 * resolution.center + 1).max(2049)
}

fn center_rule(curve: &Curve, count: usize) -> Rule {
    let (a, b) = curve.interval();
    if curve.is_closed() {
        periodic_trapezoid(count, a, b)
    } else {
        trapezoid(count, a, b)
    }
}

/// Point γ(t) + ψ(ξ, t) and the volume factor 1 − ψ·γ″(t), where ξ lies in
/// the normal space at parameter 0.
pub fn tube_point(curve: &Curve, frame: &TransportedFrame, t: f64, xi: &Vector) -> Result<(Vector, f64)> {
    let (a, b) = curve.interval();
    if !(t >= a - 1e-12 && t <= b + 1e-12) {
        return Err(Error::OutsideDomain(format!("parameter {t} outside [{a}, {b}]")));
    }
    let psi = frame.transport(curve, xi, t);
    let jet = curve.jet(t);
    let weight = 1.0 - psi.dot(&jet.d2);
    if weight <= 0.0 {
        return Err(Error::NonPositiveJacobian { parameter: t, weight });
    }
    Ok((jet.point + psi, weight))
}

/// Product grid over the tube of thickness `epsilon` around `center`.
pub fn build_tube_grid(center: &Manifold, epsilon: f64, resolution: GridResolution) -> Result<TubeDomain> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "thickness must be positive, got {epsilon}"
        )));
    }
    let center = normalize_center(center)?;
    let reach = center.reach_estimate();
    if epsilon >= reach {
        return Err(Error::BeyondReach { epsilon, reach });
    }
    let (grid, frame) = match &center {
        Manifold::Curve(curve) => {
            let frame = normal_transport(curve, frame_nodes(resolution))?;
            (curve_tube_grid(curve, &frame, epsilon, resolution)?, Some(frame))
        }
        Manifold::Sphere { k, radius, .. } => (sphere_tube_grid(&center, *k, *radius, epsilon, resolution)?, None),
        Manifold::StereographicCap { k, r, .. } => (cap_tube_grid(&center, *k, *r, epsilon, resolution)?, None),
    };
    Ok(TubeDomain {
        center,
        frame,
        epsilon,
        reach,
        resolution: Some(resolution),
        grid,
    })
}

/// Interior nodes on the center only (ψ = 0), weighted by the center measure.
pub fn centerline_grid(center: &Manifold, count: usize) -> Result<TubeDomain> {
    if count < 2 {
        return Err(Error::InvalidParameter(format!(
            "centerline grid needs at least 2 nodes, got {count}"
        )));
    }
    let center = normalize_center(center)?;
    let reach = center.reach_estimate();
    let n = center.ambient_dim();
    let interior: Vec<QuadNode> = match &center {
        Manifold::Curve(curve) => {
            let rule = center_rule(curve, count);
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&t, &w)| QuadNode {
                    point: curve.eval(t),
                    weight: w,
                    param: t,
                    offset: Vector::zeros(n),
                })
                .collect()
        }
        Manifold::Sphere { k, radius, .. } => {
            let rule = sphere_rule(k + 1, count);
            rule.points
                .iter()
                .zip(&rule.weights)
                .map(|(p, &w)| QuadNode {
                    point: embed(p, n) * *radius,
                    weight: w * radius.powi(*k as i32),
                    param: f64::NAN,
                    offset: Vector::zeros(n),
                })
                .collect()
        }
        Manifold::StereographicCap { k, r, .. } => chart_samples(*k, *r, count, count)
            .into_iter()
            .map(|(y, w)| QuadNode {
                point: center.chart(&y),
                weight: w,
                param: f64::NAN,
                offset: Vector::zeros(n),
            })
            .collect(),
    };
    Ok(TubeDomain {
        center,
        frame: None,
        epsilon: 0.0,
        reach,
        resolution: None,
        grid: QuadGrid {
            interior,
            boundary: Vec::new(),
        },
    })
}

fn embed(p: &[f64], n: usize) -> Vector {
    let mut v = Vector::zeros(n);
    for (i, x) in p.iter().enumerate() {
        v[i] = *x;
    }
    v
}

fn combine(basis: &[Vector], coords: &[f64], n: usize) -> Vector {
    let mut v = Vector::zeros(n);
    for (e, c) in basis.iter().zip(coords) {
        v += e * *c;
    }
    v
}

fn curve_tube_grid(curve: &Curve, frame: &TransportedFrame, epsilon: f64, res: GridResolution) -> Result<QuadGrid> {
    let n = curve.dim();
    let t_rule = center_rule(curve, res.center);
    let r_rule = radial_rule(res.radial, epsilon, n - 1);
    let normal_sphere = sphere_rule(n - 1, res.angular);
    let lateral_scale = epsilon.powi(n as i32 - 2);

    let slices: Vec<Result<QuadGrid>> = t_rule
        .nodes
        .par_iter()
        .zip(t_rule.weights.par_iter())
        .map(|(&t, &wt)| {
            let jet = curve.jet(t);
            let basis = frame.at(curve, t);
            let mut slice = QuadGrid::default();
            for (omega, &wo) in normal_sphere.points.iter().zip(&normal_sphere.weights) {
                let direction = combine(&basis, omega, n);
                let bend = direction.dot(&jet.d2);
                for (&r, &wr) in r_rule.nodes.iter().zip(&r_rule.weights) {
                    let jac = 1.0 - r * bend;
                    if jac <= 0.0 {
                        return Err(Error::NonPositiveJacobian {
                            parameter: t,
                            weight: jac,
                        });
                    }
                    let offset = &direction * r;
                    slice.interior.push(QuadNode {
                        point: &jet.point + &offset,
                        weight: wt * wr * wo * jac,
                        param: t,
                        offset,
                    });
                }
                let jac = 1.0 - epsilon * bend;
                if jac <= 0.0 {
                    return Err(Error::NonPositiveJacobian {
                        parameter: t,
                        weight: jac,
                    });
                }
                let offset = &direction * epsilon;
                slice.boundary.push(BoundaryNode {
                    point: &jet.point + &offset,
                    weight: wt * wo * jac * lateral_scale,
                    normal: direction,
                    region: Region::Lateral,
                    param: t,
                    offset,
                });
            }
            Ok(slice)
        })
        .collect();

    let mut grid = QuadGrid::default();
    for slice in slices {
        let slice = slice?;
        grid.interior.extend(slice.interior);
        grid.boundary.extend(slice.boundary);
    }
    if !curve.is_closed() {
        let (a, b) = curve.interval();
        let disk_rule = radial_rule(res.radial, epsilon, n - 1);
        for (t, region, sign) in [(a, Region::CapA, -1.0), (b, Region::CapB, 1.0)] {
            let jet = curve.jet(t);
            let basis = frame.at(curve, t);
            let normal = &jet.d1 * sign;
            for (omega, &wo) in normal_sphere.points.iter().zip(&normal_sphere.weights) {
                let direction = combine(&basis, omega, n);
                for (&r, &wr) in disk_rule.nodes.iter().zip(&disk_rule.weights) {
                    let offset = &direction * r;
                    grid.boundary.push(BoundaryNode {
                        point: &jet.point + &offset,
                        weight: wr * wo,
                        normal: normal.clone(),
                        region,
                        param: t,
                        offset,
                    });
                }
            }
        }
    }
    Ok(grid)
}

/// Interior and lateral nodes of the normal disk at a sphere-type foot, with
/// volume factor (1 + s/R)^k where s is the outward radial component of ψ.
#[allow(clippy::too_many_arguments)]
fn sphere_fibre(
    center: &Manifold,
    foot: &Vector,
    k: usize,
    radius: f64,
    epsilon: f64,
    weight: f64,
    r_rule: &Rule,
    normal_sphere: &SphereRule,
    grid: &mut QuadGrid,
) {
    let n = center.ambient_dim();
    let basis = center.sphere_normal_basis(foot);
    let lateral_scale = epsilon.powi((n - k) as i32 - 1);
    for (omega, &wo) in normal_sphere.points.iter().zip(&normal_sphere.weights) {
        let direction = combine(&basis, omega, n);
        let lift = omega[0] / radius;
        for (&r, &wr) in r_rule.nodes.iter().zip(&r_rule.weights) {
            let offset = &direction * r;
            grid.interior.push(QuadNode {
                point: foot + &offset,
                weight: weight * wr * wo * (1.0 + r * lift).powi(k as i32),
                param: f64::NAN,
                offset,
            });
        }
        let offset = &direction * epsilon;
        grid.boundary.push(BoundaryNode {
            point: foot + &offset,
            weight: weight * wo * lateral_scale * (1.0 + epsilon * lift).powi(k as i32),
            normal: direction,
            region: Region::Lateral,
            param: f64::NAN,
            offset,
        });
    }
}

fn sphere_tube_grid(center: &Manifold, k: usize, radius: f64, epsilon: f64, res: GridResolution) -> Result<QuadGrid> {
    let n = center.ambient_dim();
    let samples = sphere_rule(k + 1, res.center);
    let r_rule = radial_rule(res.radial, epsilon, n - k);
    let normal_sphere = sphere_rule(n - k, res.angular);
    let slices: Vec<QuadGrid> = samples
        .points
        .par_iter()
        .zip(samples.weights.par_iter())
        .map(|(p, &w)| {
            let mut slice = QuadGrid::default();
            let foot = embed(p, n) * radius;
            sphere_fibre(
                center,
                &foot,
                k,
                radius,
                epsilon,
                w * radius.powi(k as i32),
                &r_rule,
                &normal_sphere,
                &mut slice,
            );
            slice
        })
        .collect();
    Ok(merge(slices))
}

/// Chart samples of the cap {|y| < r}: Gauss–Legendre in the chart radius
/// times a sphere rule in direction, weighted by the pulled-back area element
/// (2/(1+ρ²))^k ρ^(k−1).
fn chart_samples(k: usize, r: f64, radial: usize, angular: usize) -> Vec<(Vec<f64>, f64)> {
    let rho_rule = gauss_legendre_on(radial, 0.0, r);
    let directions = sphere_rule(k, angular);
    let mut out = Vec::with_capacity(rho_rule.len() * directions.points.len());
    for (&rho, &wr) in rho_rule.nodes.iter().zip(&rho_rule.weights) {
        let conformal = (2.0 / (1.0 + rho * rho)).powi(k as i32) * rho.powi(k as i32 - 1);
        for (d, &wd) in directions.points.iter().zip(&directions.weights) {
            out.push((d.iter().map(|x| x * rho).collect(), wr * wd * conformal));
        }
    }
    out
}

fn cap_tube_grid(center: &Manifold, k: usize, r: f64, epsilon: f64, res: GridResolution) -> Result<QuadGrid> {
    let n = center.ambient_dim();
    let samples = chart_samples(k, r, res.center, res.angular);
    let r_rule = radial_rule(res.radial, epsilon, n - k);
    let normal_sphere = sphere_rule(n - k, res.angular);
    let slices: Vec<QuadGrid> = samples
        .par_iter()
        .map(|(y, w)| {
            let mut slice = QuadGrid::default();
            let foot = center.chart(y);
            sphere_fibre(center, &foot, k, 1.0, epsilon, *w, &r_rule, &normal_sphere, &mut slice);
            slice
        })
        .collect();
    let mut grid = merge(slices);

    // rim: ∂Γ × normal disk, outward normal the unit conormal
    let directions = sphere_rule(k, res.angular);
    let rim_radius = 2.0 * r / (1.0 + r * r);
    let rim_scale = rim_radius.powi(k as i32 - 1);
    for (d, &wd) in directions.points.iter().zip(&directions.weights) {
        let y: Vec<f64> = d.iter().map(|x| x * r).collect();
        let foot = center.chart(&y);
        let conormal = (center.tangent_basis(&y) * Vector::from_column_slice(d)).normalize();
        let basis = center.sphere_normal_basis(&foot);
        for (omega, &wo) in normal_sphere.points.iter().zip(&normal_sphere.weights) {
            let direction = combine(&basis, omega, n);
            for (&s, &ws) in r_rule.nodes.iter().zip(&r_rule.weights) {
                let offset = &direction * s;
                grid.boundary.push(BoundaryNode {
                    point: &foot + &offset,
                    weight: wd * rim_scale * ws * wo * (1.0 + s * omega[0]).powi(k as i32 - 1),
                    normal: conormal.clone(),
                    region: Region::Rim,
                    param: f64::NAN,
                    offset,
                });
            }
        }
    }
    Ok(grid)
}

fn merge(slices: Vec<QuadGrid>) -> QuadGrid {
    let mut grid = QuadGrid::default();
    for slice in slices {
        grid.interior.extend(slice.interior);
        grid.boundary.extend(slice.boundary);
    }
    grid
}

/// Polar grid of the shell r_inner < |x| < r_outer in ℝⁿ (a ball when
/// r_inner = 0), with `radial` Gauss–Legendre nodes and an `angular` sphere
/// rule. Boundary normals point out of the shell.
pub fn shell_grid(n: usize, r_inner: f64, r_outer: f64, radial: usize, angular: usize) -> Result<QuadGrid> {
    if n < 2 || !(r_inner >= 0.0) || !(r_outer > r_inner) || radial < 1 || angular < 2 {
        return Err(Error::InvalidParameter(format!(
            "shell grid needs n >= 2 and 0 <= r_inner < r_outer, got n = {n}, [{r_inner}, {r_outer}]"
        )));
    }
    let base = gauss_legendre_on(radial, r_inner, r_outer);
    let directions = sphere_rule(n, angular);
    let mut grid = QuadGrid::default();
    for (&r, &wr) in base.nodes.iter().zip(&base.weights) {
        let shell = wr * r.powi(n as i32 - 1);
        for (d, &wd) in directions.points.iter().zip(&directions.weights) {
            let u = Vector::from_column_slice(d);
            grid.interior.push(QuadNode {
                point: &u * r,
                weight: shell * wd,
                param: f64::NAN,
                offset: Vector::zeros(n),
            });
        }
    }
    let mut spheres = vec![(r_outer, 1.0)];
    if r_inner > 0.0 {
        spheres.push((r_inner, -1.0));
    }
    for (radius, sign) in spheres {
        for (d, &wd) in directions.points.iter().zip(&directions.weights) {
            let u = Vector::from_column_slice(d);
            grid.boundary.push(BoundaryNode {
                point: &u * radius,
                weight: wd * radius.powi(n as i32 - 1),
                normal: &u * sign,
                region: Region::Sphere,
                param: f64::NAN,
                offset: Vector::zeros(n),
            });
        }
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::curve::CurveKind;
    use crate::numerics::quadrature::unit_ball_volume;
    use std::f64::consts::PI;

    fn circle(radius: f64, n: usize) -> Manifold {
        Manifold::Curve(
            Curve::new(CurveKind::Circle { radius }, n, (0.0, 2.0 * PI), true)
                .unwrap()
                .reparametrize_arclength(1e-13)
                .unwrap(),
        )
    }

    fn segment() -> Manifold {
        Manifold::Curve(
            Curve::new(
                CurveKind::Segment {
                    origin: vec![0.0; 3],
                    direction: vec![1.0, 0.0, 0.0],
                },
                3,
                (-1.0, 1.0),
                false,
            )
            .unwrap(),
        )
    }

    #[test]
    fn resolution_parsing() {
        assert_eq!("default".parse::<GridResolution>().unwrap(), GridResolution::DEFAULT);
        assert_eq!(
            "10x2x4".parse::<GridResolution>().unwrap(),
            GridResolution::new(10, 2, 4).unwrap()
        );
        assert!("10x2".parse::<GridResolution>().is_err());
        assert!("1x1x1".parse::<GridResolution>().is_err());
        assert_eq!(GridResolution::COARSE.doubled().center, 64);
    }

    #[test]
    fn cylinder_volume_area_and_caps() {
        let tube = build_tube_grid(&segment(), 0.1, GridResolution::DEFAULT).unwrap();
        let g = tube.grid();
        assert!((g.volume() - PI * 0.01 * 2.0).abs() < 1e-13);
        assert!((g.boundary_area(Some(Region::Lateral)) - 2.0 * PI * 0.1 * 2.0).abs() < 1e-13);
        assert!((g.boundary_area(Some(Region::CapA)) - PI * 0.01).abs() < 1e-14);
        for b in &g.boundary {
            assert!((b.normal.norm() - 1.0).abs() < 1e-10);
        }
        for q in &g.interior {
            assert!(q.offset.norm() <= 0.1 + 1e-10);
        }
    }

    #[test]
    fn torus_volume_and_area_follow_pappus() {
        let tube = build_tube_grid(&circle(1.0, 3), 0.1, GridResolution::DEFAULT).unwrap();
        let g = tube.grid();
        assert!((g.volume() / (2.0 * PI * PI * 0.01) - 1.0).abs() < 1e-10);
        assert!((g.boundary_area(None) / (4.0 * PI * PI * 0.1) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn circle_in_four_dimensions_has_product_volume() {
        let tube = build_tube_grid(&circle(2.0, 4), 0.1, GridResolution::DEFAULT).unwrap();
        let expected = 2.0 * PI * 2.0 * unit_ball_volume(3) * 1e-3;
        assert!((tube.grid().volume() / expected - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sphere_tube_volume() {
        // tube of S² (radius 1) in ℝ³ is the shell 1 − ε < |x| < 1 + ε
        let sphere = Manifold::Sphere {
            k: 2,
            n: 3,
            radius: 1.0,
        };
        let tube = build_tube_grid(&sphere, 0.1, GridResolution::DEFAULT).unwrap();
        let expected = 4.0 * PI / 3.0 * (1.1f64.powi(3) - 0.9f64.powi(3));
        assert!((tube.grid().volume() / expected - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cap_tube_area_matches_spherical_cap() {
        // Γ_2^r covers the spherical cap below height (r² − 1)/(r² + 1)
        let cap = Manifold::StereographicCap { k: 2, n: 4, r: 1.0 };
        let center = centerline_grid(&cap, 48).unwrap();
        let area = center.grid().volume();
        assert!((area - 2.0 * PI).abs() < 1e-10, "{area}");
        let tube = build_tube_grid(&cap, 0.05, GridResolution::DEFAULT).unwrap();
        assert!(tube.grid().boundary.iter().any(|b| b.region == Region::Rim));
        for b in &tube.grid().boundary {
            assert!((b.normal.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_thickness_beyond_reach() {
        assert!(matches!(
            build_tube_grid(&circle(1.0, 3), 1.5, GridResolution::COARSE),
            Err(Error::BeyondReach { .. })
        ));
    }

    #[test]
    fn tube_point_weights_on_circle() {
        let Manifold::Curve(c) = circle(1.0, 3) else {
            unreachable!()
        };
        let frame = normal_transport(&c, 2049).unwrap();
        let xi = Vector::from_vec(vec![0.2, 0.0, 0.0]);
        let (p, w) = tube_point(&c, &frame, 0.0, &xi).unwrap();
        assert!((w - 1.2).abs() < 1e-12);
        assert!((p - Vector::from_vec(vec![1.2, 0.0, 0.0])).norm() < 1e-12);
        let (_, w) = tube_point(&c, &frame, 0.0, &(-xi)).unwrap();
        assert!((w - 0.8).abs() < 1e-12);
        let far = Vector::from_vec(vec![-1.5, 0.0, 0.0]);
        assert!(matches!(
            tube_point(&c, &frame, 0.0, &far),
            Err(Error::NonPositiveJacobian { .. })
        ));
    }

    #[test]
    fn ball_and_annulus_grids() {
        let ball = shell_grid(3, 0.0, 1.0, 20, 12).unwrap();
        assert!((ball.volume() - 4.0 * PI / 3.0).abs() < 1e-12);
        assert!((ball.boundary_area(None) - 4.0 * PI).abs() < 1e-12);
        let shell = shell_grid(3, 1.0, 2.0, 20, 12).unwrap();
        assert!((shell.volume() - 4.0 * PI / 3.0 * 7.0).abs() < 1e-12);
        assert!((shell.boundary_area(None) - 4.0 * PI * 5.0).abs() < 1e-12);
    }
}
