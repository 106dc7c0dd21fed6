//! Embedded manifolds used as tube centers: curves, round spheres and
//! stereographic caps of the unit sphere.

use crate::error::{Error, Result};
use crate::geometry::curve::{Curve, CurveKind};
use crate::{Matrix, Vector};

#[derive(Debug, Clone)]
pub enum Manifold {
    /// k = 1: a unit-speed curve.
    Curve(Curve),
    /// Sphere S^k of the given radius in the first k + 1 coordinates of ℝⁿ.
    Sphere { k: usize, n: usize, radius: f64 },
    /// Γ_k^r: image of {|y| < r} under the stereographic chart onto the unit
    /// sphere in the first k + 1 coordinates.
    StereographicCap { k: usize, n: usize, r: f64 },
}

/// Nearest point on a manifold and the normal offset x − foot.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldFoot {
    pub foot: Vector,
    pub offset: Vector,
    /// Curve parameter of the foot (curves only).
    pub param: Option<f64>,
    /// Chart coordinates of the foot (caps only).
    pub chart: Option<Vec<f64>>,
    /// The unconstrained minimizer left the manifold and the foot was moved
    /// to its edge (open curve endpoint or cap rim).
    pub clamped: bool,
}

/// The stereographic chart of Γ_k^r.
pub fn stereographic_chart(k: usize, n: usize, r: f64) -> Result<Manifold> {
    if k < 1 || n < k + 1 {
        return Err(Error::InvalidParameter(format!(
            "stereographic chart needs k >= 1 and n >= k + 1, got k = {k}, n = {n}"
        )));
    }
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "chart radius must be positive, got {r}"
        )));
    }
    Ok(Manifold::StereographicCap { k, n, r })
}

/// First k components 2y_i/(|y|²+1), component k+1 (|y|²−1)/(|y|²+1), rest 0.
fn stereographic_point(y: &[f64], n: usize) -> Vector {
    let k = y.len();
    let s: f64 = y.iter().map(|v| v * v).sum();
    let q = s + 1.0;
    let mut p = Vector::zeros(n);
    for (i, yi) in y.iter().enumerate() {
        p[i] = 2.0 * yi / q;
    }
    p[k] = (s - 1.0) / q;
    p
}

fn stereographic_jacobian(y: &[f64], n: usize) -> Matrix {
    let k = y.len();
    let s: f64 = y.iter().map(|v| v * v).sum();
    let q = s + 1.0;
    Matrix::from_fn(n, k, |i, j| {
        if i < k {
            let delta = if i == j { 2.0 / q } else { 0.0 };
            delta - 4.0 * y[i] * y[j] / (q * q)
        } else if i == k {
            4.0 * y[j] / (q * q)
        } else {
            0.0
        }
    })
}

/// Inverse chart from a point of the unit sphere (south-pole centered).
fn stereographic_inverse(p: &Vector, k: usize) -> Vec<f64> {
    let denom = 1.0 - p[k];
    (0..k).map(|i| p[i] / denom).collect()
}

impl Manifold {
    pub fn k(&self) -> usize {
        match self {
            Manifold::Curve(_) => 1,
            Manifold::Sphere { k, .. } | Manifold::StereographicCap { k, .. } => *k,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            Manifold::Curve(c) => c.dim(),
            Manifold::Sphere { n, .. } | Manifold::StereographicCap { n, .. } => *n,
        }
    }

    pub fn as_curve(&self) -> Option<&Curve> {
        match self {
            Manifold::Curve(c) => Some(c),
            _ => None,
        }
    }

    /// Short identifier used in reports.
    pub fn id(&self) -> String {
        match self {
            Manifold::Curve(c) => match c.kind() {
                CurveKind::Segment { .. } => "segment".into(),
                CurveKind::Circle { radius } if c.is_closed() => format!("circle-{radius}"),
                CurveKind::Circle { radius } => format!("circle-arc-{radius}"),
                CurveKind::Helix { .. } => "helix-arc".into(),
                CurveKind::StereographicArc => {
                    format!("stereographic-cap-1-{}", c_raw_half_width(c))
                }
                CurveKind::Polynomial { .. } => "polynomial".into(),
                CurveKind::Fourier { .. } => "fourier".into(),
            },
            Manifold::Sphere { k, radius, .. } => format!("sphere-{k}-{radius}"),
            Manifold::StereographicCap { k, r, .. } => format!("stereographic-cap-{k}-{r}"),
        }
    }

    /// Curve for one-dimensional sphere-type manifolds and curve wrappers.
    /// Caps become the unit-speed stereographic arc over [−r, r]; circles the
    /// closed unit-speed circle.
    pub fn to_curve(&self) -> Result<Curve> {
        match self {
            Manifold::Curve(c) => Ok(c.clone()),
            Manifold::StereographicCap { k: 1, n, r } => {
                Curve::new(CurveKind::StereographicArc, *n, (-r, *r), false)?.reparametrize_arclength(1e-13)
            }
            Manifold::Sphere { k: 1, n, radius } => Curve::new(
                CurveKind::Circle { radius: *radius },
                *n,
                (0.0, 2.0 * std::f64::consts::PI),
                true,
            )?
            .reparametrize_arclength(1e-13),
            _ => Err(Error::InvalidParameter(format!(
                "manifold of dimension {} is not a curve",
                self.k()
            ))),
        }
    }

    /// Chart evaluation: curve parameter for k = 1 curves, stereographic
    /// coordinates otherwise (scaled by the radius for spheres).
    pub fn chart(&self, y: &[f64]) -> Vector {
        match self {
            Manifold::Curve(c) => c.eval(y[0]),
            Manifold::Sphere { n, radius, .. } => stereographic_point(y, *n) * *radius,
            Manifold::StereographicCap { n, .. } => stereographic_point(y, *n),
        }
    }

    /// n × k matrix of tangent vectors at chart coordinates `y`.
    pub fn tangent_basis(&self, y: &[f64]) -> Matrix {
        match self {
            Manifold::Curve(c) => Matrix::from_column_slice(c.dim(), 1, c.d1(y[0]).as_slice()),
            Manifold::Sphere { n, radius, .. } => stereographic_jacobian(y, *n) * *radius,
            Manifold::StereographicCap { n, .. } => stereographic_jacobian(y, *n),
        }
    }

    /// Sphere radius for sphere-type manifolds.
    pub fn sphere_radius(&self) -> Option<f64> {
        match self {
            Manifold::Curve(_) => None,
            Manifold::Sphere { radius, .. } => Some(*radius),
            Manifold::StereographicCap { .. } => Some(1.0),
        }
    }

    /// Orthonormal basis of the normal space at a foot on a sphere-type
    /// manifold: the outward radial direction, then the unused axes.
    pub fn sphere_normal_basis(&self, foot: &Vector) -> Vec<Vector> {
        let k = self.k();
        let n = self.ambient_dim();
        let mut radial = Vector::zeros(n);
        for i in 0..=k {
            radial[i] = foot[i];
        }
        let mut basis = vec![radial.normalize()];
        for axis in (k + 1)..n {
            let mut e = Vector::zeros(n);
            e[axis] = 1.0;
            basis.push(e);
        }
        basis
    }

    /// Reach estimate ε̄₁.
    pub fn reach_estimate(&self) -> f64 {
        match self {
            Manifold::Curve(c) => c.reach_estimate(),
            Manifold::Sphere { radius, .. } => *radius,
            Manifold::StereographicCap { .. } => 1.0,
        }
    }

    /// Nearest-point projection onto the (closed) manifold.
    pub fn project(&self, x: &Vector) -> Result<ManifoldFoot> {
        match self {
            Manifold::Curve(c) => {
                let foot = c.project(x)?;
                let (a, b) = c.interval();
                let clamped = !c.is_closed()
                    && (foot.param <= a || foot.param >= b)
                    && foot.offset.dot(&c.d1(foot.param)).abs() > 1e-9 * (1.0 + foot.offset.norm());
                Ok(ManifoldFoot {
                    foot: foot.foot,
                    offset: foot.offset,
                    param: Some(foot.param),
                    chart: None,
                    clamped,
                })
            }
            Manifold::Sphere { k, radius, .. } => {
                let (foot, _) = sphere_foot(x, *k, *radius)?;
                Ok(ManifoldFoot {
                    offset: x - &foot,
                    foot,
                    param: None,
                    chart: None,
                    clamped: false,
                })
            }
            Manifold::StereographicCap { k, n, r } => self.project_cap(x, *k, *n, *r),
        }
    }

    /// Chart-Newton projection onto Γ_k^r: Gauss–Newton on ½|x − γ_k(y)|²
    /// started from the inverse chart of the radial projection.
    fn project_cap(&self, x: &Vector, k: usize, n: usize, r: f64) -> Result<ManifoldFoot> {
        let (radial, _) = sphere_foot(x, k, 1.0)?;
        let mut y = if radial[k] < 1.0 - 1e-12 {
            stereographic_inverse(&radial, k)
        } else {
            vec![f64::INFINITY; k]
        };
        let yn: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut clamped = false;
        if !(yn <= r) {
            // outside the closed cap: nearest point lies on the rim along the
            // same chart direction
            clamped = true;
            let dir: Vec<f64> = if yn.is_finite() && yn > 0.0 {
                y.iter().map(|v| v / yn).collect()
            } else {
                let mut d = vec![0.0; k];
                d[0] = 1.0;
                d
            };
            y = dir.iter().map(|d| d * r).collect();
            let foot = stereographic_point(&y, n);
            return Ok(ManifoldFoot {
                offset: x - &foot,
                foot,
                param: None,
                chart: Some(y),
                clamped,
            });
        }
        let mut converged = false;
        for _ in 0..100 {
            let p = stereographic_point(&y, n);
            let jac = stereographic_jacobian(&y, n);
            let residual = x - &p;
            let gradient = jac.transpose() * &residual;
            let normal = (jac.transpose() * &jac).cholesky();
            let Some(normal) = normal else { break };
            let step = normal.solve(&gradient);
            for (yi, si) in y.iter_mut().zip(step.iter()) {
                *yi += si;
            }
            if step.norm() <= 1e-15 * (1.0 + y.iter().map(|v| v.abs()).fold(0.0, f64::max)) {
                converged = true;
                break;
            }
        }
        let foot = stereographic_point(&y, n);
        if !converged {
            return Err(Error::ProjectionNonConvergence {
                iterations: 100,
                distance: (x - &foot).norm(),
                best_foot: foot.iter().copied().collect(),
            });
        }
        Ok(ManifoldFoot {
            offset: x - &foot,
            foot,
            param: None,
            chart: Some(y),
            clamped,
        })
    }
}

fn c_raw_half_width(c: &Curve) -> String {
    // θ = tan(s/2) at the end of the unit-speed stereographic arc
    let (_, b) = c.interval();
    let r = (0.5 * b).tan();
    format!("{}", (r * 1e9).round() / 1e9)
}

/// Closed-form projection onto the sphere of radius `radius` spanned by the
/// first k + 1 coordinates.
fn sphere_foot(x: &Vector, k: usize, radius: f64) -> Result<(Vector, f64)> {
    let n = x.len();
    let mut span = Vector::zeros(n);
    for i in 0..=k {
        span[i] = x[i];
    }
    let norm = span.norm();
    if norm <= 1e-12 * radius {
        return Err(Error::AmbiguousProjection {
            first: (x.norm_squared() + radius * radius).sqrt(),
            second: (x.norm_squared() + radius * radius).sqrt(),
        });
    }
    Ok((span * (radius / norm), norm))
}
