//! Quadrature evaluation of both sides of the Pohozaev-type identity
//!
//!   ½ ∮ |Du|² v·ν = ∫ dv[Du]·Du + div v (F(u) − ½|Du|²)
//!
//! for a Dirichlet solution u of Δu + f(u) = 0.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{MultiplierField, DEFAULT_STEP};
use crate::geometry::tube::{BoundaryNode, QuadGrid, QuadNode};
use crate::identity::nonlinearity::Nonlinearity;
use crate::numerics::compensated_sum;
use crate::{Matrix, Vector};

/// A multiplier field evaluated at grid nodes.
pub trait VectorField: Sync {
    fn dim(&self) -> usize;
    /// v and dv at an interior node.
    fn interior(&self, node: &QuadNode) -> Result<(Vector, Matrix)>;
    /// v at a boundary node.
    fn boundary(&self, node: &BoundaryNode) -> Result<Vector>;
}

/// v(x) = x.
#[derive(Debug, Clone, Copy)]
pub struct PositionField {
    pub dim: usize,
}

impl VectorField for PositionField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn interior(&self, node: &QuadNode) -> Result<(Vector, Matrix)> {
        Ok((node.point.clone(), Matrix::identity(self.dim, self.dim)))
    }

    fn boundary(&self, node: &BoundaryNode) -> Result<Vector> {
        Ok(node.point.clone())
    }
}

impl VectorField for MultiplierField {
    fn dim(&self) -> usize {
        MultiplierField::dim(self)
    }

    fn interior(&self, node: &QuadNode) -> Result<(Vector, Matrix)> {
        let hint = node.param.is_finite().then_some(node.param);
        let t = hint.unwrap_or(0.0);
        let jac = self.jacobian(&node.point, DEFAULT_STEP, hint)?;
        Ok((self.eval_tube_coords(t, &node.offset), jac.matrix))
    }

    fn boundary(&self, node: &BoundaryNode) -> Result<Vector> {
        let t = if node.param.is_finite() { node.param } else { 0.0 };
        Ok(self.eval_tube_coords(t, &node.offset))
    }
}

/// u and Du at points of the domain; None where no data is available.
pub trait SolutionData: Sync {
    fn value_gradient(&self, x: &Vector) -> Option<(f64, Vector)>;
}

/// Solution data from a closure.
pub struct FnSolution<F>(pub F);

impl<F> SolutionData for FnSolution<F>
where
    F: Fn(&Vector) -> Option<(f64, Vector)> + Sync,
{
    fn value_gradient(&self, x: &Vector) -> Option<(f64, Vector)> {
        (self.0)(x)
    }
}

/// u ≡ 0.
pub struct ZeroSolution;

impl SolutionData for ZeroSolution {
    fn value_gradient(&self, x: &Vector) -> Option<(f64, Vector)> {
        Some((0.0, Vector::zeros(x.len())))
    }
}

/// Radial data u(x) = g(|x|) from a profile returning (g, g′).
pub struct RadialData<G>(pub G);

impl<G> SolutionData for RadialData<G>
where
    G: Fn(f64) -> Option<(f64, f64)> + Sync,
{
    fn value_gradient(&self, x: &Vector) -> Option<(f64, Vector)> {
        let r = x.norm();
        let (u, du) = (self.0)(r)?;
        let gradient = if r > 0.0 { x * (du / r) } else { Vector::zeros(x.len()) };
        Some((u, gradient))
    }
}

/// First Dirichlet eigenfunction of the ball of radius R in ℝ³,
/// u = sin(kr)/r with k = π/R, which solves Δu + k²u = 0.
pub fn ball_eigenfunction(radius: f64) -> RadialData<impl Fn(f64) -> Option<(f64, f64)> + Sync> {
    let k = std::f64::consts::PI / radius;
    RadialData(move |r: f64| {
        if k * r < 1e-3 {
            // series: k − k³r²/6 + k⁵r⁴/120, derivative −k³r/3 + k⁵r³/30
            let r2 = r * r;
            let k3 = k.powi(3);
            let k5 = k.powi(5);
            Some((
                k - k3 * r2 / 6.0 + k5 * r2 * r2 / 120.0,
                -k3 * r / 3.0 + k5 * r2 * r / 30.0,
            ))
        } else {
            let (s, c) = (k * r).sin_cos();
            Some((s / r, (k * r * c - s) / (r * r)))
        }
    })
}

/// k² = (π/R)², the eigenvalue paired with [`ball_eigenfunction`].
pub fn ball_eigenvalue(radius: f64) -> f64 {
    (std::f64::consts::PI / radius).powi(2)
}

/// Both sides of the identity with the volume side itemized.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    /// ½ ∮ |Du|² v·ν
    pub lhs: f64,
    /// ∫ dv[Du]·Du
    pub rhs_jacobian_term: f64,
    /// ∫ div v (F(u) − ½|Du|²)
    pub rhs_divergence_term: f64,
    pub rhs: f64,
    pub residual: f64,
    /// residual / max(|lhs|, |rhs|), zero when both sides vanish
    pub relative_residual: f64,
    pub interior_nodes: usize,
    pub boundary_nodes: usize,
    pub resolution: String,
    pub boundary_max_abs_u: f64,
    pub warnings: Vec<String>,
}

impl IdentityReport {
    pub fn new(lhs: f64, rhs_jacobian_term: f64, rhs_divergence_term: f64, resolution: String) -> Self {
        let rhs = rhs_jacobian_term + rhs_divergence_term;
        let residual = (lhs - rhs).abs();
        let scale = lhs.abs().max(rhs.abs());
        Self {
            lhs,
            rhs_jacobian_term,
            rhs_divergence_term,
            rhs,
            residual,
            relative_residual: if scale > 0.0 { residual / scale } else { 0.0 },
            interior_nodes: 0,
            boundary_nodes: 0,
            resolution,
            boundary_max_abs_u: 0.0,
            warnings: Vec::new(),
        }
    }
}

/// Acceptance tolerance for a residual: max(1e−4, 10× the change between a
/// base report and its refinement), relative to the size of the sides.
pub fn residual_tolerance(base: &IdentityReport, refined: &IdentityReport) -> f64 {
    let scale = refined.lhs.abs().max(refined.rhs.abs()).max(f64::MIN_POSITIVE);
    let discretization = (base.lhs - refined.lhs).abs().max((base.rhs - refined.rhs).abs()) / scale;
    (10.0 * discretization).max(1e-4)
}

const BOUNDARY_WARNING: f64 = 1e-4;

/// Evaluates both sides of the identity on `grid`.
pub fn identity_residual(
    data: &dyn SolutionData,
    nl: &Nonlinearity,
    grid: &QuadGrid,
    field: &dyn VectorField,
    resolution: &str,
) -> Result<IdentityReport> {
    let n = field.dim();
    let missing = |index: usize| Error::MissingData(index);
    let interior: Vec<(f64, f64)> = grid
        .interior
        .par_iter()
        .enumerate()
        .map(|(i, node)| {
            let (u, du) = data.value_gradient(&node.point).ok_or_else(|| missing(i))?;
            if du.len() != n {
                return Err(missing(i));
            }
            let (_, dv) = field.interior(node)?;
            let grad2 = du.norm_squared();
            let jacobian_term = du.dot(&(&dv * &du));
            let divergence_term = dv.trace() * (nl.primitive(u) - 0.5 * grad2);
            Ok((node.weight * jacobian_term, node.weight * divergence_term))
        })
        .collect::<Result<_>>()?;
    let offset = grid.interior.len();
    let boundary: Vec<(f64, f64)> = grid
        .boundary
        .par_iter()
        .enumerate()
        .map(|(i, node)| {
            let (u, du) = data.value_gradient(&node.point).ok_or_else(|| missing(offset + i))?;
            let v = field.boundary(node)?;
            Ok((node.weight * 0.5 * du.norm_squared() * v.dot(&node.normal), u.abs()))
        })
        .collect::<Result<_>>()?;
    let lhs = compensated_sum(boundary.iter().map(|b| b.0));
    let jac = compensated_sum(interior.iter().map(|t| t.0));
    let div = compensated_sum(interior.iter().map(|t| t.1));
    let mut report = IdentityReport::new(lhs, jac, div, resolution.to_string());
    report.interior_nodes = grid.interior.len();
    report.boundary_nodes = grid.boundary.len();
    report.boundary_max_abs_u = boundary.iter().map(|b| b.1).fold(0.0, f64::max);
    if report.boundary_max_abs_u > BOUNDARY_WARNING {
        report.warnings.push(format!(
            "u does not vanish on the boundary (max |u| = {:.3e}); the identity assumes Dirichlet data",
            report.boundary_max_abs_u
        ));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::tube::shell_grid;
    use std::f64::consts::PI;

    #[test]
    fn zero_solution_gives_zero_sides() {
        let grid = shell_grid(3, 0.0, 1.0, 6, 8).unwrap();
        let report = identity_residual(
            &ZeroSolution,
            &Nonlinearity::Power { p: 7.0 },
            &grid,
            &PositionField { dim: 3 },
            "6x8",
        )
        .unwrap();
        assert_eq!(report.lhs, 0.0);
        assert_eq!(report.rhs, 0.0);
        assert_eq!(report.relative_residual, 0.0);
    }

    #[test]
    fn ball_eigenfunction_sides_equal_two_pi_cubed() {
        let grid = shell_grid(3, 0.0, 1.0, 24, 12).unwrap();
        let nl = Nonlinearity::Linear {
            lambda: PI * PI,
            p: 2.5,
        };
        let report =
            identity_residual(&ball_eigenfunction(1.0), &nl, &grid, &PositionField { dim: 3 }, "24x12").unwrap();
        let target = 2.0 * PI.powi(3);
        assert!((report.lhs / target - 1.0).abs() < 1e-10, "{report:?}");
        assert!((report.rhs / target - 1.0).abs() < 1e-10, "{report:?}");
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn scaled_ball_sides_equal_two_pi_cubed_over_radius() {
        // both sides scale like 2π³/R for u = sin(πr/R)/r
        let radius = 2.5;
        let grid = shell_grid(3, 0.0, radius, 24, 12).unwrap();
        let nl = Nonlinearity::Linear {
            lambda: ball_eigenvalue(radius),
            p: 2.5,
        };
        let report = identity_residual(&ball_eigenfunction(radius), &nl, &grid, &PositionField { dim: 3 }, "").unwrap();
        let target = 2.0 * PI.powi(3) / radius;
        assert!((report.lhs / target - 1.0).abs() < 1e-10, "{report:?}");
        assert!((report.rhs / target - 1.0).abs() < 1e-10, "{report:?}");
        assert!(report.boundary_max_abs_u < 1e-12);
    }

    #[test]
    fn missing_data_is_rejected() {
        let grid = shell_grid(3, 0.0, 1.0, 4, 4).unwrap();
        let data = FnSolution(|x: &Vector| (x[0] < 0.5).then(|| (0.0, Vector::zeros(3))));
        let err = identity_residual(
            &data,
            &Nonlinearity::Power { p: 7.0 },
            &grid,
            &PositionField { dim: 3 },
            "",
        );
        assert!(matches!(err, Err(Error::MissingData(_))));
    }

    #[test]
    fn nonvanishing_boundary_data_warns() {
        let grid = shell_grid(3, 0.0, 1.0, 4, 4).unwrap();
        let data = FnSolution(|x: &Vector| Some((1.0 + x[0], Vector::from_vec(vec![1.0, 0.0, 0.0]))));
        let report = identity_residual(
            &data,
            &Nonlinearity::Power { p: 7.0 },
            &grid,
            &PositionField { dim: 3 },
            "",
        )
        .unwrap();
        assert_eq!(report.warnings.len(), 1);
    }
}
