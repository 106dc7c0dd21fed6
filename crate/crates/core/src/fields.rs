//! Multiplier vector fields on tubes: the curve field
//! v = t γ′(t)(1 − ψ·γ″(t)) + ψ and the projection fields x − p(x), with
//! finite-difference Jacobians and grid suprema of their deviations.

use std::fmt;
use std::str::FromStr;

use nalgebra::SymmetricEigen;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::tube::{build_tube_grid, normalize_center, GridResolution, TubeDomain};
use crate::geometry::Manifold;
use crate::numerics::{argmax, argmin};
use crate::{Matrix, Vector};

/// Default finite-difference step for field Jacobians.
pub const DEFAULT_STEP: f64 = 1e-4;

const PARAM_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    /// t γ′(t)(1 − ψ·γ″(t)) + ψ around a curve; target divergence n.
    CurveFieldV,
    /// x − p(x) for a curve; target divergence n − 1.
    ProjectionField,
    /// x − p_k(x) for a k-dimensional center; target divergence n − k.
    ManifoldField,
}

impl FieldKind {
    pub fn tag(self) -> &'static str {
        match self {
            FieldKind::CurveFieldV => "curve-field-v",
            FieldKind::ProjectionField => "projection-field",
            FieldKind::ManifoldField => "manifold-field",
        }
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for FieldKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "curve-field-v" => Ok(FieldKind::CurveFieldV),
            "projection-field" => Ok(FieldKind::ProjectionField),
            "manifold-field" => Ok(FieldKind::ManifoldField),
            other => Err(Error::Parse(format!(
                "unknown field kind '{other}' (expected curve-field-v, projection-field or manifold-field)"
            ))),
        }
    }
}

/// A multiplier field bound to its center geometry.
#[derive(Debug, Clone)]
pub struct MultiplierField {
    kind: FieldKind,
    center: Manifold,
    /// Tube thickness used to decide whether stencil points are inside.
    thickness: Option<f64>,
}

/// Field value at a point together with tube membership.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub value: Vector,
    pub inside: bool,
    /// Curve parameter of the foot, when the center is a curve.
    pub param: Option<f64>,
}

/// Finite-difference Jacobian at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianEstimate {
    pub matrix: Matrix,
    /// Some direction used a one-sided stencil because the central one left the tube.
    pub one_sided: bool,
}

impl JacobianEstimate {
    pub fn divergence(&self) -> f64 {
        self.matrix.trace()
    }

    /// Eigenvalues of the symmetric part, ascending.
    pub fn symmetric_eigenvalues(&self) -> Vec<f64> {
        let sym = (&self.matrix + self.matrix.transpose()) * 0.5;
        let mut values: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
        values.sort_by(|a, b| a.total_cmp(b));
        values
    }

    /// dv[η]·η.
    pub fn quadratic_form(&self, eta: &Vector) -> f64 {
        eta.dot(&(&self.matrix * eta))
    }
}

impl MultiplierField {
    pub fn new(kind: FieldKind, center: &Manifold) -> Result<Self> {
        let center = normalize_center(center)?;
        match kind {
            FieldKind::CurveFieldV | FieldKind::ProjectionField if center.as_curve().is_none() => {
                return Err(Error::UnsupportedField {
                    kind: kind.tag().into(),
                    reason: format!("needs a curve center, got a {}-dimensional manifold", center.k()),
                })
            }
            _ => {}
        }
        Ok(Self {
            kind,
            center,
            thickness: None,
        })
    }

    /// Field bound to a tube; stencil points are tested against its thickness.
    pub fn for_tube(kind: FieldKind, tube: &TubeDomain) -> Result<Self> {
        let mut field = Self::new(kind, tube.center())?;
        if !tube.is_centerline() {
            field.thickness = Some(tube.epsilon());
        }
        Ok(field)
    }

    pub fn with_thickness(mut self, epsilon: f64) -> Self {
        self.thickness = Some(epsilon);
        self
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn center(&self) -> &Manifold {
        &self.center
    }

    pub fn dim(&self) -> usize {
        self.center.ambient_dim()
    }

    /// Divergence of the field on the center: n, n − 1 or n − k.
    pub fn target_divergence(&self) -> usize {
        let n = self.dim();
        match self.kind {
            FieldKind::CurveFieldV => n,
            FieldKind::ProjectionField => n - 1,
            FieldKind::ManifoldField => n - self.center.k(),
        }
    }

    /// Field from tube coordinates (parameter t, normal offset ψ). Only the
    /// curve field depends on t; the projection fields equal ψ.
    pub fn eval_tube_coords(&self, t: f64, psi: &Vector) -> Vector {
        match (self.kind, self.center.as_curve()) {
            (FieldKind::CurveFieldV, Some(curve)) => {
                let jet = curve.jet(t);
                &jet.d1 * (t * (1.0 - psi.dot(&jet.d2))) + psi
            }
            _ => psi.clone(),
        }
    }

    /// Field at an arbitrary point through its nearest-point projection.
    pub fn eval(&self, x: &Vector) -> Result<Vector> {
        Ok(self.sample(x, None)?.value)
    }

    /// Field at `x`; `hint` is a curve parameter near the foot, which switches
    /// the curve projection to a local Newton solve.
    pub fn sample(&self, x: &Vector, hint: Option<f64>) -> Result<FieldSample> {
        if x.len() != self.dim() {
            return Err(Error::InvalidParameter(format!(
                "point has {} coordinates, field lives in dimension {}",
                x.len(),
                self.dim()
            )));
        }
        let thickness = self.thickness.unwrap_or(f64::INFINITY);
        match &self.center {
            Manifold::Curve(curve) => {
                let foot = match hint {
                    Some(t) if t.is_finite() => curve.project_from(x, t)?,
                    _ => curve.project(x)?,
                };
                let (a, b) = curve.interval();
                let in_span = curve.is_closed() || (foot.param >= a - PARAM_SLACK && foot.param <= b + PARAM_SLACK);
                let inside = in_span && foot.offset.norm() <= thickness;
                let value = self.eval_tube_coords(foot.param, &foot.offset);
                Ok(FieldSample {
                    value,
                    inside,
                    param: Some(foot.param),
                })
            }
            manifold => {
                let foot = manifold.project(x)?;
                Ok(FieldSample {
                    inside: !foot.clamped && foot.offset.norm() <= thickness,
                    value: foot.offset,
                    param: None,
                })
            }
        }
    }

    /// Central-difference Jacobian with step h; directions whose stencil
    /// leaves the tube use a three-point one-sided formula instead.
    pub fn jacobian(&self, x: &Vector, h: f64, hint: Option<f64>) -> Result<JacobianEstimate> {
        if !(h > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "finite-difference step must be positive, got {h}"
            )));
        }
        let n = self.dim();
        let hint = match (hint, &self.center) {
            (None, Manifold::Curve(_)) => self.sample(x, None)?.param,
            (hint, _) => hint,
        };
        let mut matrix = Matrix::zeros(n, n);
        let mut one_sided = false;
        let shifted = |j: usize, step: f64| {
            let mut y = x.clone();
            y[j] += step;
            y
        };
        let mut center_value: Option<Vector> = None;
        for j in 0..n {
            let xp = shifted(j, h);
            let xm = shifted(j, -h);
            let sp = self.sample(&xp, hint)?;
            let sm = self.sample(&xm, hint)?;
            let column = if sp.inside && sm.inside {
                (sp.value - sm.value) / (xp[j] - xm[j])
            } else {
                one_sided = true;
                if center_value.is_none() {
                    center_value = Some(self.sample(x, hint)?.value);
                }
                let v0 = center_value.as_ref().unwrap();
                // use the side that stays inside; forward if neither does
                let sign = if !sp.inside && sm.inside { -1.0 } else { 1.0 };
                let s1 = if sign > 0.0 { sp } else { sm };
                let s2 = self.sample(&shifted(j, 2.0 * sign * h), hint)?;
                (v0 * -3.0 + s1.value * 4.0 - s2.value) / (2.0 * sign * h)
            };
            matrix.set_column(j, &column);
        }
        Ok(JacobianEstimate { matrix, one_sided })
    }

    /// Deviation of dv[η]·η from 1 entering the certificate: two-sided for
    /// the curve field, the upper side only for the projection fields, whose
    /// quadratic form vanishes along the center by construction.
    pub fn quadratic_deviation(&self, eigenvalues: &[f64]) -> f64 {
        let max = eigenvalues.last().copied().unwrap_or(0.0);
        let min = eigenvalues.first().copied().unwrap_or(0.0);
        match self.kind {
            FieldKind::CurveFieldV => (max - 1.0).abs().max((min - 1.0).abs()),
            _ => (max - 1.0).abs(),
        }
    }
}

/// Per-node bookkeeping of a deviation sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeDeviation {
    pub divergence: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub div_deviation: f64,
    pub quad_deviation: f64,
    pub one_sided: bool,
}

/// Grid suprema of the field deviations plus the boundary flux minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldBounds {
    pub geometry: String,
    pub field: FieldKind,
    pub epsilon: f64,
    /// `CxRxA` for tube grids, `centerline-N` for centerline grids.
    pub resolution: String,
    pub target_m: usize,
    pub mu_div: f64,
    pub mu_quad: f64,
    /// +∞ when the grid has no boundary nodes.
    pub flux_min: f64,
    pub interior_nodes: usize,
    pub one_sided_nodes: usize,
    /// Index of the interior node attaining mu_div (lowest index on ties).
    pub mu_div_node: usize,
    pub mu_quad_node: usize,
}

impl FieldBounds {
    /// Identically vanishing deviations with nonnegative flux; the straight tube.
    pub fn zero(field: FieldKind, target_m: usize) -> Self {
        Self {
            geometry: "none".into(),
            field,
            epsilon: 0.0,
            resolution: "none".into(),
            target_m,
            mu_div: 0.0,
            mu_quad: 0.0,
            flux_min: 0.0,
            interior_nodes: 0,
            one_sided_nodes: 0,
            mu_div_node: 0,
            mu_quad_node: 0,
        }
    }
}

/// Jacobian-derived quantities at every interior node, in node order.
pub fn node_deviations(field: &MultiplierField, tube: &TubeDomain, h: f64) -> Result<Vec<NodeDeviation>> {
    let m = field.target_divergence() as f64;
    tube.grid()
        .interior
        .par_iter()
        .map(|node| {
            let hint = node.param.is_finite().then_some(node.param);
            let jac = field.jacobian(&node.point, h, hint)?;
            let eig = jac.symmetric_eigenvalues();
            let divergence = jac.divergence();
            Ok(NodeDeviation {
                divergence,
                lambda_min: eig[0],
                lambda_max: eig[eig.len() - 1],
                div_deviation: (m - divergence).abs(),
                quad_deviation: field.quadratic_deviation(&eig),
                one_sided: jac.one_sided,
            })
        })
        .collect()
}

/// v·ν at every boundary node, evaluated from the node's tube coordinates.
pub fn boundary_fluxes(field: &MultiplierField, tube: &TubeDomain) -> Vec<f64> {
    tube.grid()
        .boundary
        .par_iter()
        .map(|b| {
            let t = if b.param.is_finite() { b.param } else { 0.0 };
            field.eval_tube_coords(t, &b.offset).dot(&b.normal)
        })
        .collect()
}

/// Minimum of v·ν over the boundary grid (+∞ without boundary nodes).
pub fn min_boundary_flux(field: &MultiplierField, tube: &TubeDomain) -> f64 {
    argmin(&boundary_fluxes(field, tube)).map_or(f64::INFINITY, |(_, v)| v)
}

fn check_compatible(field: &MultiplierField, tube: &TubeDomain) -> Result<()> {
    if field.dim() != tube.dim() || field.center().k() != tube.center().k() {
        return Err(Error::InvalidParameter(format!(
            "field center (k = {}, n = {}) does not match tube center (k = {}, n = {})",
            field.center().k(),
            field.dim(),
            tube.center().k(),
            tube.dim()
        )));
    }
    Ok(())
}

/// Suprema of |m − div v| and of the quadratic-form deviation over interior
/// nodes, and the boundary flux minimum.
pub fn sup_deviations(field: &MultiplierField, tube: &TubeDomain) -> Result<FieldBounds> {
    check_compatible(field, tube)?;
    let nodes = node_deviations(field, tube, DEFAULT_STEP)?;
    if nodes.is_empty() {
        return Err(Error::InvalidParameter("tube grid has no interior nodes".into()));
    }
    let div: Vec<f64> = nodes.iter().map(|d| d.div_deviation).collect();
    let quad: Vec<f64> = nodes.iter().map(|d| d.quad_deviation).collect();
    let (mu_div_node, mu_div) = argmax(&div).unwrap_or((0, f64::NAN));
    let (mu_quad_node, mu_quad) = argmax(&quad).unwrap_or((0, f64::NAN));
    let resolution = match tube.resolution() {
        Some(r) => r.to_string(),
        None => format!("centerline-{}", nodes.len()),
    };
    Ok(FieldBounds {
        geometry: tube.center().id(),
        field: field.kind(),
        epsilon: tube.epsilon(),
        resolution,
        target_m: field.target_divergence(),
        mu_div,
        mu_quad,
        flux_min: min_boundary_flux(field, tube),
        interior_nodes: nodes.len(),
        one_sided_nodes: nodes.iter().filter(|d| d.one_sided).count(),
        mu_div_node,
        mu_quad_node,
    })
}

/// Bounds at a resolution and at its doubling, with the stability gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinedBounds {
    pub base: FieldBounds,
    pub refined: FieldBounds,
    /// Both suprema changed by at most 10% of their larger value (plus 1e-9).
    pub stable: bool,
}

impl RefinedBounds {
    /// Worse of the two estimates, reported at the refined resolution.
    pub fn conservative(&self) -> FieldBounds {
        let mut out = self.refined.clone();
        out.mu_div = self.base.mu_div.max(self.refined.mu_div);
        out.mu_quad = self.base.mu_quad.max(self.refined.mu_quad);
        out.flux_min = self.base.flux_min.min(self.refined.flux_min);
        out
    }
}

fn stable_pair(a: f64, b: f64) -> bool {
    (a - b).abs() <= 0.1 * a.abs().max(b.abs()) + 1e-9
}

/// Builds the tube at `resolution` and at its doubling and evaluates both.
pub fn refined_bounds(
    kind: FieldKind,
    center: &Manifold,
    epsilon: f64,
    resolution: GridResolution,
) -> Result<RefinedBounds> {
    let coarse_tube = build_tube_grid(center, epsilon, resolution)?;
    let fine_tube = build_tube_grid(center, epsilon, resolution.doubled())?;
    let field = MultiplierField::for_tube(kind, &coarse_tube)?;
    let base = sup_deviations(&field, &coarse_tube)?;
    let refined = sup_deviations(&field, &fine_tube)?;
    let stable = stable_pair(base.mu_div, refined.mu_div) && stable_pair(base.mu_quad, refined.mu_quad);
    Ok(RefinedBounds { base, refined, stable })
}
