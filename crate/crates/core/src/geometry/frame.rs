//! Normal transport along a unit-speed curve.
//!
//! A normal vector ψ(t) carried along the curve satisfies
//! ψ′(t) = −(ψ·γ″(t)) γ′(t), which keeps ψ normal and of constant length.
//! This is the rotation-minimizing (Bishop) frame.

use crate::error::{Error, Result};
use crate::geometry::curve::Curve;
use crate::{Matrix, Vector};

/// Orthonormal normal frames {e_1(t_j), …, e_{n-1}(t_j)} on a uniform grid.
#[derive(Debug, Clone)]
pub struct TransportedFrame {
    params: Vec<f64>,
    bases: Vec<Vec<Vector>>,
    dim: usize,
}

const DRIFT_LIMIT: f64 = 1e-6;

/// Orthonormal basis of the complement of `tangent`, built by Gram–Schmidt on
/// the coordinate axes with the axis most aligned to the tangent dropped.
pub fn initial_normal_basis(tangent: &Vector) -> Vec<Vector> {
    let n = tangent.len();
    let t = tangent.normalize();
    let dropped = (0..n)
        .max_by(|&i, &j| t[i].abs().partial_cmp(&t[j].abs()).unwrap().then(j.cmp(&i)))
        .unwrap();
    let mut basis: Vec<Vector> = Vec::with_capacity(n - 1);
    for axis in (0..n).filter(|&i| i != dropped) {
        let mut v = Vector::zeros(n);
        v[axis] = 1.0;
        v -= &t * t.dot(&v);
        for b in &basis {
            v -= b * b.dot(&v);
        }
        basis.push(v.normalize());
    }
    basis
}

/// Modified Gram–Schmidt of `vectors` against the unit `tangent` and each other.
fn reorthonormalize(tangent: &Vector, vectors: &mut [Vector]) {
    let t = tangent.normalize();
    for i in 0..vectors.len() {
        let mut v = vectors[i].clone();
        v -= &t * t.dot(&v);
        for b in &vectors[..i] {
            v -= b * b.dot(&v);
        }
        vectors[i] = v.normalize();
    }
}

fn drift(tangent: &Vector, vectors: &[Vector]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in vectors.iter().enumerate() {
        worst = worst.max(a.dot(tangent).abs());
        for (j, b) in vectors.iter().enumerate().skip(i) {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a.dot(b) - target).abs());
        }
    }
    worst
}

/// Integrates the transport ODE with classical RK4 over `node_count` uniform
/// nodes on [a, b], re-orthonormalizing after each step. Closed curves are not
/// forced to be periodic; see [`TransportedFrame::holonomy`].
pub fn normal_transport(curve: &Curve, node_count: usize) -> Result<TransportedFrame> {
    if node_count < 2 {
        return Err(Error::InvalidParameter(format!(
            "normal transport needs at least 2 nodes, got {node_count}"
        )));
    }
    if !curve.is_unit_speed() {
        return Err(Error::InvalidParameter(
            "normal transport requires a unit-speed curve; reparametrize first".into(),
        ));
    }
    let (a, b) = curve.interval();
    let h = (b - a) / (node_count - 1) as f64;
    let params: Vec<f64> = (0..node_count)
        .map(|j| if j == node_count - 1 { b } else { a + h * j as f64 })
        .collect();
    let mut current = initial_normal_basis(&curve.d1(a));
    let mut bases = Vec::with_capacity(node_count);
    bases.push(current.clone());
    let mut jet0 = curve.jet(a);
    for j in 1..node_count {
        let t0 = params[j - 1];
        let step = params[j] - t0;
        let jet_mid = curve.jet(t0 + 0.5 * step);
        let jet1 = curve.jet(params[j]);
        let rate = |psi: &Vector, jet: &crate::geometry::curve::CurveJet| -> Vector { &jet.d1 * (-psi.dot(&jet.d2)) };
        let mut next: Vec<Vector> = current
            .iter()
            .map(|psi| {
                let k1 = rate(psi, &jet0);
                let k2 = rate(&(psi + &k1 * (0.5 * step)), &jet_mid);
                let k3 = rate(&(psi + &k2 * (0.5 * step)), &jet_mid);
                let k4 = rate(&(psi + &k3 * step), &jet1);
                psi + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (step / 6.0)
            })
            .collect();
        let d = drift(&jet1.d1, &next);
        if d > DRIFT_LIMIT {
            return Err(Error::TransportDrift {
                parameter: params[j],
                drift: d,
            });
        }
        reorthonormalize(&jet1.d1, &mut next);
        bases.push(next.clone());
        current = next;
        jet0 = jet1;
    }
    Ok(TransportedFrame {
        params,
        bases,
        dim: curve.dim(),
    })
}

fn slerp(a: &Vector, b: &Vector, s: f64) -> Vector {
    let cos = a.dot(b).clamp(-1.0, 1.0);
    let omega = cos.acos();
    if omega < 1e-8 {
        return a * (1.0 - s) + b * s;
    }
    let sin = omega.sin();
    a * (((1.0 - s) * omega).sin() / sin) + b * ((s * omega).sin() / sin)
}

impl TransportedFrame {
    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn node_count(&self) -> usize {
        self.params.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Basis at grid node `j`.
    pub fn node(&self, j: usize) -> &[Vector] {
        &self.bases[j]
    }

    /// Basis at an arbitrary t: slerp per basis vector between the bracketing
    /// nodes, then re-orthonormalized against the curve tangent at t.
    pub fn at(&self, curve: &Curve, t: f64) -> Vec<Vector> {
        let n = self.params.len();
        let (a, b) = (self.params[0], self.params[n - 1]);
        let h = (b - a) / (n - 1) as f64;
        let pos = ((t - a) / h).clamp(0.0, (n - 1) as f64);
        let j = (pos.floor() as usize).min(n - 2);
        let s = pos - j as f64;
        if s <= 0.0 {
            return self.bases[j].clone();
        }
        if s >= 1.0 {
            return self.bases[j + 1].clone();
        }
        let mut out: Vec<Vector> = self.bases[j]
            .iter()
            .zip(&self.bases[j + 1])
            .map(|(u, v)| slerp(u, v, s))
            .collect();
        reorthonormalize(&curve.d1(t), &mut out);
        out
    }

    /// ψ from normal coordinates: Σ c_i e_i(t).
    pub fn offset(&self, curve: &Curve, t: f64, coords: &[f64]) -> Vector {
        let basis = self.at(curve, t);
        let mut psi = Vector::zeros(self.dim);
        for (c, e) in coords.iter().zip(&basis) {
            psi += e * *c;
        }
        psi
    }

    /// ψ(ξ, t) = Σ (ξ·e_i(0)) e_i(t) for ξ in the normal space at t = 0.
    pub fn transport(&self, curve: &Curve, xi: &Vector, t: f64) -> Vector {
        let origin = self.at(curve, 0.0);
        let coords: Vec<f64> = origin.iter().map(|e| e.dot(xi)).collect();
        self.offset(curve, t, &coords)
    }

    /// Change of basis e_i(b)·e_j(a); the identity when transport around a
    /// closed curve returns to the starting frame.
    pub fn holonomy(&self) -> Matrix {
        let first = &self.bases[0];
        let last = self.bases.last().unwrap();
        Matrix::from_fn(first.len(), first.len(), |i, j| last[i].dot(&first[j]))
    }
}
