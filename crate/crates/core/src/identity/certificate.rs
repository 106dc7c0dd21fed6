//! Sign certificates for the absence of nontrivial solutions on thin tubes.
//!
//! With the field bounds dv[ξ]·ξ ≤ (1 + μ_q)|ξ|² and |div v − m| ≤ μ_d, the
//! identity together with v·ν ≥ 0 on the boundary and F ≤ u f(u)/p gives
//!
//!   0 ≤ (1 − m/2 + m/p + μ_q + μ_d (1/2 + 1/p)) ∫ |Du|²,
//!
//! so a negative coefficient forces u ≡ 0.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{refined_bounds, FieldBounds, FieldKind, RefinedBounds};
use crate::geometry::tube::GridResolution;
use crate::geometry::Manifold;

/// Which nonexistence statement a certificate instantiates; fixes the
/// effective dimension m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremTag {
    /// Tube around an open or closed curve with the curve field; m = n.
    #[serde(rename = "2.1")]
    CurveTube,
    /// Tube around a closed curve with the projection field; m = n − 1.
    #[serde(rename = "2.4")]
    ClosedCurveTube,
    /// Tube around a k-dimensional manifold with its projection field; m = n − k.
    #[serde(rename = "3.4")]
    ManifoldTube,
}

impl TheoremTag {
    pub fn label(self) -> &'static str {
        match self {
            TheoremTag::CurveTube => "2.1",
            TheoremTag::ClosedCurveTube => "2.4",
            TheoremTag::ManifoldTube => "3.4",
        }
    }

    /// Field kind whose bounds feed this certificate.
    pub fn field_kind(self) -> FieldKind {
        match self {
            TheoremTag::CurveTube => FieldKind::CurveFieldV,
            TheoremTag::ClosedCurveTube => FieldKind::ProjectionField,
            TheoremTag::ManifoldTube => FieldKind::ManifoldField,
        }
    }

    /// Effective dimension, validating the dimension restrictions.
    pub fn effective_dimension(self, n: usize, k: usize) -> Result<usize> {
        let (m, ok, why) = match self {
            TheoremTag::CurveTube => (n, n >= 3, "n >= 3"),
            TheoremTag::ClosedCurveTube => (n.saturating_sub(1), n >= 4, "n >= 4"),
            TheoremTag::ManifoldTube => (n.saturating_sub(k), k >= 1 && n > k + 2, "k >= 1 and n > k + 2"),
        };
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "certificate tag {} needs {why}, got n = {n}, k = {k}",
                self.label()
            )));
        }
        Ok(m)
    }
}

impl fmt::Display for TheoremTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for TheoremTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2.1" => Ok(TheoremTag::CurveTube),
            "2.4" => Ok(TheoremTag::ClosedCurveTube),
            "3.4" => Ok(TheoremTag::ManifoldTube),
            other => Err(Error::Parse(format!(
                "unknown theorem tag '{other}' (expected 2.1, 2.4 or 3.4)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CertifiedNonexistence,
    Inconclusive,
}

impl Verdict {
    pub fn tag(self) -> &'static str {
        match self {
            Verdict::CertifiedNonexistence => "certified-nonexistence",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "certified-nonexistence" => Ok(Verdict::CertifiedNonexistence),
            "inconclusive" => Ok(Verdict::Inconclusive),
            other => Err(Error::Parse(format!("unknown verdict '{other}'"))),
        }
    }
}

/// Boundary fluxes above −1e−12 count as nonnegative; exact zeros (rims,
/// caps of the projection field) are computed with rounding noise.
pub const FLUX_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub theorem: TheoremTag,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub p: f64,
    pub epsilon: f64,
    /// 1 − m/2 + m/p
    pub base_coefficient: f64,
    pub mu_div: f64,
    pub mu_quad: f64,
    /// μ_q + μ_d (1/2 + 1/p)
    pub deviation_term: f64,
    pub flux_min: f64,
    pub total: f64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// 2m/(m − 2), defined for m ≥ 3.
pub fn critical_exponent(m: usize) -> Result<f64> {
    if m < 3 {
        return Err(Error::NoCriticalExponent(m));
    }
    Ok(2.0 * m as f64 / (m as f64 - 2.0))
}

/// 1 − m/2 + m/p, evaluated as (p(2 − m) + 2m)/(2p) so its sign is exact
/// for integer-valued p.
pub fn base_coefficient(m: usize, p: f64) -> f64 {
    let m = m as f64;
    p.mul_add(2.0 - m, 2.0 * m) / (2.0 * p)
}

/// Assembles the certificate for dimension n, theorem tag, manifold
/// dimension k (ignored for the curve tags), exponent p and field bounds.
pub fn nonexistence_certificate(
    n: usize,
    tag: TheoremTag,
    k: usize,
    p: f64,
    bounds: &FieldBounds,
) -> Result<Certificate> {
    if !(p > 2.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("exponent must exceed 2, got {p}")));
    }
    let k = match tag {
        TheoremTag::ManifoldTube => k,
        _ => 1,
    };
    let m = tag.effective_dimension(n, k)?;
    if bounds.mu_div < 0.0 || bounds.mu_quad < 0.0 || bounds.mu_div.is_nan() || bounds.mu_quad.is_nan() {
        return Err(Error::InvalidParameter(format!(
            "field bounds must be nonnegative, got mu_div = {}, mu_quad = {}",
            bounds.mu_div, bounds.mu_quad
        )));
    }
    let base = base_coefficient(m, p);
    let deviation = bounds.mu_quad + bounds.mu_div * (0.5 + 1.0 / p);
    let total = base + deviation;
    let flux_ok = bounds.flux_min >= -FLUX_TOLERANCE;
    let (verdict, reason) = if total < 0.0 && flux_ok {
        (Verdict::CertifiedNonexistence, None)
    } else if !flux_ok {
        (
            Verdict::Inconclusive,
            Some(format!("boundary flux is negative (min {:.6e})", bounds.flux_min)),
        )
    } else {
        (
            Verdict::Inconclusive,
            Some(format!("total coefficient {total:.6e} is not negative")),
        )
    };
    Ok(Certificate {
        theorem: tag,
        n,
        k,
        m,
        p,
        epsilon: bounds.epsilon,
        base_coefficient: base,
        mu_div: bounds.mu_div,
        mu_quad: bounds.mu_quad,
        deviation_term: deviation,
        flux_min: bounds.flux_min,
        total,
        verdict,
        reason,
    })
}

/// Largest certified thickness of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Threshold {
    /// Every ε up to and including `epsilon` is certified, every larger one is not.
    Certified {
        epsilon: f64,
    },
    NoneCertified,
    /// Certified and inconclusive thicknesses interleave; no threshold is defined.
    NonMonotone,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub geometry: String,
    pub field: FieldKind,
    pub resolution: String,
    pub certificates: Vec<Certificate>,
    pub bounds: Vec<RefinedBounds>,
    pub threshold: Threshold,
}

/// Threshold from (ε, certified) pairs in any order.
pub fn sweep_threshold(entries: &[(f64, bool)]) -> Threshold {
    let mut sorted = entries.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let certified = sorted.iter().take_while(|e| e.1).count();
    if sorted[certified..].iter().any(|e| e.1) {
        Threshold::NonMonotone
    } else if certified == 0 {
        Threshold::NoneCertified
    } else {
        Threshold::Certified {
            epsilon: sorted[certified - 1].0,
        }
    }
}

/// One certificate per thickness. Bounds come from the grid at `resolution`
/// and its doubling; the worse pair is used, and an unstable pair makes the
/// entry inconclusive.
pub fn certificate_sweep(
    center: &Manifold,
    tag: TheoremTag,
    p: f64,
    epsilons: &[f64],
    resolution: GridResolution,
) -> Result<Sweep> {
    if epsilons.is_empty() {
        return Err(Error::InvalidParameter("thickness list is empty".into()));
    }
    let n = center.ambient_dim();
    let k = center.k();
    tag.effective_dimension(n, k)?;
    if tag == TheoremTag::ClosedCurveTube && !center.as_curve().is_some_and(|c| c.is_closed()) {
        return Err(Error::InvalidParameter(
            "the closed-curve certificate needs a closed curve".into(),
        ));
    }
    let reach = center.reach_estimate();
    if let Some(&eps) = epsilons.iter().find(|&&e| !(e > 0.0) || e >= reach) {
        return Err(Error::BeyondReach { epsilon: eps, reach });
    }
    let kind = tag.field_kind();
    let bounds: Vec<RefinedBounds> = epsilons
        .par_iter()
        .map(|&eps| refined_bounds(kind, center, eps, resolution))
        .collect::<Result<_>>()?;
    let certificates: Vec<Certificate> = bounds
        .iter()
        .map(|b| {
            let mut cert = nonexistence_certificate(n, tag, k, p, &b.conservative())?;
            if !b.stable {
                cert.verdict = Verdict::Inconclusive;
                cert.reason = Some("field bounds changed by more than 10% under grid doubling".into());
            }
            Ok(cert)
        })
        .collect::<Result<_>>()?;
    let entries: Vec<(f64, bool)> = certificates
        .iter()
        .map(|c| (c.epsilon, c.verdict == Verdict::CertifiedNonexistence))
        .collect();
    Ok(Sweep {
        geometry: bounds[0].refined.geometry.clone(),
        field: kind,
        resolution: format!("{resolution}+{}", resolution.doubled()),
        threshold: sweep_threshold(&entries),
        certificates,
        bounds,
    })
}
