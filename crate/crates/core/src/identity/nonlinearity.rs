//! Nonlinearities f with primitive F(t) = ∫₀ᵗ f and a declared growth exponent p.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Nonlinearity {
    /// f(t) = |t|^(p−2) t
    Power { p: f64 },
    /// f(t) = λ t with a declared exponent p
    Linear { lambda: f64, p: f64 },
    /// f(t) = Σ c_i t^i
    Polynomial { coefficients: Vec<f64>, p: f64 },
    /// Piecewise-linear f through (points[i], values[i]), extended linearly
    /// beyond the end points.
    Table { points: Vec<f64>, values: Vec<f64>, p: f64 },
}

impl Nonlinearity {
    pub fn power(p: f64) -> Result<Self> {
        let nl = Nonlinearity::Power { p };
        nl.validate()?;
        Ok(nl)
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.exponent();
        if !(p > 2.0) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "growth exponent must exceed 2, got {p}"
            )));
        }
        match self {
            Nonlinearity::Linear { lambda, .. } if !lambda.is_finite() => Err(Error::InvalidParameter(format!(
                "linear coefficient must be finite, got {lambda}"
            ))),
            Nonlinearity::Table { points, values, .. } => {
                if points.len() < 2 || points.len() != values.len() {
                    return Err(Error::InvalidParameter(
                        "table needs at least two points and one value per point".into(),
                    ));
                }
                if points.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::InvalidParameter(
                        "table points must be strictly increasing".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn exponent(&self) -> f64 {
        match self {
            Nonlinearity::Power { p }
            | Nonlinearity::Linear { p, .. }
            | Nonlinearity::Polynomial { p, .. }
            | Nonlinearity::Table { p, .. } => *p,
        }
    }

    pub fn f(&self, t: f64) -> f64 {
        match self {
            Nonlinearity::Power { p } => t.abs().powf(p - 2.0) * t,
            Nonlinearity::Linear { lambda, .. } => lambda * t,
            Nonlinearity::Polynomial { coefficients, .. } => coefficients.iter().rev().fold(0.0, |acc, c| acc * t + c),
            Nonlinearity::Table { points, values, .. } => {
                let i = segment_index(points, t);
                let (x0, x1) = (points[i], points[i + 1]);
                let (y0, y1) = (values[i], values[i + 1]);
                y0 + (y1 - y0) * (t - x0) / (x1 - x0)
            }
        }
    }

    /// F(t) = ∫₀ᵗ f.
    pub fn primitive(&self, t: f64) -> f64 {
        match self {
            Nonlinearity::Power { p } => t.abs().powf(*p) / p,
            Nonlinearity::Linear { lambda, .. } => 0.5 * lambda * t * t,
            Nonlinearity::Polynomial { coefficients, .. } => {
                coefficients
                    .iter()
                    .enumerate()
                    .rev()
                    .fold(0.0, |acc, (i, c)| acc * t + c / (i + 1) as f64)
                    * t
            }
            Nonlinearity::Table { points, .. } => self.table_integral(points, t) - self.table_integral(points, 0.0),
        }
    }

    /// ∫ from points[0] to t of the piecewise-linear table (exact trapezoids).
    fn table_integral(&self, points: &[f64], t: f64) -> f64 {
        let trapezoid = |a: f64, b: f64| 0.5 * (b - a) * (self.f(a) + self.f(b));
        let j = segment_index(points, t);
        let mut acc = 0.0;
        for i in 0..j {
            acc += trapezoid(points[i], points[i + 1]);
        }
        acc + trapezoid(points[j], t)
    }
}

/// Segment of the table used at t; the end segments extend to ±∞.
fn segment_index(points: &[f64], t: f64) -> usize {
    let last = points.len() - 2;
    match points.binary_search_by(|x| x.total_cmp(&t)) {
        Ok(i) => i.min(last),
        Err(i) => i.saturating_sub(1).min(last),
    }
}

/// Outcome of sampling t f(t) ≥ p F(t) ≥ 0 on [−10, 10].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthCheck {
    pub holds: bool,
    /// min over samples of t f(t) − p F(t) and F(t), whichever is smaller.
    pub worst_margin: f64,
    pub worst_t: f64,
    pub violations: Vec<f64>,
}

/// Samples the growth condition at `samples` equally spaced points of
/// [−10, 10]. A sample passes when both margins exceed −1e−12 relative to
/// max(1, |t f(t)|), which absorbs rounding in the equality case.
pub fn check_growth_condition(nl: &Nonlinearity, samples: usize) -> Result<GrowthCheck> {
    if samples < 10 {
        return Err(Error::InvalidParameter(format!(
            "growth check needs at least 10 samples, got {samples}"
        )));
    }
    nl.validate()?;
    let p = nl.exponent();
    let mut worst_margin = f64::INFINITY;
    let mut worst_t = 0.0;
    let mut violations = Vec::new();
    for j in 0..samples {
        let t = -10.0 + 20.0 * j as f64 / (samples - 1) as f64;
        let tf = t * nl.f(t);
        let big_f = nl.primitive(t);
        let margin = (tf - p * big_f).min(big_f);
        let tolerance = 1e-12 * tf.abs().max(1.0);
        if margin < worst_margin {
            worst_margin = margin;
            worst_t = t;
        }
        if margin < -tolerance {
            violations.push(t);
        }
    }
    Ok(GrowthCheck {
        holds: violations.is_empty(),
        worst_margin,
        worst_t,
        violations,
    })
}
