//! Parametric space curves with exact derivatives up to third order.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quadrature::{gauss_legendre, Rule};
use crate::numerics::{compensated_sum, CompensatedSum};
use crate::Vector;

/// Analytic description of a curve in its raw parameter θ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum CurveKind {
    /// origin + θ·direction
    Segment { origin: Vec<f64>, direction: Vec<f64> },
    /// (R cos θ, R sin θ, 0, …)
    Circle { radius: f64 },
    /// (R cos θ, R sin θ, pitch·θ, 0, …)
    Helix { radius: f64, pitch: f64 },
    /// The one-dimensional stereographic chart θ ↦ (2θ, θ² − 1)/(θ² + 1),
    /// evaluated through the angle 2·atan θ.
    StereographicArc,
    /// Per component, ascending power coefficients.
    Polynomial { coefficients: Vec<Vec<f64>> },
    /// Per component: constant term plus cosine/sine coefficients of
    /// harmonics 1, 2, ….
    Fourier {
        constant: Vec<f64>,
        cosine: Vec<Vec<f64>>,
        sine: Vec<Vec<f64>>,
    },
}

/// Position and first three derivatives at one parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveJet {
    pub point: Vector,
    pub d1: Vector,
    pub d2: Vector,
    pub d3: Vector,
}

impl CurveKind {
    fn min_dim(&self) -> usize {
        match self {
            CurveKind::Segment { origin, direction } => origin.len().max(direction.len()),
            CurveKind::Circle { .. } | CurveKind::StereographicArc => 2,
            CurveKind::Helix { .. } => 3,
            CurveKind::Polynomial { coefficients } => coefficients.len(),
            CurveKind::Fourier { constant, cosine, sine } => constant.len().max(cosine.len()).max(sine.len()),
        }
    }

    fn jet(&self, dim: usize, theta: f64) -> CurveJet {
        let mut jet = CurveJet {
            point: Vector::zeros(dim),
            d1: Vector::zeros(dim),
            d2: Vector::zeros(dim),
            d3: Vector::zeros(dim),
        };
        match self {
            CurveKind::Segment { origin, direction } => {
                for (i, o) in origin.iter().enumerate() {
                    jet.point[i] = *o;
                }
                for (i, d) in direction.iter().enumerate() {
                    jet.point[i] += theta * d;
                    jet.d1[i] = *d;
                }
            }
            CurveKind::Circle { radius } => {
                let (s, c) = theta.sin_cos();
                let r = *radius;
                set2(&mut jet.point, r * c, r * s);
                set2(&mut jet.d1, -r * s, r * c);
                set2(&mut jet.d2, -r * c, -r * s);
                set2(&mut jet.d3, r * s, -r * c);
            }
            CurveKind::Helix { radius, pitch } => {
                let (s, c) = theta.sin_cos();
                let r = *radius;
                set2(&mut jet.point, r * c, r * s);
                set2(&mut jet.d1, -r * s, r * c);
                set2(&mut jet.d2, -r * c, -r * s);
                set2(&mut jet.d3, r * s, -r * c);
                jet.point[2] = pitch * theta;
                jet.d1[2] = *pitch;
            }
            CurveKind::StereographicArc => {
                // unit circle u(φ) = (sin φ, −cos φ) composed with φ = 2 atan θ
                let q = theta * theta + 1.0;
                let phi = 2.0 * theta.atan();
                let p1 = 2.0 / q;
                let p2 = -4.0 * theta / (q * q);
                let p3 = (12.0 * theta * theta - 4.0) / (q * q * q);
                let (s, c) = phi.sin_cos();
                // u = (s, −c), u' = (c, s), u'' = −u, u''' = −u'
                set2(&mut jet.point, s, -c);
                set2(&mut jet.d1, c * p1, s * p1);
                set2(&mut jet.d2, -s * p1 * p1 + c * p2, c * p1 * p1 + s * p2);
                set2(
                    &mut jet.d3,
                    -c * p1.powi(3) - 3.0 * s * p1 * p2 + c * p3,
                    -s * p1.powi(3) + 3.0 * c * p1 * p2 + s * p3,
                );
            }
            CurveKind::Polynomial { coefficients } => {
                for (i, coeffs) in coefficients.iter().enumerate() {
                    let [v0, v1, v2, v3] = polynomial_jet(coeffs, theta);
                    jet.point[i] = v0;
                    jet.d1[i] = v1;
                    jet.d2[i] = v2;
                    jet.d3[i] = v3;
                }
            }
            CurveKind::Fourier { constant, cosine, sine } => {
                for (i, c0) in constant.iter().enumerate() {
                    jet.point[i] += c0;
                }
                for (i, harmonics) in cosine.iter().enumerate() {
                    for (j, a) in harmonics.iter().enumerate() {
                        let k = (j + 1) as f64;
                        let (s, c) = (k * theta).sin_cos();
                        jet.point[i] += a * c;
                        jet.d1[i] -= a * k * s;
                        jet.d2[i] -= a * k * k * c;
                        jet.d3[i] += a * k * k * k * s;
                    }
                }
                for (i, harmonics) in sine.iter().enumerate() {
                    for (j, b) in harmonics.iter().enumerate() {
                        let k = (j + 1) as f64;
                        let (s, c) = (k * theta).sin_cos();
                        jet.point[i] += b * s;
                        jet.d1[i] += b * k * c;
                        jet.d2[i] -= b * k * k * s;
                        jet.d3[i] -= b * k * k * k * c;
                    }
                }
            }
        }
        jet
    }
}

fn set2(v: &mut Vector, a: f64, b: f64) {
    v[0] = a;
    v[1] = b;
}

fn polynomial_jet(coeffs: &[f64], t: f64) -> [f64; 4] {
    // Horner on the k-th derivative polynomial, whose coefficients carry the
    // falling factorial power·(power-1)·…·(power-k+1).
    let derivative = |order: usize| -> f64 {
        coeffs
            .iter()
            .enumerate()
            .skip(order)
            .rev()
            .fold(0.0, |acc, (power, &c)| {
                let falling: f64 = (0..order).map(|j| (power - j) as f64).product();
                acc * t + c * falling
            })
    };
    [derivative(0), derivative(1), derivative(2), derivative(3)]
}

/// Map from the current parameter to the raw parameter θ of [`CurveKind`].
#[derive(Debug, Clone)]
enum ParamMap {
    /// θ = t + shift
    Shift(f64),
    /// θ = origin + t / speed for constant-speed kinds.
    Scaled {
        origin: f64,
        speed: f64,
    },
    /// θ = tan((t + s0)/2), the inverse of s = 2 atan θ on the stereographic arc.
    HalfAngle {
        s0: f64,
    },
    Arclength(Arc<ArclengthTable>),
}

/// Cumulative arclength on Gauss–Legendre panels, inverted by Newton.
#[derive(Debug)]
struct ArclengthTable {
    breaks: Vec<f64>,
    cumulative: Vec<f64>,
    /// Arclength measured from θa of the parameter origin.
    origin_offset: f64,
    rule: Rule,
}

const PANEL_RULE_NODES: usize = 10;

impl ArclengthTable {
    fn build(kind: &CurveKind, dim: usize, raw: (f64, f64), origin: f64, tolerance: f64) -> Self {
        let rule = gauss_legendre(PANEL_RULE_NODES);
        let speed = |theta: f64| kind.jet(dim, theta).d1.norm();
        let total = |panels: usize| -> f64 {
            let h = (raw.1 - raw.0) / panels as f64;
            compensated_sum(
                (0..panels).map(|i| panel_integral(&rule, &speed, raw.0 + h * i as f64, raw.0 + h * (i + 1) as f64)),
            )
        };
        let mut panels = 64usize;
        let mut previous = total(panels);
        loop {
            let refined = total(2 * panels);
            panels *= 2;
            if (refined - previous).abs() <= tolerance * previous.max(1.0) || panels >= 1 << 16 {
                break;
            }
            previous = refined;
        }
        let h = (raw.1 - raw.0) / panels as f64;
        let breaks: Vec<f64> = (0..=panels).map(|i| raw.0 + h * i as f64).collect();
        let mut cumulative = Vec::with_capacity(panels + 1);
        let mut acc = CompensatedSum::new();
        cumulative.push(0.0);
        for i in 0..panels {
            acc.add(panel_integral(&rule, &speed, breaks[i], breaks[i + 1]));
            cumulative.push(acc.value());
        }
        let mut table = Self {
            breaks,
            cumulative,
            origin_offset: 0.0,
            rule,
        };
        table.origin_offset = table.length_to(kind, dim, origin);
        table
    }

    fn panel_of(&self, theta: f64) -> usize {
        let n = self.breaks.len() - 1;
        match self.breaks.binary_search_by(|b| b.partial_cmp(&theta).unwrap()) {
            Ok(i) => i.min(n - 1),
            Err(i) => i.saturating_sub(1).min(n - 1),
        }
    }

    /// Arclength from θa to θ (signed; θ may lie outside the table).
    fn length_to(&self, kind: &CurveKind, dim: usize, theta: f64) -> f64 {
        let i = self.panel_of(theta);
        let speed = |x: f64| kind.jet(dim, x).d1.norm();
        self.cumulative[i] + panel_integral(&self.rule, &speed, self.breaks[i], theta)
    }

    fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    fn theta_of(&self, kind: &CurveKind, dim: usize, s: f64) -> f64 {
        let target = s + self.origin_offset;
        let n = self.breaks.len() - 1;
        let i = match self.cumulative.binary_search_by(|c| c.partial_cmp(&target).unwrap()) {
            Ok(i) => return self.breaks[i],
            Err(i) => i.saturating_sub(1).min(n - 1),
        };
        let (lo, hi) = (self.breaks[i], self.breaks[i + 1]);
        let (slo, shi) = (self.cumulative[i], self.cumulative[i + 1]);
        let mut theta = lo + (hi - lo) * (target - slo) / (shi - slo);
        // Edge panels may be left when the target lies outside the table.
        let bounded = target >= self.cumulative[0] && target <= self.total();
        for _ in 0..60 {
            let speed = |x: f64| kind.jet(dim, x).d1.norm();
            let residual = slo + panel_integral(&self.rule, &speed, lo, theta) - target;
            let step = residual / speed(theta);
            let mut next = theta - step;
            if bounded {
                next = next.clamp(lo, hi);
            }
            let done = (next - theta).abs() <= 4.0 * f64::EPSILON * (1.0 + theta.abs());
            theta = next;
            if done {
                break;
            }
        }
        theta
    }
}

fn panel_integral(rule: &Rule, f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    half * compensated_sum(
        rule.nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&x, &w)| w * f(mid + half * x)),
    )
}

/// A C³ curve in ℝⁿ over [a, b] with derivative access.
#[derive(Debug, Clone)]
pub struct Curve {
    kind: CurveKind,
    dim: usize,
    raw: (f64, f64),
    closed: bool,
    map: ParamMap,
    interval: (f64, f64),
    unit_speed: bool,
}

/// Nearest-point projection onto a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveFoot {
    pub param: f64,
    pub foot: Vector,
    pub offset: Vector,
}

const DEGENERACY_SAMPLES: usize = 4096;

impl Curve {
    /// Curve over the raw interval `[a, b]`. Closed curves must match in
    /// position and first derivative at the endpoints.
    pub fn new(kind: CurveKind, dim: usize, interval: (f64, f64), closed: bool) -> Result<Self> {
        if dim < 3 {
            return Err(Error::InvalidParameter(format!(
                "ambient dimension must be at least 3, got {dim}"
            )));
        }
        if kind.min_dim() > dim {
            return Err(Error::InvalidParameter(format!(
                "curve needs {} coordinates but ambient dimension is {dim}",
                kind.min_dim()
            )));
        }
        if !(interval.0 < interval.1) || !interval.0.is_finite() || !interval.1.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "parameter interval [{}, {}] is empty or not finite",
                interval.0, interval.1
            )));
        }
        match &kind {
            CurveKind::Circle { radius } | CurveKind::Helix { radius, .. } if !(*radius > 0.0) => {
                return Err(Error::InvalidParameter(format!(
                    "radius must be positive, got {radius}"
                )));
            }
            _ => {}
        }
        let curve = Self {
            kind,
            dim,
            raw: interval,
            closed,
            map: ParamMap::Shift(0.0),
            interval,
            unit_speed: false,
        };
        if closed {
            let a = curve.kind.jet(dim, interval.0);
            let b = curve.kind.jet(dim, interval.1);
            let position_gap = (&a.point - &b.point).norm();
            let tangent_gap = (&a.d1 - &b.d1).norm();
            if position_gap >= 1e-10 || tangent_gap >= 1e-10 {
                return Err(Error::NotClosed {
                    position_gap,
                    tangent_gap,
                });
            }
        }
        let unit_speed = curve.max_speed_defect() < 1e-13;
        Ok(Self { unit_speed, ..curve })
    }

    fn max_speed_defect(&self) -> f64 {
        self.samples(DEGENERACY_SAMPLES)
            .map(|t| (self.d1(t).norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn is_unit_speed(&self) -> bool {
        self.unit_speed
    }

    /// Length of [a, b] in the current parameter (the arclength once unit-speed).
    pub fn parameter_length(&self) -> f64 {
        self.interval.1 - self.interval.0
    }

    fn raw_param(&self, t: f64) -> f64 {
        match &self.map {
            ParamMap::Shift(shift) => t + shift,
            ParamMap::Scaled { origin, speed } => origin + t / speed,
            ParamMap::HalfAngle { s0 } => (0.5 * (t + s0)).tan(),
            ParamMap::Arclength(table) => table.theta_of(&self.kind, self.dim, t),
        }
    }

    pub fn jet(&self, t: f64) -> CurveJet {
        let theta = self.raw_param(t);
        let raw = self.kind.jet(self.dim, theta);
        match &self.map {
            ParamMap::Shift(_) => raw,
            ParamMap::Scaled { .. } | ParamMap::HalfAngle { .. } | ParamMap::Arclength(_) => {
                let speed = raw.d1.norm();
                let g12 = raw.d1.dot(&raw.d2);
                let first = 1.0 / speed;
                let second = -g12 / speed.powi(4);
                let third = first
                    * (-(raw.d2.norm_squared() + raw.d1.dot(&raw.d3)) / speed.powi(4)
                        + 4.0 * g12 * g12 / speed.powi(6));
                CurveJet {
                    d3: &raw.d3 * first.powi(3) + &raw.d2 * (3.0 * first * second) + &raw.d1 * third,
                    d2: &raw.d2 * (first * first) + &raw.d1 * second,
                    d1: &raw.d1 * first,
                    point: raw.point,
                }
            }
        }
    }

    pub fn eval(&self, t: f64) -> Vector {
        self.kind.jet(self.dim, self.raw_param(t)).point
    }

    pub fn d1(&self, t: f64) -> Vector {
        self.jet(t).d1
    }

    pub fn d2(&self, t: f64) -> Vector {
        self.jet(t).d2
    }

    pub fn d3(&self, t: f64) -> Vector {
        self.jet(t).d3
    }

    /// `count` equally spaced parameters covering [a, b] inclusively.
    pub fn samples(&self, count: usize) -> impl Iterator<Item = f64> + '_ {
        let (a, b) = self.interval;
        let n = count.max(2) - 1;
        (0..=n).map(move |j| if j == n { b } else { a + (b - a) * j as f64 / n as f64 })
    }

    /// Unit-speed reparametrization with the parameter origin at the raw
    /// parameter 0 (clamped into the interval), so that a ≤ 0 ≤ b.
    pub fn reparametrize_arclength(&self, tolerance: f64) -> Result<Curve> {
        if !(tolerance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "arclength tolerance must be positive, got {tolerance}"
            )));
        }
        let (ra, rb) = self.raw;
        let n = DEGENERACY_SAMPLES;
        for j in 0..=n {
            let theta = ra + (rb - ra) * j as f64 / n as f64;
            if self.kind.jet(self.dim, theta).d1.norm() < 1e-12 {
                return Err(Error::DegenerateCurve { parameter: theta });
            }
        }
        let origin = 0.0f64.clamp(ra, rb);
        let mut out = Self {
            kind: self.kind.clone(),
            dim: self.dim,
            raw: self.raw,
            closed: self.closed,
            map: ParamMap::Shift(origin),
            interval: (ra - origin, rb - origin),
            unit_speed: true,
        };
        let raw_unit = Self {
            map: ParamMap::Shift(0.0),
            interval: self.raw,
            ..out.clone()
        };
        let constant_speed = match &self.kind {
            CurveKind::Segment { direction, .. } => Some(Vector::from_column_slice(direction).norm()),
            CurveKind::Circle { radius } => Some(*radius),
            CurveKind::Helix { radius, pitch } => Some(radius.hypot(*pitch)),
            _ => None,
        };
        if raw_unit.max_speed_defect() < 1e-13 {
            // already unit speed
        } else if let Some(speed) = constant_speed {
            out.interval = ((ra - origin) * speed, (rb - origin) * speed);
            out.map = ParamMap::Scaled { origin, speed };
        } else if matches!(self.kind, CurveKind::StereographicArc) {
            let s0 = 2.0 * origin.atan();
            out.interval = (2.0 * ra.atan() - s0, 2.0 * rb.atan() - s0);
            out.map = ParamMap::HalfAngle { s0 };
        } else {
            let table = ArclengthTable::build(&self.kind, self.dim, self.raw, origin, tolerance);
            out.interval = (-table.origin_offset, table.total() - table.origin_offset);
            out.map = ParamMap::Arclength(Arc::new(table));
        }
        Ok(out)
    }

    /// Newton projection started from the parameter `hint`. The returned
    /// parameter may fall outside [a, b]; callers decide whether that is
    /// admissible.
    pub fn project_from(&self, x: &Vector, hint: f64) -> Result<CurveFoot> {
        let mut t = hint;
        let mut best: Option<CurveFoot> = None;
        let length = self.parameter_length();
        for _ in 0..100 {
            let jet = self.jet(t);
            let offset = x - &jet.point;
            let speed2 = jet.d1.norm_squared();
            let gradient = offset.dot(&jet.d1);
            let curvature_term = speed2 - offset.dot(&jet.d2);
            let candidate = CurveFoot {
                param: t,
                foot: jet.point.clone(),
                offset: offset.clone(),
            };
            if best.as_ref().is_none_or(|b| candidate.offset.norm() <= b.offset.norm()) {
                best = Some(candidate.clone());
            }
            if curvature_term <= 1e-3 * speed2 {
                break;
            }
            let mut step = gradient / curvature_term;
            let max_step = 0.25 * length;
            if step.abs() > max_step {
                step = step.signum() * max_step;
            }
            t += step;
            if step.abs() <= 4.0 * f64::EPSILON * (1.0 + t.abs()) {
                let jet = self.jet(t);
                let offset = x - &jet.point;
                return Ok(CurveFoot {
                    param: t,
                    foot: jet.point,
                    offset,
                });
            }
        }
        let best = best.expect("at least one iterate");
        Err(Error::ProjectionNonConvergence {
            iterations: 100,
            distance: best.offset.norm(),
            best_foot: best.foot.iter().copied().collect(),
        })
    }

    /// Global nearest-point projection: dense-grid search, ambiguity check,
    /// then Newton refinement of the best candidate.
    pub fn project(&self, x: &Vector) -> Result<CurveFoot> {
        let count = 2048usize;
        let params: Vec<f64> = if self.closed {
            let (a, b) = self.interval;
            (0..count).map(|j| a + (b - a) * j as f64 / count as f64).collect()
        } else {
            self.samples(count).collect()
        };
        let dist: Vec<f64> = params.iter().map(|&t| (x - self.eval(t)).norm()).collect();
        let m = params.len();
        let mut minima: Vec<usize> = (0..m)
            .filter(|&i| {
                let (prev, next) = if self.closed {
                    ((i + m - 1) % m, (i + 1) % m)
                } else {
                    (i.saturating_sub(1), (i + 1).min(m - 1))
                };
                dist[i] <= dist[prev] && dist[i] <= dist[next]
            })
            .collect();
        minima.sort_by(|&i, &j| dist[i].partial_cmp(&dist[j]).unwrap().then(i.cmp(&j)));
        let separated = |i: usize, j: usize| {
            let gap = i.abs_diff(j);
            let gap = if self.closed { gap.min(m - gap) } else { gap };
            gap > 2
        };
        let refine = |i: usize| -> Result<CurveFoot> {
            let foot = self.project_from(x, params[i])?;
            let (a, b) = self.interval;
            if !self.closed && (foot.param < a || foot.param > b) {
                // nearest point is an endpoint
                let t = foot.param.clamp(a, b);
                let p = self.eval(t);
                return Ok(CurveFoot {
                    param: t,
                    offset: x - &p,
                    foot: p,
                });
            }
            Ok(foot)
        };
        let rival = minima
            .iter()
            .skip(1)
            .find(|&&j| separated(minima[0], j))
            .copied()
            .filter(|&j| dist[j] - dist[minima[0]] <= 1e-3);
        let first = match refine(minima[0]) {
            Ok(foot) => foot,
            // a flat distance profile (e.g. the center of a circle) stalls Newton
            Err(_) if rival.is_some_and(|j| dist[j] - dist[minima[0]] <= 1e-6) => {
                return Err(Error::AmbiguousProjection {
                    first: dist[minima[0]],
                    second: dist[rival.unwrap()],
                });
            }
            Err(e) => return Err(e),
        };
        if let Some(other) = rival {
            let second = refine(other)?;
            let d1 = first.offset.norm();
            let d2 = second.offset.norm();
            if (d1 - d2).abs() <= 1e-6 && (&first.foot - &second.foot).norm() > 1e-6 {
                return Err(Error::AmbiguousProjection {
                    first: d1.min(d2),
                    second: d1.max(d2),
                });
            }
            if d2 < d1 {
                return Ok(second);
            }
        }
        Ok(first)
    }

    /// Curvature |γ′ × γ″| / |γ′|³ at parameter t.
    pub fn curvature(&self, t: f64) -> f64 {
        let jet = self.jet(t);
        let s2 = jet.d1.norm_squared();
        let cross2 = (s2 * jet.d2.norm_squared() - jet.d1.dot(&jet.d2).powi(2)).max(0.0);
        cross2.sqrt() / s2.powf(1.5)
    }

    /// Reach estimate: the smaller of the minimal curvature radius on a dense
    /// grid and half the minimal distance between samples farther apart than
    /// π times that radius along the curve. Not a rigorous bound.
    pub fn reach_estimate(&self) -> f64 {
        let count = 1025usize;
        let params: Vec<f64> = self.samples(count).collect();
        let points: Vec<Vector> = params.iter().map(|&t| self.eval(t)).collect();
        let kappa_max = params.iter().map(|&t| self.curvature(t)).fold(0.0, f64::max);
        let radius = if kappa_max > 0.0 {
            1.0 / kappa_max
        } else {
            f64::INFINITY
        };
        // arclength along the polyline
        let mut arc = vec![0.0; count];
        for j in 1..count {
            arc[j] = arc[j - 1] + (&points[j] - &points[j - 1]).norm();
        }
        let total = arc[count - 1];
        let threshold = std::f64::consts::PI * radius;
        let mut global = f64::INFINITY;
        if threshold.is_finite() {
            for i in 0..count {
                for j in (i + 1)..count {
                    let mut sep = arc[j] - arc[i];
                    if self.closed {
                        sep = sep.min(total - sep);
                    }
                    if sep > threshold {
                        global = global.min(0.5 * (&points[i] - &points[j]).norm());
                    }
                }
            }
        }
        radius.min(global)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn fd_check(curve: &Curve, t: f64) {
        let h = 1e-5;
        let jp = curve.jet(t + h);
        let jm = curve.jet(t - h);
        let j = curve.jet(t);
        assert!(((&jp.point - &jm.point) / (2.0 * h) - &j.d1).norm() < 1e-8);
        assert!(((&jp.d1 - &jm.d1) / (2.0 * h) - &j.d2).norm() < 1e-7);
        assert!(((&jp.d2 - &jm.d2) / (2.0 * h) - &j.d3).norm() < 1e-6);
    }

    #[test]
    fn raw_derivatives_match_finite_differences() {
        let kinds = vec![
            (CurveKind::Circle { radius: 2.0 }, (0.0, PI)),
            (
                CurveKind::Helix {
                    radius: 1.0,
                    pitch: 0.5,
                },
                (0.0, 2.0 * PI),
            ),
            (CurveKind::StereographicArc, (-2.0, 2.0)),
            (
                CurveKind::Polynomial {
                    coefficients: vec![vec![0.0, 1.0, 0.5, -0.2], vec![1.0, 0.0, 1.0], vec![0.0, 0.0, 0.0, 0.3]],
                },
                (-1.0, 1.0),
            ),
            (
                CurveKind::Fourier {
                    constant: vec![0.0, 0.0, 0.0],
                    cosine: vec![vec![1.0, 0.1], vec![0.0], vec![0.0, 0.0, 0.2]],
                    sine: vec![vec![0.0], vec![1.0, 0.0, 0.05], vec![]],
                },
                (0.0, 2.0 * PI),
            ),
        ];
        for (kind, interval) in kinds {
            let curve = Curve::new(kind, 3, interval, false).unwrap();
            for t in [interval.0 + 0.1, 0.5 * (interval.0 + interval.1), interval.1 - 0.1] {
                fd_check(&curve, t);
            }
            let unit = curve.reparametrize_arclength(1e-13).unwrap();
            for t in unit.samples(7).skip(1).take(5) {
                fd_check(&unit, t);
            }
        }
    }

    #[test]
    fn stereographic_arclength_has_closed_form() {
        // s = 2 atan θ, so θ(s) = tan(s/2)
        let curve = Curve::new(CurveKind::StereographicArc, 3, (-2.0, 2.0), false)
            .unwrap()
            .reparametrize_arclength(1e-13)
            .unwrap();
        let (a, b) = curve.interval();
        assert_relative_eq!(b, 2.0 * 2f64.atan(), epsilon = 1e-13);
        assert_relative_eq!(a, -b, epsilon = 1e-13);
        for s in [-1.5f64, -0.3, 0.0, 0.7, 2.0] {
            let theta = (0.5 * s).tan();
            let q = theta * theta + 1.0;
            let expected = Vector::from_vec(vec![2.0 * theta / q, (theta * theta - 1.0) / q, 0.0]);
            assert!((curve.eval(s) - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn closed_flag_is_validated() {
        assert!(Curve::new(CurveKind::Circle { radius: 1.0 }, 3, (0.0, 2.0 * PI), true).is_ok());
        assert!(matches!(
            Curve::new(CurveKind::Circle { radius: 1.0 }, 3, (0.0, PI), true),
            Err(Error::NotClosed { .. })
        ));
    }

    #[test]
    fn degenerate_curve_is_rejected_with_parameter() {
        // γ(θ) = (θ², θ³, 0) has γ′(0) = 0
        let kind = CurveKind::Polynomial {
            coefficients: vec![vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0, 1.0]],
        };
        let curve = Curve::new(kind, 3, (-1.0, 1.0), false).unwrap();
        match curve.reparametrize_arclength(1e-12) {
            Err(Error::DegenerateCurve { parameter }) => assert!(parameter.abs() < 1e-3),
            other => panic!("expected degeneracy, got {other:?}"),
        }
    }

    #[test]
    fn projection_onto_circle_and_ambiguity_at_center() {
        let curve = Curve::new(CurveKind::Circle { radius: 1.0 }, 3, (0.0, 2.0 * PI), true).unwrap();
        let x = Vector::from_vec(vec![1.5, 0.0, 0.1]);
        let foot = curve.project(&x).unwrap();
        assert!((foot.foot - Vector::from_vec(vec![1.0, 0.0, 0.0])).norm() < 1e-12);
        assert!((foot.offset - Vector::from_vec(vec![0.5, 0.0, 0.1])).norm() < 1e-12);
        let center = Vector::from_vec(vec![0.0, 0.0, 0.3]);
        assert!(matches!(curve.project(&center), Err(Error::AmbiguousProjection { .. })));
    }

    #[test]
    fn reach_of_unit_circle_and_segment() {
        let circle = Curve::new(CurveKind::Circle { radius: 1.0 }, 3, (0.0, 2.0 * PI), true).unwrap();
        let reach = circle.reach_estimate();
        assert!((0.9..=1.0).contains(&reach), "reach {reach}");
        let segment = Curve::new(
            CurveKind::Segment {
                origin: vec![0.0, 0.0, 0.0],
                direction: vec![1.0, 0.0, 0.0],
            },
            3,
            (-1.0, 1.0),
            false,
        )
        .unwrap();
        assert!(segment.reach_estimate().is_infinite());
    }
}
