//! Radial solutions of Δu + |u|^(p−2)u = 0 by shooting: annuli with
//! u(R₁) = u(R₂) = 0, and a ball mode started from the regular expansion.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, ScanEntry};
use crate::identity::residual::IdentityReport;
use crate::numerics::ode::{dormand_prince, AdaptiveOptions, AdaptiveOutcome};
use crate::numerics::quadrature::unit_sphere_area;
use crate::numerics::CompensatedSum;

/// Output intervals used by the solver unless told otherwise.
pub const PRODUCTION_STEPS: usize = 4000;
/// Trajectories stop once |u| exceeds this.
pub const BLOW_UP: f64 = 1e8;
const ALPHA_MIN: f64 = 1e-3;
const ALPHA_MAX: f64 = 1e4;
const SCAN_PER_DECADE: usize = 40;
const BISECTION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusProblem {
    pub n: usize,
    pub r_inner: f64,
    pub r_outer: f64,
    pub p: f64,
}

impl AnnulusProblem {
    pub fn new(n: usize, r_inner: f64, r_outer: f64, p: f64) -> Result<Self> {
        let problem = Self { n, r_inner, r_outer, p };
        problem.validate()?;
        Ok(problem)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::InvalidParameter(format!(
                "dimension must be at least 3, got {}",
                self.n
            )));
        }
        if !(self.r_inner > 0.0) || !(self.r_outer > self.r_inner) || !self.r_outer.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "annulus needs 0 < R1 < R2, got [{}, {}]",
                self.r_inner, self.r_outer
            )));
        }
        if !(self.p > 2.0) || !self.p.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "exponent must exceed 2, got {}",
                self.p
            )));
        }
        Ok(())
    }

    pub fn f(&self, u: f64) -> f64 {
        u.abs().powf(self.p - 2.0) * u
    }

    pub fn primitive(&self, u: f64) -> f64 {
        u.abs().powf(self.p) / self.p
    }
}

/// Samples (r_j, u_j, u′_j) on a uniform radial grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    /// |u| exceeded the blow-up bound; the samples stop there.
    pub blown_up: bool,
}

impl Trajectory {
    pub fn endpoint(&self) -> f64 {
        *self.u.last().unwrap()
    }

    /// Sign changes among samples 1..=last, including the end point.
    fn crossings(&self) -> usize {
        sign_changes(&self.u[1..])
    }

    /// Sign changes strictly inside the interval (end points excluded).
    pub fn interior_zeros(&self) -> usize {
        let n = self.u.len();
        if n < 3 {
            return 0;
        }
        sign_changes(&self.u[1..n - 1])
    }
}

fn sign_changes(values: &[f64]) -> usize {
    let mut last = 0.0f64;
    let mut count = 0;
    for &v in values {
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = v;
    }
    count
}

fn rhs(n: usize, p: f64) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    let damping = (n - 1) as f64;
    move |r: f64, y: &[f64; 2]| [y[1], -damping / r * y[1] - y[0].abs().powf(p - 2.0) * y[0]]
}

/// Integrates from (r0, y0) across `steps` equal output intervals to r1.
fn integrate(n: usize, p: f64, r0: f64, y0: [f64; 2], r1: f64, steps: usize) -> Trajectory {
    let f = rhs(n, p);
    let options = AdaptiveOptions {
        tolerance: 1e-10,
        ..AdaptiveOptions::default()
    };
    let guard = |_: f64, y: &[f64; 2]| y[0].abs() <= BLOW_UP && y[0].is_finite();
    let h = (r1 - r0) / steps as f64;
    let mut out = Trajectory {
        r: Vec::with_capacity(steps + 1),
        u: Vec::with_capacity(steps + 1),
        du: Vec::with_capacity(steps + 1),
        blown_up: false,
    };
    out.r.push(r0);
    out.u.push(y0[0]);
    out.du.push(y0[1]);
    let mut y = y0;
    let mut step_hint = options.initial_step.min(h);
    for j in 1..=steps {
        let a = r0 + h * (j - 1) as f64;
        let b = if j == steps { r1 } else { r0 + h * j as f64 };
        let local = AdaptiveOptions {
            initial_step: step_hint,
            ..options
        };
        let (next, outcome) = dormand_prince(&f, a, y, b, &local, &guard);
        match outcome {
            AdaptiveOutcome::Reached => {}
            AdaptiveOutcome::Stopped(_) | AdaptiveOutcome::StepLimit(_) => {
                out.blown_up = true;
                break;
            }
        }
        y = next;
        step_hint = (b - a).max(1e-14);
        out.r.push(b);
        out.u.push(y[0]);
        out.du.push(y[1]);
    }
    out
}

/// Trajectory from u(R₁) = 0, u′(R₁) = alpha over `steps` output intervals.
pub fn integrate_radial(problem: &AnnulusProblem, alpha: f64, steps: usize) -> Result<Trajectory> {
    problem.validate()?;
    if !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "shooting slope must be finite, got {alpha}"
        )));
    }
    if steps < 100 {
        return Err(Error::InvalidParameter(format!("need at least 100 steps, got {steps}")));
    }
    Ok(integrate(
        problem.n,
        problem.p,
        problem.r_inner,
        [0.0, alpha],
        problem.r_outer,
        steps,
    ))
}

/// A shooting solution with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution {
    pub problem: AnnulusProblem,
    pub alpha: f64,
    pub nodal_count: usize,
    pub boundary_residual: f64,
    /// max over interval midpoints of the ODE defect of the quintic Hermite
    /// interpolant, relative to max(1, max |f(u)|)
    pub ode_residual: f64,
    pub trajectory: Trajectory,
}

/// Summary record for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSummary {
    pub n: usize,
    pub r_inner: f64,
    pub r_outer: f64,
    pub p: f64,
    pub steps: usize,
    pub alpha: f64,
    pub nodal_count: usize,
    pub boundary_residual: f64,
    pub ode_residual: f64,
    pub gradient_energy: f64,
    pub nonlinear_energy: f64,
    pub energy_relative_gap: f64,
}

impl RadialSolution {
    pub fn steps(&self) -> usize {
        self.trajectory.r.len() - 1
    }

    /// Cubic Hermite interpolant (u, u′) at radius r; None outside [R₁, R₂].
    pub fn sample(&self, r: f64) -> Option<(f64, f64)> {
        hermite(&self.trajectory, r)
    }

    /// (∫ |Du|², ∫ u f(u)) over the annulus by the trapezoid rule on every
    /// `stride`-th sample.
    pub fn energies(&self, stride: usize) -> (f64, f64) {
        let tr = &self.trajectory;
        let area = unit_sphere_area(self.problem.n);
        let w = |j: usize| tr.r[j].powi(self.problem.n as i32 - 1);
        let grad = trapezoid(tr, stride, |j| w(j) * tr.du[j] * tr.du[j]);
        let nonlinear = trapezoid(tr, stride, |j| w(j) * tr.u[j] * self.problem.f(tr.u[j]));
        (area * grad, area * nonlinear)
    }

    pub fn summary(&self) -> RadialSummary {
        let (grad, nonlinear) = self.energies(1);
        RadialSummary {
            n: self.problem.n,
            r_inner: self.problem.r_inner,
            r_outer: self.problem.r_outer,
            p: self.problem.p,
            steps: self.steps(),
            alpha: self.alpha,
            nodal_count: self.nodal_count,
            boundary_residual: self.boundary_residual,
            ode_residual: self.ode_residual,
            gradient_energy: grad,
            nonlinear_energy: nonlinear,
            energy_relative_gap: relative_gap(grad, nonlinear),
        }
    }
}

pub fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn trapezoid(tr: &Trajectory, stride: usize, g: impl Fn(usize) -> f64) -> f64 {
    let last = tr.r.len() - 1;
    let stride = stride.max(1);
    let mut acc = CompensatedSum::new();
    let mut j = 0;
    while j + stride <= last {
        let k = j + stride;
        acc.add(0.5 * (tr.r[k] - tr.r[j]) * (g(j) + g(k)));
        j = k;
    }
    if j < last {
        acc.add(0.5 * (tr.r[last] - tr.r[j]) * (g(j) + g(last)));
    }
    acc.value()
}

fn hermite(tr: &Trajectory, r: f64) -> Option<(f64, f64)> {
    let last = tr.r.len() - 1;
    let (r0, r1) = (tr.r[0], tr.r[last]);
    if !(r >= r0 - 1e-12 * r1.abs() && r <= r1 + 1e-12 * r1.abs()) {
        return None;
    }
    let h = (r1 - r0) / last as f64;
    let i = (((r - r0) / h).floor().max(0.0) as usize).min(last - 1);
    let hi = tr.r[i + 1] - tr.r[i];
    let s = (r - tr.r[i]) / hi;
    let (u0, u1, m0, m1) = (tr.u[i], tr.u[i + 1], tr.du[i] * hi, tr.du[i + 1] * hi);
    let s2 = s * s;
    let s3 = s2 * s;
    let u = (2.0 * s3 - 3.0 * s2 + 1.0) * u0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * u1 + (s3 - s2) * m1;
    let du = ((6.0 * s2 - 6.0 * s) * u0
        + (3.0 * s2 - 4.0 * s + 1.0) * m0
        + (-6.0 * s2 + 6.0 * s) * u1
        + (3.0 * s2 - 2.0 * s) * m1)
        / hi;
    Some((u, du))
}

fn ode_residual(problem: &AnnulusProblem, tr: &Trajectory) -> f64 {
    // quintic Hermite through (u, u′, u″) at both ends, u″ taken from the ODE
    let damping = (problem.n - 1) as f64;
    let second = |j: usize| -damping / tr.r[j] * tr.du[j] - problem.f(tr.u[j]);
    let scale = tr.u.iter().map(|&u| problem.f(u).abs()).fold(1.0, f64::max);
    let mut worst = 0.0f64;
    for i in 0..tr.r.len() - 1 {
        let h = tr.r[i + 1] - tr.r[i];
        let mid = 0.5 * (tr.r[i] + tr.r[i + 1]);
        let (u0, u1) = (tr.u[i], tr.u[i + 1]);
        let (m0, m1) = (h * tr.du[i], h * tr.du[i + 1]);
        let (a0, a1) = (h * h * second(i), h * h * second(i + 1));
        let u = (a0 + a1 + 10.0 * (m0 - m1) + 32.0 * (u0 + u1)) / 64.0;
        let du = -(a0 - a1 + 14.0 * (m0 + m1) + 60.0 * (u0 - u1)) / (32.0 * h);
        let ddu = -(a0 + a1 + 6.0 * (m0 - m1)) / (4.0 * h * h);
        worst = worst.max((ddu + damping / mid * du + problem.f(u)).abs());
    }
    worst / scale
}

/// Log-spaced shooting slopes in [1e−3, 1e4].
pub fn scan_slopes() -> Vec<f64> {
    let decades = (ALPHA_MAX / ALPHA_MIN).log10().round() as usize;
    let count = decades * SCAN_PER_DECADE;
    (0..=count)
        .map(|i| ALPHA_MIN * 10f64.powf(i as f64 / SCAN_PER_DECADE as f64))
        .collect()
}

fn scan(problem: &AnnulusProblem, alphas: &[f64], steps: usize) -> Vec<(ScanEntry, usize)> {
    alphas
        .par_iter()
        .map(|&alpha| {
            let tr = integrate(
                problem.n,
                problem.p,
                problem.r_inner,
                [0.0, alpha],
                problem.r_outer,
                steps,
            );
            let endpoint = if tr.blown_up { f64::NAN } else { tr.endpoint() };
            let crossings = if tr.blown_up { usize::MAX } else { tr.crossings() };
            (
                ScanEntry {
                    alpha,
                    endpoint,
                    zeros: tr.interior_zeros(),
                },
                crossings,
            )
        })
        .collect()
}

/// Solution with `target_nodal_count` interior zeros: the scan locates the
/// first slope interval where the crossing count passes the target, then
/// bisection on that count pins α to 1e−12.
pub fn find_radial_solution(problem: &AnnulusProblem, target_nodal_count: usize) -> Result<RadialSolution> {
    find_radial_solution_with(problem, target_nodal_count, PRODUCTION_STEPS)
}

pub fn find_radial_solution_with(problem: &AnnulusProblem, target: usize, steps: usize) -> Result<RadialSolution> {
    problem.validate()?;
    if steps < 100 {
        return Err(Error::InvalidParameter(format!("need at least 100 steps, got {steps}")));
    }
    // one decade at a time, so low targets never pay for steep trajectories
    let alphas = scan_slopes();
    let mut table: Vec<(ScanEntry, usize)> = Vec::with_capacity(alphas.len());
    let mut bracket = None;
    for chunk in alphas.chunks(SCAN_PER_DECADE) {
        let start = table.len().saturating_sub(1);
        table.extend(scan(problem, chunk, steps));
        if let Some(i) = (start..table.len().saturating_sub(1))
            .find(|&i| table[i].1 <= target && table[i + 1].1 > target && table[i + 1].1 != usize::MAX)
        {
            bracket = Some((table[i].0.alpha, table[i + 1].0.alpha));
            break;
        }
    }
    let Some(bracket) = bracket else {
        return Err(Error::NoBracket {
            target,
            alpha_max: ALPHA_MAX,
            scan: table.into_iter().map(|e| e.0).collect(),
        });
    };
    let crossings = |alpha: f64| {
        let tr = integrate(
            problem.n,
            problem.p,
            problem.r_inner,
            [0.0, alpha],
            problem.r_outer,
            steps,
        );
        (tr.crossings(), tr)
    };
    let (mut lo, mut hi) = bracket;
    let (mut lo_tr, mut hi_tr) = (crossings(lo).1, crossings(hi).1);
    while hi - lo > BISECTION_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (z, tr) = crossings(mid);
        if z <= target {
            lo = mid;
            lo_tr = tr;
        } else {
            hi = mid;
            hi_tr = tr;
        }
    }
    let (alpha, trajectory) = if lo_tr.endpoint().abs() <= hi_tr.endpoint().abs() {
        (lo, lo_tr)
    } else {
        (hi, hi_tr)
    };
    let nodal_count = trajectory.interior_zeros();
    if nodal_count != target || trajectory.blown_up {
        return Err(Error::NoBracket {
            target,
            alpha_max: ALPHA_MAX,
            scan: table.into_iter().map(|e| e.0).collect(),
        });
    }
    Ok(RadialSolution {
        problem: *problem,
        alpha,
        nodal_count,
        boundary_residual: trajectory.endpoint().abs(),
        ode_residual: ode_residual(problem, &trajectory),
        trajectory,
    })
}

/// Identity with v(x) = x on the annulus in radial form, using every
/// `stride`-th sample for the volume integrals:
///
///   ½ ω (R₂ⁿ u′(R₂)² − R₁ⁿ u′(R₁)²) = ω ∫ r^(n−1) [(1 − n/2) u′² + n F(u)] dr
pub fn radial_identity_check_with_stride(solution: &RadialSolution, stride: usize) -> IdentityReport {
    let pr = &solution.problem;
    let tr = &solution.trajectory;
    let n = pr.n as f64;
    let area = unit_sphere_area(pr.n);
    let last = tr.r.len() - 1;
    let lhs = 0.5 * area * (pr.r_outer.powf(n) * tr.du[last] * tr.du[last] - pr.r_inner.powf(n) * tr.du[0] * tr.du[0]);
    let w = |j: usize| tr.r[j].powi(pr.n as i32 - 1);
    let jacobian = area * trapezoid(tr, stride, |j| w(j) * tr.du[j] * tr.du[j]);
    let divergence = area
        * trapezoid(tr, stride, |j| {
            w(j) * n * (pr.primitive(tr.u[j]) - 0.5 * tr.du[j] * tr.du[j])
        });
    let mut report = IdentityReport::new(
        lhs,
        jacobian,
        divergence,
        format!("radial-{}", last.div_ceil(stride.max(1))),
    );
    report.interior_nodes = last.div_ceil(stride.max(1)) + 1;
    report.boundary_nodes = 2;
    report.boundary_max_abs_u = tr.u[0].abs().max(tr.u[last].abs());
    report
}

pub fn radial_identity_check(solution: &RadialSolution) -> IdentityReport {
    radial_identity_check_with_stride(solution, 1)
}

/// The zero solution on an annulus, for degenerate checks.
pub fn zero_solution(problem: &AnnulusProblem, steps: usize) -> Result<RadialSolution> {
    let trajectory = integrate_radial(problem, 0.0, steps)?;
    Ok(RadialSolution {
        problem: *problem,
        alpha: 0.0,
        nodal_count: 0,
        boundary_residual: 0.0,
        ode_residual: 0.0,
        trajectory,
    })
}

/// Ball of radius R in ℝⁿ for the regular-solution shooting mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallProblem {
    pub n: usize,
    pub radius: f64,
    pub p: f64,
}

/// Scan table and sign-change brackets of the ball mode.
pub type BallScan = (Vec<ScanEntry>, Vec<(f64, f64)>);

/// Starting radius of the ball mode.
pub const BALL_START: f64 = 1e-6;

impl BallProblem {
    pub fn new(n: usize, radius: f64, p: f64) -> Result<Self> {
        AnnulusProblem::new(n, BALL_START, radius, p)?;
        Ok(Self { n, radius, p })
    }

    /// Largest u(0) for which the quadratic start term stays below 1e−3 u(0).
    pub fn max_center_value(&self) -> f64 {
        let limit = 1e-3 * 2.0 * self.n as f64 / (BALL_START * BALL_START);
        limit.powf(1.0 / (self.p - 2.0))
    }
}

/// Regular solution with u(0) = u0 from r = 1e−6, started on the expansion
/// u ≈ u0 − f(u0) r²/(2n).
pub fn shoot_ball(problem: &BallProblem, u0: f64, steps: usize) -> Result<Trajectory> {
    if !(u0.abs() <= problem.max_center_value()) {
        return Err(Error::InvalidParameter(format!(
            "center value {u0} exceeds {:.3e}, where the start expansion is no longer accurate",
            problem.max_center_value()
        )));
    }
    let r0 = BALL_START;
    let f0 = u0.abs().powf(problem.p - 2.0) * u0;
    let nn = problem.n as f64;
    let y0 = [u0 - f0 * r0 * r0 / (2.0 * nn), -f0 * r0 / nn];
    Ok(integrate(problem.n, problem.p, r0, y0, problem.radius, steps.max(100)))
}

/// Scans center values u0 log-spaced in [1e−3, top], with top capped at
/// [`BallProblem::max_center_value`]. Returns the table and the consecutive
/// pairs across which u(R) changes sign; no pairs means no regular solution
/// vanishing at R was found.
pub fn ball_bracket_scan(problem: &BallProblem, top: Option<f64>, steps: usize) -> Result<BallScan> {
    let top = top.map_or(problem.max_center_value(), |t| t.min(problem.max_center_value()));
    if !(top > 1e-3) {
        return Err(Error::InvalidParameter(format!(
            "scan ceiling must exceed 1e-3, got {top}"
        )));
    }
    let decades = (top / 1e-3).log10();
    let count = (decades * SCAN_PER_DECADE as f64).ceil() as usize;
    let values: Vec<f64> = (0..=count)
        .map(|i| 1e-3 * (top / 1e-3).powf(i as f64 / count as f64))
        .collect();
    let table: Vec<ScanEntry> = values
        .par_iter()
        .map(|&u0| {
            let tr = shoot_ball(problem, u0, steps)?;
            Ok(ScanEntry {
                alpha: u0,
                endpoint: if tr.blown_up { f64::NAN } else { tr.endpoint() },
                zeros: tr.interior_zeros(),
            })
        })
        .collect::<Result<_>>()?;
    let brackets = table
        .windows(2)
        .filter(|w| w[0].endpoint.is_finite() && w[1].endpoint.is_finite())
        .filter(|w| (w[0].endpoint > 0.0) != (w[1].endpoint > 0.0) || w[0].endpoint == 0.0)
        .map(|w| (w[0].alpha, w[1].alpha))
        .collect();
    Ok((table, brackets))
}
