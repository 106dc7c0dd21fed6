//! Executes a validated plan and writes its artifacts.

use std::fmt::Write as _;

use serde::Serialize;
use tubelab::error::ScanEntry;
use tubelab::geometry::{build_tube_grid, shell_grid, GridResolution, Manifold};
use tubelab::identity::{
    ball_eigenfunction, ball_eigenvalue, certificate_sweep, identity_residual, residual_tolerance, Certificate,
    IdentityReport, Nonlinearity, PositionField, RadialData, SolutionData, Sweep, TheoremTag, Threshold,
};
use tubelab::io::{
    format_float, write_bounds_csv, write_certificates_csv, write_grid_csv, write_json, write_trajectory_csv, BoundsRow,
};
use tubelab::radial::{
    ball_bracket_scan, find_radial_solution_with, radial_identity_check, AnnulusProblem, BallProblem, RadialSummary,
};
use tubelab::Error;

use crate::config::{Format, Plan, Run};
use crate::error::CliError;
use crate::output::OutputDir;
use crate::plot::{Plot, Series};

pub fn execute(run: &Run, out: &mut OutputDir) -> Result<(), CliError> {
    match &run.plan {
        Plan::Certify {
            center,
            tag,
            p,
            epsilon,
            resolution,
            export_grid,
        } => certify(out, run.format, center, *tag, *p, *epsilon, *resolution, *export_grid),
        Plan::Sweep {
            center,
            tag,
            p,
            epsilons,
            resolution,
        } => sweep(out, run.format, center, *tag, *p, epsilons, *resolution),
        Plan::RadialAnnulus {
            problem,
            nodal_count,
            steps,
        } => radial_annulus(out, run.format, problem, *nodal_count, *steps),
        Plan::RadialBall { problem, top, steps } => radial_ball(out, run.format, problem, *top, *steps),
        Plan::IdentityBall { n, radius, resolution } => identity_ball(out, run.format, *n, *radius, *resolution),
        Plan::IdentityAnnulus {
            problem,
            nodal_count,
            steps,
            resolution,
        } => identity_annulus(out, run.format, problem, *nodal_count, *steps, *resolution),
    }
}

fn bounds_rows(sweep: &Sweep) -> Vec<BoundsRow> {
    sweep
        .bounds
        .iter()
        .flat_map(|b| [BoundsRow::from(&b.base), BoundsRow::from(&b.refined)])
        .collect()
}

fn write_plot(out: &mut OutputDir, name: &str, plot: &Plot) -> Result<(), CliError> {
    out.write(&format!("{name}.dat"), plot.data().as_bytes())?;
    out.write(&format!("{name}.svg"), plot.svg().as_bytes())
}

#[allow(clippy::too_many_arguments)]
fn certify(
    out: &mut OutputDir,
    format: Format,
    center: &Manifold,
    tag: TheoremTag,
    p: f64,
    epsilon: f64,
    resolution: GridResolution,
    export_grid: bool,
) -> Result<(), CliError> {
    let sweep = certificate_sweep(center, tag, p, &[epsilon], resolution)?;
    if format.json() {
        out.write_with("certificate.json", |buf| write_json(buf, &sweep.certificates[0]))?;
    }
    if format.csv() {
        out.write_with("certificate.csv", |buf| {
            write_certificates_csv(buf, &sweep.certificates)
        })?;
        out.write_with("bounds.csv", |buf| write_bounds_csv(buf, &bounds_rows(&sweep)))?;
    }
    if export_grid {
        let tube = build_tube_grid(center, epsilon, resolution)?;
        out.write_with("grid.csv", |buf| write_grid_csv(buf, tube.grid()))?;
    }
    Ok(())
}

fn sweep(
    out: &mut OutputDir,
    format: Format,
    center: &Manifold,
    tag: TheoremTag,
    p: f64,
    epsilons: &[f64],
    resolution: GridResolution,
) -> Result<(), CliError> {
    let sweep = certificate_sweep(center, tag, p, epsilons, resolution)?;
    if format.csv() {
        out.write_with("sweep.csv", |buf| write_certificates_csv(buf, &sweep.certificates))?;
        out.write_with("bounds.csv", |buf| write_bounds_csv(buf, &bounds_rows(&sweep)))?;
    }
    if format.json() {
        out.write_with("sweep.json", |buf| write_json(buf, &sweep))?;
    }
    let mut order: Vec<&Certificate> = sweep.certificates.iter().collect();
    order.sort_by(|a, b| a.epsilon.total_cmp(&b.epsilon));
    let series = |label: &str, value: fn(&Certificate) -> f64| Series {
        label: label.into(),
        points: order.iter().map(|c| (c.epsilon, value(c))).collect(),
    };
    let geometry = &sweep.geometry;
    let mu = Plot {
        title: format!("deviation bounds, {geometry}"),
        x_label: "epsilon".into(),
        y_label: "bound".into(),
        series: vec![series("mu_div", |c| c.mu_div), series("mu_quad", |c| c.mu_quad)],
        reference: None,
    };
    let total = Plot {
        title: format!("certificate total, {geometry}, p = {p}"),
        x_label: "epsilon".into(),
        y_label: "total".into(),
        series: vec![series("total", |c| c.total)],
        reference: Some(0.0),
    };
    write_plot(out, "mu_vs_epsilon", &mu)?;
    write_plot(out, "total_vs_epsilon", &total)?;
    if let Threshold::NonMonotone = sweep.threshold {
        eprintln!("warning: certified and inconclusive thicknesses interleave; no threshold reported");
    }
    Ok(())
}

fn scan_table(header: &str, scan: &[ScanEntry]) -> String {
    let mut text = format!("{header},endpoint,zeros\n");
    for e in scan {
        let _ = writeln!(
            text,
            "{},{},{}",
            format_float(e.alpha),
            format_float(e.endpoint),
            e.zeros
        );
    }
    text
}

fn profile_plot(summary: &RadialSummary, r: &[f64], u: &[f64]) -> Plot {
    Plot {
        title: format!(
            "radial profile, n = {}, p = {}, {} interior zeros",
            summary.n, summary.p, summary.nodal_count
        ),
        x_label: "r".into(),
        y_label: "u".into(),
        series: vec![Series {
            label: "u(r)".into(),
            points: r.iter().copied().zip(u.iter().copied()).collect(),
        }],
        reference: Some(0.0),
    }
}

fn radial_annulus(
    out: &mut OutputDir,
    format: Format,
    problem: &AnnulusProblem,
    nodal_count: usize,
    steps: usize,
) -> Result<(), CliError> {
    let solution = match find_radial_solution_with(problem, nodal_count, steps) {
        Ok(s) => s,
        Err(e) => {
            if let Error::NoBracket { scan, .. } = &e {
                out.write("scan.csv", scan_table("alpha", scan).as_bytes())?;
            }
            return Err(e.into());
        }
    };
    let summary = solution.summary();
    if format.csv() {
        out.write_with("solution.csv", |buf| write_trajectory_csv(buf, &solution.trajectory))?;
    }
    if format.json() {
        out.write_with("summary.json", |buf| write_json(buf, &summary))?;
    }
    let plot = profile_plot(&summary, &solution.trajectory.r, &solution.trajectory.u);
    write_plot(out, "profile", &plot)
}

#[derive(Serialize)]
struct BallSummary {
    problem: BallProblem,
    steps: usize,
    scan_top: f64,
    max_center_value: f64,
    /// Consecutive center values across which u(R) changes sign.
    brackets: Vec<(f64, f64)>,
    found_sign_change: bool,
}

fn radial_ball(
    out: &mut OutputDir,
    format: Format,
    problem: &BallProblem,
    top: Option<f64>,
    steps: usize,
) -> Result<(), CliError> {
    let (scan, brackets) = ball_bracket_scan(problem, top, steps)?;
    let summary = BallSummary {
        problem: *problem,
        steps,
        scan_top: top.map_or(problem.max_center_value(), |t| t.min(problem.max_center_value())),
        max_center_value: problem.max_center_value(),
        found_sign_change: !brackets.is_empty(),
        brackets,
    };
    if format.csv() {
        out.write("scan.csv", scan_table("u0", &scan).as_bytes())?;
    }
    if format.json() {
        out.write_with("summary.json", |buf| write_json(buf, &summary))?;
    }
    let plot = Plot {
        title: format!("u(R) against u(0), n = {}, p = {}", problem.n, problem.p),
        x_label: "log10 u(0)".into(),
        y_label: "u(R)".into(),
        series: vec![Series {
            label: "u(R)".into(),
            points: scan.iter().map(|e| (e.alpha.log10(), e.endpoint)).collect(),
        }],
        reference: Some(0.0),
    };
    write_plot(out, "scan", &plot)
}

#[derive(Serialize)]
struct IdentitySummary<'a> {
    domain: String,
    base: &'a IdentityReport,
    refined: &'a IdentityReport,
    tolerance: f64,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    radial: Option<&'a IdentityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    solution: Option<RadialSummary>,
}

fn identity_csv(reports: &[(&str, &IdentityReport)]) -> String {
    let mut text =
        String::from("check,resolution,lhs,rhs_jacobian_term,rhs_divergence_term,rhs,residual,relative_residual\n");
    for (check, r) in reports {
        let _ = writeln!(
            text,
            "{check},{},{},{},{},{},{},{}",
            r.resolution,
            format_float(r.lhs),
            format_float(r.rhs_jacobian_term),
            format_float(r.rhs_divergence_term),
            format_float(r.rhs),
            format_float(r.residual),
            format_float(r.relative_residual)
        );
    }
    text
}

/// Shell grids at the resolution and its doubling: 4·R radial nodes and the
/// A-point angular rule.
fn shell_pair(
    n: usize,
    inner: f64,
    outer: f64,
    resolution: GridResolution,
    data: &dyn SolutionData,
    nl: &Nonlinearity,
) -> Result<(IdentityReport, IdentityReport), CliError> {
    let field = PositionField { dim: n };
    let mut reports = Vec::with_capacity(2);
    for res in [resolution, resolution.doubled()] {
        let (radial, angular) = (4 * res.radial, res.angular);
        let grid = shell_grid(n, inner, outer, radial, angular)?;
        reports.push(identity_residual(
            data,
            nl,
            &grid,
            &field,
            &format!("{radial}x{angular}"),
        )?);
    }
    let refined = reports.pop().unwrap();
    Ok((reports.pop().unwrap(), refined))
}

fn finish_identity(out: &mut OutputDir, format: Format, summary: &IdentitySummary) -> Result<(), CliError> {
    if format.json() {
        out.write_with("identity.json", |buf| write_json(buf, summary))?;
    }
    if format.csv() {
        let mut rows = vec![("shell", summary.base), ("shell", summary.refined)];
        if let Some(radial) = summary.radial {
            rows.push(("radial", radial));
        }
        out.write("identity.csv", identity_csv(&rows).as_bytes())?;
    }
    if !summary.passed {
        return Err(CliError::Check(format!(
            "identity residual {:.3e} exceeds the tolerance {:.3e}",
            summary.refined.relative_residual, summary.tolerance
        )));
    }
    Ok(())
}

fn identity_ball(
    out: &mut OutputDir,
    format: Format,
    n: usize,
    radius: f64,
    resolution: GridResolution,
) -> Result<(), CliError> {
    // f(u) = λ₁u; the declared exponent plays no role for a linear f
    let nl = Nonlinearity::Linear {
        lambda: ball_eigenvalue(radius),
        p: 2.5,
    };
    let (base, refined) = shell_pair(n, 0.0, radius, resolution, &ball_eigenfunction(radius), &nl)?;
    let tolerance = residual_tolerance(&base, &refined);
    let summary = IdentitySummary {
        domain: format!("ball R = {radius}"),
        passed: refined.relative_residual < tolerance,
        base: &base,
        refined: &refined,
        tolerance,
        radial: None,
        solution: None,
    };
    finish_identity(out, format, &summary)
}

fn identity_annulus(
    out: &mut OutputDir,
    format: Format,
    problem: &AnnulusProblem,
    nodal_count: usize,
    steps: usize,
    resolution: GridResolution,
) -> Result<(), CliError> {
    let solution = find_radial_solution_with(problem, nodal_count, steps)?;
    let data = RadialData(|r: f64| solution.sample(r));
    let nl = Nonlinearity::Power { p: problem.p };
    let (base, refined) = shell_pair(problem.n, problem.r_inner, problem.r_outer, resolution, &data, &nl)?;
    let radial = radial_identity_check(&solution);
    let tolerance = residual_tolerance(&base, &refined);
    let summary = IdentitySummary {
        domain: format!("annulus {} < r < {}", problem.r_inner, problem.r_outer),
        passed: refined.relative_residual < tolerance,
        base: &base,
        refined: &refined,
        tolerance,
        radial: Some(&radial),
        solution: Some(solution.summary()),
    };
    finish_identity(out, format, &summary)
}
