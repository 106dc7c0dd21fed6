//! Run configuration: TOML with explicit keys, validated into a plan before
//! any computation starts.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use tubelab::fields::{FieldKind, MultiplierField};
use tubelab::geometry::{GeometryConfig, GridResolution, Manifold};
use tubelab::identity::TheoremTag;
use tubelab::radial::{AnnulusProblem, BallProblem, PRODUCTION_STEPS};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Certify,
    IdentityCheck,
    Radial,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Certify => "certify",
            Command::IdentityCheck => "identity-check",
            Command::Radial => "radial",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
    #[default]
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

/// The configuration file. Unknown keys are rejected.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Optional; when present it must match the subcommand.
    pub command: Option<Command>,
    pub geometry: GeometryConfig,
    pub field: Option<FieldKind>,
    pub theorem: Option<TheoremTag>,
    /// Manifold dimension; checked against the geometry when given.
    pub k: Option<usize>,
    pub p: Option<f64>,
    /// Thickness for `certify`.
    pub epsilon: Option<f64>,
    /// Thickness list for `sweep`.
    pub epsilons: Option<Vec<f64>>,
    pub resolution: Option<String>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    /// Interior zeros of the radial solution (`radial`, annulus `identity-check`).
    pub nodal_count: Option<usize>,
    /// Output intervals of the radial integrator.
    pub steps: Option<usize>,
    /// Largest center value scanned in ball mode.
    pub scan_top: Option<f64>,
    /// Also write the quadrature grid of the tube (`certify`).
    #[serde(default)]
    pub export_grid: bool,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("invalid config: {e}")))
    }
}

/// Radial-symmetric domains handled by `radial` and `identity-check`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Ball { radius: f64 },
    Annulus { inner: f64, outer: f64 },
}

#[derive(Debug, Clone)]
pub enum Plan {
    Certify {
        center: Manifold,
        tag: TheoremTag,
        p: f64,
        epsilon: f64,
        resolution: GridResolution,
        export_grid: bool,
    },
    Sweep {
        center: Manifold,
        tag: TheoremTag,
        p: f64,
        epsilons: Vec<f64>,
        resolution: GridResolution,
    },
    RadialAnnulus {
        problem: AnnulusProblem,
        nodal_count: usize,
        steps: usize,
    },
    RadialBall {
        problem: BallProblem,
        top: Option<f64>,
        steps: usize,
    },
    IdentityBall {
        n: usize,
        radius: f64,
        resolution: GridResolution,
    },
    IdentityAnnulus {
        problem: AnnulusProblem,
        nodal_count: usize,
        steps: usize,
        resolution: GridResolution,
    },
}

/// A validated run: what to compute and where to put it.
#[derive(Debug, Clone)]
pub struct Run {
    pub command: Command,
    pub plan: Plan,
    pub output: PathBuf,
    pub format: Format,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub resolution: Option<String>,
}

fn invalid(message: impl Into<String>) -> CliError {
    CliError::Validation(message.into())
}

fn parse_domain(config: &GeometryConfig) -> Result<Option<Domain>, CliError> {
    let mut words = config.descriptor.split_whitespace();
    let name = words.next().unwrap_or("");
    if name != "ball" && name != "annulus" {
        return Ok(None);
    }
    let args: Vec<f64> = words
        .map(|w| {
            w.parse::<f64>()
                .map_err(|_| invalid(format!("'{w}' in '{}' is not a number", config.descriptor)))
        })
        .collect::<Result<_, _>>()?;
    let extras = config.interval.is_some()
        || config.closed.is_some()
        || config.coefficients.is_some()
        || config.constant.is_some()
        || config.cosine.is_some()
        || config.sine.is_some();
    if extras {
        return Err(invalid(format!(
            "'{name}' takes no interval, closed flag or coefficients"
        )));
    }
    match (name, args.as_slice()) {
        ("ball", []) => Ok(Some(Domain::Ball { radius: 1.0 })),
        ("ball", [r]) if *r > 0.0 => Ok(Some(Domain::Ball { radius: *r })),
        ("annulus", [a, b]) => Ok(Some(Domain::Annulus { inner: *a, outer: *b })),
        _ => Err(invalid(format!(
            "expected 'ball [R]' with R > 0 or 'annulus R1 R2', got '{}'",
            config.descriptor
        ))),
    }
}

/// Theorem tag from the explicit settings, or from the geometry.
fn resolve_tag(
    center: &Manifold,
    field: Option<FieldKind>,
    theorem: Option<TheoremTag>,
) -> Result<TheoremTag, CliError> {
    let from_field = field.map(|f| match f {
        FieldKind::CurveFieldV => TheoremTag::CurveTube,
        FieldKind::ProjectionField => TheoremTag::ClosedCurveTube,
        FieldKind::ManifoldField => TheoremTag::ManifoldTube,
    });
    let tag = match (theorem, from_field) {
        (Some(t), Some(f)) if t != f => {
            return Err(invalid(format!(
                "field '{}' does not belong to certificate tag {}",
                field.unwrap(),
                t.label()
            )))
        }
        (Some(t), _) | (None, Some(t)) => t,
        (None, None) => match center.as_curve() {
            Some(curve) if curve.is_closed() => TheoremTag::ClosedCurveTube,
            _ if center.k() == 1 => TheoremTag::CurveTube,
            _ => TheoremTag::ManifoldTube,
        },
    };
    Ok(tag)
}

fn required<T>(value: Option<T>, key: &str, command: Command) -> Result<T, CliError> {
    value.ok_or_else(|| invalid(format!("'{key}' is required for {}", command.name())))
}

fn forbid<T>(value: &Option<T>, key: &str, command: Command) -> Result<(), CliError> {
    if value.is_some() {
        return Err(invalid(format!("'{key}' does not apply to {}", command.name())));
    }
    Ok(())
}

fn check_exponent(p: f64) -> Result<f64, CliError> {
    if !(p > 2.0) || !p.is_finite() {
        return Err(invalid(format!("p must be a finite number above 2, got {p}")));
    }
    Ok(p)
}

fn check_steps(steps: Option<usize>) -> Result<usize, CliError> {
    let steps = steps.unwrap_or(PRODUCTION_STEPS);
    if steps < 100 {
        return Err(invalid(format!("steps must be at least 100, got {steps}")));
    }
    Ok(steps)
}

/// Validates the whole configuration; nothing is computed before this succeeds.
pub fn validate(config: RunConfig, command: Command, overrides: Overrides) -> Result<Run, CliError> {
    if let Some(c) = config.command {
        if c != command {
            return Err(invalid(format!(
                "config is for '{}' but the subcommand is '{}'",
                c.name(),
                command.name()
            )));
        }
    }
    let resolution_text = overrides.resolution.or(config.resolution.clone());
    let resolution = match &resolution_text {
        Some(text) => GridResolution::from_str(text).map_err(|e| invalid(e.to_string()))?,
        None => GridResolution::DEFAULT,
    };
    let output = overrides
        .output
        .or(config.output.clone())
        .unwrap_or_else(|| PathBuf::from("tubelab-out"));
    let format = overrides.format.or(config.format).unwrap_or_default();
    let domain = parse_domain(&config.geometry)?;
    let n = config.geometry.n;

    let plan = match command {
        Command::Certify | Command::Sweep => {
            if domain.is_some() {
                return Err(invalid(format!(
                    "{} needs a tube center, not '{}'",
                    command.name(),
                    config.geometry.descriptor
                )));
            }
            forbid(&config.nodal_count, "nodal_count", command)?;
            forbid(&config.steps, "steps", command)?;
            forbid(&config.scan_top, "scan_top", command)?;
            let center = config.geometry.build().map_err(|e| invalid(e.to_string()))?;
            if let Some(k) = config.k {
                if k != center.k() {
                    return Err(invalid(format!(
                        "k = {k} does not match the geometry (k = {})",
                        center.k()
                    )));
                }
            }
            let tag = resolve_tag(&center, config.field, config.theorem)?;
            tag.effective_dimension(center.ambient_dim(), center.k())
                .map_err(|e| invalid(e.to_string()))?;
            MultiplierField::new(tag.field_kind(), &center).map_err(|e| invalid(e.to_string()))?;
            if tag == TheoremTag::ClosedCurveTube && !center.as_curve().is_some_and(|c| c.is_closed()) {
                return Err(invalid("the projection field certificate needs a closed curve"));
            }
            let p = check_exponent(required(config.p, "p", command)?)?;
            let reach = center.reach_estimate();
            let check_eps = |eps: f64| {
                if !(eps > 0.0) || eps >= reach {
                    Err(invalid(format!(
                        "thickness {eps} must lie in (0, {reach:.6e}), the reach estimate"
                    )))
                } else {
                    Ok(eps)
                }
            };
            if command == Command::Certify {
                forbid(&config.epsilons, "epsilons", command)?;
                let epsilon = check_eps(required(config.epsilon, "epsilon", command)?)?;
                Plan::Certify {
                    center,
                    tag,
                    p,
                    epsilon,
                    resolution,
                    export_grid: config.export_grid,
                }
            } else {
                forbid(&config.epsilon, "epsilon", command)?;
                if config.export_grid {
                    return Err(invalid("'export_grid' applies to certify only"));
                }
                let epsilons = required(config.epsilons, "epsilons", command)?;
                if epsilons.is_empty() {
                    return Err(invalid("'epsilons' must not be empty"));
                }
                for &eps in &epsilons {
                    check_eps(eps)?;
                }
                Plan::Sweep {
                    center,
                    tag,
                    p,
                    epsilons,
                    resolution,
                }
            }
        }
        Command::Radial | Command::IdentityCheck => {
            let domain = domain.ok_or_else(|| {
                invalid(format!(
                    "{} needs geometry 'ball [R]' or 'annulus R1 R2', got '{}'",
                    command.name(),
                    config.geometry.descriptor
                ))
            })?;
            forbid(&config.field, "field", command)?;
            forbid(&config.theorem, "theorem", command)?;
            forbid(&config.k, "k", command)?;
            forbid(&config.epsilon, "epsilon", command)?;
            forbid(&config.epsilons, "epsilons", command)?;
            if config.export_grid {
                return Err(invalid("'export_grid' applies to certify only"));
            }
            match (command, domain) {
                (Command::Radial, Domain::Annulus { inner, outer }) => {
                    forbid(&config.scan_top, "scan_top", command)?;
                    forbid(&resolution_text, "resolution", command)?;
                    let p = check_exponent(required(config.p, "p", command)?)?;
                    let problem = AnnulusProblem::new(n, inner, outer, p).map_err(|e| invalid(e.to_string()))?;
                    Plan::RadialAnnulus {
                        problem,
                        nodal_count: config.nodal_count.unwrap_or(0),
                        steps: check_steps(config.steps)?,
                    }
                }
                (Command::Radial, Domain::Ball { radius }) => {
                    forbid(&config.nodal_count, "nodal_count", command)?;
                    forbid(&resolution_text, "resolution", command)?;
                    let p = check_exponent(required(config.p, "p", command)?)?;
                    let problem = BallProblem::new(n, radius, p).map_err(|e| invalid(e.to_string()))?;
                    if let Some(top) = config.scan_top {
                        if !(top > 1e-3) {
                            return Err(invalid(format!("scan_top must exceed 1e-3, got {top}")));
                        }
                    }
                    Plan::RadialBall {
                        problem,
                        top: config.scan_top,
                        steps: check_steps(config.steps)?,
                    }
                }
                (_, Domain::Ball { radius }) => {
                    forbid(&config.nodal_count, "nodal_count", command)?;
                    forbid(&config.steps, "steps", command)?;
                    forbid(&config.scan_top, "scan_top", command)?;
                    forbid(&config.p, "p", command)?;
                    if n != 3 {
                        return Err(invalid(format!(
                            "the ball eigenfunction check runs in n = 3, got n = {n}"
                        )));
                    }
                    Plan::IdentityBall { n, radius, resolution }
                }
                (_, Domain::Annulus { inner, outer }) => {
                    forbid(&config.scan_top, "scan_top", command)?;
                    let p = check_exponent(required(config.p, "p", command)?)?;
                    let problem = AnnulusProblem::new(n, inner, outer, p).map_err(|e| invalid(e.to_string()))?;
                    Plan::IdentityAnnulus {
                        problem,
                        nodal_count: config.nodal_count.unwrap_or(0),
                        steps: check_steps(config.steps)?,
                        resolution,
                    }
                }
            }
        }
    };
    Ok(Run {
        command,
        plan,
        output,
        format,
    })
}
