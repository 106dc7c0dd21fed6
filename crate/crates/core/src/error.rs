use thiserror::Error;

/// Errors raised by the geometry, field, identity and radial modules.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate curve: |d1| < 1e-12 at parameter {parameter}")]
    DegenerateCurve { parameter: f64 },

    #[error("curve is flagged closed but endpoints do not match (position gap {position_gap:e}, tangent gap {tangent_gap:e})")]
    NotClosed { position_gap: f64, tangent_gap: f64 },

    #[error("transport drift {drift:e} at t = {parameter} exceeds 1e-6; increase node_count")]
    TransportDrift { parameter: f64, drift: f64 },

    #[error("thickness {epsilon} is not below the reach estimate {reach}")]
    BeyondReach { epsilon: f64, reach: f64 },

    #[error("non-positive volume Jacobian {weight} at t = {parameter} (thickness at or beyond reach)")]
    NonPositiveJacobian { parameter: f64, weight: f64 },

    #[error("projection did not converge in {iterations} steps; best candidate at distance {distance}")]
    ProjectionNonConvergence {
        iterations: usize,
        best_foot: Vec<f64>,
        distance: f64,
    },

    #[error("ambiguous projection: two candidates at distances {first} and {second} (point beyond reach)")]
    AmbiguousProjection { first: f64, second: f64 },

    #[error("point lies outside the field domain: {0}")]
    OutsideDomain(String),

    #[error("field kind {kind} is not defined on this geometry: {reason}")]
    UnsupportedField { kind: String, reason: String },

    #[error("no critical exponent in effective dimension {0} (need m >= 3)")]
    NoCriticalExponent(usize),

    #[error("missing solution data at node {0}")]
    MissingData(usize),

    #[error("no shooting bracket found for nodal count {target} in alpha in (0, {alpha_max}]")]
    NoBracket {
        target: usize,
        alpha_max: f64,
        scan: Vec<ScanEntry>,
    },

    #[error("radial trajectory blew up at r = {radius}")]
    BlowUp { radius: f64 },

    #[error("I/O error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

/// One row of a shooting scan table, returned with bracket failures.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ScanEntry {
    pub alpha: f64,
    pub endpoint: f64,
    pub zeros: usize,
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
