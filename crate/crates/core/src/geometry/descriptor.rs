//! Named geometry descriptors as they appear in configuration files.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::curve::{Curve, CurveKind};
use crate::geometry::manifold::{stereographic_chart, Manifold};

/// Geometry section of a configuration. `descriptor` is one of
///
/// - `segment`: the x-axis over [−1, 1]
/// - `circle [R]`: closed circle of radius R (default 1)
/// - `circle-arc [R]`: open arc of the circle over the parameter interval (default [−1, 1])
/// - `helix-arc [R pitch]`: (R cos t, R sin t, pitch·t) over [0, 2π] by default
/// - `stereographic-cap k r`: the stereographic image of {|y| < r} in the unit sphere
/// - `sphere k R`: the round k-sphere of radius R
/// - `polynomial`: per-component ascending coefficients in `coefficients`
/// - `fourier`: `constant`, `cosine`, `sine` harmonics, closed over [0, 2π]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub descriptor: String,
    /// Ambient dimension.
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cosine: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sine: Option<Vec<Vec<f64>>>,
}

impl GeometryConfig {
    pub fn named(descriptor: &str, n: usize) -> Self {
        Self {
            descriptor: descriptor.into(),
            n,
            interval: None,
            closed: None,
            coefficients: None,
            constant: None,
            cosine: None,
            sine: None,
        }
    }

    /// Builds the manifold. Curves keep their raw parametrization; tube
    /// construction normalizes them to unit speed.
    pub fn build(&self) -> Result<Manifold> {
        let mut words = self.descriptor.split_whitespace();
        let name = words
            .next()
            .ok_or_else(|| Error::Parse("empty geometry descriptor".into()))?;
        let args: Vec<f64> = words
            .map(|w| {
                w.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("descriptor argument '{w}' is not a number")))
            })
            .collect::<Result<_>>()?;
        let arity = |allowed: &[usize]| -> Result<()> {
            if allowed.contains(&args.len()) {
                Ok(())
            } else {
                Err(Error::Parse(format!(
                    "descriptor '{name}' takes {allowed:?} arguments, got {}",
                    args.len()
                )))
            }
        };
        let integer = |x: f64, what: &str| -> Result<usize> {
            if x >= 1.0 && x.fract() == 0.0 {
                Ok(x as usize)
            } else {
                Err(Error::Parse(format!("{what} must be a positive integer, got {x}")))
            }
        };
        self.check_extras(name)?;
        let n = self.n;
        let interval = |default: (f64, f64)| self.interval.map_or(default, |[a, b]| (a, b));
        let curve = |kind: CurveKind, default: (f64, f64), closed: bool| -> Result<Manifold> {
            Ok(Manifold::Curve(Curve::new(
                kind,
                n,
                interval(default),
                self.closed.unwrap_or(closed),
            )?))
        };
        match name {
            "segment" => {
                arity(&[0])?;
                let mut direction = vec![0.0; n];
                if n > 0 {
                    direction[0] = 1.0;
                }
                curve(
                    CurveKind::Segment {
                        origin: vec![0.0; n],
                        direction,
                    },
                    (-1.0, 1.0),
                    false,
                )
            }
            "circle" => {
                arity(&[0, 1])?;
                let radius = args.first().copied().unwrap_or(1.0);
                curve(CurveKind::Circle { radius }, (0.0, 2.0 * PI), true)
            }
            "circle-arc" => {
                arity(&[0, 1])?;
                let radius = args.first().copied().unwrap_or(1.0);
                curve(CurveKind::Circle { radius }, (-1.0, 1.0), false)
            }
            "helix-arc" => {
                arity(&[0, 2])?;
                let (radius, pitch) = if args.len() == 2 { (args[0], args[1]) } else { (1.0, 1.0) };
                curve(CurveKind::Helix { radius, pitch }, (0.0, 2.0 * PI), false)
            }
            "stereographic-cap" => {
                arity(&[2])?;
                let k = integer(args[0], "manifold dimension")?;
                if self.interval.is_some() || self.closed.is_some() {
                    return Err(Error::Parse("stereographic-cap takes no interval or closed flag".into()));
                }
                stereographic_chart(k, n, args[1])
            }
            "sphere" => {
                arity(&[2])?;
                let k = integer(args[0], "sphere dimension")?;
                let radius = args[1];
                if !(radius > 0.0) || n < k + 1 {
                    return Err(Error::InvalidParameter(format!(
                        "sphere needs R > 0 and n >= k + 1, got R = {radius}, k = {k}, n = {n}"
                    )));
                }
                Ok(Manifold::Sphere { k, n, radius })
            }
            "polynomial" => {
                arity(&[0])?;
                let coefficients = self
                    .coefficients
                    .clone()
                    .ok_or_else(|| Error::Parse("polynomial curve needs 'coefficients'".into()))?;
                curve(CurveKind::Polynomial { coefficients }, (-1.0, 1.0), false)
            }
            "fourier" => {
                arity(&[0])?;
                let constant = self.constant.clone().unwrap_or_else(|| vec![0.0; n]);
                let cosine = self.cosine.clone().unwrap_or_default();
                let sine = self.sine.clone().unwrap_or_default();
                curve(CurveKind::Fourier { constant, cosine, sine }, (0.0, 2.0 * PI), true)
            }
            other => Err(Error::Parse(format!(
                "unknown geometry '{other}' (expected segment, circle, circle-arc, helix-arc, stereographic-cap k r, sphere k R, polynomial or fourier)"
            ))),
        }
    }

    fn check_extras(&self, name: &str) -> Result<()> {
        let has_poly = self.coefficients.is_some();
        let has_fourier = self.constant.is_some() || self.cosine.is_some() || self.sine.is_some();
        if has_poly && name != "polynomial" {
            return Err(Error::Parse(format!("'coefficients' does not apply to '{name}'")));
        }
        if has_fourier && name != "fourier" {
            return Err(Error::Parse(format!("fourier coefficients do not apply to '{name}'")));
        }
        Ok(())
    }
}
