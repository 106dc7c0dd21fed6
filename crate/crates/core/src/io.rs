//! CSV and JSON reports. Floats are written with 17 significant digits
//! (`{:.16e}`), which round-trips every f64 bit for bit.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{FieldBounds, FieldKind};
use crate::geometry::tube::{BoundaryNode, QuadGrid, QuadNode, Region};
use crate::identity::{Certificate, TheoremTag, Verdict};
use crate::radial::Trajectory;
use crate::Vector;

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_float(field: &str, row: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("row {row}: '{field}' is not a number")))
}

fn parse_int(field: &str, row: usize) -> Result<usize> {
    field
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::Parse(format!("row {row}: '{field}' is not a non-negative integer")))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

fn write_table<W: Write>(out: W, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(header).map_err(csv_error)?;
    for row in rows {
        writer.write_record(&row).map_err(csv_error)?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a table and checks its header against `expected`.
fn read_table<R: Read>(input: R, expected: &[String]) -> Result<Vec<csv::StringRecord>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader.headers().map_err(csv_error)?.clone();
    if header.iter().ne(expected.iter().map(String::as_str)) {
        return Err(Error::Parse(format!(
            "unexpected header {:?}, expected {expected:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    reader.records().map(|r| r.map_err(csv_error)).collect()
}

fn strings(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// x0..x{n−1}, weight, region, nu0..nu{n−1}
pub fn grid_header(n: usize) -> Vec<String> {
    let mut header: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    header.push("weight".into());
    header.push("region".into());
    header.extend((0..n).map(|i| format!("nu{i}")));
    header
}

/// Interior rows leave the normal columns empty.
pub fn write_grid_csv<W: Write>(out: W, grid: &QuadGrid) -> Result<()> {
    let n = grid
        .interior
        .first()
        .map(|node| node.point.len())
        .or_else(|| grid.boundary.first().map(|node| node.point.len()))
        .unwrap_or(0);
    let interior = grid.interior.iter().map(|node| {
        let mut row: Vec<String> = node.point.iter().map(|&x| format_float(x)).collect();
        row.push(format_float(node.weight));
        row.push(Region::Interior.tag().into());
        row.extend(std::iter::repeat_n(String::new(), n));
        row
    });
    let boundary = grid.boundary.iter().map(|node| {
        let mut row: Vec<String> = node.point.iter().map(|&x| format_float(x)).collect();
        row.push(format_float(node.weight));
        row.push(node.region.tag().into());
        row.extend(node.normal.iter().map(|&x| format_float(x)));
        row
    });
    write_table(out, &grid_header(n), interior.chain(boundary))
}

/// Loads a grid written by [`write_grid_csv`]. Curve parameters and normal
/// offsets are not part of the file; they come back as NaN and zero.
pub fn read_grid_csv<R: Read>(input: R, n: usize) -> Result<QuadGrid> {
    let mut grid = QuadGrid::default();
    for (i, record) in read_table(input, &grid_header(n))?.iter().enumerate() {
        let row = i + 1;
        let point = Vector::from_iterator(
            n,
            (0..n)
                .map(|j| parse_float(&record[j], row))
                .collect::<Result<Vec<_>>>()?,
        );
        let weight = parse_float(&record[n], row)?;
        let region: Region = record[n + 1].parse()?;
        let node = QuadNode {
            point,
            weight,
            param: f64::NAN,
            offset: Vector::zeros(n),
        };
        if region == Region::Interior {
            grid.interior.push(node);
        } else {
            let normal = (0..n)
                .map(|j| parse_float(&record[n + 2 + j], row))
                .collect::<Result<Vec<_>>>()?;
            grid.boundary.push(BoundaryNode {
                point: node.point,
                weight: node.weight,
                param: node.param,
                offset: node.offset,
                normal: Vector::from_vec(normal),
                region,
            });
        }
    }
    Ok(grid)
}

/// One row of a bounds report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub geometry: String,
    pub field: FieldKind,
    pub epsilon: f64,
    pub resolution: String,
    pub mu_div: f64,
    pub mu_quad: f64,
    pub flux_min: f64,
}

impl From<&FieldBounds> for BoundsRow {
    fn from(b: &FieldBounds) -> Self {
        Self {
            geometry: b.geometry.clone(),
            field: b.field,
            epsilon: b.epsilon,
            resolution: b.resolution.clone(),
            mu_div: b.mu_div,
            mu_quad: b.mu_quad,
            flux_min: b.flux_min,
        }
    }
}

const BOUNDS_HEADER: [&str; 7] = [
    "geometry",
    "field",
    "epsilon",
    "resolution",
    "mu_div",
    "mu_quad",
    "flux_min",
];

pub fn write_bounds_csv<W: Write>(out: W, rows: &[BoundsRow]) -> Result<()> {
    let rows = rows.iter().map(|b| {
        vec![
            b.geometry.clone(),
            b.field.tag().into(),
            format_float(b.epsilon),
            b.resolution.clone(),
            format_float(b.mu_div),
            format_float(b.mu_quad),
            format_float(b.flux_min),
        ]
    });
    write_table(out, &strings(&BOUNDS_HEADER), rows)
}

pub fn read_bounds_csv<R: Read>(input: R) -> Result<Vec<BoundsRow>> {
    read_table(input, &strings(&BOUNDS_HEADER))?
        .iter()
        .enumerate()
        .map(|(i, r)| {
            Ok(BoundsRow {
                geometry: r[0].to_string(),
                field: r[1].parse()?,
                epsilon: parse_float(&r[2], i + 1)?,
                resolution: r[3].to_string(),
                mu_div: parse_float(&r[4], i + 1)?,
                mu_quad: parse_float(&r[5], i + 1)?,
                flux_min: parse_float(&r[6], i + 1)?,
            })
        })
        .collect()
}

const CERTIFICATE_HEADER: [&str; 14] = [
    "theorem",
    "n",
    "k",
    "m",
    "p",
    "epsilon",
    "base_coefficient",
    "mu_div",
    "mu_quad",
    "deviation_term",
    "flux_min",
    "total",
    "verdict",
    "reason",
];

pub fn write_certificates_csv<W: Write>(out: W, certificates: &[Certificate]) -> Result<()> {
    let rows = certificates.iter().map(|c| {
        vec![
            c.theorem.label().into(),
            c.n.to_string(),
            c.k.to_string(),
            c.m.to_string(),
            format_float(c.p),
            format_float(c.epsilon),
            format_float(c.base_coefficient),
            format_float(c.mu_div),
            format_float(c.mu_quad),
            format_float(c.deviation_term),
            format_float(c.flux_min),
            format_float(c.total),
            c.verdict.tag().into(),
            c.reason.clone().unwrap_or_default(),
        ]
    });
    write_table(out, &strings(&CERTIFICATE_HEADER), rows)
}

pub fn read_certificates_csv<R: Read>(input: R) -> Result<Vec<Certificate>> {
    read_table(input, &strings(&CERTIFICATE_HEADER))?
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let row = i + 1;
            let theorem: TheoremTag = r[0].parse()?;
            let verdict: Verdict = r[12].parse()?;
            Ok(Certificate {
                theorem,
                n: parse_int(&r[1], row)?,
                k: parse_int(&r[2], row)?,
                m: parse_int(&r[3], row)?,
                p: parse_float(&r[4], row)?,
                epsilon: parse_float(&r[5], row)?,
                base_coefficient: parse_float(&r[6], row)?,
                mu_div: parse_float(&r[7], row)?,
                mu_quad: parse_float(&r[8], row)?,
                deviation_term: parse_float(&r[9], row)?,
                flux_min: parse_float(&r[10], row)?,
                total: parse_float(&r[11], row)?,
                verdict,
                reason: (!r[13].is_empty()).then(|| r[13].to_string()),
            })
        })
        .collect()
}

const RADIAL_HEADER: [&str; 3] = ["r", "u", "du"];

pub fn write_trajectory_csv<W: Write>(out: W, trajectory: &Trajectory) -> Result<()> {
    let rows = (0..trajectory.r.len()).map(|i| {
        vec![
            format_float(trajectory.r[i]),
            format_float(trajectory.u[i]),
            format_float(trajectory.du[i]),
        ]
    });
    write_table(out, &strings(&RADIAL_HEADER), rows)
}

pub fn read_trajectory_csv<R: Read>(input: R) -> Result<Trajectory> {
    let mut trajectory = Trajectory {
        r: Vec::new(),
        u: Vec::new(),
        du: Vec::new(),
        blown_up: false,
    };
    for (i, record) in read_table(input, &strings(&RADIAL_HEADER))?.iter().enumerate() {
        trajectory.r.push(parse_float(&record[0], i + 1)?);
        trajectory.u.push(parse_float(&record[1], i + 1)?);
        trajectory.du.push(parse_float(&record[2], i + 1)?);
    }
    Ok(trajectory)
}

/// Pretty JSON with a trailing newline. serde_json writes the shortest
/// representation that parses back to the same f64.
pub fn write_json<W: Write, T: Serialize + ?Sized>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Error::Io(e.to_string()))?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_json<R: Read, T: for<'de> Deserialize<'de>>(input: R) -> Result<T> {
    serde_json::from_reader(input).map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::tube::shell_grid;

    #[test]
    fn grid_round_trip_is_bitwise() {
        let grid = shell_grid(3, 0.5, 1.0, 3, 4).unwrap();
        let mut first = Vec::new();
        write_grid_csv(&mut first, &grid).unwrap();
        let back = read_grid_csv(first.as_slice(), 3).unwrap();
        assert_eq!(back.interior.len(), grid.interior.len());
        assert_eq!(back.boundary.len(), grid.boundary.len());
        for (a, b) in grid.boundary.iter().zip(&back.boundary) {
            assert_eq!(a.point, b.point);
            assert_eq!(a.normal, b.normal);
            assert_eq!(a.weight.to_bits(), b.weight.to_bits());
            assert_eq!(a.region, b.region);
        }
        let mut second = Vec::new();
        write_grid_csv(&mut second, &back).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn header_mismatch_is_an_error() {
        let text = "geometry,field\nsegment,curve-field-v\n";
        assert!(read_bounds_csv(text.as_bytes()).is_err());
    }

    #[test]
    fn awkward_floats_survive() {
        let t = Trajectory {
            r: vec![0.1 + 0.2, 1e-300, f64::MAX],
            u: vec![-0.0, 5e-324, 1.0 / 3.0],
            du: vec![f64::MIN_POSITIVE, -2.5, 123_456_789.123_456_78],
            blown_up: false,
        };
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &t).unwrap();
        let back = read_trajectory_csv(buf.as_slice()).unwrap();
        for (a, b) in
            t.u.iter()
                .chain(&t.r)
                .chain(&t.du)
                .zip(back.u.iter().chain(&back.r).chain(&back.du))
        {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
