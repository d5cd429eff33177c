//! Flat-file formats for intermediate pipeline artifacts.
//!
//! Radial functions and the pooled normalizing map are stored as small
//! two-column CSV files with `#`-prefixed metadata rows, one file per
//! contour. Floats are written in Rust's shortest round-trip form, so a
//! write/read cycle reproduces values exactly.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::geometry::{Point, Polygon};
use crate::normalize::NormalizingMap;
use crate::starhull::{AngularGrid, RadialFunction};

const RADIAL_FORMAT: &str = "radial-function-v1";
const MAP_FORMAT: &str = "normalizing-map-v1";
const POLYGON_FORMAT: &str = "polygon-v1";

/// A radial function with its provenance labels.
#[derive(Clone, Debug)]
pub struct RadialRecord {
    pub pass_id: String,
    pub contour_id: String,
    pub rf: RadialFunction,
}

pub fn write_radial<W: Write>(
    writer: W,
    pass_id: &str,
    contour_id: &str,
    rf: &RadialFunction,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut meta = |k: &str, v: &str| w.write_record([k, v]).map_err(csv_err);
    meta("#format", RADIAL_FORMAT)?;
    meta("#pass_id", pass_id)?;
    meta("#contour_id", contour_id)?;
    meta("#ref_x_km", &rf.ref_point.x.to_string())?;
    meta("#ref_y_km", &rf.ref_point.y.to_string())?;
    meta("#censored", &rf.censored.to_string())?;
    w.write_record(["theta", "r_km"]).map_err(csv_err)?;
    for (theta, r) in rf.grid.thetas().zip(&rf.values) {
        w.write_record([theta.to_string(), r.to_string()])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_radial<R: Read>(reader: R) -> Result<RadialRecord> {
    let mut rows = reader_rows(reader)?.into_iter();
    let mut meta = |key: &str| -> Result<String> {
        match rows.next() {
            Some((line, k, v)) if k == key => {
                let _ = line;
                Ok(v)
            }
            Some((line, k, _)) => Err(Error::Parse {
                line,
                message: format!("expected {key}, found {k}"),
            }),
            None => Err(Error::Parse {
                line: 0,
                message: format!("missing {key}"),
            }),
        }
    };
    let format = meta("#format")?;
    if format != RADIAL_FORMAT {
        return Err(Error::Parse {
            line: 1,
            message: format!("unsupported format {format}"),
        });
    }
    let pass_id = meta("#pass_id")?;
    let contour_id = meta("#contour_id")?;
    let ref_x = parse_f64(&meta("#ref_x_km")?, 4)?;
    let ref_y = parse_f64(&meta("#ref_y_km")?, 5)?;
    let censored = match meta("#censored")?.as_str() {
        "true" => true,
        "false" => false,
        other => {
            return Err(Error::Parse {
                line: 6,
                message: format!("bad censored flag {other}"),
            })
        }
    };
    meta("theta")?;

    let mut values = Vec::new();
    let mut thetas = Vec::new();
    for (line, theta, r) in rows {
        thetas.push(parse_f64(&theta, line)?);
        values.push(parse_f64(&r, line)?);
    }
    let grid = AngularGrid::new(values.len())
        .map_err(|e| Error::Parse { line: 8, message: e.to_string() })?;
    for (t, stored) in thetas.iter().enumerate() {
        if (stored - grid.theta(t)).abs() > 1e-9 {
            return Err(Error::Parse {
                line: 8 + t as u64,
                message: format!("theta {stored} off the uniform grid"),
            });
        }
    }
    Ok(RadialRecord {
        pass_id,
        contour_id,
        rf: RadialFunction {
            grid,
            values,
            ref_point: Point::new(ref_x, ref_y),
            censored,
        },
    })
}

pub fn write_map<W: Write>(writer: W, map: &NormalizingMap) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["#format", MAP_FORMAT]).map_err(csv_err)?;
    w.write_record(["#count", &map.pool_len().to_string()])
        .map_err(csv_err)?;
    for v in map.pool() {
        w.write_record([v.to_string(), String::new()]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_map<R: Read>(reader: R) -> Result<NormalizingMap> {
    let mut rows = reader_rows(reader)?.into_iter();
    match rows.next() {
        Some((_, k, v)) if k == "#format" && v == MAP_FORMAT => {}
        other => {
            return Err(Error::Parse {
                line: other.map_or(0, |(l, ..)| l),
                message: "not a normalizing-map file".into(),
            })
        }
    }
    let count: usize = match rows.next() {
        Some((line, k, v)) if k == "#count" => v.parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad count {v}"),
        })?,
        other => {
            return Err(Error::Parse {
                line: other.map_or(0, |(l, ..)| l),
                message: "missing #count".into(),
            })
        }
    };
    let mut pool = Vec::with_capacity(count);
    for (line, v, _) in rows {
        pool.push(parse_f64(&v, line)?);
    }
    if pool.len() != count {
        return Err(Error::Parse {
            line: 0,
            message: format!("count says {count}, file has {}", pool.len()),
        });
    }
    NormalizingMap::from_pool(pool)
}

pub fn write_polygon<W: Write>(writer: W, contour_id: &str, polygon: &Polygon) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["#format", POLYGON_FORMAT]).map_err(csv_err)?;
    w.write_record(["#contour_id", contour_id]).map_err(csv_err)?;
    w.write_record(["x_km", "y_km"]).map_err(csv_err)?;
    for v in polygon.vertices() {
        w.write_record([v.x.to_string(), v.y.to_string()])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_polygon<R: Read>(reader: R) -> Result<(String, Polygon)> {
    let mut rows = reader_rows(reader)?.into_iter();
    match rows.next() {
        Some((_, k, v)) if k == "#format" && v == POLYGON_FORMAT => {}
        other => {
            return Err(Error::Parse {
                line: other.map_or(0, |(l, ..)| l),
                message: "not a polygon file".into(),
            })
        }
    }
    let contour_id = match rows.next() {
        Some((_, k, v)) if k == "#contour_id" => v,
        other => {
            return Err(Error::Parse {
                line: other.map_or(0, |(l, ..)| l),
                message: "missing #contour_id".into(),
            })
        }
    };
    let mut vertices = Vec::new();
    for (line, x, y) in rows.skip(1) {
        vertices.push(Point::new(parse_f64(&x, line)?, parse_f64(&y, line)?));
    }
    let polygon = Polygon::new(vertices)
        .map_err(|e| Error::Parse { line: 0, message: e.to_string() })?;
    Ok((contour_id, polygon))
}

fn reader_rows<R: Read>(reader: R) -> Result<Vec<(u64, String, String)>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(reader);
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected 2 fields, got {}", record.len()),
            });
        }
        rows.push((
            line,
            record.get(0).unwrap().to_string(),
            record.get(1).unwrap().to_string(),
        ));
    }
    Ok(rows)
}

fn parse_f64(s: &str, line: u64) -> Result<f64> {
    s.parse().map_err(|_| Error::Parse {
        line,
        message: format!("bad number {s}"),
    })
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse {
        line: e.position().map_or(0, |p| p.line()),
        message: e.to_string(),
    }
}
