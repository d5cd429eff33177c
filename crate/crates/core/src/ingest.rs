//! Reading and grouping gridded rain-rate records.
//!
//! The interchange format is header-bearing delimited text with one row per
//! observed swath cell:
//!
//! ```text
//! pass_id,grid_i,grid_j,lat,lon,rain_rate
//! S00001,412,37,24.981,86.950,0.0
//! S00001,412,38,24.981,86.995,1.73
//! ```
//!
//! A row is present for every cell the satellite observed, including dry
//! ones; absence of a `(grid_i, grid_j)` pair means the cell fell outside
//! the swath. That distinction is what lets downstream stages tell a region
//! that ended from a region that was cut off.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::error::{Error, Result};

/// Swath grid index `(grid_i, grid_j)`.
pub type GridIdx = (i32, i32);

/// One observed cell of one satellite pass.
#[derive(Clone, Debug, PartialEq)]
pub struct PassRecord {
    pub pass_id: String,
    pub grid_i: i32,
    pub grid_j: i32,
    pub lat: f64,
    pub lon: f64,
    pub rain_rate: f64,
}

/// Everything one pass observed, keyed by grid index.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub pass_id: String,
    pub cells: BTreeMap<GridIdx, CellValue>,
    /// Nominal grid spacing in kilometres, used only as a fallback when a
    /// cell's neighbours are missing and grid axes cannot be estimated.
    pub cell_size_km: f64,
}

/// Observed values at one cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellValue {
    pub lat: f64,
    pub lon: f64,
    pub rain_rate: f64,
}

impl Snapshot {
    /// Whether the pass observed this grid index at all.
    pub fn observed(&self, idx: GridIdx) -> bool {
        self.cells.contains_key(&idx)
    }

    /// Geographic centre `(lat, lon)` of an observed cell.
    pub fn center(&self, idx: GridIdx) -> Option<(f64, f64)> {
        self.cells.get(&idx).map(|c| (c.lat, c.lon))
    }
}

const HEADER: [&str; 6] = ["pass_id", "grid_i", "grid_j", "lat", "lon", "rain_rate"];

/// Parses and validates pass records from delimited text.
///
/// Every malformed row is rejected with its 1-based line number: wrong field
/// count, non-numeric fields, latitude outside [-90, 90], longitude outside
/// [-180, 180], negative or non-finite rain rate, and duplicate
/// `(pass_id, grid_i, grid_j)` keys.
pub fn parse_records<R: Read>(reader: R) -> Result<Vec<PassRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);

    let headers = rdr.headers().map_err(csv_error)?.clone();
    if headers.iter().ne(HEADER.iter().copied()) {
        return Err(Error::parse(
            1,
            format!(
                "expected header \"{}\", got \"{}\"",
                HEADER.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }

    let mut seen: BTreeMap<(String, i32, i32), u64> = BTreeMap::new();
    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != HEADER.len() {
            return Err(Error::parse(
                line,
                format!("expected {} fields, got {}", HEADER.len(), row.len()),
            ));
        }
        let record = PassRecord {
            pass_id: row[0].to_string(),
            grid_i: parse_field(&row[1], "grid_i", line)?,
            grid_j: parse_field(&row[2], "grid_j", line)?,
            lat: parse_field(&row[3], "lat", line)?,
            lon: parse_field(&row[4], "lon", line)?,
            rain_rate: parse_field(&row[5], "rain_rate", line)?,
        };
        if !(-90.0..=90.0).contains(&record.lat) {
            return Err(Error::parse(
                line,
                format!("lat {} outside [-90, 90]", &row[3]),
            ));
        }
        if !(-180.0..=180.0).contains(&record.lon) {
            return Err(Error::parse(
                line,
                format!("lon {} outside [-180, 180]", &row[4]),
            ));
        }
        if !record.rain_rate.is_finite() || record.rain_rate < 0.0 {
            return Err(Error::parse(
                line,
                format!("rain_rate {} is not a finite non-negative number", &row[5]),
            ));
        }
        let key = (record.pass_id.clone(), record.grid_i, record.grid_j);
        match seen.entry(key) {
            Entry::Vacant(v) => {
                v.insert(line);
            }
            Entry::Occupied(o) => {
                return Err(Error::parse(
                    line,
                    format!(
                        "duplicate cell ({}, {}, {}), first seen on line {}",
                        record.pass_id,
                        record.grid_i,
                        record.grid_j,
                        o.get()
                    ),
                ));
            }
        }
        records.push(record);
    }
    Ok(records)
}

fn parse_field<T: std::str::FromStr>(raw: &str, name: &str, line: u64) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("{name} value {raw:?} is not numeric")))
}

fn csv_error(err: csv::Error) -> Error {
    let line = match err.position() {
        Some(p) => p.line(),
        None => 0,
    };
    Error::parse(line, err.to_string())
}

/// Writes records back out in the interchange format.
pub fn write_records<W: Write>(writer: W, records: &[PassRecord]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(HEADER).map_err(csv_error)?;
    for r in records {
        wtr.write_record([
            r.pass_id.as_str(),
            &r.grid_i.to_string(),
            &r.grid_j.to_string(),
            &r.lat.to_string(),
            &r.lon.to_string(),
            &r.rain_rate.to_string(),
        ])
        .map_err(csv_error)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Groups records into one snapshot per pass, ordered by pass id.
pub fn group_by_pass(records: Vec<PassRecord>, cell_size_km: f64) -> Vec<Snapshot> {
    let mut by_pass: BTreeMap<String, BTreeMap<GridIdx, CellValue>> = BTreeMap::new();
    for r in records {
        by_pass.entry(r.pass_id).or_default().insert(
            (r.grid_i, r.grid_j),
            CellValue {
                lat: r.lat,
                lon: r.lon,
                rain_rate: r.rain_rate,
            },
        );
    }
    by_pass
        .into_iter()
        .map(|(pass_id, cells)| Snapshot {
            pass_id,
            cells,
            cell_size_km,
        })
        .collect()
}
