//! The contour manifest: one row per extracted contour, linking its
//! measurements to the radial-function and polygon files on disk.

use std::path::{Path, PathBuf};

use crate::failure::{at_path, Failure};

pub const COLUMNS: [&str; 7] = [
    "contour_id",
    "pass_id",
    "group_key",
    "area_km2",
    "censored",
    "radial_path",
    "polygon_path",
];

#[derive(Clone, Debug)]
pub struct ManifestRow {
    pub contour_id: String,
    pub pass_id: String,
    pub group_key: String,
    pub area_km2: f64,
    pub censored: bool,
    /// Relative to the manifest's directory.
    pub radial_path: String,
    pub polygon_path: String,
}

pub fn write(path: &Path, rows: &[ManifestRow]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(|e| at_path(path, e))?;
    w.write_record(COLUMNS).map_err(|e| at_path(path, e))?;
    for r in rows {
        w.write_record([
            r.contour_id.as_str(),
            r.pass_id.as_str(),
            r.group_key.as_str(),
            &r.area_km2.to_string(),
            &r.censored.to_string(),
            r.radial_path.as_str(),
            r.polygon_path.as_str(),
        ])
        .map_err(|e| at_path(path, e))?;
    }
    w.flush().map_err(|e| at_path(path, e))?;
    Ok(())
}

pub fn read(path: &Path) -> Result<Vec<ManifestRow>, Failure> {
    let mut r = csv::Reader::from_path(path).map_err(|e| at_path(path, e))?;
    let header = r.headers().map_err(|e| at_path(path, e))?;
    if header != COLUMNS.as_slice() {
        return Err(Failure::Data(format!(
            "{}: unexpected manifest columns {header:?}",
            path.display()
        )));
    }
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record.map_err(|e| at_path(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let bad = |what: &str| {
            Failure::Data(format!("{}: line {line}: {what}", path.display()))
        };
        if record.len() != COLUMNS.len() {
            return Err(bad(&format!("expected {} fields", COLUMNS.len())));
        }
        rows.push(ManifestRow {
            contour_id: record[0].to_string(),
            pass_id: record[1].to_string(),
            group_key: record[2].to_string(),
            area_km2: record[3]
                .parse()
                .map_err(|_| bad(&format!("bad area {}", &record[3])))?,
            censored: match &record[4] {
                "true" => true,
                "false" => false,
                other => return Err(bad(&format!("bad censored flag {other}"))),
            },
            radial_path: record[5].to_string(),
            polygon_path: record[6].to_string(),
        });
    }
    Ok(rows)
}

/// Resolves a manifest-relative path.
pub fn resolve(manifest_path: &Path, relative: &str) -> PathBuf {
    manifest_path
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .join(relative)
}
