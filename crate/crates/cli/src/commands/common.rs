//! Shared loading and emission helpers for the subcommands.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rainshape::geometry::Polygon;
use rainshape::io::{read_polygon, read_radial};
use rainshape::normalize::NormalizingMap;
use rainshape::starhull::{AngularGrid, RadialFunction};
use rainshape::survival::{kaplan_meier_weights, SizeObservation};

use crate::args::WeightScheme;
use crate::failure::{at_path, Failure};
use crate::manifest::{self, ManifestRow};

/// Everything the post-extraction stages work from: the manifest rows, the
/// radial functions, and the corpus-wide normalizing transform refit from
/// the pooled radii. Refitting keeps every subcommand a pure function of
/// the manifest and its flags.
pub struct Corpus {
    pub manifest_path: PathBuf,
    pub rows: Vec<ManifestRow>,
    pub grid: AngularGrid,
    pub rfs: Vec<RadialFunction>,
    /// Transformed curves, aligned with `rows`.
    pub curves: Vec<Vec<f64>>,
    pub map: NormalizingMap,
}

impl Corpus {
    pub fn censored_flags(&self) -> Vec<bool> {
        self.rows.iter().map(|r| r.censored).collect()
    }

    pub fn complete_indices(&self) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&i| !self.rows[i].censored)
            .collect()
    }
}

pub fn load_corpus(manifest_path: &Path) -> Result<Corpus, Failure> {
    let rows = manifest::read(manifest_path)?;
    if rows.is_empty() {
        return Err(Failure::Data(format!(
            "{}: manifest lists no contours",
            manifest_path.display()
        )));
    }

    let mut rfs = Vec::with_capacity(rows.len());
    for row in &rows {
        let path = manifest::resolve(manifest_path, &row.radial_path);
        let file = File::open(&path).map_err(|e| at_path(&path, e))?;
        let record = read_radial(file).map_err(|e| at_path(&path, e))?;
        if record.contour_id != row.contour_id {
            return Err(Failure::Data(format!(
                "{}: file belongs to {}, manifest says {}",
                path.display(),
                record.contour_id,
                row.contour_id
            )));
        }
        if record.rf.censored != row.censored {
            return Err(Failure::Data(format!(
                "{}: censor flag disagrees with the manifest",
                path.display()
            )));
        }
        rfs.push(record.rf);
    }
    let grid = rfs[0].grid;
    if rfs.iter().any(|rf| rf.grid != grid) {
        return Err(Failure::Data(
            "radial functions use different angular grids".into(),
        ));
    }

    let map = NormalizingMap::fit(&rfs)?;
    let curves = rfs.iter().map(|rf| map.transform(rf)).collect();
    Ok(Corpus {
        manifest_path: manifest_path.to_path_buf(),
        rows,
        grid,
        rfs,
        curves,
        map,
    })
}

pub fn load_polygons(corpus: &Corpus) -> Result<Vec<Polygon>, Failure> {
    let mut polygons = Vec::with_capacity(corpus.rows.len());
    for row in &corpus.rows {
        let path = manifest::resolve(&corpus.manifest_path, &row.polygon_path);
        let file = File::open(&path).map_err(|e| at_path(&path, e))?;
        let (id, polygon) = read_polygon(file).map_err(|e| at_path(&path, e))?;
        if id != row.contour_id {
            return Err(Failure::Data(format!(
                "{}: file belongs to {id}, manifest says {}",
                path.display(),
                row.contour_id
            )));
        }
        polygons.push(polygon);
    }
    Ok(polygons)
}

/// `None` means the sample's built-in uniform weighting.
pub fn scheme_weights(
    scheme: WeightScheme,
    rows: &[ManifestRow],
) -> Result<Option<Vec<f64>>, Failure> {
    match scheme {
        WeightScheme::Uniform => Ok(None),
        WeightScheme::Km => {
            let observations: Vec<SizeObservation> = rows
                .iter()
                .map(|r| SizeObservation {
                    contour_id: r.contour_id.clone(),
                    area_km2: r.area_km2,
                    censored: r.censored,
                })
                .collect();
            Ok(Some(kaplan_meier_weights(&observations)?))
        }
    }
}

pub fn create_file(path: &Path) -> Result<BufWriter<File>, Failure> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| at_path(parent, e))?;
    }
    Ok(BufWriter::new(
        File::create(path).map_err(|e| at_path(path, e))?,
    ))
}

pub fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>, Failure> {
    Ok(csv::Writer::from_writer(create_file(path)?))
}

pub fn write_row<W: std::io::Write>(
    w: &mut csv::Writer<W>,
    path: &Path,
    fields: &[String],
) -> Result<(), Failure> {
    w.write_record(fields).map_err(|e| at_path(path, e))
}

/// Shortest round-trip decimal form, shared by all emitters.
pub fn num(v: f64) -> String {
    v.to_string()
}
