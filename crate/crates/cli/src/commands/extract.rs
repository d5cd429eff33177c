//! `rainshape extract`: pass records in, per-contour radial functions,
//! boundary polygons, and a manifest out.

use std::fs;

use rainshape::ingest::{group_by_pass, parse_records};
use rainshape::io::{write_polygon, write_radial};
use rainshape::regions::{extract_regions, Region};
use rainshape::starhull::{AngularGrid, RadialFunction};

use crate::args::ExtractArgs;
use crate::failure::{at_path, Failure};
use crate::manifest::{self, ManifestRow};

use super::common::create_file;

pub fn run(args: &ExtractArgs) -> Result<(), Failure> {
    args.config.validate()?;
    let cfg = &args.config;

    let raw = fs::read(&args.input).map_err(|e| at_path(&args.input, e))?;
    let records = if raw.iter().all(u8::is_ascii_whitespace) {
        Vec::new()
    } else {
        parse_records(raw.as_slice()).map_err(|e| at_path(&args.input, e))?
    };
    let snapshots = group_by_pass(records, cfg.cell_size_km);
    let grid = AngularGrid::new(cfg.grid_m)?;

    let mut rows: Vec<ManifestRow> = Vec::new();
    let mut candidates = 0usize;
    for snapshot in &snapshots {
        let mut ordinal = 0usize;
        for cluster in extract_regions(snapshot, cfg.min_rain_rate) {
            candidates += 1;
            let region = Region::from_cluster(cluster, snapshot, cfg.earth_radius_km)?;
            if region.area_km2 < cfg.min_area_km2 || region.area_km2 > cfg.max_area_km2 {
                continue;
            }
            let rf = RadialFunction::for_region(&region, grid)?;
            let contour_id = format!("{}-c{ordinal:02}", snapshot.pass_id);
            ordinal += 1;

            let index = rows.len();
            let radial_path = format!("radials/c{index:05}.csv");
            let polygon_path = format!("polygons/c{index:05}.csv");
            write_radial(
                create_file(&cfg.out_dir.join(&radial_path))?,
                &snapshot.pass_id,
                &contour_id,
                &rf,
            )?;
            write_polygon(
                create_file(&cfg.out_dir.join(&polygon_path))?,
                &contour_id,
                &region.boundary,
            )?;
            rows.push(ManifestRow {
                contour_id,
                pass_id: snapshot.pass_id.clone(),
                group_key: group_key_of(&snapshot.pass_id),
                area_km2: region.area_km2,
                censored: region.censored,
                radial_path,
                polygon_path,
            });
        }
    }

    fs::create_dir_all(&cfg.out_dir).map_err(|e| at_path(&cfg.out_dir, e))?;
    let manifest_path = cfg.out_dir.join("manifest.csv");
    manifest::write(&manifest_path, &rows)?;
    println!(
        "extracted {} contours ({} candidate regions, {} passes) -> {}",
        rows.len(),
        candidates,
        snapshots.len(),
        manifest_path.display()
    );
    Ok(())
}

/// Grouping key: the pass id's prefix before the first dash. Date-like ids
/// such as `2004-07-13T06` group by year; ids without a dash form their own
/// group each.
fn group_key_of(pass_id: &str) -> String {
    pass_id.split('-').next().unwrap_or(pass_id).to_string()
}
