//! `rainshape report`: reconstruction-error accounting for the complete
//! contours, in the transformed space (integrated squared error) and on the
//! ground (symmetric-difference and directional error).

use std::collections::BTreeMap;
use std::path::Path;

use rainshape::analysis::{
    best_median_worst, directional_error_profile, five_number_summary, ise,
    p_theta_quartile_curves, symmetric_difference_error, ErrorReport, QuartileCurve, StarContour,
};
use rainshape::fourier::fit_fourier;
use rainshape::fpca::{reconstruct, select_num_components, EigenSystem, FunctionalSample};
use rainshape::geometry::Polygon;

use crate::args::ReportArgs;
use crate::failure::Failure;

use super::common::{csv_writer, load_corpus, load_polygons, num, scheme_weights, write_row};

pub fn run(args: &ReportArgs) -> Result<(), Failure> {
    args.validate()?;
    let cfg = &args.config;
    let corpus = load_corpus(&cfg.manifest_path(&args.manifest))?;
    let polygons = load_polygons(&corpus)?;
    let out = &cfg.out_dir;

    let complete = corpus.complete_indices();
    if complete.is_empty() {
        return Err(Failure::Data(
            "no complete contours to report on; every contour in the manifest is censored".into(),
        ));
    }

    let weights = scheme_weights(args.weights, &corpus.rows)?;
    let sample = FunctionalSample::new(
        corpus.grid,
        corpus.curves.clone(),
        weights,
        corpus.censored_flags(),
    )?;
    let es = EigenSystem::fit(&sample)?;
    let components = match cfg.fpca_components {
        Some(j) => j,
        None => select_num_components(&sample, cfg.max_components)?,
    }
    .clamp(1, es.num_components());

    let ids: Vec<String> = complete
        .iter()
        .map(|&i| corpus.rows[i].contour_id.clone())
        .collect();

    let mut ise_n = Vec::with_capacity(complete.len());
    let mut ise_p = Vec::with_capacity(complete.len());
    for &i in &complete {
        let curve = &corpus.curves[i];
        let fpca_fit = reconstruct(curve, &es, components)?;
        let fourier_fit: Vec<f64> = {
            let model = fit_fourier(curve, &corpus.grid, cfg.fourier_order)?;
            corpus.grid.thetas().map(|th| model.evaluate(th)).collect()
        };
        ise_n.push(ise(curve, &fpca_fit, &corpus.grid)?);
        ise_p.push(ise(curve, &fourier_fit, &corpus.grid)?);
    }
    write_ise(out, &ids, &ise_n, &ise_p)?;

    let mut orders: Vec<usize> = Vec::new();
    for &d in &args.orders {
        if !orders.contains(&d) {
            orders.push(d);
        }
    }

    let raster_cell = cfg.cell_size_km / args.raster_scale;
    let mut symdiff: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let mut p_theta: BTreeMap<usize, QuartileCurve> = BTreeMap::new();
    // Keyed by order, then aligned with `complete`; reused for the overlays.
    let mut contours: BTreeMap<usize, Vec<StarContour>> = BTreeMap::new();

    let mut ranking_orders = orders.clone();
    if !ranking_orders.contains(&cfg.fourier_order) {
        ranking_orders.push(cfg.fourier_order);
    }
    for &d in &ranking_orders {
        let mut percents = Vec::with_capacity(complete.len());
        let mut profiles = Vec::with_capacity(complete.len());
        let mut fitted = Vec::with_capacity(complete.len());
        for (slot, &i) in complete.iter().enumerate() {
            let model = fit_fourier(&corpus.curves[i], &corpus.grid, d)?;
            let radii: Vec<f64> = corpus
                .grid
                .thetas()
                .map(|th| corpus.map.invert(model.evaluate(th)))
                .collect();
            let contour =
                StarContour::new(corpus.rfs[i].ref_point, corpus.grid, radii)?;
            let percent =
                symmetric_difference_error(&polygons[i], &contour, raster_cell).map_err(|e| {
                    Failure::Data(format!("contour {}: {e}", ids[slot]))
                })?;
            percents.push(percent);
            profiles.push(directional_error_profile(&polygons[i], &contour));
            fitted.push(contour);
        }
        if orders.contains(&d) {
            symdiff.insert(d, percents.clone());
            p_theta.insert(d, p_theta_quartile_curves(&profiles)?);
        }
        contours.insert(d, fitted);
        if d == cfg.fourier_order && !orders.contains(&d) {
            // Only needed to rank contours for the overlays.
            symdiff.entry(d).or_insert(percents);
        }
    }

    write_symdiff(out, &ids, &orders, &symdiff)?;
    write_p_theta(out, &corpus.grid, &orders, &p_theta)?;

    let ranking = &symdiff[&cfg.fourier_order];
    if ranking.len() >= 3 {
        let (best, median, worst) = best_median_worst(ranking)?;
        let picks = [("best", best), ("median", median), ("worst", worst)];
        for (label, slot) in picks {
            write_overlay(
                out,
                label,
                &polygons[complete[slot]],
                &contours[&cfg.fourier_order][slot],
            )?;
        }
        write_recon_example(out, &corpus, complete[median], &es, components, cfg)?;
    } else {
        println!(
            "overlay examples skipped: {} complete contours, need 3",
            ranking.len()
        );
    }

    let mut report = ErrorReport {
        contour_ids: ids,
        ise_nonparametric: ise_n,
        ise_parametric: ise_p,
        symdiff_percent: symdiff,
        p_theta_quartiles: p_theta,
    };
    report.symdiff_percent.retain(|d, _| orders.contains(d));
    report.validate()?;

    println!(
        "reported {} complete contours at orders {:?} ({components} components) -> {}",
        report.contour_ids.len(),
        orders,
        out.display()
    );
    Ok(())
}

fn write_ise(out: &Path, ids: &[String], ise_n: &[f64], ise_p: &[f64]) -> Result<(), Failure> {
    let path = out.join("ise.csv");
    let mut w = csv_writer(&path)?;
    write_row(
        &mut w,
        &path,
        &[
            "contour_id".into(),
            "ise_nonparametric".into(),
            "ise_parametric".into(),
        ],
    )?;
    for (id, (&a, &b)) in ids.iter().zip(ise_n.iter().zip(ise_p)) {
        write_row(&mut w, &path, &[id.clone(), num(a), num(b)])?;
    }

    let path = out.join("ise_summary.csv");
    let mut w = csv_writer(&path)?;
    write_row(
        &mut w,
        &path,
        &[
            "statistic".into(),
            "ise_nonparametric".into(),
            "ise_parametric".into(),
        ],
    )?;
    let five_n = five_number_summary(ise_n)?;
    let five_p = five_number_summary(ise_p)?;
    for (k, label) in ["min", "q1", "median", "q3", "max"].iter().enumerate() {
        write_row(
            &mut w,
            &path,
            &[(*label).into(), num(five_n[k]), num(five_p[k])],
        )?;
    }
    Ok(())
}

fn write_symdiff(
    out: &Path,
    ids: &[String],
    orders: &[usize],
    symdiff: &BTreeMap<usize, Vec<f64>>,
) -> Result<(), Failure> {
    let path = out.join("symdiff.csv");
    let mut w = csv_writer(&path)?;
    write_row(
        &mut w,
        &path,
        &["contour_id".into(), "order".into(), "percent".into()],
    )?;
    for &d in orders {
        for (id, &pct) in ids.iter().zip(&symdiff[&d]) {
            write_row(&mut w, &path, &[id.clone(), d.to_string(), num(pct)])?;
        }
    }

    let path = out.join("symdiff_summary.csv");
    let mut w = csv_writer(&path)?;
    let mut header = vec!["statistic".to_string()];
    header.extend(orders.iter().map(|d| format!("order_{d}")));
    write_row(&mut w, &path, &header)?;
    let fives: Vec<[f64; 5]> = orders
        .iter()
        .map(|d| five_number_summary(&symdiff[d]))
        .collect::<Result<_, _>>()?;
    for (k, label) in ["min", "q1", "median", "q3", "max"].iter().enumerate() {
        let mut row = vec![(*label).to_string()];
        row.extend(fives.iter().map(|f| num(f[k])));
        write_row(&mut w, &path, &row)?;
    }
    Ok(())
}

fn write_p_theta(
    out: &Path,
    grid: &rainshape::starhull::AngularGrid,
    orders: &[usize],
    p_theta: &BTreeMap<usize, QuartileCurve>,
) -> Result<(), Failure> {
    for &d in orders {
        let path = out.join(format!("p_theta_d{d}.csv"));
        let mut w = csv_writer(&path)?;
        write_row(
            &mut w,
            &path,
            &["theta".into(), "q1".into(), "median".into(), "q3".into()],
        )?;
        for (theta, entry) in grid.thetas().zip(&p_theta[&d]) {
            let row = match entry {
                Some((q1, q2, q3)) => [num(theta), num(*q1), num(*q2), num(*q3)],
                None => [num(theta), String::new(), String::new(), String::new()],
            };
            write_row(&mut w, &path, &row)?;
        }
    }
    Ok(())
}

/// Closed boundary loops of the observed polygon and its fitted contour,
/// in the shared per-region km frame.
fn write_overlay(
    out: &Path,
    label: &str,
    actual: &Polygon,
    model: &StarContour,
) -> Result<(), Failure> {
    let path = out.join(format!("overlay_{label}.csv"));
    let mut w = csv_writer(&path)?;
    write_row(
        &mut w,
        &path,
        &["series".into(), "x_km".into(), "y_km".into()],
    )?;
    let mut actual_loop: Vec<_> = actual.vertices().to_vec();
    if let Some(first) = actual_loop.first().copied() {
        actual_loop.push(first);
    }
    let mut model_loop = model.outline();
    if let Some(first) = model_loop.first().copied() {
        model_loop.push(first);
    }
    for (series, points) in [("actual", actual_loop), ("model", model_loop)] {
        for p in points {
            write_row(&mut w, &path, &[series.into(), num(p.x), num(p.y)])?;
        }
    }
    Ok(())
}

fn write_recon_example(
    out: &Path,
    corpus: &super::common::Corpus,
    index: usize,
    es: &EigenSystem,
    components: usize,
    cfg: &crate::args::PipelineConfig,
) -> Result<(), Failure> {
    let curve = &corpus.curves[index];
    let fpca_fit = reconstruct(curve, es, components)?;
    let model = fit_fourier(curve, &corpus.grid, cfg.fourier_order)?;
    let path = out.join("recon_example.csv");
    let mut w = csv_writer(&path)?;
    write_row(
        &mut w,
        &path,
        &[
            "theta".into(),
            "r_actual_km".into(),
            "r_fpca_km".into(),
            "r_fourier_km".into(),
        ],
    )?;
    for (t, theta) in corpus.grid.thetas().enumerate() {
        write_row(
            &mut w,
            &path,
            &[
                num(theta),
                num(corpus.rfs[index].values[t]),
                num(corpus.map.invert(fpca_fit[t])),
                num(corpus.map.invert(model.evaluate(theta))),
            ],
        )?;
    }
    Ok(())
}
