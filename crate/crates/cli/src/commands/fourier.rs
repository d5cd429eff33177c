//! `rainshape fourier`: truncated-Fourier fits of the complete contours,
//! their polar forms, and the modal axiality of the second harmonic.

use rainshape::fourier::{
    axiality_contour, fit_fourier, modal_axiality, retransformed_amplitudes, select_order,
    to_polar, FourierModel, PolarForm,
};

use crate::args::FourierArgs;
use crate::failure::Failure;
use crate::svg;

use super::common::{create_file, csv_writer, load_corpus, num, write_row};

const MIN_AXIALITY_SAMPLE: usize = 10;

pub fn run(args: &FourierArgs) -> Result<(), Failure> {
    args.validate()?;
    let cfg = &args.config;
    let corpus = load_corpus(&cfg.manifest_path(&args.manifest))?;
    let out = &cfg.out_dir;

    let complete = corpus.complete_indices();
    if complete.is_empty() {
        return Err(Failure::Data(
            "no complete contours to fit; every contour in the manifest is censored".into(),
        ));
    }

    let mut ids = Vec::with_capacity(complete.len());
    let mut models = Vec::with_capacity(complete.len());
    for &i in &complete {
        let curve = &corpus.curves[i];
        let order = if args.select_order {
            select_order(curve, &corpus.grid, args.max_order)?
        } else {
            cfg.fourier_order
        };
        ids.push(corpus.rows[i].contour_id.clone());
        models.push(fit_fourier(curve, &corpus.grid, order)?);
    }
    let polars: Vec<PolarForm> = models.iter().map(to_polar).collect();

    write_models(out, &ids, &models, &polars)?;
    write_amplitudes(out, &ids, &models, &polars, &corpus.map)?;

    let negative = models.iter().filter(|m| m.cos_coef[0] < 0.0).count();
    println!(
        "fitted {} contours ({negative} with negative mean level) -> {}",
        ids.len(),
        out.display()
    );

    let pairs: Vec<(f64, f64)> = models
        .iter()
        .filter(|m| m.order() >= 2)
        .map(|m| (m.cos_coef[2], m.sin_coef[1]))
        .collect();
    if pairs.len() < MIN_AXIALITY_SAMPLE {
        println!(
            "modal axiality skipped: {} second-harmonic pairs, need {MIN_AXIALITY_SAMPLE}",
            pairs.len()
        );
        return Ok(());
    }

    let (a2, b2) = modal_axiality(&pairs)?;
    let (radii, angle) = axiality_contour(a2, b2, &corpus.grid, &corpus.map);

    let path = out.join("modal_axiality.csv");
    let mut w = csv_writer(&path)?;
    write_row(
        &mut w,
        &path,
        &[
            "a_2".into(),
            "b_2".into(),
            "angle_rad".into(),
            "angle_deg".into(),
        ],
    )?;
    let (rad, deg) = match angle {
        Some(phi) => (num(phi), num(phi.to_degrees())),
        None => (String::new(), String::new()),
    };
    write_row(&mut w, &path, &[num(a2), num(b2), rad, deg])?;

    let path = out.join("axiality_contour.csv");
    let mut w = csv_writer(&path)?;
    write_row(&mut w, &path, &["theta".into(), "r_km".into()])?;
    for (theta, &r) in corpus.grid.thetas().zip(&radii) {
        write_row(&mut w, &path, &[num(theta), num(r)])?;
    }

    if args.svg {
        let mut points: Vec<(f64, f64)> = corpus
            .grid
            .thetas()
            .zip(&radii)
            .map(|(theta, &r)| (r * theta.cos(), r * theta.sin()))
            .collect();
        if let Some(first) = points.first().copied() {
            points.push(first);
        }
        let doc = svg::polyline_svg(&[("axiality", points)]);
        let path = out.join("axiality_contour.svg");
        std::io::Write::write_all(&mut create_file(&path)?, doc.as_bytes())
            .map_err(|e| crate::failure::at_path(&path, e))?;
    }

    match angle {
        Some(phi) => println!(
            "modal axiality from {} pairs: angle {:.2} deg",
            pairs.len(),
            phi.to_degrees()
        ),
        None => println!(
            "modal axiality from {} pairs: isotropic mode, no preferred direction",
            pairs.len()
        ),
    }
    Ok(())
}

/// One row per contour, coefficient columns padded with blanks up to the
/// largest fitted order so the header is rectangular.
fn write_models(
    out: &std::path::Path,
    ids: &[String],
    models: &[FourierModel],
    polars: &[PolarForm],
) -> Result<(), Failure> {
    let d_max = models.iter().map(FourierModel::order).max().unwrap_or(0);
    let path = out.join("models.csv");
    let mut w = csv_writer(&path)?;

    let mut header = vec!["contour_id".to_string(), "order".into(), "rss".into(), "sigma2".into()];
    header.extend((0..=d_max).map(|i| format!("a_{i}")));
    header.extend((1..=d_max).map(|i| format!("b_{i}")));
    header.extend((0..=d_max).map(|i| format!("c_{i}")));
    header.extend((1..=d_max).map(|i| format!("phi_{i}")));
    write_row(&mut w, &path, &header)?;

    for ((id, model), polar) in ids.iter().zip(models).zip(polars) {
        let d = model.order();
        let mut row = vec![
            id.clone(),
            d.to_string(),
            num(model.rss),
            model.residual_variance().map_or(String::new(), num),
        ];
        let pad = |row: &mut Vec<String>, values: &[f64], want: usize| {
            row.extend(values.iter().map(|&v| num(v)));
            row.extend(std::iter::repeat_n(String::new(), want - values.len()));
        };
        pad(&mut row, &model.cos_coef, d_max + 1);
        pad(&mut row, &model.sin_coef, d_max);
        pad(&mut row, &polar.amplitude, d_max + 1);
        pad(&mut row, &polar.phase, d_max);
        write_row(&mut w, &path, &row)?;
    }
    Ok(())
}

/// Long-form amplitude table: harmonics nest, so each harmonic lists only
/// the contours whose fitted order reaches it.
fn write_amplitudes(
    out: &std::path::Path,
    ids: &[String],
    models: &[FourierModel],
    polars: &[PolarForm],
    map: &rainshape::normalize::NormalizingMap,
) -> Result<(), Failure> {
    let km = retransformed_amplitudes(models, map);
    let path = out.join("amplitudes.csv");
    let mut w = csv_writer(&path)?;
    write_row(
        &mut w,
        &path,
        &[
            "harmonic".into(),
            "contour_id".into(),
            "amplitude_z".into(),
            "amplitude_km".into(),
        ],
    )?;
    for (i, harmonic_km) in km.iter().enumerate() {
        let kept = ids
            .iter()
            .zip(models)
            .zip(polars)
            .filter(|((_, m), _)| m.order() >= i);
        for (((id, _), polar), &r_km) in kept.zip(harmonic_km) {
            write_row(
                &mut w,
                &path,
                &[i.to_string(), id.clone(), num(polar.amplitude[i]), num(r_km)],
            )?;
        }
    }
    Ok(())
}
