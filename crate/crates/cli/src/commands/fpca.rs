//! `rainshape fpca`: the censoring-weighted eigensystem of the transformed
//! curves, modes of variation, and variance tables.

use std::collections::BTreeMap;

use rainshape::fpca::{
    mode_of_variation, principal_scores, select_num_components, EigenSystem, FunctionalSample,
};
use rainshape::io::write_map;
use rainshape::normalize::skewness_profile;

use crate::args::FpcaArgs;
use crate::failure::Failure;

use super::common::{
    create_file, csv_writer, load_corpus, num, scheme_weights, write_row, Corpus,
};

pub fn run(args: &FpcaArgs) -> Result<(), Failure> {
    args.config.validate()?;
    let cfg = &args.config;
    let corpus = load_corpus(&cfg.manifest_path(&args.manifest))?;
    let out = &cfg.out_dir;

    write_map(create_file(&out.join("map.csv"))?, &corpus.map)?;

    let skewness = skewness_profile(&corpus.curves)?;
    let path = out.join("skewness.csv");
    let mut w = csv_writer(&path)?;
    write_row(&mut w, &path, &["theta".into(), "skewness".into()])?;
    for (theta, s) in corpus.grid.thetas().zip(&skewness) {
        let cell = s.map_or(String::new(), num);
        write_row(&mut w, &path, &[num(theta), cell])?;
    }

    let weights = scheme_weights(args.weights, &corpus.rows)?;
    let sample = FunctionalSample::new(
        corpus.grid,
        corpus.curves.clone(),
        weights,
        corpus.censored_flags(),
    )?;

    let (requested, method) = match cfg.fpca_components {
        Some(j) => (j, "fixed"),
        None => (
            select_num_components(&sample, cfg.max_components)?,
            "cross-validated",
        ),
    };
    let es = EigenSystem::fit(&sample)?;
    let components = requested.clamp(1, es.num_components());

    write_components(&corpus, &es, &sample, components, method, cfg)?;
    write_groups(args, &corpus)?;

    println!(
        "fitted {} eigenpairs from {} contours; using {components} components ({method}) -> {}",
        es.num_components(),
        corpus.rows.len(),
        out.display()
    );
    Ok(())
}

fn write_components(
    corpus: &Corpus,
    es: &EigenSystem,
    sample: &FunctionalSample,
    components: usize,
    method: &str,
    cfg: &crate::args::PipelineConfig,
) -> Result<(), Failure> {
    let out = &cfg.out_dir;

    let path = out.join("eigenvalues.csv");
    let mut w = csv_writer(&path)?;
    write_row(
        &mut w,
        &path,
        &[
            "component".into(),
            "eigenvalue".into(),
            "pct_variance".into(),
            "cum_pct_variance".into(),
        ],
    )?;
    let total: f64 = es.eigenvalues.iter().sum();
    let mut cum = 0.0;
    for (k, &lambda) in es.eigenvalues.iter().enumerate() {
        let pct = 100.0 * lambda / total;
        cum += pct;
        write_row(
            &mut w,
            &path,
            &[(k + 1).to_string(), num(lambda), num(pct), num(cum)],
        )?;
    }

    let path = out.join("eigensystem.csv");
    let mut w = csv_writer(&path)?;
    let mut header = vec!["theta".to_string(), "mean".to_string()];
    header.extend((1..=es.num_components()).map(|k| format!("phi_{k}")));
    write_row(&mut w, &path, &header)?;
    for (t, theta) in corpus.grid.thetas().enumerate() {
        let mut row = vec![num(theta), num(es.mean[t])];
        row.extend((0..es.num_components()).map(|k| num(es.eigenfunction(k)[t])));
        write_row(&mut w, &path, &row)?;
    }

    let path = out.join("components.csv");
    let mut w = csv_writer(&path)?;
    write_row(&mut w, &path, &["components".into(), "method".into()])?;
    write_row(&mut w, &path, &[components.to_string(), method.into()])?;

    let path = out.join("weights.csv");
    let mut w = csv_writer(&path)?;
    write_row(
        &mut w,
        &path,
        &["contour_id".into(), "censored".into(), "weight".into()],
    )?;
    for (row, &weight) in corpus.rows.iter().zip(sample.weights()) {
        write_row(
            &mut w,
            &path,
            &[row.contour_id.clone(), row.censored.to_string(), num(weight)],
        )?;
    }

    let path = out.join("scores.csv");
    let mut w = csv_writer(&path)?;
    let mut header = vec!["contour_id".to_string(), "censored".to_string()];
    header.extend((1..=components).map(|k| format!("s_{k}")));
    write_row(&mut w, &path, &header)?;
    for (row, curve) in corpus.rows.iter().zip(&corpus.curves) {
        let scores = principal_scores(curve, es, components)?;
        let mut fields = vec![row.contour_id.clone(), row.censored.to_string()];
        fields.extend(scores.iter().map(|&s| num(s)));
        write_row(&mut w, &path, &fields)?;
    }

    for k in 1..=components.min(4) {
        let minus = mode_of_variation(es, k, -2.0)?;
        let plus = mode_of_variation(es, k, 2.0)?;
        let path = out.join(format!("mv_{k}.csv"));
        let mut w = csv_writer(&path)?;
        write_row(
            &mut w,
            &path,
            &[
                "theta".into(),
                "z_minus".into(),
                "z_mean".into(),
                "z_plus".into(),
                "km_minus".into(),
                "km_mean".into(),
                "km_plus".into(),
            ],
        )?;
        for (t, theta) in corpus.grid.thetas().enumerate() {
            write_row(
                &mut w,
                &path,
                &[
                    num(theta),
                    num(minus[t]),
                    num(es.mean[t]),
                    num(plus[t]),
                    num(corpus.map.invert(minus[t])),
                    num(corpus.map.invert(es.mean[t])),
                    num(corpus.map.invert(plus[t])),
                ],
            )?;
        }
    }
    Ok(())
}

/// Per-group eigenvalue tables, the per-year analysis analogue. Groups with
/// no complete contour are skipped with a note.
fn write_groups(args: &FpcaArgs, corpus: &Corpus) -> Result<(), Failure> {
    if args.config.group_key.is_none() {
        return Ok(());
    }
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, row) in corpus.rows.iter().enumerate() {
        groups.entry(&row.group_key).or_default().push(i);
    }
    for (key, indices) in groups {
        if indices.iter().all(|&i| corpus.rows[i].censored) {
            println!("group {key}: every contour censored, skipped");
            continue;
        }
        let rows: Vec<_> = indices.iter().map(|&i| corpus.rows[i].clone()).collect();
        let curves: Vec<_> = indices.iter().map(|&i| corpus.curves[i].clone()).collect();
        let censored: Vec<_> = indices.iter().map(|&i| corpus.rows[i].censored).collect();
        let weights = scheme_weights(args.weights, &rows)?;
        let sample = FunctionalSample::new(corpus.grid, curves, weights, censored)?;
        let es = EigenSystem::fit(&sample)?;

        let safe: String = key
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
            .collect();
        let path = args.config.out_dir.join("groups").join(format!("{safe}.csv"));
        let mut w = csv_writer(&path)?;
        write_row(
            &mut w,
            &path,
            &[
                "component".into(),
                "eigenvalue".into(),
                "pct_variance".into(),
                "n_contours".into(),
            ],
        )?;
        let total: f64 = es.eigenvalues.iter().sum();
        for (k, &lambda) in es.eigenvalues.iter().enumerate() {
            write_row(
                &mut w,
                &path,
                &[
                    (k + 1).to_string(),
                    num(lambda),
                    num(100.0 * lambda / total),
                    indices.len().to_string(),
                ],
            )?;
        }
    }
    Ok(())
}
