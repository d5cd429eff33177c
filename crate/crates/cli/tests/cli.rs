//! Black-box tests of the `rainshape` binary: exit codes, error wording,
//! and the shape of the files each subcommand leaves behind.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rainshape"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap();
}

/// synth -> extract -> fpca -> fourier -> report in one temp dir; returns
/// the output dir.
fn full_pipeline(dir: &Path, censor: f64, extra_fpca: &[&str]) -> PathBuf {
    let spec = dir.join("spec.toml");
    write(
        &spec,
        &format!("n_regions = 24\ncensor_fraction = {censor}\nseed = 11\n"),
    );
    let out = dir.join("out");
    let out_s = out.to_str().unwrap();
    let spec_s = spec.to_str().unwrap();
    let dataset = out.join("dataset.csv");

    for args in [
        vec!["synth", "--spec", spec_s, "--out-dir", out_s],
        vec![
            "extract",
            "--input",
            dataset.to_str().unwrap(),
            "--out-dir",
            out_s,
            "--grid-m",
            "128",
        ],
    ] {
        let r = run(&args);
        assert!(r.status.success(), "{args:?}: {}", stderr(&r));
    }
    let mut fpca = vec!["fpca", "--out-dir", out_s, "--grid-m", "128"];
    fpca.extend_from_slice(extra_fpca);
    let r = run(&fpca);
    assert!(r.status.success(), "fpca: {}", stderr(&r));
    let r = run(&["fourier", "--out-dir", out_s, "--grid-m", "128"]);
    assert!(r.status.success(), "fourier: {}", stderr(&r));
    let r = run(&[
        "report",
        "--out-dir",
        out_s,
        "--grid-m",
        "128",
        "--raster-scale",
        "4",
        "--orders",
        "4,6",
    ]);
    assert!(r.status.success(), "report: {}", stderr(&r));
    out
}

#[test]
fn empty_input_yields_an_empty_manifest_and_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty.csv");
    write(&input, "\n  \n");
    let out = dir.path().join("out");
    let r = run(&[
        "extract",
        "--input",
        input.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", stderr(&r));
    let manifest = fs::read_to_string(out.join("manifest.csv")).unwrap();
    assert_eq!(manifest.lines().count(), 1, "header only: {manifest}");
}

#[test]
fn malformed_rows_exit_three_with_the_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    write(
        &input,
        "pass_id,grid_i,grid_j,lat,lon,rain_rate\nA,0,0,35.0,-40.0,1.5\nA,0,not-a-number,35.0,-40.1,2.0\n",
    );
    let r = run(&[
        "extract",
        "--input",
        input.to_str().unwrap(),
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(3));
    let msg = stderr(&r);
    assert!(msg.contains("line 3"), "stderr: {msg}");
}

#[test]
fn config_errors_exit_two_before_touching_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    // The input file does not even exist; validation must fire first.
    let r = run(&[
        "extract",
        "--input",
        dir.path().join("nope.csv").to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
        "--min-area-km2",
        "500",
        "--max-area-km2",
        "100",
    ]);
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr(&r).contains("config error"), "{}", stderr(&r));
    assert!(!out.exists(), "no output dir on config failure");

    let r = run(&["report", "--out-dir", out.to_str().unwrap(), "--orders", ""]);
    assert_eq!(r.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn missing_synth_spec_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&[
        "synth",
        "--spec",
        dir.path().join("absent.toml").to_str().unwrap(),
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(2));

    let spec = dir.path().join("typo.toml");
    write(&spec, "n_regions = 10\nn_regjons = 3\n");
    let r = run(&[
        "synth",
        "--spec",
        spec.to_str().unwrap(),
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr(&r).contains("n_regjons"), "{}", stderr(&r));
}

#[test]
fn fpca_on_an_empty_manifest_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    fs::create_dir_all(&out).unwrap();
    write(
        &out.join("manifest.csv"),
        "contour_id,pass_id,group_key,area_km2,censored,radial_path,polygon_path\n",
    );
    let r = run(&["fpca", "--out-dir", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(3));
    assert!(stderr(&r).contains("manifest"), "{}", stderr(&r));
}

#[test]
fn the_whole_pipeline_runs_and_leaves_the_expected_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = full_pipeline(dir.path(), 0.2, &[]);
    for name in [
        "manifest.csv",
        "map.csv",
        "skewness.csv",
        "eigenvalues.csv",
        "eigensystem.csv",
        "components.csv",
        "weights.csv",
        "scores.csv",
        "mv_1.csv",
        "models.csv",
        "amplitudes.csv",
        "modal_axiality.csv",
        "axiality_contour.csv",
        "ise.csv",
        "ise_summary.csv",
        "symdiff.csv",
        "symdiff_summary.csv",
        "p_theta_d4.csv",
        "p_theta_d6.csv",
        "overlay_best.csv",
        "overlay_median.csv",
        "overlay_worst.csv",
        "recon_example.csv",
    ] {
        assert!(out.join(name).exists(), "missing {name}");
    }

    // Censored contours carry zero Kaplan-Meier mass and appear in the
    // manifest but not in the Fourier model table.
    let manifest = fs::read_to_string(out.join("manifest.csv")).unwrap();
    let censored: Vec<&str> = manifest
        .lines()
        .skip(1)
        .filter(|l| l.split(',').nth(4) == Some("true"))
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert!(!censored.is_empty(), "corpus should have censored contours");
    let weights = fs::read_to_string(out.join("weights.csv")).unwrap();
    for line in weights.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let [id, flag, weight] = fields[..] else {
            panic!("weights row: {line}");
        };
        let flagged = flag == "true";
        let w: f64 = weight.parse().unwrap();
        assert_eq!(censored.contains(&id), flagged, "{id}");
        assert_eq!(w == 0.0, flagged, "{id} weight {w}");
    }
    let models = fs::read_to_string(out.join("models.csv")).unwrap();
    for id in &censored {
        assert!(!models.contains(id), "censored {id} was fitted");
    }
}

#[test]
fn weight_schemes_agree_exactly_when_nothing_is_censored() {
    let dir = tempfile::tempdir().unwrap();
    let out = full_pipeline(dir.path(), 0.0, &[]);
    let km = fs::read_to_string(out.join("eigenvalues.csv")).unwrap();
    let km_weights = fs::read_to_string(out.join("weights.csv")).unwrap();

    let r = run(&[
        "fpca",
        "--out-dir",
        out.to_str().unwrap(),
        "--grid-m",
        "128",
        "--weights",
        "uniform",
    ]);
    assert!(r.status.success(), "{}", stderr(&r));
    assert_eq!(km, fs::read_to_string(out.join("eigenvalues.csv")).unwrap());
    assert_eq!(km_weights, fs::read_to_string(out.join("weights.csv")).unwrap());
}

#[test]
fn weight_schemes_differ_when_censoring_is_present() {
    let dir = tempfile::tempdir().unwrap();
    let out = full_pipeline(dir.path(), 0.3, &[]);
    let km = fs::read_to_string(out.join("eigenvalues.csv")).unwrap();

    let r = run(&[
        "fpca",
        "--out-dir",
        out.to_str().unwrap(),
        "--grid-m",
        "128",
        "--weights",
        "uniform",
    ]);
    assert!(r.status.success(), "{}", stderr(&r));
    let uniform = fs::read_to_string(out.join("eigenvalues.csv")).unwrap();
    assert_ne!(km, uniform);
}

#[test]
fn group_key_splits_the_eigenanalysis_by_pass_prefix() {
    let dir = tempfile::tempdir().unwrap();
    let out = full_pipeline(dir.path(), 0.2, &["--group-key", "group_key"]);
    let groups: Vec<_> = fs::read_dir(out.join("groups"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    // Synthetic pass ids are dashless, so each pass is its own group.
    assert!(groups.len() > 1, "groups: {groups:?}");
    for name in &groups {
        assert!(name.ends_with(".csv"), "{name}");
    }
}

#[test]
fn out_dir_falls_back_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty.csv");
    write(&input, "");
    let out = dir.path().join("from-env");
    let r = bin()
        .args(["extract", "--input", input.to_str().unwrap()])
        .env("RAINSHAPE_OUT_DIR", &out)
        .output()
        .unwrap();
    assert!(r.status.success(), "{}", stderr(&r));
    assert!(out.join("manifest.csv").exists());
}
