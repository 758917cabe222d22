use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fgnpc::{ar1_sample, fgn_sample, Ar1Params, FgnParams};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fgnpc"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_series(dir: &Path, name: &str, y: &[f64]) -> PathBuf {
    let mut text = String::from("year,value\n");
    for (i, v) in y.iter().enumerate() {
        text.push_str(&format!("{},{v}\n", 1900 + i));
    }
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn trapezoid(path: &Path) -> f64 {
    let text = std::fs::read_to_string(path).unwrap();
    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let mut it = l.split(',').map(|s| s.parse::<f64>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    rows.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum()
}

#[test]
fn prior_rates_and_normalisation() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    for kind in ["fgn", "ar1", "precision"] {
        let o = run(&["prior", kind, "--out", out]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let fgn = json(&dir.path().join("fgn_meta.json"));
    assert!((fgn["rate"].as_f64().unwrap() - 1.70).abs() < 0.01);
    let prec = json(&dir.path().join("precision_meta.json"));
    assert!((prec["rate"].as_f64().unwrap() - 4.6052).abs() < 1e-4);
    let ar1 = json(&dir.path().join("ar1_meta.json"));
    assert_eq!(ar1["rate"], fgn["rate"]);
    for file in ["ar1_prior.csv", "fgn_prior.csv", "precision_prior.csv", "precision_distance.csv"] {
        let mass = trapezoid(&dir.path().join(file));
        assert!((mass - 1.0).abs() < 1e-4, "{file}: {mass}");
    }
}

#[test]
fn prior_respects_calibration_flags() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["prior", "fgn", "--alpha", "0.2", "--out", out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let meta = json(&dir.path().join("fgn_meta.json"));
    assert!((meta["rate"].as_f64().unwrap() - 0.97).abs() < 0.01);
    assert!((meta["tail_probability_above_u"].as_f64().unwrap() - 0.2).abs() < 2e-3);
}

#[test]
fn compare_prefers_fgn_on_fgn_data() {
    let dir = TempDir::new().unwrap();
    let mut supported = 0;
    for seed in 0..5u64 {
        let y = fgn_sample(FgnParams::new(0.8, 1.0).unwrap(), 500, 100 + seed).unwrap();
        let file = write_series(dir.path(), &format!("fgn{seed}.csv"), &y);
        let out = dir.path().join(format!("out{seed}"));
        let o = run(&["compare", file.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        let report = json(&out.join("compare.json"));
        let cat = report["category"].as_str().unwrap();
        if ["POSITIVE", "STRONG", "VERY_STRONG"].contains(&cat) {
            supported += 1;
        }
        assert_eq!(report["series"]["mean_centered"], true);
        let text = String::from_utf8_lossy(&o.stdout);
        assert!(text.contains(cat) && text.contains("posterior, ar1 model"));
    }
    assert!(supported >= 3, "{supported} of 5");
}

#[test]
fn compare_prefers_ar1_on_ar1_data() {
    let dir = TempDir::new().unwrap();
    let mut below_one = 0;
    for seed in 0..5u64 {
        let y = ar1_sample(Ar1Params::new(0.5, 1.0).unwrap(), 500, 200 + seed).unwrap();
        let file = write_series(dir.path(), &format!("ar{seed}.csv"), &y);
        let out = dir.path().join(format!("out{seed}"));
        let o = run(&["compare", file.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        if json(&out.join("compare.json"))["log_bayes_factor"].as_f64().unwrap() < 0.0 {
            below_one += 1;
        }
    }
    assert!(below_one >= 3, "{below_one} of 5");
}

#[test]
fn fit_with_linear_trend_reports_slope() {
    let dir = TempDir::new().unwrap();
    let noise = fgn_sample(FgnParams::new(0.7, 25.0).unwrap(), 300, 9).unwrap();
    let y: Vec<f64> = noise.iter().enumerate().map(|(i, e)| 0.01 * (i + 1) as f64 + e).collect();
    let file = write_series(dir.path(), "trend.csv", &y);
    let out = dir.path().join("out");
    let o = run(&[
        "fit",
        file.to_str().unwrap(),
        "--model",
        "fgn",
        "--trend",
        "linear",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = json(&out.join("fit_fgn.json"));
    assert_eq!(report["series"]["mean_centered"], false);
    let posterior = report["fit"]["posterior"].as_array().unwrap();
    let slope = posterior.iter().find(|e| e["name"] == "beta1").unwrap();
    assert!(slope["lower_95"].as_f64().unwrap() < 0.01 && slope["upper_95"].as_f64().unwrap() > 0.01);
}

#[test]
fn ingestion_errors_exit_2_and_name_the_row() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("gap.csv");
    let mut text = String::from("time,value\n");
    for t in [1, 2, 3, 4, 5, 6, 8, 9, 10, 11, 12] {
        text.push_str(&format!("{t},0.{t}\n"));
    }
    std::fs::write(&path, text).unwrap();
    let o = run(&["compare", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.starts_with("error:") && err.contains("row 7"), "{err}");

    let short = write_series(dir.path(), "short.csv", &[0.1, 0.2, 0.3]);
    let o = run(&["compare", short.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("at least 10"));

    let o = run(&["compare", dir.path().join("missing.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn degenerate_series_is_a_numerical_failure() {
    let dir = TempDir::new().unwrap();
    let file = write_series(dir.path(), "flat.csv", &[3.0; 40]);
    let o = run(&["fit", file.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let err = stderr(&o);
    assert!(err.starts_with("error:") && err.contains("hint:"), "{err}");
}

#[test]
fn config_file_errors_name_line_and_field() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "u = 0.9\nalpha = 0.1\nprec_u = -1\n").unwrap();
    let o = run(&["prior", "precision", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("run.toml:3: field `prec_u`"), "{}", stderr(&o));

    std::fs::write(&cfg, "u = 0.9\nsmoothing = 2\n").unwrap();
    let o = run(&["prior", "precision", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("run.toml:2"), "{}", stderr(&o));

    // A flag fixes the bad file value.
    std::fs::write(&cfg, "prec_u = -1\n").unwrap();
    let out = dir.path().join("out");
    let o = run(&[
        "prior",
        "precision",
        "--config",
        cfg.to_str().unwrap(),
        "--prec-u",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(json(&out.join("precision_meta.json"))["config"]["prec_u"], 2.0);
}

#[test]
fn bad_flags_exit_2() {
    assert_eq!(run(&["prior", "gamma"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--replicates", "0"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--hurst", "1.2"]).status.code(), Some(2));
    let o = run(&["prior", "fgn", "--u", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error:"));
}

#[test]
fn simulate_default_plan_has_nine_cells() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["simulate", "--replicates", "2", "--out", out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("simulation.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10);
    let seeds = std::fs::read_to_string(dir.path().join("simulation_seeds.csv")).unwrap();
    assert_eq!(seeds.lines().count(), 1 + 9 * 2);
    assert!(dir.path().join("simulation.txt").exists());
}

#[test]
fn simulate_single_cell_override() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["simulate", "--hurst", "0.9", "--lengths", "100", "--replicates", "20", "--out", out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("simulation.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[1].starts_with("0.9,100,"));
    let props: f64 = rows[1].split(',').skip(2).take(5).map(|s| s.parse::<f64>().unwrap()).sum();
    assert!((props - 1.0).abs() < 1e-5);
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let y = fgn_sample(FgnParams::new(0.75, 4.0).unwrap(), 120, 3).unwrap();
    let file = write_series(dir.path(), "y.csv", &y);
    let mut snaps = Vec::new();
    let out = dir.path().join("run");
    let out = out.to_str().unwrap();
    for _ in 0..2 {
        for args in [
            vec!["prior", "fgn"],
            vec!["compare", file.to_str().unwrap(), "--trend", "linear"],
            vec!["simulate", "--hurst", "0.8", "--lengths", "60", "--replicates", "8", "--seed", "11"],
        ] {
            let mut args = args.clone();
            args.extend(["--out", out]);
            let o = run(&args);
            assert!(o.status.success(), "{}", stderr(&o));
        }
        snaps.push(snapshot(Path::new(out)));
    }
    assert_eq!(snaps[0].len(), 9);
    assert_eq!(snaps[0], snaps[1]);
}
