use std::fs;
use std::path::Path;

use fiber_ground::cli::main_with;

fn args<'a>(dir: &'a Path, extra: &[&'a str]) -> Vec<String> {
    let mut v: Vec<String> = vec![
        "fiber-ground".into(),
        "--budget-3d".into(),
        "2000".into(),
        "--budget-6d".into(),
        "4000".into(),
        "--budget-9d".into(),
        "4000".into(),
        "--cache".into(),
        dir.join("cache").display().to_string(),
        "--out".into(),
        dir.join("out").display().to_string(),
    ];
    v.extend(extra.iter().map(|s| s.to_string()));
    v
}

#[test]
fn invalid_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    for bad in [
        vec!["--taper", "vanishing", "coefficients"],
        vec!["--lambda", "0.5", "coefficients"],
        vec!["--alpha-max", "0.3", "curve"],
        vec!["--modes-angular", "7", "oracle"],
        vec!["--radial-points", "10", "hydrogen"],
    ] {
        assert_eq!(main_with(args(dir.path(), &bad)), 2, "{bad:?}");
    }
    assert!(!dir.path().join("out").exists());
}

#[test]
fn config_file_is_read_and_checked() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "lambda = 2.0\nbogus = 1\n").unwrap();
    let c = cfg.display().to_string();
    assert_eq!(main_with(args(dir.path(), &["--config", &c, "coefficients"])), 2);
    fs::write(&cfg, "# narrow grid\nalpha_points = 1\n").unwrap();
    // One α point cannot support a three-term fit.
    assert_eq!(main_with(args(dir.path(), &["--config", &c, "curve"])), 2);
    assert!(dir.path().join("out/rr_curve.csv").exists());
}

#[test]
fn curve_csv_has_one_row_per_alpha() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(main_with(args(dir.path(), &["--alpha-points", "8", "curve"])), 0);
    let text = fs::read_to_string(dir.path().join("out/rr_curve.csv")).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(body[0].starts_with("alpha,E_RR,E_RR_error,E_trial,E_trial_error,c_omega"));
    assert_eq!(body.len(), 9);
    for row in &body[1..] {
        let cells: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells.len(), 11);
        // E_RR ≤ E_trial within the reported widths.
        assert!(cells[1] <= cells[3] + cells[2] + cells[4]);
    }
    let fit: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/fit.json")).unwrap()).unwrap();
    assert!(fit["fit"]["c2"]["error"].as_f64().unwrap() > 0.0);
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let read = |name: &str| fs::read(dir.path().join("out").join(name)).unwrap();
    let mut first = Vec::new();
    for jobs in ["1", "3"] {
        let code = main_with(args(dir.path(), &["--jobs", jobs, "hydrogen"]));
        assert_eq!(code, 0);
        let now = (read("hydrogen.json"), read("sigma_curve.csv"));
        if first.is_empty() {
            first.push(now);
        } else {
            assert!(first[0] == now, "outputs differ between worker counts");
        }
    }
    // A fresh cache recomputes every element and must agree byte for byte.
    fs::remove_dir_all(dir.path().join("cache")).unwrap();
    assert_eq!(main_with(args(dir.path(), &["--jobs", "2", "hydrogen"])), 0);
    assert!(first[0] == (read("hydrogen.json"), read("sigma_curve.csv")));
}

#[test]
fn oracle_writes_spectra_and_lock() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        main_with(args(dir.path(), &["--nmax", "3", "--alpha-points", "3", "oracle"])),
        0
    );
    let lock: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/convention_lock.json")).unwrap()).unwrap();
    assert!(lock["max_abs_deviation"].as_f64().unwrap() <= 1e-10);
    let spectra = fs::read_to_string(dir.path().join("out/oracle_spectra.csv")).unwrap();
    let rows: Vec<&str> = spectra.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0].split(',').count(), 7);
}
