use std::fs;
use std::path::Path;

use serde_json::Value;
use shapeinv_cli::{reemit_json, run};

fn run_args(args: &[&str]) -> i32 {
    let mut full = vec!["shapeinv"];
    full.extend_from_slice(args);
    run(full)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn out(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

#[test]
fn catalog_lists_builtins_as_json_array() {
    let dir = tempfile::tempdir().unwrap();
    let path = out(&dir, "catalog.json");
    assert_eq!(run_args(&["catalog", "--out", &path]), 0);
    let doc = read_json(Path::new(&path));
    let names: Vec<&str> = doc["data"].as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"poschl_teller") && names.contains(&"harmonic"));
}

#[test]
fn spectrum_matches_and_truncates() {
    let dir = tempfile::tempdir().unwrap();
    let path = out(&dir, "spectrum.json");
    assert_eq!(run_args(&["spectrum", "--family", "poschl_teller", "--g", "3", "--levels", "5", "--out", &path]), 0);
    let doc = read_json(Path::new(&path));
    assert_eq!(doc["data"]["truncated"], Value::Bool(true));
    let levels = doc["data"]["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 3);
    let exact: Vec<f64> = levels.iter().map(|l| l["e_exact"].as_f64().unwrap()).collect();
    assert_eq!(exact, vec![0.0, 5.0, 8.0]);
}

#[test]
fn spectrum_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let path = out(&dir, "s.csv");
    assert_eq!(run_args(&["spectrum", "--family", "morse", "--out", &path]), 1);
    assert_eq!(run_args(&["spectrum", "--tol", "1e-9", "--out", &path]), 2);
    assert_eq!(run_args(&["spectrum", "--grid", "1,0,10", "--out", &path]), 1);
    assert_eq!(run_args(&["spectrum", "--bogus"]), 1);
}

#[test]
fn spectrum_csv_has_header_and_lf() {
    let dir = tempfile::tempdir().unwrap();
    let path = out(&dir, "s.csv");
    assert_eq!(run_args(&["spectrum", "--format", "csv", "--out", &path]), 0);
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("n,e_exact,e_oracle,abs_diff\n"));
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn states_write_profiles_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let target = out(&dir, "states");
    assert_eq!(run_args(&["states", "--g", "3", "--levels", "2", "--out", &target]), 0);
    let summary = read_json(&Path::new(&target).join("summary.json"));
    let rows = summary["data"].as_array().unwrap();
    assert_eq!(rows[0]["nodes"], 0);
    assert_eq!(rows[1]["nodes"], 1);
    assert!(rows[1]["oracle_overlap"].as_f64().unwrap().abs() >= 0.999);

    let profile = read_json(&Path::new(&target).join("state_1.json"));
    let xs = profile["data"]["x"].as_array().unwrap();
    let psi = profile["data"]["psi"].as_array().unwrap();
    // sech³ normalized: ∫ sech⁶ = 16/15.
    let norm = (15.0f64 / 16.0).sqrt();
    for (x, p) in xs.iter().zip(psi) {
        let x = x.as_f64().unwrap();
        let expected = norm / x.cosh().powi(3);
        assert!((p.as_f64().unwrap() - expected).abs() < 1e-6);
    }
}

#[test]
fn states_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let target = out(&dir, "csv");
    assert_eq!(run_args(&["states", "--levels", "1", "--format", "csv", "--out", &target]), 0);
    let text = fs::read_to_string(Path::new(&target).join("state_1.csv")).unwrap();
    assert!(text.starts_with("x,psi\n"));
    assert_eq!(text.lines().count(), 2402);
}

#[test]
fn states_out_of_range_level_fails() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_args(&["states", "--g", "3", "--levels", "9", "--out", &out(&dir, "x")]), 1);
    assert!(!dir.path().join("x").exists());
}

#[test]
fn verify_defaults_pass() {
    let dir = tempfile::tempdir().unwrap();
    let path = out(&dir, "verify.json");
    assert_eq!(run_args(&["verify", "--out", &path]), 0);
    let doc = read_json(Path::new(&path));
    assert_eq!(doc["data"]["all_pass"], Value::Bool(true));
    assert_eq!(doc["data"]["bps_states"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_harmonic_three_partnerships() {
    let dir = tempfile::tempdir().unwrap();
    let path = out(&dir, "verify.json");
    let args = [
        "verify", "--family", "harmonic", "--g", "1", "--partnerships", "3", "--eta1", "1", "--grid", "-10,10,1001",
        "--out", &path,
    ];
    assert_eq!(run_args(&args), 0);
    let doc = read_json(Path::new(&path));
    let z: Vec<f64> = doc["data"]["central_charges"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(z, vec![2.0, 6.0, 10.0]);
}

#[test]
fn odd_sector_config_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = out(&dir, "config.json");
    fs::write(&config, r#"{"family": "poschl_teller", "g": [3.0], "sectors": 3}"#).unwrap();
    assert_eq!(run_args(&["verify", "--config", &config, "--out", &out(&dir, "v.json")]), 1);
    assert_eq!(run_args(&["verify", "--sectors", "5"]), 1);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = out(&dir, "config.json");
    fs::write(&config, r#"{"family": "harmonic", "g": [2.0], "levels": 4, "grid": {"x_min": -8, "x_max": 8, "n_points": 1601}}"#)
        .unwrap();
    let path = out(&dir, "s.json");
    assert_eq!(run_args(&["spectrum", "--config", &config, "--levels", "2", "--out", &path]), 0);
    let doc = read_json(Path::new(&path));
    assert_eq!(doc["meta"]["family"], "harmonic");
    assert_eq!(doc["meta"]["grid"]["n_points"], 1601);
    let exact: Vec<f64> =
        doc["data"]["levels"].as_array().unwrap().iter().map(|l| l["e_exact"].as_f64().unwrap()).collect();
    assert_eq!(exact, vec![0.0, 4.0]);
}

#[test]
fn figure_single_partnership_has_two_columns() {
    let dir = tempfile::tempdir().unwrap();
    let path = out(&dir, "fig.csv");
    assert_eq!(run_args(&["figure", "--partnerships", "1", "--format", "csv", "--out", &path]), 0);
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next().unwrap(), "level,sector_1,sector_2");
    let flags = fs::read_to_string(dir.path().join("fig_alignment.csv")).unwrap();
    assert_eq!(flags.lines().count(), 2);
    assert!(flags.lines().nth(1).unwrap().ends_with(",true"));
}

#[test]
fn json_outputs_round_trip_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let commands: [&[&str]; 4] = [&["catalog"], &["spectrum"], &["figure"], &["figure", "--broken-alignment", "0.7"]];
    for (i, args) in commands.iter().enumerate() {
        let path = out(&dir, &format!("doc{i}.json"));
        let mut full = args.to_vec();
        full.extend(["--out", &path]);
        assert_eq!(run_args(&full), 0);
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(reemit_json(&text).unwrap(), text, "{args:?}");
    }
    let target = out(&dir, "states");
    assert_eq!(run_args(&["states", "--levels", "2", "--out", &target]), 0);
    for name in ["summary.json", "state_2.json"] {
        let text = fs::read_to_string(Path::new(&target).join(name)).unwrap();
        assert_eq!(reemit_json(&text).unwrap(), text);
    }
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = out(&dir, "a.json");
    let b = out(&dir, "b.json");
    assert_eq!(run_args(&["verify", "--seed", "9", "--out", &a]), 0);
    assert_eq!(run_args(&["verify", "--seed", "9", "--out", &b]), 0);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}
