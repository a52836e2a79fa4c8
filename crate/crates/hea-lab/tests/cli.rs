//! CLI behavior: exit codes, config-file/flag precedence, output shapes.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hea-lab"))
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn unknown_flag_exits_2_and_names_it() {
    let out = bin().args(["concentration", "--bad-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("--bad-flag"), "diagnostic should name the flag: {stderr}");
}

#[test]
fn unknown_subcommand_exits_2() {
    let out = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_required_key_exits_2_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["gde-sff", "--n", "4", "--t", "0,1", "--samples", "8", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "missing seed must be a config error");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("seed"), "diagnostic should name the key: {stderr}");
}

#[test]
fn invalid_config_value_exits_2_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "numerics", "--n", "4", "--depth", "1", "--t-max", "0", "--t-steps", "4",
            "--samples", "2", "--seed", "1", "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    // nothing was written
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn unwritable_output_path_exits_1() {
    let out = bin()
        .args([
            "haar-check", "--dim", "4", "--samples", "10", "--seed", "1", "--out",
            "/dev/null/nope",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_supplies_keys_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "n": 4,
            "k": [1],
            "t": [0.0, 1.0],
            "samples": 8,
            "seed": 3,
            "out": dir.path().join("from-file"),
        })
        .to_string(),
    )
    .unwrap();
    // run purely from the file
    let status = bin().args(["gde-sff", "--config"]).arg(&cfg).status().unwrap();
    assert!(status.success());
    let csv = read(&dir.path().join("from-file").join("gde_sff.csv"));
    assert!(csv.contains("# seed: 3"));
    // override samples and seed by flag
    let out2 = dir.path().join("overridden");
    let status = bin()
        .args(["gde-sff", "--config"])
        .arg(&cfg)
        .args(["--samples", "4", "--seed", "9", "--out"])
        .arg(&out2)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = read(&out2.join("gde_sff.csv"));
    assert!(csv.contains("# seed: 9"));
    assert!(csv.contains("\"samples\":4"));
}

#[test]
fn numerics_row_count_matches_grid() {
    // 2 sizes x 4 time points -> 8 data rows after the header block
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args([
            "numerics", "--n", "3,4", "--depth", "1", "--t-max", "2", "--t-steps", "4",
            "--samples", "2", "--theta-draws", "1", "--seed", "7", "--out",
        ])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let csv = read(&dir.path().join("numerics.csv"));
    let data_rows = csv.lines().filter(|l| !l.starts_with('#')).count() - 1;
    assert_eq!(data_rows, 8);
    assert!(csv.lines().any(|l| l == "n,t,mean_grad_inf_norm,std_error,mean_entropy_2q,samples"));
}

#[test]
fn sff_summary_carries_analytic_column() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["gde-sff", "--n", "4", "--k", "1", "--t", "0,2", "--samples", "8", "--seed", "1", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("gde_sff_summary.json"))).unwrap();
    let rows = summary["results"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    let analytic = rows[1]["analytic"].as_f64().unwrap();
    assert!((analytic - (-1.0f64).exp()).abs() < 1e-12, "e^(-t^2/4) at t=2");
    assert!(rows[1]["mean_sff"].is_f64());
    assert_eq!(summary["config_hash"], summary["config_hash"].clone());
}

#[test]
fn plot_flag_emits_one_series_per_n() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args([
            "numerics", "--n", "3,4", "--depth", "1", "--t-max", "2", "--t-steps", "3",
            "--samples", "2", "--theta-draws", "1", "--seed", "7", "--plot", "--out",
        ])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let svg = read(&dir.path().join("numerics.svg"));
    assert_eq!(svg.matches("<polyline").count(), 2);
}

#[test]
fn help_lists_all_subcommands() {
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in ["numerics", "gde-sff", "gde-purity", "discriminate", "concentration", "haar-check"]
    {
        assert!(text.contains(sub), "help missing {sub}");
    }
}
