use std::path::Path;
use std::process::Command;

use roundtrap::cli::output::{data_columns, read_csv, RunManifest};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_roundtrap"));
    c.env_remove("ROUNDTRAP_OUT_DIR");
    c
}

fn code(cmd: &mut Command) -> i32 {
    cmd.output().expect("binary runs").status.code().expect("exit code")
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    read_csv(path).unwrap().1
}

#[test]
fn sweep_writes_one_row_per_step_size() {
    let dir = tempfile::tempdir().unwrap();
    let status = code(bin().args([
        "sweep", "--scheme", "midpoint", "--a", "0.1", "--b", "0.2", "--t-end", "100", "--dt-list", "1e-1,1e-2,1e-3",
        "--p-run", "24", "--p-ref", "113", "--out-dir",
    ]).arg(dir.path()));
    assert_eq!(status, 0);
    let (header, body) = read_csv(&dir.path().join("sweep.csv")).unwrap();
    assert_eq!(header, ["dt", "n_steps", "E", "E_t", "E_r", "status", "wall_time_s"]);
    assert_eq!(body.len(), 3);
    assert!(body.iter().all(|r| r[5] == "ok"));
    let m = RunManifest::read(&dir.path().join("manifest.json")).unwrap();
    assert_eq!(m.command, "sweep");
    assert_eq!(m.config.dt_list, Some(vec![0.1, 0.01, 0.001]));
    assert_eq!(m.outputs, ["sweep.csv"]);
}

#[test]
fn equal_precisions_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(bin().args(["sweep", "--p-ref", "24", "--p-run", "24", "--out-dir"]).arg(dir.path())), 2);
    assert!(!dir.path().join("sweep.csv").exists());
}

#[test]
fn guard_trip_is_recorded_in_file() {
    let dir = tempfile::tempdir().unwrap();
    let status = code(bin().args(["sweep", "--dt-list", "1e-9", "--t-end", "100", "--max-steps", "10000000", "--out-dir"]).arg(dir.path()));
    assert_eq!(status, 0);
    let body = rows(&dir.path().join("sweep.csv"));
    assert_eq!(body.len(), 1);
    assert_eq!(body[0][5], "skipped_guard");
    assert_eq!(body[0][2], "");
}

#[test]
fn longrun_rows_have_increasing_time_and_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["longrun", "--dt", "1e-2", "--t-end", "50", "--samples", "30", "--out-dir"];
    assert_eq!(code(bin().args(args).arg(dir.path().join("one"))), 0);
    assert_eq!(code(bin().args(args).arg(dir.path().join("two"))), 0);
    let one = dir.path().join("one/timeseries.csv");
    let body = rows(&one);
    assert_eq!(body.len(), 30);
    let t: Vec<f64> = body.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(t.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(std::fs::read(&one).unwrap(), std::fs::read(dir.path().join("two/timeseries.csv")).unwrap());
}

#[test]
fn longrun_needs_two_samples() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(bin().args(["longrun", "--samples", "1", "--out-dir"]).arg(dir.path())), 2);
}

#[test]
fn longrun_step_limit_is_a_guard_error() {
    let dir = tempfile::tempdir().unwrap();
    let status = code(bin().args(["longrun", "--dt", "1e-6", "--t-end", "100", "--max-steps", "1000", "--out-dir"]).arg(dir.path()));
    assert_eq!(status, 3);
}

#[test]
fn out_dir_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let status = code(bin().env("ROUNDTRAP_OUT_DIR", dir.path()).args(["diagnose", "spectral", "--dt", "0.1"]));
    assert_eq!(status, 0);
    assert!(dir.path().join("diagnostics.csv").is_file());
    assert!(dir.path().join("manifest.json").is_file());
}

#[test]
fn spectral_diagnostic_reports_unit_determinant() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(bin().args(["diagnose", "spectral", "--scheme", "midpoint", "--dt", "0.1", "--out-dir"]).arg(dir.path())), 0);
    let body = rows(&dir.path().join("diagnostics.csv"));
    let get = |k: &str| body.iter().find(|r| r[1] == k).map(|r| r[2].clone()).unwrap();
    // Exact algebra: det of the midpoint map is 1 and the eigenvalues lie on
    // the unit circle.
    assert_eq!(get("det"), "1.00000000000000000000000000000000000e0");
    assert_eq!(get("modulus_1"), "1.00000000000000000000000000000000000e0");
    assert_eq!(get("complex_pair"), "true");

    let euler = tempfile::tempdir().unwrap();
    assert_eq!(code(bin().args(["diagnose", "spectral", "--scheme", "euler", "--dt", "0.5", "--out-dir"]).arg(euler.path())), 0);
    let body = rows(&euler.path().join("diagnostics.csv"));
    // det(I + dt J) = 1 + a b dt² = 1.005 for a = 0.1, b = 0.2, dt = 0.5,
    // up to the binary values of 0.1 and 0.2.
    let det: f64 = body.iter().find(|r| r[1] == "det").unwrap()[2].parse().unwrap();
    assert!((det - 1.005).abs() < 1e-15);
}

#[test]
fn ect_and_os_read_earlier_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let ts = dir.path().join("ts");
    let sw = dir.path().join("sw");
    assert_eq!(code(bin().args(["longrun", "--dt", "1e-2", "--t-end", "50", "--samples", "20", "--out-dir"]).arg(&ts)), 0);
    assert_eq!(code(bin().args(["sweep", "--t-end", "10", "--dt-list", "1e-1,1e-2,1e-3", "--out-dir"]).arg(&sw)), 0);

    let ect = dir.path().join("ect");
    let status = code(
        bin().args(["diagnose", "ect", "--threshold", "1e-6", "--series", "E_r", "--input"]).arg(ts.join("timeseries.csv")).arg("--out-dir").arg(&ect),
    );
    assert_eq!(status, 0);
    let body = rows(&ect.join("diagnostics.csv"));
    assert_eq!(body.len(), 1);
    assert_eq!(body[0][0], "ect");
    assert_eq!(body[0][1], "1e-6");
    let series = rows(&ts.join("timeseries.csv"));
    let expected = series.iter().find(|r| r[1].parse::<f64>().unwrap() >= 1e-6).map(|r| r[0].clone());
    assert_eq!(Some(body[0][2].clone()), expected.or(Some("none".into())));

    let os = dir.path().join("os");
    assert_eq!(code(bin().args(["diagnose", "os", "--input"]).arg(sw.join("sweep.csv")).arg("--out-dir").arg(&os)), 0);
    let body = rows(&os.join("diagnostics.csv"));
    assert_eq!(body.len(), 1);
    let sweep = rows(&sw.join("sweep.csv"));
    let best = sweep
        .iter()
        .min_by(|a, b| a[2].parse::<f64>().unwrap().total_cmp(&b[2].parse::<f64>().unwrap()))
        .unwrap();
    assert_eq!(body[0][1], best[0]);
    assert_eq!(body[0][2], best[2]);
}

#[test]
fn missing_input_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let status = code(bin().args(["diagnose", "os", "--input"]).arg(dir.path().join("absent.csv")).arg("--out-dir").arg(dir.path()));
    assert_eq!(status, 4);
}

#[test]
fn flags_override_config_file_over_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"a": 0.3, "b": 0.4, "t_end": 5.0, "dt_list": [0.1]}"#).unwrap();
    let out = dir.path().join("out");
    assert_eq!(code(bin().arg("sweep").arg("--config").arg(&cfg).args(["--b", "0.5", "--out-dir"]).arg(&out)), 0);
    let m = RunManifest::read(&out.join("manifest.json")).unwrap();
    assert_eq!(m.config.a, Some(0.3));
    assert_eq!(m.config.b, Some(0.5));
    assert_eq!(m.config.t_end, Some(5.0));
    assert_eq!(m.config.p_run, Some(24));
    assert_eq!(m.config.dt_list, Some(vec![0.1]));
}

#[test]
fn bad_config_and_bad_flags_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"unknown_key": 1}"#).unwrap();
    assert_eq!(code(bin().arg("sweep").arg("--config").arg(&cfg).arg("--out-dir").arg(dir.path())), 2);
    assert_eq!(code(bin().args(["sweep", "--scheme", "leapfrog"])), 2);
    assert_eq!(code(bin().args(["sweep", "--a", "-1", "--out-dir"]).arg(dir.path())), 2);
    assert_eq!(code(bin().args(["longrun", "--spacing", "cubic"])), 2);
    assert_eq!(code(bin().arg("--help")), 0);
}

#[test]
fn manifest_works_as_config_and_replays_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    assert_eq!(code(bin().args(["longrun", "--p-run", "16", "--dt", "2e-2", "--t-end", "40", "--samples", "15", "--out-dir"]).arg(&first)), 0);
    let manifest = first.join("manifest.json");

    let again = dir.path().join("again");
    assert_eq!(code(bin().arg("longrun").arg("--config").arg(&manifest).arg("--out-dir").arg(&again)), 0);
    assert_eq!(
        data_columns(&first.join("timeseries.csv")).unwrap(),
        data_columns(&again.join("timeseries.csv")).unwrap()
    );

    assert_eq!(code(bin().arg("replay").arg("--manifest").arg(&manifest).arg("--check")), 0);
    assert!(first.join("replay/timeseries.csv").is_file());

    // Tampering with the recorded data makes the check fail.
    let path = first.join("timeseries.csv");
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[1] = lines[1].replacen(",", ",9", 1);
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();
    assert_eq!(code(bin().arg("replay").arg("--manifest").arg(&manifest).arg("--check")), 1);
}

#[test]
fn drift_residual_and_bound_diagnostics_run() {
    let dir = tempfile::tempdir().unwrap();
    for (kind, expect_rows) in [("drift", 5), ("residual", 3), ("bound", 6)] {
        let out = dir.path().join(kind);
        let status = code(bin().args(["diagnose", kind, "--samples", "5", "--out-dir"]).arg(&out));
        assert_eq!(status, 0, "{kind}");
        let body = rows(&out.join("diagnostics.csv"));
        assert_eq!(body.len(), expect_rows, "{kind}");
        assert!(body.iter().all(|r| r[0] == kind));
    }
}
