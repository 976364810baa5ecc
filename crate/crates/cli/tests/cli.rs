//! End-to-end tests of the `optotension` binary: exit codes, file formats,
//! determinism, and the simulate -> calibrate -> control pipeline.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_optotension"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn assert_code(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("optotension-cli-tests").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn data_rows(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(str::to_string)
        .collect()
}

#[test]
fn simulate_row_count_and_rate_limit() {
    let dir = workdir("simulate");
    let out = run(
        &[
            "simulate",
            "--rate",
            "1000",
            "--duration",
            "10",
            "--force-profile",
            "const:50",
            "--out",
            "log.csv",
        ],
        &dir,
    );
    assert_code(&out, 0);
    let rows = data_rows(&dir.join("log.csv"));
    assert_eq!(rows[0], "time_s,counts,voltage_v,force_n");
    assert_eq!(rows.len() - 1, 10_000);
    // Force column stays empty before calibration.
    assert!(rows[1].ends_with(','));

    let out = run(
        &[
            "simulate",
            "--rate",
            "6000",
            "--duration",
            "1",
            "--out",
            "x.csv",
        ],
        &dir,
    );
    assert_code(&out, 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("5000"), "must name the limit: {stderr}");
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let dir = workdir("determinism");
    for name in ["a.csv", "b.csv"] {
        let out = run(
            &[
                "simulate",
                "--seed",
                "9",
                "--rate",
                "500",
                "--duration",
                "2",
                "--out",
                name,
            ],
            &dir,
        );
        assert_code(&out, 0);
    }
    let a = std::fs::read(dir.join("a.csv")).unwrap();
    let b = std::fs::read(dir.join("b.csv")).unwrap();
    assert_eq!(a, b, "same seed must give byte-identical logs");

    let out = run(
        &[
            "simulate",
            "--seed",
            "10",
            "--rate",
            "500",
            "--duration",
            "2",
            "--out",
            "c.csv",
        ],
        &dir,
    );
    assert_code(&out, 0);
    assert_ne!(a, std::fs::read(dir.join("c.csv")).unwrap());
}

#[test]
fn echoed_configuration_reproduces_run() {
    let dir = workdir("echo");
    let out = run(
        &[
            "simulate",
            "--seed",
            "4",
            "--rate",
            "200",
            "--duration",
            "1",
            "--out",
            "orig.csv",
        ],
        &dir,
    );
    assert_code(&out, 0);
    // Extract the echoed model entries into a config file and re-run with it.
    let text = std::fs::read_to_string(dir.join("orig.csv")).unwrap();
    let config: String = text
        .lines()
        .filter_map(|l| l.strip_prefix("# "))
        .filter(|l| l.contains('.')) // model keys only, not run flags
        .map(|l| format!("{l}\n"))
        .collect();
    std::fs::write(dir.join("echoed.conf"), config).unwrap();
    let out = run(
        &[
            "--config",
            "echoed.conf",
            "simulate",
            "--seed",
            "4",
            "--rate",
            "200",
            "--duration",
            "1",
            "--out",
            "rerun.csv",
        ],
        &dir,
    );
    assert_code(&out, 0);
    assert_eq!(
        std::fs::read(dir.join("orig.csv")).unwrap(),
        std::fs::read(dir.join("rerun.csv")).unwrap()
    );
}

/// Writes synthetic logs tied by an exact cubic, fits, and checks the
/// residual is numerically zero.
#[test]
fn calibrate_noiseless_synthetic_pair() {
    let dir = workdir("cal-synthetic");
    let cubic = |v: f64| 4.0 + 30.0 * (v - 2.5) + 8.0 * (v - 2.5) * (v - 2.5);
    let mut log = String::from("time_s,counts,voltage_v,force_n\n");
    let mut reference = String::from("time_s,force_n\n");
    for k in 0..200 {
        let t = k as f64 * 1e-3;
        let v = 2.5 + 0.002 * k as f64;
        log.push_str(&format!("{t},0,{v},\n"));
        reference.push_str(&format!("{t},{}\n", cubic(v)));
    }
    std::fs::write(dir.join("log.csv"), log).unwrap();
    std::fs::write(dir.join("ref.csv"), reference).unwrap();
    let out = run(
        &[
            "calibrate",
            "--log",
            "log.csv",
            "--ref",
            "ref.csv",
            "--out",
            "cal.json",
        ],
        &dir,
    );
    assert_code(&out, 0);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("cal.json")).unwrap()).unwrap();
    let residual = doc["residual_rmse_n"].as_f64().unwrap();
    assert!(residual < 1e-6, "residual {residual}");

    let out = run(
        &[
            "calibrate",
            "--log",
            "log.csv",
            "--ref",
            "missing.csv",
            "--out",
            "cal.json",
        ],
        &dir,
    );
    assert_code(&out, 1);
}

#[test]
fn pipeline_calibrate_and_control() {
    let dir = workdir("pipeline");
    let out = run(
        &[
            "simulate",
            "--rate",
            "1000",
            "--duration",
            "20",
            "--force-profile",
            "triangle:70:20",
            "--out",
            "sweep.csv",
            "--ref-out",
            "ref.csv",
        ],
        &dir,
    );
    assert_code(&out, 0);
    let out = run(
        &[
            "calibrate",
            "--log",
            "sweep.csv",
            "--ref",
            "ref.csv",
            "--out",
            "cal.json",
            "--metrics-out",
            "metrics.json",
        ],
        &dir,
    );
    assert_code(&out, 0);
    let metrics: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("metrics.json")).unwrap()).unwrap();
    assert!(metrics["rmse_n"].as_f64().unwrap() <= 0.455);
    // The simulated chain stays inside the rated nonlinearity and
    // hysteresis budgets with a tenth of a point to spare.
    assert!(metrics["nonlinearity_pct"].as_f64().unwrap() <= 0.80 + 0.1);
    assert!(metrics["hysteresis_pct"].as_f64().unwrap() <= 0.89 + 0.1);
    assert!(metrics["resolution_n"].is_null());

    // Repeated-step run: summary reports ten trials and ten rising edges.
    let out = run(
        &[
            "control",
            "--profile",
            "repeated-step",
            "--trials",
            "10",
            "--period",
            "1",
            "--cal",
            "cal.json",
            "--out",
            "traj.csv",
            "--summary-out",
            "summary.json",
        ],
        &dir,
    );
    assert_code(&out, 0);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["trials"].as_u64(), Some(10));
    assert_eq!(summary["rising_edges"].as_u64(), Some(10));
    let rows = data_rows(&dir.join("traj.csv"));
    assert_eq!(rows[0], "time_s,reference_n,measured_n,command");
    assert_eq!(rows.len() - 1, 10_000);

    // Zero-duration run: empty trajectory, RMSE not applicable.
    let out = run(
        &[
            "control",
            "--profile",
            "rectified-sine",
            "--duration",
            "0",
            "--cal",
            "cal.json",
            "--out",
            "empty.csv",
            "--summary-out",
            "empty.json",
        ],
        &dir,
    );
    assert_code(&out, 0);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("empty.json")).unwrap()).unwrap();
    assert!(summary["rmse_n"].is_null());
    assert_eq!(data_rows(&dir.join("empty.csv")).len(), 1);

    // Replay fills the force column.
    let out = run(
        &[
            "replay",
            "--log",
            "sweep.csv",
            "--cal",
            "cal.json",
            "--out",
            "replayed.csv",
        ],
        &dir,
    );
    assert_code(&out, 0);
    let rows = data_rows(&dir.join("replayed.csv"));
    assert!(!rows[1].ends_with(','), "force column must be filled");

    // Metrics under the existing calibration reproduces the report.
    let out = run(
        &[
            "metrics",
            "--log",
            "sweep.csv",
            "--ref",
            "ref.csv",
            "--cal",
            "cal.json",
            "--out",
            "metrics2.json",
        ],
        &dir,
    );
    assert_code(&out, 0);
    let again: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("metrics2.json")).unwrap())
            .unwrap();
    assert_eq!(again["rmse_n"], metrics["rmse_n"]);
}

#[test]
fn alignment_failure_names_timestamp() {
    let dir = workdir("align");
    std::fs::write(
        dir.join("log.csv"),
        "time_s,counts,voltage_v,force_n\n0,0,2.6,\n0.001,0,2.6,\n0.002,0,2.6,\n",
    )
    .unwrap();
    // Reference sampled far away in time.
    std::fs::write(dir.join("ref.csv"), "time_s,force_n\n5,1\n6,2\n").unwrap();
    let out = run(
        &[
            "calibrate",
            "--log",
            "log.csv",
            "--ref",
            "ref.csv",
            "--out",
            "cal.json",
        ],
        &dir,
    );
    assert_code(&out, 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("alignment failed"), "{stderr}");
    assert!(stderr.contains("t = 0"), "must name the first unmatched timestamp: {stderr}");
}

#[test]
fn sweep_grid_and_ordering() {
    let dir = workdir("sweep");
    let out = run(
        &[
            "sweep",
            "--param",
            "b1=2mm:4mm:0.5mm",
            "--out",
            "sweep.csv",
        ],
        &dir,
    );
    assert_code(&out, 0);
    let rows = data_rows(&dir.join("sweep.csv"));
    assert_eq!(rows[0], "param_values,half_dx_m,stiffness_n_per_m,allowable");
    assert_eq!(rows.len() - 1, 5);
    let half: Vec<f64> = rows[1..]
        .iter()
        .map(|r| r.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    for pair in half.windows(2) {
        assert!(pair[0] > pair[1], "records must sort descending by half_dx");
    }
    assert!(rows[1].ends_with("within_limit"));
}

#[test]
fn frame_roundtrip_and_errors() {
    let dir = workdir("frame");
    let out = run(
        &[
            "frame",
            "encode",
            "--counts",
            "100,200,300",
            "--seq",
            "5",
            "--t0-us",
            "1000",
            "--dt-us",
            "500",
        ],
        &dir,
    );
    assert_code(&out, 0);
    let hex = String::from_utf8(out.stdout).unwrap().trim().to_string();
    assert_eq!(hex.len(), 2 * (16 + 2 * 3));

    let out = run(&["frame", "decode", &hex], &dir);
    assert_code(&out, 0);
    let listing = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        listing,
        "seq,timestamp_us,counts\n5,1000,100\n6,1500,200\n7,2000,300\n"
    );

    let out = run(&["frame", "decode", "00"], &dir);
    assert_code(&out, 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("truncated"));

    let out = run(&["frame", "decode", "zz"], &dir);
    assert_code(&out, 2);
}

#[test]
fn usage_errors_exit_one() {
    let dir = workdir("usage");
    let out = run(&["simulate", "--bogus"], &dir);
    assert_code(&out, 1);
    let out = run(&["--config", "missing.conf", "simulate", "--out", "x.csv"], &dir);
    assert_code(&out, 1);
}

#[test]
fn malformed_log_row_names_line_number() {
    let dir = workdir("badrow");
    std::fs::write(
        dir.join("log.csv"),
        "time_s,counts,voltage_v,force_n\n0.001,12,2.5,\nnot,a,row,\n",
    )
    .unwrap();
    std::fs::write(dir.join("ref.csv"), "time_s,force_n\n0.001,1.0\n").unwrap();
    let out = run(
        &[
            "calibrate",
            "--log",
            "log.csv",
            "--ref",
            "ref.csv",
            "--out",
            "cal.json",
        ],
        &dir,
    );
    assert_code(&out, 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains(":3:"));
}
