//! End-to-end tests of the `dsi` binary: subcommand outputs, exit codes,
//! and byte stability.

use std::path::PathBuf;
use std::process::{Command, Output};

fn dsi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsi"))
        .args(args)
        .env_remove("DSI_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_model(name: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

/// Binary source, scaled-Hamming erasure tensor, q independent of x.
const ERASURE_MODEL: &str = r#"{
    "px": [0.3, 0.7],
    "p_w_given_x": [[1.0], [1.0]],
    "p_q_given_w": [[0.5, 0.5]],
    "d": [[[0.0, 0.0], [0.0, 1.0]], [[0.0, 1.0], [0.0, 0.0]]]
}"#;

#[test]
fn gap_uniform01_single_row() {
    let out = dsi(&["gap", "--family", "uniform01"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "family,params,k,r,gap_nats,gap_quadrature_nats"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("uniform01,,1,2,0.15342640972"), "{row}");
    assert_eq!(lines.next(), None);
}

#[test]
fn gap_cauchy_prints_inf() {
    let out = dsi(&["gap", "--family", "positive-cauchy"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains(",inf,inf"));
}

#[test]
fn gaussian_curves_have_fig10_columns_and_ordering() {
    let out = dsi(&[
        "curves",
        "gaussian",
        "--q",
        "1:0.6,10:0.4",
        "--points",
        "50",
        "--units",
        "nats",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "D,R_none,R_both,R_enc_upper,fisher_bound"
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 50);
    for row in &rows {
        let (none, both, enc, fisher) = (row[1], row[2], row[3], row[4]);
        assert!(both <= enc + 1e-6);
        assert!(enc <= none + 1e-6);
        assert!(fisher <= 0.5 + 1e-12);
    }
    // last row is the zero-rate corner at D = E[q]
    let last = rows.last().unwrap();
    assert_eq!(last[0], 4.6);
    assert_eq!(last[1], 0.0);
}

#[test]
fn hamming_presets_run() {
    let out = dsi(&[
        "curves",
        "hamming",
        "--preset",
        "noisy-obs",
        "-N",
        "2",
        "--points",
        "5",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("D,R_none_bits,R_both_bits,lambda\n"));
    assert_eq!(text.lines().count(), 6);

    let out = dsi(&[
        "curves", "hamming", "--preset", "weighted", "-N", "2", "--gamma", "5", "--points", "5",
    ]);
    assert!(out.status.success());

    let out = dsi(&[
        "curves", "hamming", "--alphas", "0,0", "--betas", "1,1", "--pq", "0.5,0.5", "--points",
        "4",
    ]);
    assert!(out.status.success());
}

#[test]
fn csv_output_is_byte_stable() {
    let args = [
        "codec", "dft", "--n", "16", "--k", "8", "--step", "0.25", "--trials", "500", "--seed", "7",
    ];
    let a = dsi(&args);
    let b = dsi(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    // LF line endings only
    assert!(!stdout(&a).contains('\r'));
}

#[test]
fn erasure_codec_reports_zero_errors() {
    let out = dsi(&[
        "codec", "erasure", "--n", "7", "--k", "5", "--m", "3", "--trials", "10000", "--seed", "1",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[5], "0", "relevant errors: {row}");
    assert_eq!(fields[6], "3");
    assert_eq!(fields[7], "4.2");
}

#[test]
fn seed_falls_back_to_environment() {
    let args = [
        "sim",
        "lattice2d",
        "--mode",
        "blind",
        "--delta",
        "0.25",
        "--trials",
        "2000",
    ];
    let with_env = Command::new(env!("CARGO_BIN_EXE_dsi"))
        .args(args)
        .env("DSI_SEED", "123")
        .output()
        .unwrap();
    let with_flag = dsi(&[
        "sim",
        "lattice2d",
        "--mode",
        "blind",
        "--delta",
        "0.25",
        "--trials",
        "2000",
        "--seed",
        "123",
    ]);
    assert!(with_env.status.success());
    assert_eq!(with_env.stdout, with_flag.stdout);

    let bad_env = Command::new(env!("CARGO_BIN_EXE_dsi"))
        .args(args)
        .env("DSI_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(bad_env.status.code(), Some(1));
}

#[test]
fn ba_modes_on_model_file() {
    let path = write_model("dsi-test-erasure.json", ERASURE_MODEL);
    let p = path.to_str().unwrap();
    for mode in ["none", "both", "enc"] {
        let out = dsi(&["ba", "--model", p, "--mode", mode, "--slope", "0.5,1.5,3.0"]);
        assert!(out.status.success(), "mode {mode}: {:?}", out);
        let text = stdout(&out);
        assert!(text.starts_with("slope,distortion,rate_bits,i_xhat_q_bits,iterations,converged"));
        assert_eq!(text.lines().count(), 4);
    }
    // encoder mode reports the codebook identification cost
    let out = dsi(&["ba", "--model", p, "--mode", "enc", "--slope", "1.5"]);
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    let i_xq: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
    assert!(
        i_xq.abs() < 1e-3,
        "erasure tensors need no codebook identification: {row}"
    );
}

#[test]
fn wz_oracle_runs_on_model_file() {
    let path = write_model("dsi-test-wz.json", ERASURE_MODEL);
    let out = dsi(&[
        "wz-oracle",
        "--model",
        path.to_str().unwrap(),
        "--grid",
        "9",
        "--distortion",
        "0.05,0.1,0.2",
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    assert!(text.starts_with("distortion,rate_upper_bits\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn slb_curve_runs() {
    let out = dsi(&[
        "slb",
        "group-hamming",
        "--m",
        "4",
        "--q",
        "1:0.5,2:0.5",
        "--points",
        "10",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("distortion,r_lower_bits\n"));
    assert_eq!(text.lines().count(), 11);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(dsi(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(dsi(&["gap"]).status.code(), Some(1)); // missing --family
    assert_eq!(
        dsi(&["curves", "hamming", "--alphas", "0,0"]).status.code(),
        Some(1)
    ); // partial custom model
    let bad_model = write_model("dsi-test-bad.json", "{\"px\": [0.5, 0.6]}");
    assert_eq!(
        dsi(&[
            "ba",
            "--model",
            bad_model.to_str().unwrap(),
            "--mode",
            "none",
            "--slope",
            "1"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        dsi(&[
            "ba",
            "--model",
            "/nonexistent.json",
            "--mode",
            "none",
            "--slope",
            "1"
        ])
        .status
        .code(),
        Some(1)
    );
}

#[test]
fn numerical_failures_exit_2() {
    // distortion below the feasible floor E[alpha] of the noisy
    // observation model
    let out = dsi(&[
        "curves",
        "hamming",
        "--preset",
        "noisy-obs",
        "-N",
        "2",
        "--d-min",
        "0.1",
        "--points",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let path = write_model("dsi-test-wz2.json", ERASURE_MODEL);
    // search budget exceeded
    let out = dsi(&[
        "wz-oracle",
        "--model",
        path.to_str().unwrap(),
        "--grid",
        "20000",
        "--distortion",
        "0.1",
    ]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn help_exits_0() {
    let out = dsi(&["--help"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("dsi"));
}

#[test]
fn output_file_flag_writes_file() {
    let path = std::env::temp_dir().join("dsi-test-out.csv");
    let _ = std::fs::remove_file(&path);
    let out = dsi(&[
        "gap",
        "--family",
        "lognormal",
        "--q-sq",
        "1.0",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("lognormal"));
    assert!(text.contains("0.25"));
}
