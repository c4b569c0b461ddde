//! End-to-end tests of the command-line interface: exit-code contract,
//! output schemas, determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_lucas-uzawa");

fn write_params(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn canonical_file(dir: &Path) -> String {
    write_params(
        dir,
        "canonical.json",
        r#"{"sigma": 2.0, "rho": 0.04, "beta": 0.33, "gamma": 1.0, "pi": 0.02, "delta": 0.05, "theta": 0.1}"#,
    )
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn bgp_prints_canonical_summary() {
    let dir = tempfile::tempdir().unwrap();
    let params = canonical_file(dir.path());
    let out = run(&["bgp", "--params", &params]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((json["g_c"].as_f64().unwrap() - 0.0087313).abs() < 1e-6);
    assert!((json["u_bar"].as_f64().unwrap() - 0.848052).abs() < 1e-6);
    for key in ["g_c", "g_k", "g_h", "g_hstar", "g_u", "u_bar", "xi", "z_bar", "k_over_hphi"] {
        assert!(json.get(key).is_some(), "missing key {key}");
    }
}

#[test]
fn bgp_theta_zero_gives_basic_model_values() {
    let dir = tempfile::tempdir().unwrap();
    let params = write_params(
        dir.path(),
        "basic.json",
        r#"{"sigma": 2.0, "rho": 0.04, "beta": 0.33, "gamma": 1.0, "pi": 0.02, "delta": 0.06, "theta": 0.0}"#,
    );
    let out = run(&["bgp", "--params", &params]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((json["g_c"].as_f64().unwrap() - 0.01).abs() < 1e-12);
    let u_bar = (0.04 + 0.06 * 1.0) / (0.06 * 2.0);
    assert!((json["u_bar"].as_f64().unwrap() - u_bar).abs() < 1e-12);
}

#[test]
fn sigma_one_exits_2_and_names_sigma() {
    let dir = tempfile::tempdir().unwrap();
    let params = write_params(
        dir.path(),
        "bad.json",
        r#"{"sigma": 1.0, "rho": 0.04, "beta": 0.33, "gamma": 1.0, "pi": 0.02, "delta": 0.05, "theta": 0.1}"#,
    );
    let out = run(&["bgp", "--params", &params]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("sigma"), "stderr was: {err}");
}

#[test]
fn window_violation_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let params = write_params(
        dir.path(),
        "outside.json",
        r#"{"sigma": 2.0, "rho": 0.08, "beta": 0.33, "gamma": 1.0, "pi": 0.0, "delta": 0.01, "theta": 0.0}"#,
    );
    let out = run(&["verify", "--params", &params, "--family", "General1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_grid_and_header() {
    let dir = tempfile::tempdir().unwrap();
    let params = canonical_file(dir.path());
    let out = run(&[
        "simulate", "--params", &params, "--family", "General1", "--t-max", "10", "--steps", "11",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 12);
    assert_eq!(lines[0], "t,c,k,h,u,lambda,mu,h_star,mu_star,z");
    // Row 0 starts at t = 0 with the derived constants.
    let row0: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row0[0], 0.0);
    assert!((row0[2] - 1.0).abs() < 1e-12, "k0 = {}", row0[2]);
    assert!((row0[1] - 0.206004).abs() < 1e-6, "c0 = {}", row0[1]);
    assert!((row0[4] - 0.848052).abs() < 1e-6, "u0 = {}", row0[4]);
}

#[test]
fn simulate_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let params = canonical_file(dir.path());
    let args = [
        "simulate", "--params", &params, "--family", "General2", "--h0", "0.2", "--t-max", "30",
        "--steps", "31",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let g = [
        "growth", "--params", &params, "--family", "General3", "--h0", "0.2", "--t-max", "20",
        "--steps", "21",
    ];
    let a = run(&g);
    let b = run(&g);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn simulate_general2_vs_general3_share_c_and_k_columns() {
    let dir = tempfile::tempdir().unwrap();
    let params = canonical_file(dir.path());
    let mut columns = Vec::new();
    for family in ["General2", "General3"] {
        let out = run(&[
            "simulate", "--params", &params, "--family", family, "--h0", "0.2", "--t-max", "40",
            "--steps", "41",
        ]);
        assert!(out.status.success());
        let rows: Vec<Vec<f64>> = stdout(&out)
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
            .collect();
        columns.push(rows);
    }
    for (a, b) in columns[0].iter().zip(&columns[1]) {
        // c, k, lambda, mu agree between the two representations.
        for idx in [1, 2, 5, 6] {
            assert!(
                ((a[idx] - b[idx]) / b[idx]).abs() < 1e-9,
                "column {idx}: {} vs {}",
                a[idx],
                b[idx]
            );
        }
    }
}

#[test]
fn simulate_json_format_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let params = canonical_file(dir.path());
    let out = run(&[
        "simulate", "--params", &params, "--family", "General1", "--t-max", "5", "--steps", "3",
        "--format", "json",
    ]);
    assert!(out.status.success());
    let points: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(points.as_array().unwrap().len(), 3);
    assert!(points[0]["c"].as_f64().unwrap() > 0.0);
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let params = canonical_file(dir.path());
    let ok = run(&[
        "verify", "--params", &params, "--family", "General1", "--tol", "1e-5",
    ]);
    assert_eq!(ok.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&ok.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&ok)).unwrap();
    assert!(report["transversality_decay_ok"].as_bool().unwrap());

    let bad = run(&[
        "verify", "--params", &params, "--family", "General1", "--tol", "1e-5", "--corrupt",
        "c:1.01",
    ]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn sigma_beta_family_requires_sigma_equals_beta() {
    let dir = tempfile::tempdir().unwrap();
    let params = canonical_file(dir.path());
    let out = run(&["simulate", "--params", &params, "--family", "SigmaBeta1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn growth_csv_for_sigma_beta1_has_constant_columns() {
    let dir = tempfile::tempdir().unwrap();
    let params = write_params(
        dir.path(),
        "sb.json",
        r#"{"sigma": 0.45, "rho": 0.05, "beta": 0.45, "gamma": 1.2, "pi": 0.03, "delta": 0.04, "theta": 0.2}"#,
    );
    let out = run(&[
        "growth", "--params", &params, "--family", "SigmaBeta1", "--t-max", "30", "--steps", "7",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,g_c,g_k,g_h,g_u,g_lambda,g_mu");
    let first: Vec<&str> = lines[1].splitn(2, ',').collect();
    for line in &lines[2..] {
        let rest: Vec<&str> = line.splitn(2, ',').collect();
        assert_eq!(rest[1], first[1], "growth columns drifted");
    }
}

#[test]
fn compare_families_converge_and_diverge_as_expected() {
    let dir = tempfile::tempdir().unwrap();
    let params = canonical_file(dir.path());
    // At t = 400 all growth-rate gaps between General1 and General2 vanish.
    let out = run(&[
        "compare", "--params", &params, "--family", "General1", "--family", "General2", "--h0",
        "0.2", "--t-max", "400", "--steps", "2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    let header: Vec<&str> = lines[0].split(',').collect();
    let last: Vec<f64> = lines
        .last()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    for (i, name) in header.iter().enumerate() {
        if name.starts_with("gap_") {
            assert!(last[i] < 1e-5, "{name} = {} at t = 400", last[i]);
        }
    }
    // At t = 0 with z0 != z_bar the consumption gap equals (beta/sigma)|zdot/z|.
    let first: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    let gap_gc = first[header.iter().position(|h| *h == "gap_g_c").unwrap()];
    assert!(gap_gc > 1e-4, "expected a visible g_c gap at t = 0, got {gap_gc}");
}

#[test]
fn compare_requires_exactly_two_families() {
    let dir = tempfile::tempdir().unwrap();
    let params = canonical_file(dir.path());
    let out = run(&["compare", "--params", &params, "--family", "General1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let params = canonical_file(dir.path());
    let out_path = dir.path().join("traj.csv");
    let to_file = run(&[
        "simulate", "--params", &params, "--family", "General1", "--t-max", "10", "--steps", "5",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert!(to_file.status.success());
    let to_stdout = run(&[
        "simulate", "--params", &params, "--family", "General1", "--t-max", "10", "--steps", "5",
    ]);
    assert_eq!(fs::read(&out_path).unwrap(), to_stdout.stdout);
}

#[test]
fn malformed_params_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let params = write_params(dir.path(), "broken.json", r#"{"sigma": 2.0}"#);
    let out = run(&["bgp", "--params", &params]);
    assert_eq!(out.status.code(), Some(2));

    let params = write_params(
        dir.path(),
        "extra.json",
        r#"{"sigma": 2.0, "rho": 0.04, "beta": 0.33, "gamma": 1.0, "pi": 0.02, "delta": 0.05, "theta": 0.1, "typo": 1}"#,
    );
    let out = run(&["bgp", "--params", &params]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn derivation_failure_exits_3() {
    // h0 far above the balanced-growth level: no labor share in (0, 1]
    // satisfies the consistency relation.
    let dir = tempfile::tempdir().unwrap();
    let params = canonical_file(dir.path());
    let out = run(&[
        "simulate", "--params", &params, "--family", "General2", "--h0", "0.5",
    ]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn steps_below_two_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let params = canonical_file(dir.path());
    let out = run(&[
        "simulate", "--params", &params, "--family", "General1", "--steps", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
