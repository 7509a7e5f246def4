//! End-to-end tests of the command surface: exit codes, report structure,
//! determinism, and read-back validation of emitted matrices.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rsp-sim"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn parse_stdout(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn density_from_dto(dto: &Value) -> rsp_core::DensityMatrix64 {
    let mut m = rsp_core::Mat2x64::zero();
    for i in 0..2 {
        for j in 0..2 {
            m.e[i][j] = rsp_core::C64::new(
                dto["re"][i][j].as_f64().unwrap(),
                dto["im"][i][j].as_f64().unwrap(),
            );
        }
    }
    rsp_core::state::DensityMatrix::new(m).expect("emitted matrix re-validates as physical")
}

#[test]
fn rsp_pure_ideal_reports_unit_fidelity() {
    let s = "0.7071067811865476";
    let out = run(&["rsp-pure", "--alpha", s, "--beta", s, "--phi-deg", "90", "--shots", "500"]);
    let report = parse_stdout(&out);
    let branches = report["results"]["branches"].as_array().unwrap();
    assert_eq!(branches.len(), 4);
    for b in branches {
        let f = b["fidelity_analytic"].as_f64().unwrap();
        assert!(f >= 1.0 - 1e-10, "analytic fidelity {f}");
        let p = b["probability"].as_f64().unwrap();
        assert!((p - 0.25).abs() < 1e-10);
        density_from_dto(&b["rho_reconstructed"]);
    }
    assert!(report["results"]["mean_fidelity_analytic"].as_f64().unwrap() >= 1.0 - 1e-10);
}

#[test]
fn malformed_spec_exits_2_without_writing_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let out = bin()
        .args([
            "rsp-pure",
            "--alpha",
            "0.9",
            "--beta",
            "0.9",
            "--out",
            out_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_path.exists(), "no report may be written on validation failure");
    assert!(!out.stderr.is_empty());
}

#[test]
fn reports_are_byte_identical_up_to_wall_clock() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for path in [&a, &b] {
        let out = bin()
            .args([
                "rsp-mixed",
                "--alpha",
                "0.6",
                "--beta",
                "0.8",
                "--phi-deg",
                "30",
                "--p",
                "0.9",
                "--q",
                "0.4358898943540673",
                "--visibility",
                "0.98",
                "--shots",
                "1000",
                "--seed",
                "12648430",
                "--out",
                path.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let strip = |p: &Path| -> String {
        std::fs::read_to_string(p)
            .unwrap()
            .lines()
            .filter(|l| !l.contains("wall_clock_ms"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn report_json_round_trips() {
    let out = run(&["rsp-pure", "--alpha", "1", "--beta", "0", "--shots", "200"]);
    let v = parse_stdout(&out);
    let re = serde_json::to_string(&v).unwrap();
    let v2: Value = serde_json::from_str(&re).unwrap();
    assert_eq!(v, v2);
}

#[test]
fn mixed_with_p_one_matches_pure_report() {
    let out = run(&[
        "rsp-mixed", "--alpha", "0.6", "--beta", "0.8", "--p", "1", "--q", "0", "--shots", "300",
    ]);
    let report = parse_stdout(&out);
    assert!(report["results"]["mean_fidelity_analytic"].as_f64().unwrap() >= 1.0 - 1e-10);
}

#[test]
fn povm_check_accepts_projective_pair_and_synthesizes() {
    let dir = tempfile::tempdir().unwrap();
    let pair = dir.path().join("pair.txt");
    std::fs::write(&pair, "1 0 0 0\n0 0 0 0\n0 0 0 0\n0 0 1 0\n").unwrap();
    let out = run(&["povm-check", pair.to_str().unwrap()]);
    let report = parse_stdout(&out);
    let povm = &report["results"]["povm"];
    assert_eq!(povm["valid_at_tolerance"], Value::Bool(true));
    assert!(povm["completeness_deviation"].as_f64().unwrap() < 1e-12);
    assert!(povm["settings"]["zeta_deg"].as_f64().unwrap().abs() < 1e-9);
    assert!(povm["roundtrip_max_deviation"].as_f64().unwrap() < 1e-10);
}

#[test]
fn povm_check_rejects_overcomplete_pair() {
    let dir = tempfile::tempdir().unwrap();
    let pair = dir.path().join("pair.txt");
    std::fs::write(&pair, "1 0 0 0 0 0 1 0 1 0 0 0 0 0 1 0").unwrap();
    let out = bin().args(["povm-check", pair.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // the violation report is still emitted before the failure exit
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["results"]["povm"]["valid_at_tolerance"], Value::Bool(false));
    let dev = report["results"]["povm"]["completeness_deviation"].as_f64().unwrap();
    assert!((dev - 1.0).abs() < 1e-12);
}

#[test]
fn chsh_ideal_source_saturates_tsirelson() {
    let out = run(&["chsh", "--shots", "20000"]);
    let report = parse_stdout(&out);
    let s = report["results"]["chsh"]["s_analytic"].as_f64().unwrap();
    assert!((s - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-10);
}

#[test]
fn paper_suite_emits_coordinate_files_with_one_row_per_state() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("targets.csv");
    std::fs::write(
        &manifest,
        "kind,alpha,beta,phi_deg,p,q\n\
         pure,1,0,0,,\n\
         pure,0.6,0.8,120,,\n\
         mixed,0.6,0.8,0,0.8,0.6\n",
    )
    .unwrap();
    let out_path = dir.path().join("suite.json");
    let out = bin()
        .args([
            "paper-suite",
            "--manifest",
            manifest.to_str().unwrap(),
            "--shots",
            "800",
            "--out",
            out_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report["results"]["states"].as_array().unwrap().len(), 3);
    assert!(report["results"]["mean_fidelity_tomo"].as_f64().unwrap() > 0.97);

    let poincare = std::fs::read_to_string(dir.path().join("suite.poincare.csv")).unwrap();
    assert_eq!(poincare.lines().count(), 1 + 3, "header plus one row per state");
    let grid = std::fs::read_to_string(dir.path().join("suite.grid.csv")).unwrap();
    assert_eq!(grid.lines().count(), 1 + 3);

    // every emitted reconstruction re-validates as a physical state
    for state in report["results"]["states"].as_array().unwrap() {
        for b in state["branches"].as_array().unwrap() {
            density_from_dto(&b["rho_reconstructed"]);
        }
    }
}

#[test]
fn default_paper_suite_has_eighteen_states_and_ideal_mean_is_exact() {
    let out = run(&["paper-suite", "--shots", "200"]);
    let report = parse_stdout(&out);
    assert_eq!(report["results"]["states"].as_array().unwrap().len(), 18);
    let mean = report["results"]["mean_fidelity_analytic"].as_f64().unwrap();
    assert!(mean >= 1.0 - 1e-10, "ideal analytic mean {mean}");
}

#[test]
fn reduced_visibility_keeps_equatorial_mean_above_bound() {
    let s = "0.7071067811865476";
    let out = run(&[
        "rsp-pure", "--alpha", s, "--beta", s, "--visibility", "0.97", "--shots", "2000",
    ]);
    let report = parse_stdout(&out);
    let mean = report["results"]["mean_fidelity_analytic"].as_f64().unwrap();
    assert!((mean - 0.985).abs() < 1e-6, "mean {mean}");
    assert!(mean >= 0.98);
    assert!(report["results"]["mean_fidelity_tomo"].as_f64().unwrap() >= 0.97);
}

#[test]
fn tomo_reconstructs_the_requested_target() {
    let out = run(&[
        "tomo", "--alpha", "0.6", "--beta", "0.8", "--phi-deg", "215", "--shots", "20000",
    ]);
    let report = parse_stdout(&out);
    let tomo = &report["results"]["tomography"];
    assert!(tomo["fidelity_vs_target"].as_f64().unwrap() > 0.995);
    assert_eq!(tomo["converged"], Value::Bool(true));
    density_from_dto(&tomo["rho_reconstructed"]);
}

#[test]
fn angle_flags_are_degrees() {
    // φ = 360° wraps to 0
    let a = run(&["rsp-pure", "--alpha", "0.6", "--beta", "0.8", "--phi-deg", "360", "--shots", "100"]);
    let report = parse_stdout(&a);
    let echoed = report["config"]["target"]["phi_deg"].as_f64().unwrap();
    assert!(echoed.abs() < 1e-9, "phi echoed as {echoed}");
}
