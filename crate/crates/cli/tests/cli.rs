//! End-to-end checks of the `adaptsym` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(format!("{name}.fcidump"))
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adaptsym")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("one JSON document")
}

fn json_lines(o: &Output) -> Vec<Value> {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8_lossy(&o.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["adapt", "--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
}

#[test]
fn usage_errors_exit_with_config_status() {
    let h2 = fixture("h2_0.74");
    let o = run(&["adapt", "--fcidump", &h2, "--pool", "uccsd"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("uccsd"));
    assert_eq!(code(&run(&["pool-info", "--fcidump", &h2])), 3, "missing --pool");
    assert_eq!(code(&run(&["spectrum", "--fcidump", &h2, "--sector", "2"])), 3);
    assert_eq!(code(&run(&["adapt", "--fcidump", &h2])), 3, "no pool from flags or config");
}

#[test]
fn missing_fixture_exits_with_status_two() {
    let o = run(&["spectrum", "--fcidump", "/nonexistent/none.fcidump"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn existing_output_requires_force() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("spec.json");
    std::fs::write(&out, "keep").unwrap();
    let path = out.to_str().unwrap();
    let h2 = fixture("h2_0.74");
    assert_eq!(code(&run(&["spectrum", "--fcidump", &h2, "--out", path])), 3);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "keep");
    assert_eq!(code(&run(&["spectrum", "--fcidump", &h2, "--out", path, "--force"])), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["dim"], 4);
}

#[test]
fn zero_budget_gives_only_the_reference_record() {
    let h4 = fixture("h4_1.5");
    let lines = json_lines(&run(&["adapt", "--fcidump", &h4, "--pool", "sagspd", "--param-budget", "0"]));
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["kind"], "iteration");
    assert_eq!(lines[0]["n_params"], 0);
    assert_eq!(lines[1]["termination_reason"], "param_budget");
    assert_eq!(lines[1]["final_energy"], lines[1]["reference_energy"]);
}

#[test]
fn adapt_output_is_byte_identical_across_runs_and_threads() {
    let h4 = fixture("h4_1.5");
    let args = ["adapt", "--fcidump", &h4, "--pool", "sagspd-full", "--param-budget", "4"];
    let a = run(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_adaptsym")).args(args).env("ADAPTSYM_THREADS", "1").output().unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let summary: Value = serde_json::from_str(String::from_utf8_lossy(&a.stdout).lines().last().unwrap()).unwrap();
    assert_eq!(summary["manifest"]["fixture_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(summary["n_params"], 4);
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_adaptsym"))
        .args(["spectrum", "--fcidump", &fixture("h2_0.74")])
        .env("ADAPTSYM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
}

#[test]
fn pool_info_counts_perfect_pairings() {
    let v = json(&run(&["pool-info", "--fcidump", &fixture("h6_2.0"), "--pool", "sagspd"]));
    assert_eq!(v["by_kind"]["perfect_pairing"], 15);
    assert_eq!(v["conserves_s2"], true);
    let g = json(&run(&["pool-info", "--fcidump", &fixture("h6_2.0"), "--pool", "gsd"]));
    assert_eq!(g["conserves_s2"], false);
}

#[test]
fn closed_shell_reference_is_a_singlet() {
    let v = json(&run(&["symmetry-report", "--fcidump", &fixture("h6_2.0"), "--ref", "0,1,2"]));
    assert_eq!(v["report"]["s2_expect"], 0.0);
    assert_eq!(v["report"]["n_expect"], 6.0);
}

#[test]
fn dumped_state_round_trips_through_symmetry_report() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("state.json");
    let h4 = fixture("h4_1.5");
    let o = run(&["adapt", "--fcidump", &h4, "--pool", "pdint0", "--enforce-spatial", "--state-out", state.to_str().unwrap()]);
    let summary = json_lines(&o).pop().unwrap();
    let v = json(&run(&["symmetry-report", "--fcidump", &h4, "--state", state.to_str().unwrap()]));
    assert!(v["report"]["s2_expect"].as_f64().unwrap().abs() < 1e-9);
    assert!(summary["final_error_vs_fci"].as_f64().unwrap().abs() < 1e-6);
}

#[test]
fn closure_of_gsd_on_two_orbitals_is_universal() {
    let v = json(&run(&["closure", "--fcidump", &fixture("h2_0.74"), "--pool", "gsd"]));
    assert_eq!(v["complement_dim"], 0);
    assert_eq!(v["algebra_dim"], 6);
    // g→u singles move one electron between irreps
    assert_eq!(v["parity_conserved"], false);
}

#[test]
fn closure_cap_exits_with_status_five() {
    let o = run(&["closure", "--fcidump", &fixture("h4_1.5"), "--pool", "gsd", "--cap", "3"]);
    assert_eq!(code(&o), 5);
}

#[test]
fn pdint0_on_h6_reaches_fci() {
    let lines = json_lines(&run(&["adapt", "--fcidump", &fixture("h6_2.0"), "--pool", "pdint0", "--enforce-spatial"]));
    let s = lines.last().unwrap();
    assert!(s["final_error_vs_fci"].as_f64().unwrap().abs() < 1e-6, "{s}");
    assert!(s["max_s2_expect"].as_f64().unwrap() < 1e-9);
    let records = &lines[..lines.len() - 1];
    assert!(records.iter().all(|r| r["kind"] == "iteration"));
    // the reference record is iteration 0
    assert_eq!(records.len(), s["n_iterations"].as_u64().unwrap() as usize + 1);
}

#[test]
fn spectrum_reports_requested_roots() {
    let v = json(&run(&["spectrum", "--fcidump", &fixture("h4_1.5"), "--k", "3", "--sector", "4,0,0"]));
    let e = v["energies"].as_array().unwrap();
    assert_eq!(e.len(), 3);
    assert!(e.windows(2).all(|w| w[0].as_f64() <= w[1].as_f64()));
    assert_eq!(v["s2"].as_array().unwrap().len(), 3);
}
