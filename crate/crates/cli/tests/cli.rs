use std::fs;
use std::process::{Command, Output};

use linopt_core::analyzer::AnalyzerReport;
use linopt_core::fock::read_state;
use linopt_core::interferometer::{dft_matrix, parse_netlist, recompose};
use linopt_core::unitary::max_abs_diff;

fn linopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linopt")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn ns_gate_reports_quarter_success() {
    let o = linopt(&["gate", "ns", "--input", "0:0.3;1:0.5;2:0:0.8"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("success_probability=2.50000000000000"));
}

#[test]
fn csign_sampling_is_reproducible() {
    let args = ["gate", "csign", "--backend", "basic", "--sample", "20000", "--seed", "11"];
    let a = linopt(&args);
    let b = linopt(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains("within_5sigma=true"));
}

#[test]
fn teleported_cswap_and_state_dump() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.state");
    let o = linopt(&["gate", "cswap", "--backend", "teleported", "--n", "1", "--dump-state", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let state = read_state(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(state.modes(), 3);
    assert!((state.norm_sqr() - 1.0).abs() < 1e-12);
}

#[test]
fn cshift_on_qutrit_bell_state() {
    let o = linopt(&["gate", "cshift", "--d", "3", "--bell", "2,1", "--backend", "ideal", "--exact"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("success_probability=1.0000000000000000e0"));
}

#[test]
fn analyze_writes_parsable_report_and_confusion() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.txt");
    let confusion = dir.path().join("confusion.csv");
    let o = linopt(&[
        "analyze",
        "--d",
        "3",
        "--backend",
        "basic",
        "--report",
        report.to_str().unwrap(),
        "--confusion",
        confusion.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let parsed = AnalyzerReport::from_text(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(parsed.rows.len(), 9);
    assert_eq!(parsed.swaps_per_shift, 4);
    assert_eq!(parsed.shorter_search.as_ref().map(|s| s.found), Some(false));
    assert!(parsed.all_invariants_hold());
    assert_eq!(fs::read_to_string(&confusion).unwrap().lines().count(), 10);
}

#[test]
fn analyze_reads_config_file_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "d = 2\nparties = 3\nbackend = basic\nsample = 2000\nseed = 5\n").unwrap();
    let o = linopt(&["analyze", "--config", cfg.to_str().unwrap(), "--backend", "ideal"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let parsed = AnalyzerReport::from_text(&stdout(&o)).unwrap();
    assert_eq!(parsed.parties, 3);
    assert_eq!(parsed.backend.to_string(), "ideal");
    assert!(parsed.rows.iter().all(|r| r.sampled.as_ref().is_some_and(|s| s.successes == 2000)));
}

#[test]
fn teleported_analysis_records_base_audit() {
    let o = linopt(&["analyze", "--d", "2", "--backend", "teleported", "--n", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(
        text.contains("used_base=n/(n+1)") && text.contains("alt_value=inf") && text.contains("alt_consistent=false")
    );
}

#[test]
fn network_search_reports_absence() {
    let o = linopt(&["network", "search", "--d", "3", "--max-swaps", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "record=search d=3 max_swaps=3 found=false");
    let o = linopt(&["network", "generic", "--d", "4"]);
    assert!(stdout(&o).starts_with("record=generic d=4 swaps=8"));
}

#[test]
fn decompose_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.txt");
    let u = dft_matrix(4);
    let text: String = (0..4)
        .map(|i| {
            (0..4).map(|j| format!("{:.17e},{:.17e}", u[(i, j)].re, u[(i, j)].im)).collect::<Vec<_>>().join(" ") + "\n"
        })
        .collect();
    fs::write(&path, text).unwrap();
    let o = linopt(&["decompose", "--unitary", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let elements = parse_netlist(&stdout(&o)).unwrap();
    assert!(elements.iter().filter(|e| e.is_splitter()).count() <= 6);
    assert!(max_abs_diff(&recompose(&elements, 4), &u) < 1e-10);
}

#[test]
fn usage_and_budget_errors_exit_with_two() {
    assert_eq!(linopt(&["gate", "csign", "--backend", "teleported"]).status.code(), Some(2));
    assert_eq!(linopt(&["analyze", "--d", "2", "--backend", "teleported:6"]).status.code(), Some(2));
    assert_eq!(linopt(&["gate", "csign", "--input", "2,0"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.txt");
    fs::write(&path, "1 1\n1 1\n").unwrap();
    assert_eq!(linopt(&["decompose", "--unitary", path.to_str().unwrap()]).status.code(), Some(2));
}
