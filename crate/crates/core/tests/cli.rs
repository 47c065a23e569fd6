use std::fs;
use std::process::{Command, Output};

const PM: &str = r#"{"dimension":3,"profile":{"type":"point_masses","atoms":[{"omega":1.0,"weight":3.0}]}}"#;
const BAD: &str = r#"{"dimension":2,"profile":{"type":"sharp","lambda":1.0}}"#;

fn pf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pf-wcl")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn validate_reports_m_eff() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("pm.json");
    fs::write(&cfg, format!(r#"{{"measure":{PM}}}"#)).unwrap();
    let o = pf(&["validate", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["report"]["moments"]["m_eff"], 4.0);
    assert_eq!(v["config"]["subcommand"], "validate");
}

#[test]
fn bad_measure_exits_2_naming_the_condition() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, format!(r#"{{"measure":{BAD}}}"#)).unwrap();
    let o = pf(&["energy", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("standing assumption") && err.contains("M_-2 = inf"), "{err}");
    assert!(o.stdout.is_empty());

    let v = pf(&["validate", "--measure", BAD]);
    assert_eq!(v.status.code(), Some(2));
    assert!(stdout(&v).contains("inf"), "report is still written");
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"params":{"lambda":[1e2]},"colour":"red"}"#).unwrap();
    assert_eq!(pf(&["cutoff-scan", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    fs::write(&cfg, r#"{"params":{"ntot":4}}"#).unwrap();
    let o = pf(&["cutoff-scan", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("ntot"));
    fs::write(&cfg, r#"{"subcommand":"fock"}"#).unwrap();
    assert_eq!(pf(&["cutoff-scan", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(pf(&["wiener-hopf"]).status.code(), Some(2));
    assert_eq!(pf(&["fock", "--modes", "1:1"]).status.code(), Some(2));
    assert_eq!(pf(&["fock", "--modes", "1:1:0,1:1:0,1:1:0,1:1:0,1:1:0", "--ntot", "30"]).status.code(), Some(2));
    assert_eq!(pf(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn numerical_failures_map_to_exit_3() {
    use pf_wcl::cli::exit_code;
    use pf_wcl::Error;
    let q = Error::Quadrature { context: "x", achieved: 1.0, target: 0.1 };
    assert_eq!(exit_code(&q), 3);
    assert_eq!(exit_code(&Error::Eigen { context: "x", detail: String::new() }), 3);
    assert_eq!(exit_code(&Error::Config(String::new())), 2);
}

#[test]
fn cutoff_scan_final_row_in_bracket() {
    let o = pf(&["cutoff-scan", "--lambda", "1e2,1e4,1e6", "--output", "-"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# {"));
    assert_eq!(lines[1], "lambda,kappa,p,calE,log_spectral,E_over_lambda_1p5,I1,I2");
    assert_eq!(lines.len(), 5);
    let ratio: f64 = lines[4].split(',').nth(5).unwrap().parse().unwrap();
    assert!((1.44720..=2.50663).contains(&ratio), "{ratio}");
}

#[test]
fn output_file_and_echo_rerun_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let o = pf(&[
        "energy",
        "--measure",
        PM,
        "--kappa-list",
        "1,2",
        "--p-list",
        "0,0.5",
        "--output",
        first.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty(), "data goes to the file only");
    let again = pf(&["energy", "--config", first.to_str().unwrap(), "--output", "-"]);
    assert_eq!(again.status.code(), Some(0), "{}", stderr(&again));
    assert_eq!(fs::read(&first).unwrap(), again.stdout);
    let text = stdout(&again);
    assert_eq!(text.lines().count(), 2 + 4);
    let row: Vec<f64> = text.lines().nth(3).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    // kappa=1, p=0.5: dispersion = p²/8 + 0.5.
    assert_eq!(row[0..2], [1.0, 0.5]);
    assert!((row[6] - (0.25 / 8.0 + 0.5)).abs() < 1e-12);
}

#[test]
fn json_mirror_matches_csv() {
    let csv = pf(&["cutoff-scan", "--lambda", "10,100"]);
    let json = pf(&["cutoff-scan", "--lambda", "10,100", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    let csv_text = stdout(&csv);
    let last: Vec<&str> = csv_text.lines().last().unwrap().split(',').collect();
    assert_eq!(rows[1]["calE"].as_f64().unwrap(), last[3].parse::<f64>().unwrap());
}

#[test]
fn jobs_do_not_change_output() {
    let args = ["wiener-hopf", "--measure", PM, "--T-ladder", "2,4,6", "--nodes", "96"];
    let serial = Command::new(env!("CARGO_BIN_EXE_pf-wcl")).args(args).env("PF_WCL_JOBS", "1").output().unwrap();
    let parallel = Command::new(env!("CARGO_BIN_EXE_pf-wcl")).args(args).env("PF_WCL_JOBS", "3").output().unwrap();
    assert_eq!(serial.status.code(), Some(0));
    assert_eq!(serial.stdout, parallel.stdout);
    assert_eq!(stdout(&serial).lines().count(), 5);
}

#[test]
fn hermite_check_passes() {
    let o = pf(&["hermite-check", "--seed", "11"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["report"]["pass"], true);
    assert_eq!(v["config"]["seed"], 11);
}
