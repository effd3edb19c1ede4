use std::process::{Command, Output};

use serde_json::Value;

const PRIOR1: &str = "-0.5,0.5,1.5,1.0";
const PLAN: &str = "20,13,7,0.7044,1.4088";

fn uhcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uhcs")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, rows)
}

#[test]
fn elicit_prints_hyperparameters() {
    let o = uhcs(&["elicit", "--prior-moments", PRIOR1]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "a1=2.250000 b1=1.500000 p2=-0.500000 q2=2.400000\n");
    let o = uhcs(&["elicit", "--prior-moments", "0.01,0.05,0.5,0.05"]);
    assert_eq!(stdout(&o), "a1=5.000000 b1=10.000000 p2=0.010000 q2=50.000000\n");
}

#[test]
fn elicit_rejects_undefined_variance() {
    let o = uhcs(&["elicit", "--prior-moments", "0,1,1,1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("a1"));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["frobnicate"],
        vec!["evaluate", "--no-such-flag"],
        vec!["evaluate", "--prior-moments", PRIOR1, "--cost", "10,15", "--budget", "150"],
        vec!["optimize", "--prior-moments", PRIOR1, "--cost", "10,15", "--budget", "150"],
        vec!["simulate", "--scheme", "20,13,14,0.7,1.4", "--theta", "0,1"],
        vec!["elicit", "--prior-moments", PRIOR1, "--format", "xml"],
        vec!["elicit", "--prior-moments", PRIOR1, "--n", "3", "--n-max", "4"],
    ] {
        assert_eq!(uhcs(&args).status.code(), Some(1), "{args:?}");
    }
    assert_eq!(uhcs(&["--help"]).status.code(), Some(0));
}

#[test]
fn evaluate_csv_and_json_agree() {
    let base = ["evaluate", "--prior-moments", PRIOR1, "--cost", "10,15", "--budget", "150", "--scheme", PLAN];
    let csv = uhcs(&[&base[..], &["--format", "csv", "--draws", "300"]].concat());
    assert_eq!(csv.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&csv));
    assert_eq!(rows.len(), 1);
    let json = uhcs(&[&base[..], &["--format", "json", "--draws", "300"]].concat());
    let doc: Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(doc["meta"]["draws"], 300);
    let row = &doc["rows"][0];
    for (name, text) in header.iter().zip(&rows[0]) {
        match text.parse::<f64>() {
            Ok(v) => {
                let w = row[name].as_f64().unwrap();
                assert!((v - w).abs() <= 1e-10 * v.abs().max(1e-300), "{name}: {v} vs {w}");
            }
            Err(_) => assert_eq!(row[name].to_string(), *text, "{name}"),
        }
    }
}

#[test]
fn evaluate_published_plan() {
    let o = uhcs(&["evaluate", "--prior-moments", PRIOR1, "--cost", "10,15", "--budget", "150", "--scheme", PLAN, "--format", "csv"]);
    let (header, rows) = csv_rows(&stdout(&o));
    let get = |k: &str| rows[0][header.iter().position(|h| h == k).unwrap()].clone();
    let psi: f64 = get("psi").parse().unwrap();
    let cost: f64 = get("exp_cost").parse().unwrap();
    assert!((psi - 4.4623).abs() <= 0.15, "{psi}");
    assert!(cost <= 153.0, "{cost}");
}

#[test]
fn evaluate_degenerate_plan_completes() {
    // T1 far below any plausible lifetime with T2 just above it.
    let o = uhcs(&[
        "evaluate", "--prior-moments", PRIOR1, "--cost", "10,15", "--budget", "150", "--scheme",
        "20,13,7,2e-5,2.01e-5", "--draws", "100", "--format", "csv",
    ]);
    match o.status.code() {
        Some(0) => assert_eq!(csv_rows(&stdout(&o)).1.len(), 1),
        Some(2) => {}
        other => panic!("unexpected exit {other:?}"),
    }
}

#[test]
fn optimize_emits_one_row_per_budget() {
    let o = uhcs(&[
        "optimize", "--prior-moments", PRIOR1, "--cost", "10,15", "--budget", "150,180,200", "--n", "20",
        "--draws", "200", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 4);
    let (header, rows) = csv_rows(&text);
    let feasible = header.iter().position(|h| h == "feasible").unwrap();
    assert!(rows.iter().all(|r| r[feasible] == "true"));
}

#[test]
fn optimize_infeasible_budget_still_succeeds() {
    let o = uhcs(&[
        "optimize", "--prior-moments", PRIOR1, "--cost", "10,15", "--budget", "5", "--n", "10", "--draws", "50",
        "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (_, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows[0].last().unwrap(), "false");
}

#[test]
fn simulate_single_record() {
    let o = uhcs(&["simulate", "--theta", "-0.5,1.5", "--scheme", PLAN, "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1);
    let fields: Vec<&str> = text.trim().split(',').collect();
    assert_eq!(fields.len(), 4);
    let d: usize = fields[1].parse().unwrap();
    assert_eq!(fields[3].split(';').count(), d);
    assert_eq!(stdout(&uhcs(&["simulate", "--theta", "-0.5,1.5", "--scheme", PLAN, "--seed", "3"])), text);
}

#[test]
fn simulate_summary_matches_analytic() {
    let o = uhcs(&[
        "simulate", "--prior-moments", PRIOR1, "--theta", "-0.5,1.5", "--scheme", PLAN, "--reps", "200000",
        "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let row = &doc["rows"][0];
    let f = |k: &str| row[k].as_f64().unwrap();
    assert!((f("mean_d") - f("analytic_d")).abs() <= 4.0 * f("se_d"));
    assert!((f("mean_xi") - f("analytic_xi")).abs() <= 4.0 * f("se_xi"));
    let total: f64 = ["I", "II", "III", "IV", "V", "VI"].iter().map(|c| f(&format!("freq_{c}"))).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn config_file_with_flag_override() {
    let dir = std::env::temp_dir().join(format!("uhcs-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.conf");
    std::fs::write(&path, "# prior 2\nprior_moments = 0.01,0.05,0.5,0.05\nformat = csv\n").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(stdout(&uhcs(&["elicit", "--config", p])), "a1,b1,p2,q2\n5,10,0.01,50\n");
    let o = uhcs(&["elicit", "--config", p, "--prior-moments", PRIOR1, "--format", "table"]);
    assert_eq!(stdout(&o), "a1=2.250000 b1=1.500000 p2=-0.500000 q2=2.400000\n");
    std::fs::write(&path, "colour = blue\n").unwrap();
    assert_eq!(uhcs(&["elicit", "--config", p]).status.code(), Some(1));
    std::fs::remove_dir_all(&dir).unwrap();
}
