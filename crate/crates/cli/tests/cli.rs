use std::process::{Command, Output};
use weyl_lab::contfrac::FClassCert;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weyl-lab")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

#[test]
fn construct_reports_quotients() {
    let o = run(&["construct", "--eps", "0.5", "--levels", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let q: Vec<&str> = v["result"]["quotients"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert_eq!(&q[..3], &["2", "8", "4913"]);
    let cert: FClassCert = serde_json::from_value(v["result"].clone()).unwrap();
    assert_eq!(cert.depth, 4);
}

#[test]
fn sum_prints_value_and_modulus() {
    let o = run(&["sum", "--theta", "golden", "--x", "0", "--n", "10000"]);
    assert!(o.status.success());
    let v = json(&o);
    let (re, im, m) = (v["result"]["re"].as_f64().unwrap(), v["result"]["im"].as_f64().unwrap(), v["result"]["modulus"].as_f64().unwrap());
    assert!((re.hypot(im) - m).abs() < 1e-9);
    assert!(String::from_utf8(o.stderr).unwrap().contains("|a| ="));
}

#[test]
fn reports_are_byte_identical() {
    let args = ["parseval", "--theta", "construct:0.5,4", "--q", "17", "--samples", "2000", "--seed", "3"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mut threaded = Command::new(env!("CARGO_BIN_EXE_weyl-lab"));
    threaded.args(args).env("WEYL_LAB_THREADS", "1");
    assert_eq!(threaded.output().unwrap().stdout, a.stdout);
}

#[test]
fn trajectory_csv_header() {
    let o = run(&["traj", "--theta", "golden", "--n", "5", "--format", "csv"]);
    let s = stdout(&o);
    assert!(s.starts_with("n,re,im\n0,"));
    assert_eq!(s.lines().count(), 7);
}

#[test]
fn cf_certificate_round_trips() {
    let o = run(&["cf", "--theta", "[2,8,4913]"]);
    assert!(o.status.success());
    let v = json(&o);
    let cert: FClassCert = serde_json::from_value(v["result"]["certificate"].clone()).unwrap();
    assert_eq!(serde_json::to_value(&cert).unwrap(), v["result"]["certificate"]);
    assert_eq!(v["result"]["cf"]["quotients"], serde_json::json!(["2", "8", "4913"]));
}

#[test]
fn usage_and_config_errors_exit_two() {
    let o = run(&["sum", "--theta", "golden", "--n", "3", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("Usage"));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["sum", "--theta", "nonsense", "--n", "3"]).status.code(), Some(2));
    assert_eq!(run(&["sum", "--theta", "golden", "--n", "3", "--format", "xml"]).status.code(), Some(2));
    let o = run(&["sum", "--theta", "golden", "--n", "3", "--out", "/nonexistent/dir/r.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unusable_outcomes_exit_three() {
    assert_eq!(run(&["schedule", "--theta", "golden"]).status.code(), Some(3));
    let o = run(&["resume", "--theta", "construct:0.5,4", "--level", "2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8(o.stderr).unwrap().contains("level unusable"));
}

#[test]
fn config_file_merges_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"theta": "golden", "q": 13, "samples": 1500, "seed": 11}"#).unwrap();
    let v = json(&run(&["parseval", "--config", cfg.to_str().unwrap()]));
    assert_eq!(v["config"]["samples"], 1500);
    assert_eq!(v["seed"], 11);
    let v = json(&run(&["parseval", "--config", cfg.to_str().unwrap(), "--samples", "1200"]));
    assert_eq!(v["config"]["samples"], 1200);
    assert_eq!(v["result"]["samples"], 1200);
}

#[test]
fn out_file_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let o = run(&["growth", "--theta", "golden", "--n-schedule", "10,100", "--grid", "16", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("max sup|a|/√n"));
    let csv = std::fs::read_to_string(path).unwrap();
    assert!(csv.starts_with("n,sup,sup_over_n,sup_over_sqrt_n,origin_over_sqrt_n\n10,"));
}

#[test]
fn density_and_renorm_run() {
    let o = run(&["density", "--theta", "golden", "--x", "1/3", "--n", "1000", "--format", "csv"]);
    assert!(stdout(&o).starts_with("i,j,center_re,center_im,first_hit\n"));
    let v = json(&run(&["renorm", "--theta", "1/2", "--k", "8", "--depth", "3"]));
    assert_eq!(v["result"]["truncated"], true);
}

#[test]
fn verify_all_subset() {
    let o = run(&["verify-all", "--seed", "7", "--only", "E1,E2,E4"]);
    let s = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{s}");
    assert_eq!(s.lines().filter(|l| l.starts_with("PASS")).count(), 3);
}
