use std::path::Path;
use std::process::{Command, Output};

fn gchaos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gchaos")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_is_deterministic_and_norms_read_it() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for f in [&a, &b] {
        let o = gchaos(&["--seed", "5", "gen", "--dims", "2,3,2", "--dist", "gaussian", "--out", path(f)]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let o = gchaos(&["norms", "--tensor", path(&a)]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("{1,2,3} "));
    assert!(lines.iter().all(|l| l.split(' ').count() == 3));

    let o = gchaos(&["norms", "--tensor", path(&a), "--partition", "{3}{1, 2}", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["partition"], "{1,2}{3}");
}

#[test]
fn diagonal_generation_is_the_identity() {
    let o = gchaos(&["gen", "--dims", "2,2", "--dist", "diagonal"]);
    assert_eq!(stdout(&o).trim(), r#"{"dims":[2,2],"data":[1.0,0.0,0.0,1.0]}"#);
    let o = gchaos(&["gen", "--dims", "2,3", "--dist", "diagonal"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_inputs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"dims\": [2, 2],\n \"data\": [1, 2, oops]}").unwrap();
    let o = gchaos(&["norms", "--tensor", path(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    std::fs::write(&bad, r#"{"dims": [2, 2], "data": [1, 2, 3]}"#).unwrap();
    let o = gchaos(&["sample", "--tensor", path(&bad), "--p", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("data"), "{}", stderr(&o));

    std::fs::write(&bad, r#"{"dims": [2], "data": [1, 2], "extra": 1}"#).unwrap();
    let o = gchaos(&["norms", "--tensor", path(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("extra"), "{}", stderr(&o));

    assert_eq!(gchaos(&["norms", "--tensor", "/nonexistent/file.json"]).status.code(), Some(2));
    assert_eq!(gchaos(&["verify", "--suite", "unknown"]).status.code(), Some(2));
    assert_eq!(gchaos(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn failing_checks_exit_with_one() {
    // a single sample cannot keep every moment above 0.05 B
    let o = gchaos(&["verify", "--suite", "hanson-wright", "--samples", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("FAIL trial="));
}

#[test]
fn zero_tensor_bound_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("zero.json");
    std::fs::write(&t, r#"{"dims":[2,2,2],"data":[0,0,0,0,0,0,0,0]}"#).unwrap();
    let out = dir.path().join("reports");
    let o = gchaos(&["verify", "--suite", "latala-bound", "--tensor", path(&t), "--trials", "2", "--samples", "1000", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.join("latala-bound.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 3);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",0,0,0,0,true")), "{csv}");
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("latala-bound.json")).unwrap()).unwrap();
    assert_eq!(json["pass_rate"], 1.0);
    assert_eq!(json["config"]["seed"], 0);
    assert_eq!(json["env"]["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn bound_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.json");
    std::fs::write(&t, r#"{"dims":[2,2],"data":[3,0,0,4]}"#).unwrap();
    let o = gchaos(&["bound", "--tensor", path(&t), "--p", "4", "--with-empirical", "2000"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,total_bound,empirical,std_error,ratio"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row[0], 4.0);
    // 2 * 5 + 4 * 4
    assert!((row[1] - 26.0).abs() < 1e-9);
    assert!((row[4] - row[2] / row[1]).abs() < 1e-12);
}

#[test]
fn probes_print_summaries_and_json() {
    let o = gchaos(&["probe", "translate", "--radius", "1", "--x", "1", "--samples", "20000"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("translate ") && stdout(&o).trim_end().ends_with("PASS"));
    let o = gchaos(&["--json", "probe", "small-ball", "--x", "0.3,0.4;1", "--samples", "5000"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
    let o = gchaos(&["probe", "small-ball", "--x", "0.3,zz", "--samples", "5000"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn chaining_commands() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.json");
    std::fs::write(&pts, r#"{"dim":1,"points":[[0.0],[0.75]]}"#).unwrap();
    let o = gchaos(&["--json", "chaining", "--points", path(&pts), "--mode", "gamma"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["gamma"], 0.75);
    assert!(v["dudley"].is_null());

    let t = dir.path().join("t.json");
    gchaos(&["gen", "--dims", "2,3,2", "--out", path(&t)]);
    let o = gchaos(&["chaining", "induced", "--tensor", path(&t), "--k", "2", "--npoints", "4", "--block", "1,2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows: Vec<Vec<f64>> = stdout(&o)
        .lines()
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().enumerate().all(|(i, r)| r.len() == 4 && r[i] == 0.0));
    assert_eq!(gchaos(&["chaining", "induced", "--tensor", path(&t), "--k", "1", "--npoints", "4", "--block", "1"]).status.code(), Some(2));
    assert_eq!(gchaos(&["chaining", "induced", "--tensor", path(&t), "--k", "2", "--npoints", "4", "--block", "3"]).status.code(), Some(2));
    assert_eq!(gchaos(&["chaining", "--mode", "gamma"]).status.code(), Some(2));
}
