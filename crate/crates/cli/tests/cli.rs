use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dyadic-lab")).args(args).output().expect("spawn dyadic-lab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn empty_suite_list_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"suites": []}"#).unwrap();
    let out = dir.path().join("out");
    let o = lab(&["run", "--config", path(&cfg), "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["suites"].as_array().unwrap().len(), 0);
    assert_eq!(report["passed"], true);
}

#[test]
fn unknown_config_field_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"suites": [], "sweets": 3}"#).unwrap();
    let o = lab(&["run", "--config", path(&cfg), "--out", path(&dir.path().join("out"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for (i, workers) in ["1", "4"].iter().enumerate() {
        let out = dir.path().join(format!("run{i}"));
        let o = lab(&["run", "--suite", "operators", "sparse", "constants", "--seed", "11", "--workers", workers, "--out", path(&out)]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        reports.push(fs::read(out.join("report.json")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn counterexample_suite_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = lab(&["run", "--suite", "counterexample", "--window", "1024", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("PASS counterexample/case2_minorant"));
    assert!(text.contains("PASS counterexample/case1_log_identity"));
    let growth = fs::read_to_string(out.join("tables/counterexample_case2_growth.csv")).unwrap();
    let mut lines = growth.lines();
    assert_eq!(lines.next(), Some("x,s,h"));
    // doublings from 4 to 1024
    assert_eq!(lines.count(), 9);
    assert!(fs::read_to_string(out.join("schema.txt")).unwrap().contains("case2_growth"));
}

#[test]
fn constants_batch_emits_csv() {
    let dir = tempfile::tempdir().unwrap();
    let ex = dir.path().join("case2");
    let o = lab(&["examples", "case2", "--window", "256", "--out", path(&ex)]);
    assert_eq!(o.status.code(), Some(0));
    let pair = ex.join("pair.json");
    let o = lab(&["constants", "compute", "--which", "apq", "sawyer-forward", "--pair", path(&pair), "--exponents", "1,1/2,2,2", "--levels=-8.."]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "name,value,argmax");
    assert_eq!(rows.len(), 3);
    let apq: f64 = rows[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!(apq <= 1.0 + 1e-9);

    // a single constant prints JSON unless --batch
    let single = lab(&["constants", "compute", "--which", "apq", "--pair", path(&pair), "--exponents", "1,1/2,2,2", "--levels=-8.."]);
    let v: serde_json::Value = serde_json::from_slice(&single.stdout).unwrap();
    assert_eq!(v["name"], "apq_alpha");
    let batch = lab(&["constants", "compute", "--which", "apq", "--pair", path(&pair), "--exponents", "1,1/2,2,2", "--levels=-8..", "--batch"]);
    assert!(stdout(&batch).starts_with("name,value,argmax"));
}

#[test]
fn case1_growth_matches_log() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(&["examples", "case1", "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    let mut r = csv::Reader::from_path(dir.path().join("growth.csv")).unwrap();
    let headers = r.headers().unwrap().clone();
    let xi = headers.iter().position(|h| h == "x").unwrap();
    let mi = headers.iter().position(|h| h == "log_identity").unwrap();
    let mut n = 0;
    for rec in r.records() {
        let rec = rec.unwrap();
        let x: f64 = rec[xi].parse().unwrap();
        let m: f64 = rec[mi].parse().unwrap();
        assert!((m - x.ln()).abs() <= 1e-6 * x.ln());
        n += 1;
    }
    assert!(n >= 5);
}

#[test]
fn non_convex_young_function_is_rejected() {
    let o = lab(&["orlicz", "--young", "log-damped:p=1.5,eps=0.5", "--p", "1.5"]);
    assert_ne!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not convex"));
    let ok = lab(&["orlicz", "--young", "borderline:p=2,q=4,eps=0.5", "--p", "2", "--q", "4"]);
    assert_eq!(ok.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["verdict"], "convergent");
}
