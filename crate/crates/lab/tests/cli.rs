use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn wlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wlab")).args(args).output().expect("spawn wlab")
}

fn scenario(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name).to_string_lossy().into_owned()
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const SMALL_SMT7: &str = r#"
theorem = "smt7"

[curve]
target = "p1xp1"
components = ["exp(z)", "(exp(z)+1)/(exp(z)-1)"]

[[divisor]]
kind = "torus"
m = 1
n = 1
c = 3

[grid]
min = 2
max = 10
count = 8
"#;

#[test]
fn example_scenario_writes_four_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("ex1");
    let o = wlab(&["run", &scenario("example1_smt7.toml"), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let mut files: Vec<String> =
        std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    files.sort();
    assert_eq!(files, ["growth.csv", "plot.csv", "report.json", "zeros.csv"]);

    let report = json(&out.join("report.json"));
    assert_eq!(report["theorem"], "smt7");
    assert_eq!(report["verdict"], "pass");
    assert_eq!(report["radii"].as_array().unwrap().len(), 16);
    for key in ["lhs", "rhs", "margin", "allowance", "exceptional", "hypotheses"] {
        assert!(!report[key].is_null(), "{key}");
    }
    assert_eq!(report["hypotheses"]["crossing_clearance"]["status"], "sampled, not proven");

    let plot = std::fs::read_to_string(out.join("plot.csv")).unwrap();
    assert!(plot.starts_with("r,lhs,rhs,margin\n"));
    assert!(!plot.contains('\r'));
    assert_eq!(plot.lines().count(), 17);
    let zeros = std::fs::read_to_string(out.join("zeros.csv")).unwrap();
    assert!(zeros.starts_with("re,im,multiplicity,component\n"));
    let growth = std::fs::read_to_string(out.join("growth.csv")).unwrap();
    assert!(growth.starts_with("r,\"T:O(1,1)\","));
}

#[test]
fn degenerate_curve_reports_its_relation() {
    let tmp = tempfile::tempdir().unwrap();
    let o = wlab(&["run", &scenario("degenerate_probe.toml"), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let e = json(&tmp.path().join("error.json"));
    assert_eq!(e["kind"], "hypothesis");
    assert_eq!(e["hypothesis"], "degeneracy");
    assert_eq!(e["relation"]["type"], "flat_relation");
    assert_eq!((e["relation"]["m"].as_i64(), e["relation"]["n"].as_i64()), (Some(2), Some(-1)));
    assert_eq!(e["relation"]["c"]["re"], 1.0);
    assert_eq!(e["relation"]["c"]["im"], 0.0);
}

#[test]
fn malformed_expression_exits_3_with_offset() {
    let tmp = tempfile::tempdir().unwrap();
    let p = write(tmp.path(), "bad.toml", &SMALL_SMT7.replace("\"exp(z)\",", "\"exp(\","));
    let out = tmp.path().join("out");
    let o = wlab(&["run", p.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let e = json(&out.join("error.json"));
    assert_eq!(e["kind"], "config");
    assert_eq!(e["offset"], 4);
    assert_eq!(e["field"], "curve.components[0]");
    assert!(String::from_utf8_lossy(&o.stderr).contains("at byte 4"));
}

#[test]
fn toml_syntax_error_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let p = write(tmp.path(), "bad.toml", "theorem = \"smt7\"\n[grid\n");
    let out = tmp.path().join("out");
    let o = wlab(&["run", p.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(json(&out.join("error.json"))["offset"].is_u64());
}

#[test]
fn missing_file_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let o = wlab(&["run", "/nonexistent/x.toml", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn validation_error_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let p = write(tmp.path(), "short.toml", &SMALL_SMT7.replace("count = 8", "count = 5"));
    let o = wlab(&["run", p.to_str().unwrap(), "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn crossing_point_violation_is_a_hypothesis_error() {
    let tmp = tempfile::tempdir().unwrap();
    let text = SMALL_SMT7.replace("\"(exp(z)+1)/(exp(z)-1)\"", "\"exp(z^2)\"").replace("c = 3", "c = 2");
    let p = write(tmp.path(), "p1.toml", &text);
    let out = tmp.path().join("o");
    let o = wlab(&["run", p.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert_eq!(json(&out.join("error.json"))["hypothesis"], "crossing_clearance");
}

#[test]
fn command_line_overrides_are_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    let p = write(tmp.path(), "s.toml", SMALL_SMT7);
    let out = tmp.path().join("o");
    let o = wlab(&["run", p.to_str().unwrap(), "--out", out.to_str().unwrap(), "--eps", "0.1", "--grid", "3:12:9:linear"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let r = json(&out.join("report.json"));
    assert_eq!(r["settings"]["eps"], 0.1);
    assert_eq!(r["overrides"]["eps"]["source"], "command line");
    assert_eq!(r["overrides"]["grid"]["value"], "3:12:9:linear");
    let radii: Vec<f64> = r["radii"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(radii.len(), 9);
    assert_eq!((radii[0], radii[1], radii[8]), (3.0, 4.125, 12.0));
}

#[test]
fn output_key_is_relative_to_the_scenario() {
    let tmp = tempfile::tempdir().unwrap();
    let p = write(tmp.path(), "s.toml", &format!("output = \"here\"\n{SMALL_SMT7}"));
    let o = wlab(&["run", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(tmp.path().join("here").join("report.json").exists());
}

#[test]
fn parallel_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let p = write(tmp.path(), "s.toml", SMALL_SMT7);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(wlab(&["--threads", "1", "run", p.to_str().unwrap(), "--out", a.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(wlab(&["--threads", "3", "run", p.to_str().unwrap(), "--out", b.to_str().unwrap()]).status.code(), Some(0));
    for f in ["growth.csv", "report.json", "zeros.csv", "plot.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn verify_empty_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("corpus");
    std::fs::create_dir(&dir).unwrap();
    let out = tmp.path().join("out");
    let o = wlab(&["verify", dir.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = json(&out.join("summary.json"));
    assert_eq!(s["total"], 0);
    assert_eq!(s["scenarios"].as_array().unwrap().len(), 0);
}

#[test]
fn verify_reports_unexpected_failures() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("corpus");
    std::fs::create_dir(&dir).unwrap();
    write(&dir, "a_good.toml", SMALL_SMT7);
    write(&dir, "b_degenerate.toml", &SMALL_SMT7.replace("\"(exp(z)+1)/(exp(z)-1)\"", "\"exp(2*z)\""));
    std::fs::write(dir.join("notes.txt"), "not a scenario").unwrap();
    let out = tmp.path().join("out");
    let o = wlab(&["verify", dir.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_ne!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("ok") || l.starts_with("FAIL")).count(), 2, "{text}");
    let s = json(&out.join("summary.json"));
    assert_eq!((s["total"].as_u64(), s["ok"].as_u64()), (Some(2), Some(1)));
    assert_eq!(s["scenarios"][1]["exit_code"], 1);
    assert_eq!(s["scenarios"][1]["ok"], false);
    assert!(out.join("b_degenerate").join("error.json").exists());
}

#[test]
fn bundled_corpus_has_six_expected_outcomes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let o = wlab(&["verify", dir.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let s = json(&tmp.path().join("summary.json"));
    assert_eq!((s["total"].as_u64(), s["ok"].as_u64()), (Some(6), Some(6)));
    let theorems: Vec<&str> = s["scenarios"].as_array().unwrap().iter().map(|r| r["theorem"].as_str().unwrap()).collect();
    for t in ["cartan", "thm1_1", "smt7", "jensen"] {
        assert!(theorems.contains(&t), "{t}");
    }
}

#[test]
fn eval_subcommand() {
    let o = wlab(&["eval", "(exp(z)+1)/(exp(z)-1)", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "pole of order 1");
    let o = wlab(&["eval", "z^3", "2i"]);
    assert_eq!(stdout(&o).trim(), "-8i");
    let o = wlab(&["eval", "exp(", "0"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn zeros_subcommand() {
    let o = wlab(&["zeros", "exp(z)-1", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "re,im,multiplicity");
    assert_eq!(rows.len(), 4);
    for r in &rows[1..] {
        let f: Vec<f64> = r.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(f[0].abs() < 1e-10 && (f[1] / (2.0 * std::f64::consts::PI)).fract().abs() < 1e-9 && f[2] == 1.0);
    }
}

#[test]
fn wronskian_subcommand() {
    let o = wlab(&["wronskian", &scenario("example1_smt7.toml"), "1", "--chart", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let v: f64 = text.trim().trim_start_matches("W = ").split(' ').next().unwrap().parse().unwrap();
    assert!((v - 6.57213630).abs() < 1e-7, "{text}");
    assert!(text.contains("(chart 0)"));
    let o = wlab(&["wronskian", &scenario("example1_smt7.toml"), "1", "--chart", "9"]);
    assert_eq!(o.status.code(), Some(1));
}
