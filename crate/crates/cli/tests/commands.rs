use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn problems() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("problems")
}

fn causalrd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_causalrd"))
        .args(args)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn problem(name: &str) -> String {
    problems().join(name).to_string_lossy().into_owned()
}

#[test]
fn dirinfo_examples() {
    let o = causalrd(&["dirinfo", &problem("bsc.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("I(X^n -> Y^n): 0.368064207 nats (0.531004 bits)"), "{}", stdout(&o));

    let o = causalrd(&["dirinfo", &problem("noiseless.json")]);
    assert!(stdout(&o).contains("I(X^n -> Y^n): 1.386294361 nats (2.000000 bits)"));
    assert!(stdout(&o).contains("stage 1: 0.693147181 nats"));

    let o = causalrd(&["dirinfo", &problem("x_independent.json")]);
    assert!(stdout(&o).contains("I(X^n -> Y^n): 0.000000000 nats (0.000000 bits)"));
}

#[test]
fn dirinfo_writes_report_next_to_problem() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(problems().join("bsc.json")).unwrap();
    let with_report = text.replacen('{', "{\n  \"output\": {\"report\": \"report.txt\"},", 1);
    let path = dir.path().join("p.json");
    std::fs::write(&path, with_report).unwrap();
    let o = causalrd(&["dirinfo", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert_eq!(report, stdout(&o));
}

#[test]
fn check_variational_passes_and_rejects_bad_mass() {
    let o = causalrd(&["check-variational", &problem("feedback.json"), "--trials", "100", "--seed", "11"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.trim_end().ends_with("PASS"), "{out}");
    assert!(out.contains("achiever residual"));

    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(problems().join("bsc.json")).unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, text.replace("0.5,\n      0.5", "0.49,\n      0.5")).unwrap();
    let o = causalrd(&["check-variational", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("source.letter"), "{}", stderr(&o));
}

#[test]
fn rdf_curve_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("curve.csv");
    let o = causalrd(&["rdf-curve", &problem("binary_symmetric_curve.json"), "--out", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,D,R_nats_per_letter,R_bits_per_letter,iterations,residual,converged"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 22);
    let ln9 = rows.iter().find(|r| r[0] == "-2.197224577336").expect("s = -ln 9 row");
    assert_eq!(ln9[1], "0.100000000000");
    let r_bits: f64 = ln9[3].parse().unwrap();
    assert!((r_bits - 0.531004406410).abs() < 1e-5);
    let zero = rows.last().unwrap();
    assert_eq!(zero[0], "0.000000000000");
    assert_eq!(zero[2], "0.000000000000");
    assert_eq!(zero[3], "0.000000000000");
    assert!(rows.iter().all(|r| r[6] == "true"));
    assert!(stdout(&o).contains("convex: true"));
}

#[test]
fn rdf_curve_is_deterministic_across_modes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, extra: &[&str]| {
        let out = dir.path().join(name);
        let (file, dest) = (problem("markov_curve.json"), out.to_string_lossy().into_owned());
        let mut args = vec!["rdf-curve", file.as_str(), "--out", dest.as_str()];
        args.extend_from_slice(extra);
        let o = causalrd(&args);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(stdout(&o).contains("monotone: true"));
        assert!(stdout(&o).contains("convex: true"));
        std::fs::read(out).unwrap()
    };
    let a = run("a.csv", &[]);
    let b = run("b.csv", &[]);
    assert_eq!(a, b);
    let cold = run("cold.csv", &["--no-warm-start"]);
    let par = run("par.csv", &["--no-warm-start", "--parallel"]);
    assert_eq!(cold, par);

    let o = causalrd(&["rdf-curve", &problem("markov_curve.json"), "--out", "x.csv", "--parallel"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oracle_compare_examples() {
    let o = causalrd(&["oracle-compare", &problem("oracle_n0.json"), "--step", "0.005"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.trim_end().ends_with("PASS"));
    let gap: f64 = out
        .split("gap ")
        .nth(1)
        .and_then(|t| t.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    assert!(gap.abs() <= 1.5e-2);
    assert!(out.contains("i.i.d. rate"));

    let o = causalrd(&["oracle-compare", &problem("oracle_markov_n1.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let o = causalrd(&["oracle-compare", &problem("oracle_n2.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("horizon ≤ 1"), "{}", stderr(&o));
}

#[test]
fn exit_codes_for_io_and_usage() {
    let o = causalrd(&["dirinfo", "/definitely/not/here.json"]);
    assert_eq!(o.status.code(), Some(3));
    let o = causalrd(&["rdf-curve", &problem("binary_symmetric_curve.json"), "--out", "/definitely/not/here/c.csv"]);
    assert_eq!(o.status.code(), Some(3));
    let o = causalrd(&["dirinfo"]);
    assert_eq!(o.status.code(), Some(2));
    let o = causalrd(&["dirinfo", &problem("oracle_n0.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("channel"));
}
