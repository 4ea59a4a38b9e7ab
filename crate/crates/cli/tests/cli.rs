use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use metaplectic_core::json as mjson;
use metaplectic_core::matcore::CMat;
use metaplectic_core::sympgroup::{self, SpReal};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_metaplectic"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn complex(v: &Value) -> (f64, f64) {
    (v["re"].as_f64().unwrap(), v["im"].as_f64().unwrap())
}

#[test]
fn identity_symbol_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", &mjson::matrix_to_value(&CMat::identity(2)));
    let out = run(&["eval", "w1-sigma", "--g", g.to_str().unwrap(), "--at", "0", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(complex(&stdout_json(&out)), (1.0, 0.0));
}

#[test]
fn star_exp_shorthand() {
    let t: f64 = 0.15;
    let want = (t.tan().cos() / t.cos(), -t.tan().sin() / t.cos());
    for extra in [&["--closed"][..], &[][..]] {
        let mut args = vec!["eval", "star-exp", "--M", "0.15I", "--point", "1", "0"];
        args.extend_from_slice(extra);
        let out = run(&args);
        assert_eq!(out.status.code(), Some(0));
        let (re, im) = complex(&stdout_json(&out));
        assert!((re - want.0).abs() < 1e-12 && (im - want.1).abs() < 1e-12, "{re} {im}");
    }
    let out = run(&["moyal", "star-exp", "--M", "0.15I", "--point", "1", "0", "--order", "40"]);
    let v = stdout_json(&out);
    assert!(v["last_term"].as_f64().unwrap() < 1e-20);
    assert!((v["value"][0].as_f64().unwrap() - want.0).abs() < 1e-12);
}

#[test]
fn unknown_suite_exits_two() {
    let out = run(&["suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown suite"));
}

#[test]
fn suite_exit_codes_and_csv() {
    let out = run(&["suite", "lemmatrices", "--n", "1", "--trials", "10", "--seed", "1", "--tol", "1e-9"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["failures"], 0);
    assert_eq!(v["trials"], 10);

    let out = run(&["suite", "lemmatrices", "--trials", "2", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["weyl", "verify", "--suite", "polar", "--n", "1", "--trials", "5", "--seed", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("suite,case,residual,tol,pass"));
    assert_eq!(lines.count(), 5);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn output_is_deterministic() {
    let args = ["suite", "jacobi-bk", "--n", "2", "--trials", "12", "--seed", "9"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = CMat::from_real_rows(2, 2, &[1.0, 1.0, 0.0, 2.0]).unwrap();
    let g = write(dir.path(), "g.json", &mjson::matrix_to_value(&bad));
    let out = run(&["eval", "w1-sigma", "--g", g.to_str().unwrap(), "--at", "0", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["eval", "w1-sigma", "--g", "/nonexistent.json", "--at", "0", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["suite", "polar", "--n", "7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn real_det_p_needs_adjudication() {
    let dir = tempfile::tempdir().unwrap();
    let g = SpReal::from_real_rows(1, &[-2.0, 0.0, 0.0, -0.5]).unwrap();
    let k = sympgroup::su_from_sp(&g).unwrap();
    let kf = write(dir.path(), "k.json", &mjson::su_to_value(&k));
    let kf = kf.to_str().unwrap();
    let out = run(&["eval", "w0-sigma", "--k", kf, "--at", "0.3", "0.1"]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["eval", "w0-sigma", "--k", kf, "--at", "0.3", "0.1", "--adjudicate-phase"]);
    assert_eq!(out.status.code(), Some(0));
    let (re, im) = complex(&stdout_json(&out));
    assert!(re.is_finite() && im.is_finite());
}

#[test]
fn adjudication_agrees_with_case_analysis() {
    let dir = tempfile::tempdir().unwrap();
    let k = sympgroup::su_from_sp(&sympgroup::random_negative_sp(1, 3)).unwrap();
    let kf = write(dir.path(), "k.json", &mjson::su_to_value(&k));
    let kf = kf.to_str().unwrap();
    let plain = stdout_json(&run(&["weyl", "w0", "--k", kf, "--at", "0.3", "0.1"]));
    let adj = stdout_json(&run(&["weyl", "w0", "--k", kf, "--at", "0.3", "0.1", "--adjudicate-phase"]));
    let (a, b) = (complex(&plain), complex(&adj));
    assert!((a.0 - b.0).abs() + (a.1 - b.1).abs() < 1e-12 * (1.0 + a.0.abs() + a.1.abs()));
}

#[test]
fn kernel_and_cocycle() {
    let dir = tempfile::tempdir().unwrap();
    let k = sympgroup::random_su(1, 5, 0.7);
    let kp = sympgroup::random_su(1, 6, 0.7);
    let k1 = write(dir.path(), "k1.json", &mjson::su_to_value(&k));
    let k2 = write(dir.path(), "k2.json", &mjson::matrix_to_value(&kp.matrix()));
    let out = run(&["kernel", "--k", k1.to_str().unwrap(), "--at", "0.1", "0.2", "-0.3", "0.4"]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["cocycle", "--k1", k1.to_str().unwrap(), "--k2", k2.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let sign = v["sign"].as_i64().unwrap();
    assert!(sign == 1 || sign == -1);
    let s = &v["scalar"];
    assert!((s[0].as_f64().unwrap() - sign as f64).abs() < 1e-9 && s[1].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn moyal_star_commutator() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.json", &serde_json::json!({"nvars": 2, "terms": [[[1, 0], 1.0, 0.0]]}));
    let q = write(dir.path(), "q.json", &serde_json::json!({"nvars": 2, "terms": [[[0, 1], 1.0, 0.0]]}));
    let pq = stdout_json(&run(&["moyal", "star", "--f", p.to_str().unwrap(), "--g", q.to_str().unwrap()]));
    let qp = stdout_json(&run(&["moyal", "star", "--f", q.to_str().unwrap(), "--g", p.to_str().unwrap()]));
    let constant = |v: &Value| {
        v["terms"]
            .as_array()
            .unwrap()
            .iter()
            .find(|t| t[0] == serde_json::json!([0, 0]))
            .map(|t| (t[1].as_f64().unwrap(), t[2].as_f64().unwrap()))
            .unwrap_or((0.0, 0.0))
    };
    let (a, b) = (constant(&pq), constant(&qp));
    assert_eq!((a.0 - b.0, a.1 - b.1), (0.0, -1.0));
}
