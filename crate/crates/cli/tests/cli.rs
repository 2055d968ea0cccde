use std::path::PathBuf;
use std::process::{Command, Output};

fn mumford(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mumford"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scratch_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mumford-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn airy_w11_json() {
    let out = mumford(&[
        "wgn", "--g", "1", "--n", "1", "--curve", "airy", "--format", "json",
    ]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out).trim(),
        r#"{"g":1,"n":1,"terms":[{"coeff":"-1/16","d":[1]}]}"#
    );
}

#[test]
fn wp_v11_text() {
    let out = mumford(&["wp", "--g", "1", "--n", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "P1^2/48 + u/12");
}

#[test]
fn intersect_g2_contains_psi4() {
    let out = mumford(&["intersect", "--g", "2", "--n", "1", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let want = serde_json::json!({"kappa": [], "psi": [4], "value": "1/1152"});
    assert!(doc.as_array().unwrap().contains(&want));
}

#[test]
fn json_output_is_deterministic() {
    let args = ["wgn", "--g", "2", "--n", "2", "--format", "json"];
    let first = mumford(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, mumford(&args).stdout);
}

#[test]
fn symbolic_w03_and_assignment() {
    let out = mumford(&["wgn", "--g", "0", "--n", "3"]);
    assert!(stdout(&out).contains("-s"));
    let out = mumford(&[
        "volume", "--g", "1", "--n", "1", "--assign", "s=1/2", "--assign", "t5=0",
    ]);
    assert_eq!(stdout(&out).trim(), "-P1^2/96");
}

#[test]
fn free_energy_and_conjugation() {
    let out = mumford(&["fg", "--g", "2", "--curve", "airy"]);
    assert_eq!(stdout(&out).trim(), "F_2 = 0");
    let out = mumford(&[
        "conjugate",
        "--curve",
        "wp",
        "--order",
        "3",
        "--format",
        "json",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["tilde"]["1"], "4*u");
    assert_eq!(doc["tilde"]["3"], "0");
}

#[test]
fn curve_file_is_accepted() {
    let path = scratch_file(
        "half.json",
        r#"{"t3": [["1", {}]], "times": {"5": [["2", {}]]}, "name": "half"}"#,
    );
    let out = mumford(&[
        "wgn",
        "--g",
        "1",
        "--n",
        "1",
        "--curve",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    // s = 1, t5 = 2: -s/8 at d = 1 and -s^2 t5/8 at d = 0
    assert!(stdout(&out).contains("-1/8"));
    assert!(stdout(&out).contains("-1/4"));
}

#[test]
fn output_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("mumford-cli-out-{}.json", std::process::id()));
    let out = mumford(&[
        "wp",
        "--g",
        "0",
        "--n",
        "3",
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(
        written.trim(),
        r#"{"g":0,"n":3,"terms":[{"P-exponents":[0,0,0],"coeff":"1"}]}"#
    );
}

#[test]
fn check_suite_reports() {
    let out = mumford(&[
        "check", "--suite", "dilaton", "--budget", "2", "--format", "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc[0]["passed"], true);
    assert_eq!(doc[0]["checks"].as_array().unwrap().len(), 2);
    assert!(!mumford(&["check", "--budget", "6"]).status.success());
}

fn assert_error(args: &[&str], code: i32) {
    let out = mumford(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}");
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error: "));
}

#[test]
fn exit_codes_distinguish_failures() {
    assert_error(&["wgn", "--g", "1", "--n", "1", "--assign", "s"], 2);
    let bad = scratch_file("bad.json", "{not json");
    assert_error(
        &[
            "wgn",
            "--g",
            "1",
            "--n",
            "1",
            "--curve",
            bad.to_str().unwrap(),
        ],
        2,
    );
    let degenerate = scratch_file("degenerate.json", r#"{"t3": [["2", {}]], "times": {}}"#);
    assert_error(
        &[
            "wgn",
            "--g",
            "1",
            "--n",
            "1",
            "--curve",
            degenerate.to_str().unwrap(),
        ],
        3,
    );
    assert_error(&["wgn", "--g", "0", "--n", "2"], 4);
    assert_error(&["fg", "--g", "1"], 4);
    assert_error(&["wgn", "--g", "1", "--n", "1", "--curve", "hyperbolic"], 5);
}
