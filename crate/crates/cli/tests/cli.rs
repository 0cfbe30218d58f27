use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn opfib(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opfib")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn fixture(dir: &TempDir, name: &str) -> PathBuf {
    let out = opfib(&["example", name]);
    assert_eq!(out.status.code(), Some(0), "example {name}");
    let path = dir.path().join(format!("{name}.json"));
    std::fs::write(&path, &out.stdout).unwrap();
    path
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_exit_codes() {
    let dir = TempDir::new().unwrap();
    let comm = fixture(&dir, "comm");
    assert_eq!(opfib(&["validate", arg(&comm)]).status.code(), Some(0));

    let corrupt = fixture(&dir, "corrupt-z2");
    let out = opfib(&["validate", arg(&corrupt)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("operad.validate: FAIL"));
    assert!(stdout(&out).contains("implicated most often: Some(["));

    let malformed = dir.path().join("bad.json");
    std::fs::write(&malformed, r#"{"kind": "operad", "colors": ["#).unwrap();
    assert_eq!(opfib(&["validate", arg(&malformed)]).status.code(), Some(2));
    assert_eq!(opfib(&["validate", arg(&dir.path().join("missing.json"))]).status.code(), Some(2));
}

#[test]
fn straightening_roundtrip_through_files() {
    let dir = TempDir::new().unwrap();
    let alg = fixture(&dir, "max-monoid");
    let out = opfib(&["unstraighten", arg(&alg)]);
    assert_eq!(out.status.code(), Some(0));
    // the dump ends with the fibration as an instance file
    let text = stdout(&out);
    let fib_json = &text[text.find("{\n").unwrap()..text.rfind("operad.validate").unwrap_or(text.len())];
    let fib_json = &fib_json[..fib_json.rfind('}').unwrap() + 1];
    let fib = dir.path().join("fib.json");
    std::fs::write(&fib, fib_json).unwrap();
    let out = opfib(&["straighten", arg(&fib)]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("m2: [0, 0]↦0 [0, 1]↦1 [1, 0]↦1 [1, 1]↦1"), "{text}");
    assert!(text.contains("2 components"));
}

#[test]
fn non_fibration_is_rejected() {
    let dir = TempDir::new().unwrap();
    let chaotic = fixture(&dir, "chaotic-fibration");
    let out = opfib(&["straighten", arg(&chaotic)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("canonical objects"));
    let out = opfib(&["check-fibration", arg(&chaotic)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("fibration.locality-agreement: PASS"));
    let good = fixture(&dir, "max-monoid-fibration");
    assert_eq!(opfib(&["check-fibration", arg(&good)]).status.code(), Some(0));
    assert_eq!(opfib(&["check-strong", arg(&good)]).status.code(), Some(0));
}

#[test]
fn wrong_kind_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let tree = fixture(&dir, "tree");
    assert_eq!(opfib(&["straighten", arg(&tree)]).status.code(), Some(2));
    assert_eq!(opfib(&["validate", arg(&tree)]).status.code(), Some(0));
}

#[test]
fn w_forest_figures() {
    let dir = TempDir::new().unwrap();
    let out = opfib(&["w-forest", arg(&fixture(&dir, "figure1"))]);
    assert!(stdout(&out).contains("canonical: () (|) (|||) | |"));
    let out = opfib(&["w-forest", arg(&fixture(&dir, "figure2"))]);
    assert!(stdout(&out).contains("canonical: (()(||)) (||)"), "{}", stdout(&out));
}

#[test]
fn nerve_compare_small() {
    let dir = TempDir::new().unwrap();
    let comm = fixture(&dir, "comm");
    let out = opfib(&["nerve-compare", arg(&comm), "--horizon", "2", "--format", "records"]);
    assert_eq!(out.status.code(), Some(0));
    let record: serde_json::Value = serde_json::from_str(stdout(&out).lines().next().unwrap()).unwrap();
    assert_eq!(record["check"], "nerve.comparison");
    assert_eq!(record["passed"], true);
}

#[test]
fn smallest_sweep_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("sweep.jsonl");
    let args = ["sweep", "--colors", "1", "--op-bound", "1", "--size-bound", "1", "--horizon", "2", "--format", "records"];
    let first = opfib(&args);
    assert_eq!(first.status.code(), Some(0));
    let mut with_report = args.to_vec();
    with_report.extend(["--report", arg(&report)]);
    assert_eq!(opfib(&with_report).status.code(), Some(0));
    let written = std::fs::read_to_string(&report).unwrap();
    assert_eq!(written, stdout(&first));
    let hashes: Vec<String> = written
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["hash"].as_str().unwrap().to_string())
        .collect();
    assert!(hashes.windows(2).all(|w| w[0] <= w[1]));

    let human = stdout(&opfib(&args[..9]));
    for k in 1..=9 {
        assert!(human.contains(&format!("criterion {k}: PASS")), "{human}");
    }
    assert_eq!(opfib(&["sweep", "--colors", "0"]).status.code(), Some(2));
}
