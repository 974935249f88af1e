use std::path::Path;
use std::process::{Command, Output};

fn liesynth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liesynth"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field<'a>(out: &'a str, key: &str) -> &'a str {
    out.lines()
        .find_map(|l| l.strip_prefix(key).map(str::trim))
        .unwrap_or_else(|| panic!("no `{key}` line in:\n{out}"))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn closure_dimensions() {
    for (dirs, gammas, want) in [
        ("xyz", "unequal", "15"),
        ("z", "equal", "4"),
        ("xy", "equal", "9"),
    ] {
        let o = liesynth(&["closure", "--dirs", dirs, "--gammas", gammas]);
        assert!(o.status.success(), "{dirs}/{gammas}");
        assert_eq!(field(&stdout(&o), "dim "), want, "{dirs}/{gammas}");
    }
}

#[test]
fn closure_writes_basis_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("basis.json");
    let o = liesynth(&["closure", "--dirs", "x", "--output", path_str(&out)]);
    assert!(o.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(v.is_object());
}

#[test]
fn bad_input_exits_with_validation_code() {
    assert_eq!(
        liesynth(&["closure", "--dirs", "xq"]).status.code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("target.json");
    std::fs::write(&bad, "[[[1, 0], [0, 0]]]").unwrap();
    let o = liesynth(&["synthesize", "--target", path_str(&bad), "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(2));
    let o = liesynth(&[
        "synthesize",
        "--target",
        path_str(&dir.path().join("missing.json")),
    ]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn identity_target_gives_empty_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let o = liesynth(&[
        "synthesize",
        "--target",
        "identity",
        "--output",
        path_str(&out),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["stages"].as_array().unwrap().len(), 0);
    assert_eq!(v["total_time_ns"].as_f64(), Some(0.0));
}

#[test]
fn synthesize_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let trace = dir.path().join("trace.csv");
    let o = liesynth(&[
        "synthesize",
        "--output",
        path_str(&out),
        "--trace",
        path_str(&trace),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert_eq!(field(&s, "n "), "7");
    assert!(field(&s, "rms ").parse::<f64>().unwrap() <= 1e-8);
    let csv = std::fs::read_to_string(&trace).unwrap();
    assert!(csv.starts_with("stage,t_ns,degree"));
    // Header, the initial state, then one row per stage.
    assert_eq!(csv.lines().count(), 1 + 1 + 301);

    let o = liesynth(&["verify", "--schedule", path_str(&out)]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().any(|l| l == "PASS"));
    let o = liesynth(&["verify", "--schedule", path_str(&out), "--target", "jxi"]);
    assert!(o.status.success());

    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let d = v["stages"][5]["duration_ns"].as_f64().unwrap();
    v["stages"][5]["duration_ns"] = serde_json::json!(d * 1.05 + 1.0);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    let o = liesynth(&["verify", "--schedule", path_str(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().any(|l| l == "FAIL"));
}

#[test]
fn output_is_byte_identical_without_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = liesynth(&["synthesize", "--no-timestamp", "--output", path_str(p)]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let text = std::fs::read_to_string(&a).unwrap();
    assert!(!text.contains("generated_unix"));
}

#[test]
fn search_forward_reports_unrealizable_stages() {
    let o = liesynth(&["synthesize", "--search-forward", "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(3));
    let o = liesynth(&[
        "synthesize",
        "--search-forward",
        "--allow-signed",
        "--no-timestamp",
    ]);
    assert!(o.status.success());
}

#[test]
fn demo_paper_prints_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = liesynth(&["demo-paper", "--output", path_str(dir.path())]);
    let s = stdout(&o);
    let rows: Vec<&str> = s
        .lines()
        .filter(|l| l.contains("PASS") || l.contains("FAIL"))
        .collect();
    assert_eq!(rows.len(), 10, "{s}");
    let passed = rows.iter().filter(|l| l.contains("PASS")).count();
    assert!(s.contains(&format!("{passed}/10 passed")));
    // Any failing row makes the command exit 1.
    assert_eq!(o.status.code(), Some(if passed == 10 { 0 } else { 1 }));
    for f in [
        "basis.json",
        "schedule.json",
        "entanglement.csv",
        "wei_norman.csv",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}
