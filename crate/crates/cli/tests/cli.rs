use std::path::PathBuf;
use std::process::{Command, Output};

fn dyncode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dyncode"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn dyncode_stdout(args: &[&str]) -> String {
    let o = dyncode(args);
    assert!(o.status.success());
    stdout(&o)
}

fn machine_value(o: &Output, key: &str) -> String {
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_string))
        .unwrap_or_else(|| panic!("no {key}= line in\n{}", stdout(o)))
}

fn temp_file(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dyncode-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn analyze_honeycomb() {
    let o = dyncode(&["analyze", "--library", "honeycomb", "--format", "machine"]);
    assert!(o.status.success());
    assert_eq!(machine_value(&o, "T"), "4");
    assert_eq!(machine_value(&o, "P"), "3");
    assert_eq!(machine_value(&o, "mu"), "3");
    assert_eq!(machine_value(&o, "k"), "2");
}

#[test]
fn analyze_worstcase_and_ladder() {
    let o = dyncode(&[
        "analyze",
        "--library",
        "worstcase-init",
        "--n",
        "6",
        "--format",
        "machine",
    ]);
    assert_eq!(machine_value(&o, "T"), "12");
    let o = dyncode(&["analyze", "--library", "ladder", "--format", "machine"]);
    assert_eq!(machine_value(&o, "k"), "1");
    assert_eq!(machine_value(&o, "mu_by_position"), "2,3,2,3");
}

#[test]
fn analyze_schedule_file() {
    let path = temp_file("rep.sched", &dyncode_stdout(&["library", "show", "static-rep"]));
    let o = dyncode(&["analyze", "--schedule", path.to_str().unwrap(), "--format", "machine"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(machine_value(&o, "T"), "1");
    assert_eq!(machine_value(&o, "P"), "1");
}

#[test]
fn classify_vuillot_corner() {
    let path = temp_file("corner.err", "at 7: X1\nat 9: Y1\n");
    let o = dyncode(&[
        "classify",
        "--library",
        "vuillot-min",
        "--error",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(
        stdout(&o).starts_with("LOGICAL-FAILURE L=Y1 Y2 Y3 Y4 Y5 @9"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn classify_detectable_exit_code() {
    let path = temp_file("flip.err", "at 5: X0\n");
    let o = dyncode(&["classify", "--library", "static-rep", "--error", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("DETECTABLE probe=11"));
    let o = dyncode(&[
        "classify",
        "--library",
        "static-rep",
        "--error",
        path.to_str().unwrap(),
        "--format",
        "machine",
    ]);
    assert_eq!(machine_value(&o, "verdict"), "detectable");
}

#[test]
fn distances() {
    for (name, want) in [("fbs", "2"), ("vuillot-min", "2"), ("static-513", "3")] {
        let o = dyncode(&["distance", "--library", name, "--format", "machine"]);
        assert!(o.status.success(), "{name}");
        assert_eq!(machine_value(&o, "distance"), want, "{name}");
    }
}

#[test]
fn library_listing() {
    let text = dyncode_stdout(&["library", "list"]);
    for name in ["ladder", "honeycomb", "vuillot", "fbs", "worstcase-init", "static-rep"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}

#[test]
fn usage_errors() {
    assert_eq!(dyncode(&["bogus"]).status.code(), Some(1));
    assert_eq!(dyncode(&["analyze"]).status.code(), Some(1));
    assert_eq!(dyncode(&["analyze", "--library", "surface"]).status.code(), Some(1));
    let missing = dyncode(&["classify", "--library", "ladder", "--error", "/nonexistent/e.txt"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(!missing.stderr.is_empty());
    assert_eq!(dyncode(&["--help"]).status.code(), Some(0));
}

#[test]
fn machine_output_is_deterministic() {
    let args = ["detectors", "--library", "ladder", "--format", "machine"];
    assert_eq!(dyncode_stdout(&args), dyncode_stdout(&args));
}
