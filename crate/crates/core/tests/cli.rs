use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hardy-dynamics"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn binary")
}

fn golden(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", name].iter().collect();
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn check_golden(args: &[&str], name: &str) {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden(name), "{args:?}");
}

#[test]
fn classify_golden() {
    check_golden(&["classify", "--a", "0.5", "--b-re", "1", "--b-im", "1"], "classify_half_1_1.json");
}

#[test]
fn orbit_golden() {
    check_golden(&["orbit", "--a", "1", "--b-re", "1", "--w-re", "0.5", "--n", "10"], "orbit_parabolic.csv");
}

#[test]
fn spectrum_golden() {
    check_golden(&["spectrum", "--a", "2", "--b-im", "1", "--basis-size", "32"], "spectrum_2_i.csv");
}

#[test]
fn exit_codes() {
    let cases: &[(&[&str], i32)] = &[
        (&["classify", "--a", "2"], 0),
        (&["classify", "--a", "-1"], 2),
        (&["classify", "--a", "0"], 2),
        (&["classify", "--a", "1", "--b-re", "-1"], 2),
        (&["classify", "--a", "nan"], 2),
        (&["classify", "--a", "1", "--format", "xml"], 2),
        (&["orbit", "--a", "1", "--w-re", "0"], 2),
        (&["pseudo", "--a", "0.5", "--b-re", "1", "--delta", "-0.1", "--n", "5"], 2),
        (&["frobnicate"], 2),
        (&["pseudo", "--a", "2", "--b-re", "1", "--delta", "0.1", "--n", "5", "--witness"], 3),
        (&["pseudo", "--a", "1", "--b-im", "1", "--delta", "0.1", "--n", "5", "--witness"], 3),
        (&["pseudo", "--a", "0.5", "--b-re", "1", "--delta", "0.1", "--n", "5", "--witness"], 0),
        (&["orbit", "--a", "0.001", "--n", "200"], 4),
    ];
    for (args, code) in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(*code), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        if *code != 0 {
            assert!(!out.stderr.is_empty(), "{args:?} printed no diagnostic");
        }
    }
}

#[test]
fn precondition_message_names_citation() {
    let out = run(&["pseudo", "--a", "2", "--b-re", "1", "--delta", "0.1", "--n", "5", "--witness"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("Prop 4.1 precondition"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let invocations: &[&[&str]] = &[
        &["classify", "--a", "3", "--b-re", "0.25", "--b-im", "-2", "--format", "csv"],
        &["pseudo", "--a", "4", "--b-re", "1", "--delta", "0.05", "--n", "30", "--seed", "7"],
        &["spectrum", "--a", "1", "--b-re", "1", "--basis-size", "16"],
        &["grid", "--a", "0.5,1,2", "--b-re", "0,1", "--b-im", "0,1"],
    ];
    for args in invocations {
        let first = run(args);
        assert_eq!(first.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&first.stderr));
        let second = run(args);
        assert_eq!(first.stdout, second.stdout, "{args:?}");
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("hardy-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = run(&["classify", "--a", "0.5", "--b-re", "1", "--b-im", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), golden("classify_half_1_1.json"));
    std::fs::remove_dir_all(&dir).ok();
}
