//! End-to-end runs of the compiled binary against the shipped surface files.
//!
//! Each test spawns the real executable, so assertions cover argument
//! parsing, report rendering, and exit codes exactly as a shell user sees
//! them.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../surfaces")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geosub"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout should be UTF-8")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr should be UTF-8")
}

#[test]
fn classify_reports_ambient_type_and_name() {
    let file = fixture("genus2_twopants.surf");
    let out = run(&["--format", "machine", "classify", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("name=genus2-twopants"), "got:\n{text}");
    assert!(text.contains("ambient=M_{2,0}"), "got:\n{text}");
    assert!(text.contains("orientable=true"), "got:\n{text}");
}

#[test]
fn kernel_of_genus_two_pants_is_trivial() {
    let file = fixture("genus2_twopants.surf");
    let out = run(&[
        "--format",
        "machine",
        "kernel",
        file.to_str().unwrap(),
        "--select",
        "P1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("rank=0"), "got:\n{text}");
    assert!(text.contains("trivial=true"), "got:\n{text}");
}

#[test]
fn commensurable_pair_of_klein_neighbourhoods() {
    let file = fixture("rn05_two_klein.surf");
    let out = run(&[
        "--format",
        "machine",
        "commensurable",
        file.to_str().unwrap(),
        "--select",
        "S0",
        "--select",
        "S1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("commensurable=true"), "got:\n{text}");
    assert!(text.contains("klein_matches=1"), "got:\n{text}");
}

#[test]
fn incommensurable_pair_reports_obstruction_with_success_exit() {
    let file = fixture("bounded_pants_pair.surf");
    let out = run(&[
        "--format",
        "machine",
        "commensurable",
        file.to_str().unwrap(),
        "--select",
        "N0",
        "--select",
        "N1",
    ]);
    assert_eq!(out.status.code(), Some(0), "a negative verdict is still an answer");
    let text = stdout_of(&out);
    assert!(text.contains("commensurable=false"), "got:\n{text}");
    assert!(text.contains("obstruction=boundary-mismatch"), "got:\n{text}");
}

#[test]
fn ncs_sweep_on_orientable_example_is_clean() {
    let file = fixture("genus2_twopants.surf");
    let out = run(&[
        "--format",
        "machine",
        "complex",
        "ncs",
        file.to_str().unwrap(),
        "--max-dim",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("violations=0"), "got:\n{text}");
}

#[test]
fn no_arguments_is_a_usage_error() {
    let out = run(&[]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn commensurable_rejects_a_single_selection() {
    let file = fixture("rn05_two_klein.surf");
    let out = run(&[
        "commensurable",
        file.to_str().unwrap(),
        "--select",
        "S0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("exactly two"));
}

#[test]
fn missing_file_is_a_model_error() {
    let out = run(&["classify", "/no/such/file.surf"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("/no/such/file.surf"));
}

#[test]
fn double_glued_slot_reports_the_offending_line() {
    let dir = std::env::temp_dir();
    let path = dir.join("geosub-cli-test-doubleglue.surf");
    std::fs::write(
        &path,
        "piece a genus=0 boundary=3 punctures=0\n\
         piece b genus=0 boundary=3 punctures=0\n\
         glue a.1 b.1\n\
         glue a.1 b.2\n",
    )
    .expect("temp file should be writable");
    let out = run(&["classify", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_of(&out);
    assert!(err.contains("line 4"), "got:\n{err}");
    assert!(err.contains("slot glued twice"), "got:\n{err}");
}

#[test]
fn machine_reports_are_byte_stable() {
    let file = fixture("rn05_two_klein.surf");
    let args = [
        "--format",
        "machine",
        "classify",
        file.to_str().unwrap(),
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);

    let seeded = [
        "--format",
        "machine",
        "--seed",
        "5",
        "oracle",
        "comm",
        "--count",
        "20",
    ];
    let first = run(&seeded);
    let second = run(&seeded);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    assert!(stdout_of(&first).contains("opposite_example=reproduced"));
}
