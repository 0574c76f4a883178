//! Runs `fracmaster validate --tolerance-profile strict` and reports one line
//! per criterion. Criterion 15 (determinism) reruns the suite inside the same
//! invocation, so this takes roughly two suite runs.

use std::io::Write;
use std::process::Command;

#[test]
fn acceptance_suite() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("validate");
    let output = Command::new(env!("CARGO_BIN_EXE_fracmaster"))
        .args(["validate", "--tolerance-profile", "strict", "--out"])
        .arg(&out)
        .output()
        .expect("run fracmaster");
    let stdout = String::from_utf8_lossy(&output.stdout);
    // Straight to the process stdout so the table shows even when the test passes.
    let mut console = std::io::stdout().lock();
    let rows: Vec<&str> = stdout.lines().filter(|l| l.starts_with("criterion")).collect();
    for line in &rows {
        writeln!(console, "{line}").unwrap();
    }
    console.flush().unwrap();
    drop(console);

    assert_eq!(rows.len(), 15, "stdout:\n{stdout}\nstderr:\n{}", String::from_utf8_lossy(&output.stderr));
    let bad = fracmaster::manifest::verify_manifest(&out).unwrap();
    assert!(bad.is_empty(), "manifest mismatch: {bad:?}");
    let failed: Vec<&str> = rows.iter().copied().filter(|l| !l.contains(" PASS ")).collect();
    assert!(failed.is_empty(), "failing criteria:\n{}", failed.join("\n"));
    assert_eq!(output.status.code(), Some(0));
}
