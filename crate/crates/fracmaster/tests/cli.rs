use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fracmaster::manifest::{verify_manifest, MANIFEST_NAME};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracmaster"))
}

fn run_cli(sub: &str, config: &Path, out: &Path) -> Output {
    bin().args([sub, "--threads", "1", "--config"]).arg(config).arg("--out").arg(out).output().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const SOLVE: &str = r#"
schema_version = 1
kind = "solve"
s = 0.4
seed = 3

[domain]
lengths = [3.141592653589793]
bc = "dirichlet"
grid_size = 33
modes = 16

[time]
period = 100.0
samples = 16

[forcing]
profile = "band_limited"
kmax = 6
mmax = 3

[solver]
path = "subordination"
"#;

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn solve_is_byte_reproducible_and_hashed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "solve.toml", SOLVE);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = run_cli("solve", &cfg, out);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(verify_manifest(out).unwrap().is_empty());
    }
    assert_eq!(fs::read(a.join(MANIFEST_NAME)).unwrap(), fs::read(b.join(MANIFEST_NAME)).unwrap());
    for name in ["forcing.csv", "solution.csv", "solution.json"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(a.join("solution.json")).unwrap()).unwrap();
    assert!(summary["residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn tampered_artifacts_fail_verification() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "solve.toml", SOLVE);
    let out = dir.path().join("o");
    assert_eq!(run_cli("solve", &cfg, &out).status.code(), Some(0));
    fs::write(out.join("solution.csv"), b"t,x,re,im\n").unwrap();
    fs::remove_file(out.join("forcing.csv")).unwrap();
    let mut bad = verify_manifest(&out).unwrap();
    bad.sort();
    assert_eq!(bad, vec!["forcing.csv".to_string(), "solution.csv".to_string()]);
}

#[test]
fn halfspace_table_holds_the_critical_value_at_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "h.toml",
        "schema_version = 1\nkind = \"halfspace\"\ns = 0.5\n[halfspace]\nxs = [0.5, 1.0, 2.0]\n",
    );
    let out = dir.path().join("h");
    let o = run_cli("halfspace", &cfg, &out);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let table = fs::read_to_string(out.join("profile.csv")).unwrap();
    let row = table.lines().find(|l| l.starts_with("1.0000000000000000e0,")).unwrap();
    let u: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(u, 2.0 * std::f64::consts::LN_2);
    assert!((u - 1.386294).abs() < 1e-6);
}

#[test]
fn schema_errors_exit_with_usage_and_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let cases = [
        (SOLVE.replace("s = 0.4", "s = 1.5"), "s:"),
        (SOLVE.replace("grid_size = 33", "grid_size = \"big\""), "domain.grid_size"),
        (SOLVE.replace("kmax = 6", "kmax = 6\nextra = 1"), "forcing"),
        (SOLVE.replace("schema_version = 1", "schema_version = 2"), "schema_version"),
        (SOLVE.replace("path = \"subordination\"", "path = \"magic\""), "solver.path"),
    ];
    for (text, field) in cases {
        let cfg = write_config(dir.path(), "bad.toml", &text);
        let o = run_cli("solve", &cfg, &out);
        assert_eq!(o.status.code(), Some(1), "{field}: {}", stderr(&o));
        assert!(stderr(&o).contains(field), "{field}: {}", stderr(&o));
    }
    let cfg = write_config(dir.path(), "ok.toml", SOLVE);
    assert_eq!(run_cli("kernel", &cfg, &out).status.code(), Some(1));
    assert_eq!(bin().args(["solve", "--out"]).arg(&out).output().unwrap().status.code(), Some(1));
    assert_eq!(bin().arg("frobnicate").output().unwrap().status.code(), Some(1));
}

#[test]
fn numerical_failures_exit_with_two() {
    // A one-unit window is far too short for the subordination integral.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "w.toml", &SOLVE.replace("period = 100.0", "period = 1.0"));
    let o = run_cli("solve", &cfg, &dir.path().join("o"));
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("time window too small"));
}

#[test]
fn sampled_table_forcing_matches_the_named_mode() {
    let dir = tempfile::tempdir().unwrap();
    let mode = SOLVE.replace("profile = \"band_limited\"\nkmax = 6\nmmax = 3", "profile = \"mode\"\nk = 2\nm = 1");
    let cfg = write_config(dir.path(), "mode.toml", &mode);
    let a = dir.path().join("a");
    assert_eq!(run_cli("solve", &cfg, &a).status.code(), Some(0));
    // Rebuild the forcing as a (time × node) table from the emitted CSV.
    let text = fs::read_to_string(a.join("forcing.csv")).unwrap();
    let vals: Vec<String> =
        text.lines().skip(2).map(|l| l.split(',').nth(2).unwrap().to_string()).collect::<Vec<_>>();
    let rows: Vec<String> = vals.chunks(33).map(|c| c.join(",")).collect();
    fs::write(dir.path().join("f.csv"), rows.join("\n")).unwrap();
    let table = SOLVE.replace("profile = \"band_limited\"\nkmax = 6\nmmax = 3", "profile = \"table\"\npath = \"f.csv\"");
    let cfg = write_config(dir.path(), "table.toml", &table);
    let b = dir.path().join("b");
    let o = run_cli("solve", &cfg, &b);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(fs::read(a.join("solution.csv")).unwrap(), fs::read(b.join("solution.csv")).unwrap());
}

#[test]
fn kernel_extend_and_regularity_kinds_run() {
    let dir = tempfile::tempdir().unwrap();
    let kernel = r#"
schema_version = 1
kind = "kernel"
s = 0.5
[domain]
lengths = [3.141592653589793]
bc = "neumann"
grid_size = 129
modes = 64
[kernel]
taus = [0.1, 1.0]
xs = [0.0, 1.0]
zs = [0.5, 2.0]
"#;
    let out = dir.path().join("k");
    let o = run_cli("kernel", &write_config(dir.path(), "k.toml", kernel), &out);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let diag: serde_json::Value = serde_json::from_slice(&fs::read(out.join("diagnostics.json")).unwrap()).unwrap();
    for m in diag["masses"].as_array().unwrap() {
        assert!((m[2].as_f64().unwrap() - 1.0).abs() < 1e-8);
    }
    assert_eq!(fs::read_to_string(out.join("kernel_table.csv")).unwrap().lines().count(), 2 + 8);

    let extend = SOLVE
        .replace("kind = \"solve\"", "kind = \"extend\"")
        .replace("s = 0.4", "s = 0.5")
        .replace("[solver]\npath = \"subordination\"", "[extend]\nlevels = 64\nslice_levels = [0, 64]");
    let out = dir.path().join("e");
    let o = run_cli("extend", &write_config(dir.path(), "e.toml", &extend), &out);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(out.join("levels/level_0000.csv").exists() && out.join("levels/level_0064.csv").exists());
    let flux: serde_json::Value = serde_json::from_slice(&fs::read(out.join("flux_report.json")).unwrap()).unwrap();
    assert!(flux["relative_error"].as_f64().unwrap() < 1e-3);

    let regularity = r#"
schema_version = 1
kind = "regularity"
s = 0.75
[domain]
lengths = [1.0]
bc = "dirichlet"
grid_size = 1025
modes = 1023
[time]
period = 16.0
samples = 64
[forcing]
profile = "bump"
[regularity]
center_t = 8.0
center_x = [0.5]
class = "linear"
boundary = { node = 0, direction = [1, 0], model = "pure_power" }
"#;
    let out = dir.path().join("r");
    let o = run_cli("regularity", &write_config(dir.path(), "r.toml", regularity), &out);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rep: serde_json::Value = serde_json::from_slice(&fs::read(out.join("regularity_report.json")).unwrap()).unwrap();
    assert!(rep["gradient"].is_object());
    assert!(fs::read_to_string(out.join("plotdata/boundary.csv")).unwrap().contains("model_xlog"));
    assert!(verify_manifest(&out).unwrap().is_empty());
}

#[test]
fn shipped_configs_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(root).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            fracmaster::ExperimentConfig::from_path(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            n += 1;
        }
    }
    assert_eq!(n, 6);
}
