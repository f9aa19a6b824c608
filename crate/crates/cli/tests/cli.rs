//! End-to-end tests of the command-line interface: exit codes, output
//! stability across runs, and round-tripping of the exported formats.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thickening"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

struct Workdir(PathBuf);

impl Workdir {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("thickening-test-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Workdir(dir)
    }

    fn file(&self, name: &str, content: &str) -> PathBuf {
        let path = self.0.join(name);
        std::fs::write(&path, content).unwrap();
        path
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }
}

impl Drop for Workdir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

const Z3: &str = "0,1,1\n1,0,1\n1,1,0\n";
const Z4: &str = "0,1,1,1\n1,0,1,1\n1,1,0,1\n1,1,1,0\n";

fn arg(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn diagram_matches_closed_form_and_is_byte_stable() {
    let dir = Workdir::new("diagram");
    let z3 = dir.file("z3.csv", Z3);
    let args = [
        "diagram", "--space", arg(&z3), "--kind", "cech", "--p", "1", "--max-dim", "2",
        "--out", "json",
    ];
    let first = run(&args);
    assert!(first.status.success());
    let text = stdout(&first);
    assert!(text.contains("\"degree\": 0"));
    assert!(text.contains("[0, 0.5], [0, 0.5], [0, \"inf\"]"));
    assert!(text.contains("[0.5, 0.666666666667]"));

    let second = run(&args);
    assert_eq!(first.stdout, second.stdout, "output must be byte-stable");
}

#[test]
fn diagram_json_round_trips() {
    let dir = Workdir::new("roundtrip");
    let z4 = dir.file("z4.csv", Z4);
    let out = run(&[
        "diagram", "--space", arg(&z4), "--kind", "vr", "--p", "2", "--max-dim", "3",
        "--out", "json",
    ]);
    assert!(out.status.success());
    let exported = stdout(&out);
    let parsed = thickening::io::diagram_from_json(&exported).unwrap();
    assert_eq!(thickening::io::diagram_to_json(&parsed), exported);

    let csv = run(&[
        "diagram", "--space", arg(&z4), "--kind", "vr", "--p", "2", "--max-dim", "3",
        "--out", "csv",
    ]);
    let exported_csv = stdout(&csv);
    let parsed_csv = thickening::io::diagram_from_csv(&exported_csv).unwrap();
    assert_eq!(thickening::io::diagram_to_csv(&parsed_csv), exported_csv);
}

#[test]
fn missing_input_exits_two_with_name() {
    let out = run(&["diagram", "--space", "no-such-file.csv", "--p", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("InputNotFound"));
}

#[test]
fn invalid_matrix_exits_two_with_error_name() {
    let dir = Workdir::new("invalid");
    let bad = dir.file("bad.csv", "0,3\n3,1\n");
    let out = run(&["diagram", "--space", arg(&bad), "--p", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("AsymmetricMatrix") || err.contains("NonzeroDiagonal"));
}

#[test]
fn oracle_zn_agrees_with_computed_diagram() {
    let dir = Workdir::new("oracle");
    let z4 = dir.file("z4.csv", Z4);
    let oracle = run(&["oracle", "zn", "--n", "3", "--p", "2"]);
    let computed = run(&[
        "diagram", "--space", arg(&z4), "--kind", "cech", "--p", "2", "--max-dim", "3",
        "--out", "json",
    ]);
    assert!(oracle.status.success() && computed.status.success());
    let a = thickening::io::diagram_from_json(&stdout(&oracle)).unwrap();
    let b = thickening::io::diagram_from_json(&stdout(&computed)).unwrap();
    assert!(a.approx_eq(&b, 1e-6));
}

#[test]
fn oracle_single_linkage_derives_scale() {
    let dir = Workdir::new("sl");
    let z3 = dir.file("z3.csv", Z3);
    let out = run(&["oracle", "single-linkage", "--space", arg(&z3), "--scale", "auto", "--p", "2"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("0.707106781187"));
    let diagram = thickening::io::diagram_from_json(&stdout(&out)).unwrap();
    assert_eq!(diagram.intervals(0).len(), 3);
}

#[test]
fn compare_self_is_zero_and_certified() {
    let dir = Workdir::new("self");
    let z3a = dir.file("a.csv", Z3);
    let z3b = dir.file("b.csv", Z3);
    let corr = dir.file("corr.csv", "phi,psi\n0,0\n1,1\n2,2\n");
    let out = run(&[
        "compare", "--space", arg(&z3a), "--space", arg(&z3b), "--kind", "cech", "--p", "1",
        "--degree", "0", "--corr", arg(&corr),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("value=0\n") || text.contains("value=0 "));
    assert!(text.contains("PASS"));
}

#[test]
fn compare_perturbed_within_epsilon() {
    let dir = Workdir::new("perturb");
    let base = dir.file("x.csv", "0,1,1.4\n1,0,1.2\n1.4,1.2,0\n");
    let eps = 0.02;
    let shifted = dir.file("y.csv", "0,1.02,1.38\n1.02,0,1.22\n1.38,1.22,0\n");
    let corr = dir.file("corr.csv", "0,0\n1,1\n2,2\n");
    let out = run(&[
        "compare", "--space", arg(&base), "--space", arg(&shifted), "--kind", "vr", "--p", "2",
        "--degree", "0", "--corr", arg(&corr),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let value: f64 = text
        .lines()
        .next()
        .unwrap()
        .split("value=")
        .nth(1)
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!(value <= eps + 1e-9);
    assert!(text.contains("PASS"));
}

#[test]
fn compare_z3_z4_matches_closed_form() {
    let dir = Workdir::new("zz");
    let z3 = dir.file("z3.csv", Z3);
    let z4 = dir.file("z4.csv", Z4);
    let out = run(&[
        "compare", "--space", arg(&z3), "--space", arg(&z4), "--kind", "cech", "--p", "1",
        "--degree", "1",
    ]);
    assert!(out.status.success());
    // One unmatched degree-1 interval: (1/2)(2/3 - 1/2) = 1/12.
    assert!(stdout(&out).contains("value=0.0833333333333"));
}

#[test]
fn unknown_oracle_exits_two() {
    let out = run(&["oracle", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classical_kind_equals_vr_at_infinity() {
    let dir = Workdir::new("classical");
    let z4 = dir.file("z4.csv", Z4);
    let classical = run(&[
        "diagram", "--space", arg(&z4), "--kind", "classical", "--max-dim", "3", "--out", "json",
    ]);
    let vr_inf = run(&[
        "diagram", "--space", arg(&z4), "--kind", "vr", "--p", "inf", "--max-dim", "3",
        "--out", "json",
    ]);
    assert!(classical.status.success() && vr_inf.status.success());
    assert_eq!(classical.stdout, vr_inf.stdout);
}

#[test]
fn audit_sphere_fine_passes_coarse_fails() {
    let fine = run(&["audit-sphere", "--n-dim", "1", "--count", "24", "--p", "2", "--degree", "1"]);
    assert!(
        fine.status.success(),
        "fine audit failed: {}",
        stdout(&fine)
    );
    assert!(stdout(&fine).contains("certified: PASS"));

    let coarse = run(&["audit-sphere", "--n-dim", "1", "--count", "4", "--p", "2", "--degree", "1"]);
    assert_eq!(coarse.status.code(), Some(3));
    assert!(stdout(&coarse).contains("slack too large"));

    let h0 = run(&["audit-sphere", "--n-dim", "1", "--count", "24", "--p", "2", "--degree", "0"]);
    assert!(h0.status.success());
    assert!(stdout(&h0).contains("infinite classes: 1"));
}

#[test]
fn transport_reports_value_and_plan() {
    let dir = Workdir::new("transport");
    let z2 = dir.file("z2.csv", "0,1\n1,0\n");
    let alpha = dir.file("a.csv", "0.3,0.7\n");
    let beta = dir.file("b.json", "{\"weights\": [0.6, 0.4]}");
    let out = run(&[
        "transport", "--space", arg(&z2), "--alpha", arg(&alpha), "--beta", arg(&beta),
        "--q", "1", "--plan", "-",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("value=0.3"));
    assert!(text.contains("\"plan\""));
}

#[test]
fn svg_output_written_atomically() {
    let dir = Workdir::new("svg");
    let z3 = dir.file("z3.csv", Z3);
    let target = dir.path("diagram.svg");
    let out = run(&[
        "diagram", "--space", arg(&z3), "--kind", "cech", "--p", "1", "--max-dim", "2",
        "--out", "svg", "--output", arg(&target),
    ]);
    assert!(out.status.success());
    let svg = std::fs::read_to_string(&target).unwrap();
    assert!(svg.starts_with("<svg"));
    // No leftover staging files.
    let leftovers: Vec<_> = std::fs::read_dir(&dir.0)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().contains(".tmp-"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn complex_export_as_json_lines() {
    let dir = Workdir::new("complex");
    let z3 = dir.file("z3.csv", Z3);
    let target = dir.path("complex.jsonl");
    let out = run(&[
        "diagram", "--space", arg(&z3), "--kind", "cech", "--p", "1", "--max-dim", "2",
        "--emit-complex", arg(&target),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&target).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7); // 3 vertices, 3 edges, 1 triangle
    assert!(lines[0].contains("\"simplex\""));
    assert!(text.contains("0.666666666667"));
}

#[test]
fn thread_override_is_accepted() {
    let dir = Workdir::new("threads");
    let z3 = dir.file("z3.csv", Z3);
    let out = bin()
        .env("THICKENING_THREADS", "2")
        .args(["diagram", "--space", arg(&z3), "--kind", "cech", "--p", "1", "--max-dim", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
}
