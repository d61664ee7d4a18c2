use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use anisowf::experiment::{predicted_relation, KernelRegime, PropagationReport};
use anisowf::format::read_signal;
use anisowf::signal::hermite;
use anisowf::wavefront::DecayProfile;
use anisowf::{project_s, DirectionSet, Grid, PolySymbol, WfRelation};

const SCHRODINGER: &str = r#"{"name": "free", "signal": {"kind": "impulse", "band": 135.0},
  "grid": {"d": 1, "n": 131072, "L": 540.0}, "s": 1.0,
  "evolution": {"symbol": {"d": 1, "m": 2, "coeffs": {"(2)": 1.0}}, "t": 0.25}}"#;

fn anisowf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anisowf")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn spec_file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(sub: &str, spec: &Path, extra: &[&str]) -> Output {
    let mut args = vec![sub, "--spec", spec.to_str().unwrap()];
    args.extend_from_slice(extra);
    anisowf(&args)
}

#[test]
fn generate_writes_angb_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(
        dir.path(),
        "h.json",
        r#"{"name": "h3", "signal": {"kind": "hermite", "k": 3}, "grid": {"d": 1, "n": 256, "L": 10}}"#,
    );
    let out = dir.path().join("out");
    let o = run("generate", &spec, &["--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let u = read_signal(&out.join("h3.angb")).unwrap();
    assert_eq!(u, hermite(Grid::new(1, 256, 10.0).unwrap(), 3));
    let csv = fs::read_to_string(out.join("h3.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("i0,x0,re,im"));
    assert_eq!(csv.lines().count(), 257);
}

#[test]
fn overrides_change_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(dir.path(), "g.json", r#"{"name": "g", "out": "unused"}"#);
    let out = dir.path().join("o");
    let o = run("generate", &spec, &["--out", out.to_str().unwrap(), "--grid-n", "128", "--grid-L", "6"]);
    assert_eq!(code(&o), 0);
    let u = read_signal(&out.join("g.angb")).unwrap();
    assert_eq!((u.grid.n, u.grid.l), (128, 6.0));
}

#[test]
fn analyze_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(
        dir.path(),
        "c.json",
        r#"{"name": "c", "signal": {"kind": "poly_chirp", "c": 0.5, "m": 2}, "grid": {"d": 1, "n": 4096, "L": 64}}"#,
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(code(&run("analyze", &spec, &["--out", a.to_str().unwrap()])), 0);
    assert_eq!(code(&run("analyze", &spec, &["--out", b.to_str().unwrap(), "--threads", "1"])), 0);
    let ja = fs::read(a.join("c_wf.json")).unwrap();
    assert_eq!(ja, fs::read(b.join("c_wf.json")).unwrap());
    assert_eq!(fs::read(a.join("c_wf.csv")).unwrap(), fs::read(b.join("c_wf.csv")).unwrap());
    let set: DirectionSet = serde_json::from_slice(&ja).unwrap();
    assert!(set.is_consistent() && set.classified().count() > 0);
}

#[test]
fn verify_propagation_passes_and_fails_on_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(dir.path(), "free.json", SCHRODINGER);
    let out = dir.path().join("out");
    let o = run("verify-propagation", &spec, &["--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rep: PropagationReport = serde_json::from_slice(&fs::read(out.join("free_propagation.json")).unwrap()).unwrap();
    assert!(rep.pass && rep.recompute_pass());
    for tag in ["initial", "evolved", "transported"] {
        assert!(out.join(format!("free_{tag}.csv")).exists());
    }

    let o = run("verify-propagation", &spec, &["--out", out.to_str().unwrap(), "--tolerance-deg", "0.01"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
    let rep: PropagationReport = serde_json::from_slice(&fs::read(out.join("free_propagation.json")).unwrap()).unwrap();
    assert!(!rep.pass && !rep.recompute_pass());
}

#[test]
fn evolve_writes_the_evolved_signal() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(
        dir.path(),
        "e.json",
        r#"{"name": "e", "grid": {"d": 1, "n": 512, "L": 16}, "evolution": {"symbol": {"d": 1, "m": 2, "coeffs": {"(2)": 1.0}}, "t": 0.2}}"#,
    );
    let out = dir.path().join("out");
    assert_eq!(code(&run("evolve", &spec, &["--out", out.to_str().unwrap()])), 0);
    let u = read_signal(&out.join("e_evolved.angb")).unwrap();
    assert!((u.norm() - 1.0).abs() < 1e-10);
}

#[test]
fn compose_check_against_an_expected_set() {
    let dir = tempfile::tempdir().unwrap();
    let p = PolySymbol::monomial(2).unwrap();
    let rel = WfRelation {
        s: 1.0,
        threshold: -8.0,
        entries: predicted_relation(&p, 1.0, 1.0, KernelRegime::Graph, 720)
            .into_iter()
            .map(|z| DecayProfile::marked(z, 0.0, -8.0))
            .collect(),
    };
    let set_of = |dirs: Vec<Vec<f64>>| DirectionSet {
        s: 1.0,
        threshold: -8.0,
        entries: dirs.into_iter().map(|d| DecayProfile::marked(d, 0.0, -8.0)).collect(),
    };
    let write = |name: &str, text: String| fs::write(dir.path().join(name), text).unwrap();
    write("rel.json", serde_json::to_string(&rel).unwrap());
    write("set.json", serde_json::to_string(&set_of(vec![vec![0.0, 1.0]])).unwrap());
    write("good.json", serde_json::to_string(&set_of(vec![project_s(&[2.0], &[1.0], 1.0).unwrap()])).unwrap());
    write("bad.json", serde_json::to_string(&set_of(vec![vec![0.0, -1.0]])).unwrap());

    let spec = |expected: &str| {
        format!(
            r#"{{"name": "c", "tolerance_deg": 1.0, "compose": {{"relation": "rel.json", "set": "set.json", "expected": "{expected}"}}}}"#
        )
    };
    let out = dir.path().join("out");
    let good = spec_file(dir.path(), "good_spec.json", &spec("good.json"));
    assert_eq!(code(&run("compose-check", &good, &["--out", out.to_str().unwrap()])), 0);
    assert!(out.join("c_composed.json").exists());
    let bad = spec_file(dir.path(), "bad_spec.json", &spec("bad.json"));
    assert_eq!(code(&run("compose-check", &bad, &["--out", out.to_str().unwrap()])), 1);

    write("rel.json", "{ not json".into());
    assert_eq!(code(&run("compose-check", &good, &["--out", out.to_str().unwrap()])), 3);
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = out.to_str().unwrap();
    let unknown = spec_file(dir.path(), "u.json", r#"{"name": "u", "colour": "blue"}"#);
    assert_eq!(code(&run("generate", &unknown, &["--out", o])), 2);
    let free = spec_file(dir.path(), "free.json", SCHRODINGER);
    assert_eq!(code(&run("verify-propagation", &free, &["--out", o, "--s", "2"])), 2);
    assert_eq!(code(&run("generate", &free, &["--out", o, "--grid-n", "0"])), 2);
    assert_eq!(code(&run("generate", &free, &["--out", o, "--threads", "0"])), 2);
    let far = spec_file(dir.path(), "far.json", &SCHRODINGER.replace("\"t\": 0.25", "\"t\": 5.0"));
    let r = run("evolve", &far, &["--out", o]);
    assert_eq!(code(&r), 2);
    assert!(String::from_utf8_lossy(&r.stderr).contains("L/4"));
    assert!(!out.join("free_evolved.angb").exists());
    let no_evolution = spec_file(dir.path(), "n.json", r#"{"name": "n"}"#);
    assert_eq!(code(&run("evolve", &no_evolution, &["--out", o])), 2);
}

#[test]
fn io_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run("generate", &dir.path().join("missing.json"), &[])), 3);
    let spec = spec_file(dir.path(), "g.json", r#"{"name": "g", "grid": {"d": 1, "n": 64, "L": 6}}"#);
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    assert_eq!(code(&run("generate", &spec, &["--out", blocker.to_str().unwrap()])), 3);
    let missing_input =
        spec_file(dir.path(), "f.json", r#"{"name": "f", "signal": {"kind": "file", "path": "nope.angb"}}"#);
    assert_eq!(code(&run("analyze", &missing_input, &["--out", dir.path().to_str().unwrap()])), 3);
}
