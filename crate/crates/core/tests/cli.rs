use std::path::Path;
use std::process::{Command, Output};

fn qsmatch(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsmatch"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .to_string()
}

#[test]
fn construct_prints_reference_i_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = qsmatch(&["construct", "--z1", "0,1", "--overlap2", "0.9", "--json", "m.json"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    let eps: f64 = field(&text, "epsilon").parse().unwrap();
    assert!((eps - 1.0 / 3.0).abs() < 1e-12);
    let r: f64 = field(&text, "julia_radius").parse().unwrap();
    assert!((r - 0.75).abs() < 1e-12);
    assert_eq!(field(&text, "partner"), "0,-1");
    let doc = qsmatch::document::load_matcher(&dir.path().join("m.json")).unwrap();
    assert!((doc.spec().epsilon() - eps).abs() < 1e-15);
}

#[test]
fn construct_line_case_and_precision() {
    let dir = tempfile::tempdir().unwrap();
    let o = qsmatch(&["construct", "--z1", "1,0", "--overlap2", "0.5", "--precision", "5"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("julia_line:"));
    assert_eq!(field(&text, "epsilon"), "1");
}

#[test]
fn match_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |z0: &str| stdout(&qsmatch(&["match", "--z1", "0,1", "--overlap2", "0.9", "--z0", z0], dir.path()));
    assert_eq!(run("0,1").trim(), "MATCH k=0");
    assert_eq!(run("0,-1").trim(), "NOMATCH k=0");
    assert!(run("inf").starts_with("NOMATCH k="));
    assert!(run("0.2,0.8").starts_with("MATCH k="));
    assert!(run("-0.5,0.2").starts_with("NOMATCH k="));
    // the repelling fixed point never leaves
    let o = qsmatch(
        &["match", "--z1", "0,1", "--overlap2", "0.9", "--z0", "0.6,0.8", "--max-iter", "5"],
        dir.path(),
    );
    assert_eq!(stdout(&o).trim(), "UNDECIDED");
}

#[test]
fn synth_simulate_resources() {
    let dir = tempfile::tempdir().unwrap();
    for (file, extra) in [("g.json", None), ("d.json", Some("--decomposed"))] {
        let mut args = vec!["synth", "--z1", "0,1", "--overlap2", "0.9", "--out", file];
        args.extend(extra);
        let o = qsmatch(&args, dir.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let unit: f64 = field(&stdout(&o), "unitarity_error").parse().unwrap();
        assert!(unit < 1e-12);

        let o = qsmatch(&["simulate", "--gate", file, "--z0", "0.3,0.5", "--steps", "6"], dir.path());
        assert!(o.status.success());
        let text = stdout(&o);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 8);
        assert_eq!(lines[0], "step,re,im,success_prob,overlap2_reference,overlap2_partner");
        let last: Vec<f64> = lines[7].split(',').map(|v| v.parse().unwrap()).collect();
        // overlap² 0.84 with the reference: flows to the partner
        assert!(last[5] > 0.994);

        let o = qsmatch(&["resources", "--gate", file, "--z0", "0,0.9", "--steps", "3"], dir.path());
        let r: f64 = field(&stdout(&o), "expected_inputs").parse().unwrap();
        assert!(r >= 8.0 && r.is_finite());
    }
}

#[test]
fn sampled_simulation_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    qsmatch(&["synth", "--z1", "0,1", "--overlap2", "0.9", "--out", "g.json"], dir.path());
    let args = ["simulate", "--gate", "g.json", "--z0", "0.3,0.5", "--steps", "4", "--sample", "--seed", "9"];
    let a = qsmatch(&args, dir.path());
    let b = qsmatch(&args, dir.path());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
}

#[test]
fn raster_writes_images_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = qsmatch(
        &[
            "raster", "--z1", "0,1", "--overlap2", "0.9", "--out", "b.pgm", "--res", "40", "30", "--window",
            "-0.1,1.2,1.5", "--csv", "b.csv",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let img = std::fs::read(dir.path().join("b.pgm")).unwrap();
    assert!(img.starts_with(b"P5\n40 30\n255\n"));
    assert_eq!(img.len(), 13 + 40 * 30);
    assert!(dir.path().join("b.region.pgm").exists());
    let csv = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert_eq!(csv.lines().count(), 40 * 30 + 1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| qsmatch(args, dir.path()).status.code();
    assert_eq!(code(&["match", "--z1", "0,1", "--overlap2", "1.5", "--z0", "0,0"]), Some(2));
    assert_eq!(code(&["match", "--z1", "0,1", "--overlap2", "0.9", "--z0", "0"]), Some(2));
    assert_eq!(code(&["match", "--z1", "0,1", "--overlap2", "0.9", "--z0", "0,0", "--target2", "0.5"]), Some(2));
    assert_eq!(code(&["raster", "--z1", "0,1", "--overlap2", "0.9", "--out", "x.pgm", "--res", "1", "5"]), Some(2));
    assert_eq!(code(&["simulate", "--gate", "missing.json", "--z0", "0,0", "--steps", "2"]), Some(2));
    assert_eq!(code(&["construct", "--z1", "0,1", "--overlap2", "0.9", "--precision", "30"]), Some(2));
    assert_eq!(code(&["bogus"]), Some(2));

    // a gate whose kept branch vanishes for |1>|1>
    let m = *qsmatch::gate::contraction_gate(0.5).unwrap().matrix();
    let bad = qsmatch::TwoQubitGate::new([m[1], m[2], m[3], m[0]]).unwrap();
    qsmatch::document::save_gate(&qsmatch::document::GateDocument::two_qubit(&bad), &dir.path().join("bad.json")).unwrap();
    let o = qsmatch(&["simulate", "--gate", "bad.json", "--z0", "inf", "--steps", "2"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("step 1"));
}
