use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const CUBE: &str = r#"{"dim": 3, "vertices": [[0,0,0],[1,0,0],[0,1,0],[0,0,1],[1,1,0],[1,0,1],[0,1,1],[1,1,1]]}"#;
const OCTAGON_PRISM: &str = r#"{"dim": 3, "vertices": [
    [1,2,"-1/2"],[2,1,"-1/2"],[2,-1,"-1/2"],[1,-2,"-1/2"],[-1,-2,"-1/2"],[-2,-1,"-1/2"],[-2,1,"-1/2"],[-1,2,"-1/2"],
    [1,2,"1/2"],[2,1,"1/2"],[2,-1,"1/2"],[1,-2,"1/2"],[-1,-2,"1/2"],[-2,-1,"1/2"],[-2,1,"1/2"],[-1,2,"1/2"]]}"#;
const TWO_INTERVALS: &str = r#"{"boxes": [{"min": [0], "max": ["1/2"]}, {"min": [1], "max": ["3/2"]}]}"#;
const TWO_COSETS: &str = r#"{"type": "periodic", "basis": [[2]], "offsets": [[0], ["1/2"]]}"#;
const WEAK_MEASURE: &str = r#"{"components": [{"type": "lattice_atoms", "basis": [[2]],
    "offsets": [[0], ["1/2"], ["3/2"]], "weights": [1, 0.5, 0.5], "exclude_origin": true}]}"#;
const RING: &str = r#"{"boxes": [{"min":[0,0],"max":[3,1]},{"min":[0,2],"max":[3,3]},{"min":[0,1],"max":[1,2]},{"min":[2,1],"max":[3,2]}]}"#;

struct Dir(TempDir);

impl Dir {
    fn new() -> Dir {
        Dir(TempDir::new().unwrap())
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.0.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }
}

fn run(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectile")).args(args.iter().map(|a| a.as_ref())).output().unwrap()
}

fn report(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    v["report"].clone()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn cube_tiles() {
    let d = Dir::new();
    let p = d.file("cube.json", CUBE);
    let out = run(&[&"analyze", &p]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["verdict"], "tiles");
    assert!(r["belts"].as_array().unwrap().iter().all(|b| b["length"] == 4));
}

#[test]
fn octagonal_prism_fails_the_belt_condition() {
    let d = Dir::new();
    let p = d.file("oct.json", OCTAGON_PRISM);
    let out = run(&[&"analyze", &p]);
    assert_eq!(code(&out), 1);
    let r = report(&out);
    assert_eq!(r["failed_conditions"], serde_json::json!(["iv"]));
    assert!(r["belts"].as_array().unwrap().iter().any(|b| b["length"] == 8));

    let out = run(&[&"tile-lattice", &p]);
    assert_eq!(code(&out), 1);
    assert!(report(&out)["error"].is_string());
}

#[test]
fn cube_lattice_is_verified() {
    let d = Dir::new();
    let p = d.file("cube.json", CUBE);
    let out = run(&[&"tile-lattice", &p]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["check"]["pass"], true);
}

#[test]
fn two_intervals_spectrum() {
    let d = Dir::new();
    let r = d.file("omega.json", TWO_INTERVALS);
    let s = d.file("lambda.json", TWO_COSETS);
    let out = run(&[&"spectrum-check", &r, &s]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rep = report(&out);
    assert_eq!(rep["spectrum"]["orthogonality"]["pass"], true);
    assert!(rep["spectrum"]["completeness_residual"].as_f64().unwrap() < 1e-2);

    // Dropping a coset breaks completeness.
    let lattice = d.file("lattice.json", r#"{"type": "lattice", "basis": [[2]]}"#);
    assert_eq!(code(&run(&[&"spectrum-check", &r, &lattice])), 1);
}

#[test]
fn two_intervals_weak_tiling() {
    let d = Dir::new();
    let r = d.file("omega.json", TWO_INTERVALS);
    let m = d.file("mu.json", WEAK_MEASURE);
    let out = run(&[&"weak-tile-verify", &r, &m]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["support_violations"], serde_json::json!([]));

    let bad = d.file("bad.json", r#"{"components": [{"type": "atoms", "points": [["1/4"]], "weights": [1]}]}"#);
    assert_eq!(code(&run(&[&"weak-tile-verify", &r, &bad])), 1);
}

#[test]
fn two_coset_autocorrelation_properties() {
    let d = Dir::new();
    let r = d.file("omega.json", TWO_INTERVALS);
    let s = d.file("lambda.json", TWO_COSETS);
    let out = run(&[&"autocorr", &s, &"--window", &"8", &"--shape", &"cube", &"--region", &r]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let rep = report(&out);
    assert_eq!(rep["properties"]["pass"], true);
    let origin: Vec<&Value> = rep["atoms"].as_array().unwrap().iter().filter(|a| a["position"][0] == "0").collect();
    assert_eq!(origin.len(), 1);
    assert_eq!(origin[0]["weight"], 1.0);
}

#[test]
fn diffraction_of_a_periodic_autocorrelation() {
    let d = Dir::new();
    let gamma = d.file(
        "gamma.json",
        r#"{"components": [{"type": "lattice_atoms", "basis": [[2]], "offsets": [[0], ["1/2"], ["3/2"]], "weights": [1, 0.5, 0.5]}]}"#,
    );
    let out = run(&[&"diffraction", &gamma, &"--radius", &"3"]);
    assert_eq!(code(&out), 0);
    let atoms = report(&out)["atoms"].as_array().unwrap().clone();
    // Weights on Z/2 are c(t)/2 with c(t) = 1 + (e^{-πit} + e^{-3πit})/2, which vanishes at odd t.
    let weight = |t: &str| atoms.iter().find(|a| a["position"][0] == t).map(|a| a["weight"].as_f64().unwrap());
    assert!((weight("0").unwrap() - 1.0).abs() < 1e-12);
    assert!((weight("1/2").unwrap() - 0.5).abs() < 1e-12);
    assert!((weight("2").unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(weight("1"), None);
    assert_eq!(weight("-3"), None);

    // Positive weights, but the transform at 1 is 1 + 2(e^{-2πi/3} + e^{-4πi/3}) = -1.
    let neg = d.file(
        "neg.json",
        r#"{"components": [{"type": "lattice_atoms", "basis": [[1]], "offsets": [[0], ["1/3"], ["2/3"]], "weights": [1, 2, 2]}]}"#,
    );
    assert_eq!(code(&run(&[&"diffraction", &neg])), 1);

    let csv = run(&[&"diffraction", &gamma, &"--radius", &"1", &"--format", &"csv"]);
    assert_eq!(code(&csv), 0);
    assert!(String::from_utf8(csv.stdout).unwrap().starts_with("x0,weight\n"));
}

#[test]
fn ring_has_a_hole_certificate() {
    let d = Dir::new();
    let ring = d.file("ring.json", RING);
    let out = run(&[&"holes", &ring]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["certificate"]["witness_measure"], "1");

    let solid = d.file("solid.json", r#"{"boxes": [{"min": [0, 0], "max": [2, 1]}]}"#);
    let out = run(&[&"holes", &solid]);
    assert_eq!(code(&out), 1);
    assert_eq!(report(&out)["certificate_found"], false);
}

#[test]
fn transform_csv() {
    let d = Dir::new();
    let r = d.file("omega.json", TWO_INTERVALS);
    let out = run(&[&"ft", &r, &"--t", &"2", &"--t", &"-0.5", &"--format", &"csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t0,re,im,bound");
    for line in &lines[1..] {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(f[1].hypot(f[2]) < 1e-12, "{line}");
    }
}

#[test]
fn malformed_input_names_the_field() {
    let d = Dir::new();
    let p = d.file("bad.json", r#"{"dim": 3, "vertices": [[0,0,0],[1,0,0],[0,"x",0],[0,0,1]]}"#);
    let out = run(&[&"analyze", &p]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad.json") && err.contains("vertices[2][1]"), "{err}");
    assert!(out.stdout.is_empty());

    let m = d.file("m.json", r#"{"components": [{"type": "uniform", "density": -1}]}"#);
    let r = d.file("omega.json", TWO_INTERVALS);
    let err = String::from_utf8(run(&[&"weak-tile-verify", &r, &m]).stderr).unwrap();
    assert!(err.contains("components[0]"), "{err}");

    assert_eq!(code(&run(&[&"analyze", &Path::new("/nonexistent/x.json")])), 2);
    assert_eq!(code(&run(&[&"holes", &r, &"--format", &"csv"])), 2);
    assert_eq!(code(&run(&[&"frobnicate"])), 2);
}

#[test]
fn output_is_deterministic() {
    let d = Dir::new();
    let ring = d.file("ring.json", RING);
    let s = d.file("lambda.json", TWO_COSETS);
    let out_a = d.0.path().join("a.json");
    let out_b = d.0.path().join("b.json");
    for o in [&out_a, &out_b] {
        assert_eq!(code(&run(&[&"holes", &ring, &"--out", o])), 0);
    }
    assert_eq!(std::fs::read(&out_a).unwrap(), std::fs::read(&out_b).unwrap());
    let a = run(&[&"autocorr", &s, &"--window", &"6"]);
    let b = run(&[&"autocorr", &s, &"--window", &"6"]);
    assert_eq!(a.stdout, b.stdout);
}
