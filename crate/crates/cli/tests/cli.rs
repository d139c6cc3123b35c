use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("ndyn").chain(args.iter().copied());
    let code = ndyn_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    serde_json::from_str(&out).unwrap()
}

fn c(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-10 * (1.0 + b.abs())
}

/// Compare with a checked-in file; set `NDYN_BLESS=1` to rewrite it.
fn check_golden(name: &str, actual: &str) {
    let path = golden(name);
    if std::env::var_os("NDYN_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "output differs from {}", path.display());
}

#[test]
fn build_chebyshev_at_zero() {
    let v = json(&["build", "--method", "chebyshev-halley", "--param", "alpha=0", "--d", "2", "--c", "1"]);
    let f = &v["form"];
    assert_eq!(f["n"], 3);
    assert_eq!(f["k"], 1);
    assert_eq!(c(&f["a"][0]), (2.0, 0.0));
    assert_eq!(f["degenerate"], false);
}

#[test]
fn build_from_scheme_file_matches_catalog() {
    let from_file = json(&["build", "--scheme-file", &data("halley.scheme"), "--param", "alpha=0.25", "--c", "2i"]);
    let from_catalog = json(&["build", "--method", "chebyshev-halley", "--param", "alpha=0.25", "--c", "2i"]);
    assert_eq!(from_file["form"], from_catalog["form"]);
    // a_1 = 2 - 2 alpha
    assert!(close(c(&from_file["form"]["a"][0]).0, 1.5));
}

#[test]
fn build_above_quadratic_has_no_form() {
    let v = json(&["build", "--method", "newton", "--d", "3"]);
    assert!(v["form"].is_null());
    assert_eq!(v["map"]["degree"], 3);
}

#[test]
fn stability_king() {
    let v = json(&["stability", "--method", "king"]);
    let z1 = &v["z=1"];
    assert_eq!(z1["kind"], "circle");
    assert_eq!(z1["side"], "inside");
    assert!(close(c(&z1["center"]).0, -226.0 / 55.0));
    assert!(close(z1["radius"].as_f64().unwrap(), 16.0 / 55.0));
    assert_eq!(c(&z1["superattracting"]), (-4.0, 0.0));
    assert_eq!(v["z=-1"]["kind"], "not-applicable");
}

#[test]
fn stability_m4_reports_beta_boundary() {
    let v = json(&["stability", "--method", "m4"]);
    assert_eq!(v["parameter"], "alpha");
    let b = &v["boundaries_in_beta"]["z=1"];
    assert_eq!(b["shape"], "circle");
    // |alpha + 35| = 128 meets the real axis at -163 and 93; beta = 1/(5 - alpha)
    let (lo, hi) = (1.0 / (5.0 + 163.0), 1.0 / (5.0 - 93.0));
    assert!(close(c(&b["center"]).0, 0.5 * (lo + hi)));
    assert!(close(b["radius"].as_f64().unwrap(), 0.5 * (lo - hi)));
}

#[test]
fn analyze_s5_two_cycle() {
    let v = json(&["analyze", "--method", "os5", "--param", "a=0.3"]);
    assert_eq!(v["report"]["minus_one"], "two-cycle");
    assert_eq!(v["report"]["sign"], -1);
    assert_eq!(v["iota_symmetric"], true);
    assert!(v["lambda_odd"].is_null());
}

#[test]
fn analyze_reports_certificates() {
    let v = json(&["analyze", "--method", "king", "--param", "beta=1", "--d", "3", "--c", "0.5"]);
    assert_eq!(v["lambda_odd"], true);
    assert!(v["form"].is_null());
    let v = json(&["analyze", "--method", "steffensen"]);
    assert_eq!(v["lambda_odd"], false);
    assert!(v["form"].is_null());
    assert!(v["form_error"].as_str().unwrap().contains("palindromic"));
}

#[test]
fn golden_outputs() {
    for (file, args) in [
        ("catalog.txt", vec!["catalog"]),
        ("build-chebyshev-halley.json", vec!["build", "--method", "chebyshev-halley", "--param", "alpha=0"]),
        ("build-os5.json", vec!["build", "--method", "os5", "--param", "a=0"]),
        ("stability-king.json", vec!["stability", "--method", "king"]),
        ("stability-chebyshev-halley.json", vec!["stability", "--method", "chebyshev-halley"]),
        ("stability-c-family.json", vec!["stability", "--method", "c-family"]),
    ] {
        let (code, out, err) = run(&args);
        assert_eq!(code, 0, "{err}");
        check_golden(file, &out);
    }
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["analyze", "--method", "amat", "--param", "beta=0.3-0.2i"];
    assert_eq!(run(&args), run(&args));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["build"],
        vec!["build", "--method", "king", "--scheme-file", "x"],
        vec!["build", "--method", "king"],
        vec!["build", "--method", "no-such-method"],
        vec!["build", "--method", "king", "--param", "gamma=1"],
        vec!["build", "--method", "king", "--param", "beta=1", "--param", "beta=2"],
        vec!["build", "--method", "newton", "--c", "1+"],
        vec!["build", "--method", "newton", "--c", "0"],
        vec!["build", "--method", "os2", "--param", "a=1", "--d", "3"],
        vec!["stability", "--method", "newton"],
        vec!["frobnicate"],
        vec!["dynplane", "--method", "newton", "--out", "x.ppm", "--window", "1,0,0,1"],
        vec!["dynplane", "--method", "newton", "--out", "x.ppm", "--res", "0x4"],
        vec!["dynplane", "--method", "os2", "--param", "a=1", "--raw", "--out", "x.ppm"],
    ] {
        let (code, _, err) = run(&args);
        assert_eq!(code, 1, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
}

#[test]
fn computation_errors_exit_two() {
    for args in [
        vec!["build", "--scheme-file", &data("broken.scheme")],
        vec!["build", "--method", "steffensen"],
        vec!["stability", "--method", "os3"],
        vec!["stability", "--method", "os5"],
    ] {
        let (code, _, err) = run(&args);
        assert_eq!(code, 2, "{args:?}: {err}");
        assert!(err.starts_with("ndyn: "), "{err}");
    }
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("paramplane"));
}

#[test]
fn verify_passes() {
    let (code, out, err) = run(&["verify", "--trials", "5"]);
    assert_eq!(code, 0, "{out}{err}");
    assert!(out.lines().last().unwrap().ends_with(" 0 failed"));
}

#[test]
fn dynplane_is_deterministic_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let mut images = Vec::new();
    for threads in ["1", "3", "8"] {
        let out = dir.path().join(format!("z{threads}.ppm"));
        let (code, text, err) = run(&[
            "dynplane", "--method", "newton", "--res", "64x48", "--threads", threads, "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{err}");
        assert!(text.contains("map=operator"));
        let sidecar = std::fs::read_to_string(out.with_extension("txt")).unwrap();
        assert_eq!(sidecar, text);
        images.push((std::fs::read(&out).unwrap(), text));
    }
    assert!(images.windows(2).all(|w| w[0] == w[1]));
    assert!(images[0].0.starts_with(b"P6\n64 48\n255\n"));
    assert_eq!(images[0].0.len(), "P6\n64 48\n255\n".len() + 64 * 48 * 3);
}

#[test]
fn paramplane_writes_image_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ch.ppm");
    let side = dir.path().join("meta.txt");
    let (code, text, err) = run(&[
        "paramplane", "--method", "chebyshev-halley", "--window", "-1,5,-3,3", "--res", "30x30", "--out",
        out.to_str().unwrap(), "--sidecar", side.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(text.contains("window=-1,5,-3,3\n"));
    assert!(text.contains("parameter=alpha\n"));
    assert_eq!(std::fs::read_to_string(side).unwrap(), text);
    assert_eq!(std::fs::read(out).unwrap().len(), 13 + 30 * 30 * 3);
}

#[test]
fn binary_exit_codes_and_thread_variable() {
    let bin = env!("CARGO_BIN_EXE_ndyn");
    let status = Command::new(bin).arg("catalog").status().unwrap();
    assert_eq!(status.code(), Some(0));
    let status = Command::new(bin).args(["build"]).output().unwrap().status;
    assert_eq!(status.code(), Some(1));
    let status = Command::new(bin).args(["stability", "--method", "os3"]).output().unwrap().status;
    assert_eq!(status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a.ppm");
    let o = Command::new(bin)
        .args(["dynplane", "--method", "newton", "--res", "8x8", "--out", out.to_str().unwrap()])
        .env("NDYN_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = Command::new(bin)
        .args(["dynplane", "--method", "newton", "--res", "8x8", "--out", out.to_str().unwrap()])
        .env("NDYN_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}
