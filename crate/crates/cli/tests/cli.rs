use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use thinspec_cli::{emit_coefficients, parse_coefficients, ParseError};

fn thinspec(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thinspec"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("THINSPEC_PERIOD_CAP")
        .output()
        .unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn parses_one_and_two_columns_with_comments() {
    let (a, b) = parse_coefficients("# period 2\n1.0\n\n2.5  # trailing\n").unwrap();
    assert_eq!((a, b), (vec![1.0, 2.5], vec![0.0, 0.0]));
    let (a, b) = parse_coefficients("1, -0.5\n2,3e-1\n").unwrap();
    assert_eq!((a, b), (vec![1.0, 2.0], vec![-0.5, 0.3]));
}

#[test]
fn reports_parse_errors_with_locations() {
    assert_eq!(parse_coefficients("# nothing\n"), Err(ParseError::Empty));
    assert_eq!(
        parse_coefficients("1\n0\n"),
        Err(ParseError::NonPositive { index: 2, value: 0.0 })
    );
    assert!(matches!(
        parse_coefficients("1\n\n1,2\n"),
        Err(ParseError::Syntax { line: 3, .. })
    ));
    assert!(matches!(parse_coefficients("x\n"), Err(ParseError::Syntax { line: 1, .. })));
    assert!(matches!(parse_coefficients("1,2,3\n"), Err(ParseError::Syntax { .. })));
    assert!(matches!(parse_coefficients("inf\n"), Err(ParseError::Syntax { .. })));
}

#[test]
fn coefficient_files_round_trip_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..500 {
        let p = rng.gen_range(1..=16);
        let a: Vec<f64> = (0..p).map(|_| rng.gen_range(1e-3..1e3)).collect();
        let b: Vec<f64> = if rng.gen_bool(0.5) {
            (0..p).map(|_| rng.gen_range(-1e3..1e3)).collect()
        } else {
            vec![0.0; p]
        };
        let text = emit_coefficients(&a, &b);
        assert_eq!(parse_coefficients(&text).unwrap(), (a, b));
    }
}

#[test]
fn bands_of_the_dimer() {
    let dir = tempfile::tempdir().unwrap();
    let out = thinspec(dir.path(), &["--a", "1,2", "bands"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&dir.path().join("bands.json"));
    let bands = v["bands"].as_array().unwrap();
    let want = [[-3.0, -1.0], [1.0, 3.0]];
    for (band, w) in bands.iter().zip(want) {
        assert!((band[0].as_f64().unwrap() - w[0]).abs() < 1e-9);
        assert!((band[1].as_f64().unwrap() - w[1]).abs() < 1e-9);
    }
    assert!((v["measure"].as_f64().unwrap() - 4.0).abs() < 1e-9);
    let m = read_json(&dir.path().join("manifest.json"));
    assert_eq!(m["command"], "bands");
    assert_eq!(m["input"]["period"], 2);
}

#[test]
fn input_file_and_csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("coeffs.txt");
    fs::write(&input, "1\n2\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_thinspec"))
        .args(["--format", "csv", "--out"])
        .arg(dir.path())
        .arg("--input")
        .arg(&input)
        .args(["ids", "--grid", "16"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("ids.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("E,ids,dtheta_dE,hs_sum,bound_lhs,bound_rhs"));
    assert_eq!(lines.count(), 16);
}

#[test]
fn laplacian_of_the_free_operator() {
    let dir = tempfile::tempdir().unwrap();
    let out = thinspec(dir.path(), &["--a", "1", "laplacian", "--d", "2", "--torus", "6"]);
    assert!(out.status.success());
    let v = read_json(&dir.path().join("laplacian.json"));
    let c = v["components"].as_array().unwrap();
    assert_eq!(c.len(), 1);
    assert!((c[0][0].as_f64().unwrap() + 4.0).abs() < 1e-12);
    assert!((c[0][1].as_f64().unwrap() - 4.0).abs() < 1e-12);
    assert!(v["torus"]["max_distance"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn exit_codes_follow_the_error_class() {
    let dir = tempfile::tempdir().unwrap();
    // Validation.
    for args in [
        &["--a", "1,-2", "bands"][..],
        &["bands"][..],
        &["--a", "1", "--b", "0,0", "bands"][..],
        &["--a", "1", "thin", "--eps", "0.5", "--N", "7"][..],
        &["--a", "1", "--b", "1", "thin", "--eps", "0.5", "--N", "8"][..],
        &["--a", "1", "chain", "--eps", "-1", "--stages", "1"][..],
    ] {
        let out = thinspec(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    // Numerical: no family fits the tiny budget.
    let out = thinspec(dir.path(), &["--a", "1", "thin", "--eps", "1e-12", "--N", "4000"]);
    assert_eq!(out.status.code(), Some(3));
    // I/O: the output directory is a file.
    let file = dir.path().join("occupied");
    fs::write(&file, "").unwrap();
    let out = thinspec(&file, &["--a", "1", "bands"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn runs_are_deterministic_apart_from_the_timestamp() {
    let args = ["--a", "1", "thin", "--eps", "0.5", "--N", "864"];
    let (x, y) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(thinspec(x.path(), &args).status.success());
    assert!(thinspec(y.path(), &args).status.success());
    for f in ["thin.json", "thin_coefficients.csv"] {
        assert_eq!(
            fs::read(x.path().join(f)).unwrap(),
            fs::read(y.path().join(f)).unwrap(),
            "{f}"
        );
    }
    let mut mx = read_json(&x.path().join("manifest.json"));
    let mut my = read_json(&y.path().join("manifest.json"));
    for m in [&mut mx, &mut my] {
        m.as_object_mut().unwrap().remove("timestamp");
        m["config"].as_object_mut().unwrap().remove("out");
    }
    assert_eq!(mx, my);
}

#[test]
fn period_cap_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = |cap: &str| {
        Command::new(env!("CARGO_BIN_EXE_thinspec"))
            .arg("--out")
            .arg(dir.path())
            .args(["--a", "1", "thin", "--eps", "0.5", "--N", "864"])
            .env("THINSPEC_PERIOD_CAP", cap)
            .output()
            .unwrap()
    };
    assert_eq!(run("100").status.code(), Some(2));
    assert_eq!(run("not a number").status.code(), Some(2));
    assert!(run("1000").status.success());
}

#[test]
fn chain_reports_covers_and_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let out = thinspec(
        dir.path(),
        &["--a", "1e-4", "chain", "--eps", "0.5", "--stages", "2", "--mode", "diag"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&dir.path().join("chain.json"));
    let stages = v["chain"]["stages"].as_array().unwrap();
    assert_eq!(stages.len(), 2);
    let covers = v["covers"].as_array().unwrap();
    for (c, s) in covers.iter().zip(stages) {
        assert_eq!(c[0], s["period"]);
        assert_eq!(c[1].as_f64().unwrap(), 2.0 * s["mu_n"].as_f64().unwrap());
    }
    assert!(v["box_dim_estimate"].as_f64().unwrap() < 0.5);
    assert!(v["gordon_certificates"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));
    assert!(dir.path().join("chain_covers.csv").exists());
}
