use std::process::{Command, Output};

use serde_json::Value;

fn zenspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zenspec"))
        .args(args)
        .env_remove("ZENSPEC_SEED")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = zenspec(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn close(v: &Value, expect: f64, tol: f64) -> bool {
    v.as_f64().is_some_and(|x| (x - expect).abs() <= tol)
}

#[test]
fn hardy_norm_example() {
    let doc = json(&["norm", "--weight", "hardy", "--mu", "2", "--x", "1"]);
    assert!(close(&doc["norm"], 0.5f64.sqrt(), 1e-12), "{doc}");
    assert_eq!(doc["inputs"]["mu"], 2.0);
    assert_eq!(doc["method"]["exact"], true);
}

#[test]
fn hardy_bergman_annulus_example() {
    let doc = json(&["spectrum", "--weight", "hardy-bergman", "--mu", "4", "--x", "0"]);
    assert_eq!(doc["type"], "annulus");
    assert!(close(&doc["r_in"], 0.25, 1e-15));
    assert!(close(&doc["r_out"], 0.5, 1e-15));
    assert_eq!(doc["exact"], true);
}

#[test]
fn zero_mu_is_a_validation_error() {
    let out = zenspec(&["norm", "--mu", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("`mu`"), "{err}");
    assert_eq!(err.trim().lines().count(), 1);
    assert!(out.stdout.is_empty());
}

#[test]
fn other_validation_errors_exit_2() {
    for args in [
        &["norm", "--weight", "dirichlet", "--mu", "2"][..],
        &["norm", "--weight", "alpha-bergman:-3", "--mu", "2"],
        &["norm", "--mu", "2", "--x", "-1"],
        &["norm"],
        &["kernel", "--x", "0"],
        &["semigroup", "--p", "1", "--alpha-re", "-1"],
        &["specrad", "--mu", "2", "--n-max", "3"],
        &["spectrum", "--mu-range", "1:2", "--weight", "hardy"],
        &["frobnicate"],
        &["norm", "--weight", "/nonexistent/measure.json", "--mu", "2"],
    ] {
        assert_eq!(zenspec(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = ["specrad", "--weight", "hardy-bergman", "--mu-range", "2:4:5", "--x", "0.5", "--n-max", "16"];
    let a = zenspec(&args);
    let b = zenspec(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sweep_keeps_parameter_order() {
    let doc = json(&["norm", "--weight", "alpha-bergman:0", "--mu-range", "0.5:4:8"]);
    let rows = doc["sweep"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    for (i, row) in rows.iter().enumerate() {
        let mu = 0.5 + 3.5 * i as f64 / 7.0;
        assert!(close(&row["mu"], mu, 1e-15));
        // Bergman: ||C|| = L = 1/mu
        assert!(close(&row["norm"], 1.0 / mu, 1e-9), "{row}");
    }
}

#[test]
fn floats_have_seventeen_significant_digits() {
    let out = zenspec(&["norm", "--weight", "hardy", "--mu", "2", "--x", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"norm\": 0.70710678118654757"), "{text}");
}

#[test]
fn every_command_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let p = path.to_str().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["weight", "--weight", "hardy-bergman", "--t", "0.5"],
        vec!["norm", "--weight", "hardy-bergman", "--mu", "0.5", "--y", "3"],
        vec!["essnorm", "--weight", "hardy-bergman", "--mu", "2"],
        vec!["specrad", "--weight", "hardy", "--mu", "2", "--n-max", "16"],
        vec!["spectrum", "--weight", "hardy", "--mu", "1", "--x", "1", "--y", "2"],
        vec!["kernel", "--weight", "alpha-bergman:1", "--x", "2"],
        vec!["verify", "--weight", "hardy", "--mu", "2", "--grid-min", "1e-6", "--grid-max", "1e6"],
        vec!["semigroup", "--weight", "hardy", "--p", "0", "--alpha-re", "1", "--t", "2"],
    ];
    for mut args in cases {
        let stdout = zenspec(&args);
        assert!(stdout.status.success(), "{args:?}");
        args.extend(["--json", p]);
        let out = zenspec(&args);
        assert!(out.status.success(), "{args:?}");
        assert!(out.stdout.is_empty());
        let text = std::fs::read(&path).unwrap();
        assert_eq!(text, stdout.stdout, "file and stdout differ for {args:?}");
        let doc: Value = serde_json::from_slice(&text).unwrap();
        assert_eq!(doc["command"], args[0]);
        assert!(doc["inputs"].is_object());
        assert_eq!(serde_json::from_str::<Value>(&doc.to_string()).unwrap(), doc);
    }
}

#[test]
fn spectrum_csv_has_boundary_samples() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("boundary.csv");
    let doc = json(&[
        "spectrum",
        "--weight",
        "hardy-bergman",
        "--mu",
        "4",
        "--csv",
        path.to_str().unwrap(),
        "--samples",
        "16",
    ]);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("re,im,component"));
    let rows: Vec<(f64, f64, usize)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len() as u64, doc["csv"]["points"].as_u64().unwrap());
    for (re, im, c) in rows {
        let r = re.hypot(im);
        let expect = if c == 0 { 0.25 } else { 0.5 };
        assert!((r - expect).abs() < 1e-12);
    }
}

#[test]
fn measure_file_weight() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hb.json");
    // atom at 0 plus Lebesgue measure; scaled so that w = 1 + 1/t
    let pi = std::f64::consts::PI;
    std::fs::write(
        &path,
        format!(
            r#"{{"atoms":[{{"r":0.0,"mass":{}}}],"density":{{"type":"power","coeff":{},"alpha":0.0}}}}"#,
            1.0 / (2.0 * pi),
            1.0 / pi
        ),
    )
    .unwrap();
    let w = path.to_str().unwrap();
    let doc = json(&["weight", "--weight", w, "--t", "2"]);
    assert!(close(&doc["values"][0]["w"], 1.5, 1e-9), "{doc}");
    let n = json(&["norm", "--weight", w, "--mu", "4"]);
    assert!(close(&n["norm"], 0.5, 1e-8), "{n}");

    std::fs::write(&path, "{not json").unwrap();
    assert_eq!(zenspec(&["norm", "--weight", w, "--mu", "2"]).status.code(), Some(2));
}

#[test]
fn verify_passes_and_seed_controls_draws() {
    let run = |seed: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_zenspec"));
        cmd.args(["verify", "--weight", "hardy-bergman", "--mu", "4"]);
        match seed {
            Some(s) => cmd.env("ZENSPEC_SEED", s),
            None => cmd.env_remove("ZENSPEC_SEED"),
        };
        cmd.output().unwrap()
    };
    let a = run(Some("7"));
    let b = run(Some("7"));
    let c = run(Some("8"));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let doc: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["all_pass"], true, "{doc}");
    assert_eq!(doc["inputs"]["seed"], 7);
    let names: Vec<&str> = doc["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"operator_norm") && names.contains(&"eigen_residual") && names.contains(&"isometry"));
    assert_eq!(run(Some("abc")).status.code(), Some(2));
}

#[test]
fn semigroup_norms() {
    let doc = json(&["semigroup", "--weight", "hardy", "--p", "2", "--t", "1"]);
    assert!(close(&doc["norm_bounds"]["upper"], (-1f64).exp(), 1e-9));
    let doc = json(&["semigroup", "--weight", "alpha-bergman:0", "--p", "2", "--t", "1"]);
    assert!(close(&doc["norm_bounds"]["upper"], (-2f64).exp(), 1e-9));
    assert_eq!(doc["berkson_porta"]["holds"], true);
}

#[test]
fn spectral_radius_settles() {
    let doc = json(&["specrad", "--weight", "hardy-bergman", "--mu", "4", "--x", "1"]);
    assert_eq!(doc["converged"], true);
    assert!(close(&doc["spectral_radius"], 0.25, 0.0125), "{doc}");
    assert_eq!(doc["sequence"].as_array().unwrap().len(), 64);
}
