use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn covnorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_covnorm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn estar_identity_matches_closed_form() {
    let out = covnorm(&["estar", "--identity", "4", "--n", "100", "--reps", "20000", "--seed", "7"]);
    let json = stdout_json(&out);
    let est = &json["estimate"];
    let mean = est["mean"].as_f64().unwrap();
    let se = est["std_error"].as_f64().unwrap();
    let exact = 2.0 * 0.75 * (2.0 * std::f64::consts::PI).sqrt() / 10.0 + 0.04;
    assert!((mean - exact).abs() <= 3.0 * se, "{mean} ± {se} vs {exact}");
    assert_eq!(est["reps"], 20000);
    assert_eq!(est["seed"], 7);
    assert_eq!(json["kl_upper_bound"].as_f64().unwrap(), 2.0 * 0.2 + 0.04);
    assert!((json["kl_lower_floor"].as_f64().unwrap() - 0.1595769).abs() < 1e-7);
    assert!(json["relative_error_budget"].as_f64().unwrap() > 0.0);
}

#[test]
fn estar_spiked_and_csv_format() {
    let out = covnorm(&[
        "estar", "--spiked", "p=50,n=40,r=2,lambda=3", "--reps", "50", "--format", "csv",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("mean,std_error,std_dev,reps,seed,p,n,"));
    assert_eq!(lines[1].split(',').count(), lines[0].split(',').count());
    assert!(lines[2].starts_with("# seed=12648430 version="));

    let clash = covnorm(&["estar", "--spiked", "p=50,n=40,r=2,lambda=3", "--n", "41"]);
    assert_eq!(clash.status.code(), Some(2));
}

#[test]
fn estar_spec_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("cov.json");
    std::fs::write(&good, r#"{"eigenvalues":[2.0,1.0],"multiplicities":[1,3],"p":4}"#).unwrap();
    let out = covnorm(&["estar", "--spec", good.to_str().unwrap(), "--n", "10", "--reps", "20"]);
    let json = stdout_json(&out);
    assert_eq!(json["p"], 4);
    assert_eq!(json["op_norm"], 2.0);

    let spiked = dir.path().join("spiked.json");
    std::fs::write(&spiked, r#"{"p":30,"n":20,"r":1,"lambda":2.0}"#).unwrap();
    let out = covnorm(&["estar", "--spec", spiked.to_str().unwrap(), "--reps", "20"]);
    assert_eq!(stdout_json(&out)["n"], 20);

    let missing = covnorm(&["estar", "--spec", dir.path().join("nope.json").to_str().unwrap(), "--n", "10"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).contains("cannot read"));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"eigenvalues":[1.0,2.0],"multiplicities":[1,1],"p":2}"#).unwrap();
    let invalid = covnorm(&["estar", "--spec", bad.to_str().unwrap(), "--n", "10"]);
    assert_eq!(invalid.status.code(), Some(2));
    assert!(stderr(&invalid).contains("invalid covariance spec"), "{}", stderr(&invalid));

    let wrong_p = dir.path().join("wrong_p.json");
    std::fs::write(&wrong_p, r#"{"eigenvalues":[1.0],"multiplicities":[3],"p":4}"#).unwrap();
    let invalid = covnorm(&["estar", "--spec", wrong_p.to_str().unwrap(), "--n", "10"]);
    assert_eq!(invalid.status.code(), Some(2));
    assert!(stderr(&invalid).contains("p = 4"), "{}", stderr(&invalid));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(covnorm(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(covnorm(&["estar", "--identity", "3"]).status.code(), Some(2));
    assert_eq!(
        covnorm(&["estar", "--identity", "3", "--spiked", "p=3,n=3,r=1,lambda=1", "--n", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(covnorm(&["--help"]).status.code(), Some(0));
}

#[test]
fn width_query_with_trace() {
    let out = covnorm(&[
        "width", "--gammas", "1,0.25", "--weights", "1,2", "--alpha", "0.5", "--n", "16", "--trace",
    ]);
    let json = stdout_json(&out);
    let value = json["value"].as_f64().unwrap();
    // Spiked with λ = 3: closed form w₁√a + w₂√(α² − a), a = α²w₁²/(w₁² + w₂²) clamped below by 0.
    let expected = covnorm::slicewidth::two_group_width_closed_form(1.0, 2.0, 3.0, 0.5);
    assert!((value - expected).abs() < 1e-10);
    let cert = &json["certificate"];
    assert!(cert["duality_gap"].as_f64().unwrap().abs() < 1e-8);
    assert_eq!(cert["budgets"].as_array().unwrap().len(), 2);
    assert!(json["phi_sup"]["tied_brackets"].is_boolean());
    assert!(json["phi_sup"]["argmax_alpha"].as_f64().unwrap() <= 1.0);

    let from_cov = covnorm(&["width", "--identity", "3", "--h", "1,2,2", "--alpha", "0.5"]);
    assert!((stdout_json(&from_cov)["value"].as_f64().unwrap() - 1.5).abs() < 1e-12);

    let bad_alpha = covnorm(&["width", "--gammas", "1", "--weights", "1", "--alpha", "1.5"]);
    assert_eq!(bad_alpha.status.code(), Some(2));
    let mixed = covnorm(&["width", "--identity", "2", "--gammas", "1", "--weights", "1", "--alpha", "0.5"]);
    assert_eq!(mixed.status.code(), Some(2));
}

#[test]
fn spiked_theory_csv() {
    let out = covnorm(&["spiked-theory", "--delta", "1", "--lambdas", "0,2,3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "delta,lambda,psi,eta,bbp_max,bbp_argmax,transition");
    assert_eq!(lines.len(), 5);
    let at_transition: Vec<f64> = lines[2].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(at_transition[2], 3.0);
    assert_eq!(at_transition[3], 0.0);
    assert!(lines[4].starts_with("# seed="));
    assert_eq!(covnorm(&["spiked-theory", "--delta", "", "--lambdas", "1"]).status.code(), Some(2));
}

#[test]
fn simulate_dumps_replicates() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("reps.csv");
    let out = covnorm(&[
        "simulate", "--spiked", "p=40,n=30,r=1,lambda=4", "--reps", "6", "--seed", "3", "--dump-reps",
        dump.to_str().unwrap(),
    ]);
    let json = stdout_json(&out);
    assert_eq!(json["reps"], 6);
    assert!(json["proj_sq"]["mean"].as_f64().unwrap() <= 1.0);
    let text = std::fs::read_to_string(&dump).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "rep,op_norm,lambda_plus,lambda_minus,proj_sq,sign_flag,top_eig");
    assert_eq!(lines.len(), 8);
    assert!(lines[7].starts_with("# seed=3 "));
    let flag = lines[1].split(',').nth(5).unwrap();
    assert!(["plus", "minus", "tie"].contains(&flag));

    let identity = covnorm(&["simulate", "--identity", "10", "--n", "10", "--reps", "3"]);
    assert!(stdout_json(&identity)["proj_sq"].is_null());
}

fn phase_diagram(output: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "phase-diagram", "--p", "60", "--n", "60", "--r", "1", "--lambdas", "0,2,5", "--reps", "4",
        "--output", output.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    covnorm(&args)
}

#[test]
fn phase_diagram_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let c = dir.path().join("c.csv");
    assert!(phase_diagram(&a, &["--seed", "11"]).status.success());
    assert!(phase_diagram(&b, &["--seed", "11"]).status.success());
    assert!(phase_diagram(&c, &["--seed", "12"]).status.success());
    let (a, b, c) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap(), std::fs::read(c).unwrap());
    assert_eq!(a, b);
    assert_ne!(a, c);
    let text = String::from_utf8(a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    let row: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(row[1].parse::<f64>().unwrap(), 59.0 / 60.0);
    assert_eq!(lines[4], format!("# seed=11 version={}", env!("CARGO_PKG_VERSION")));
}

#[test]
fn phase_diagram_rejects_empty_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = covnorm(&["phase-diagram", "--p", "10", "--n", "10", "--lambdas", ""]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("empty"));
    let bad_r = phase_diagram(&dir.path().join("x.csv"), &["--r", "61"]);
    assert_eq!(bad_r.status.code(), Some(2));
}

#[test]
fn config_file_mirrors_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let via_config = dir.path().join("config.csv");
    let via_flags = dir.path().join("flags.csv");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"p": 30, "n": 30, "r": 1, "lambdas": [0, 3], "reps": 3, "seed": 9, "output": {:?}}}"#,
            via_config.to_str().unwrap()
        ),
    )
    .unwrap();
    assert!(covnorm(&["phase-diagram", "--config", cfg.to_str().unwrap()]).status.success());
    assert!(covnorm(&[
        "phase-diagram", "--p", "30", "--n", "30", "--lambdas", "0,3", "--reps", "3", "--seed", "9", "--output",
        via_flags.to_str().unwrap(),
    ])
    .status
    .success());
    assert_eq!(std::fs::read(&via_config).unwrap(), std::fs::read(&via_flags).unwrap());

    // Command-line flags override the file.
    let overridden = dir.path().join("over.csv");
    assert!(covnorm(&[
        "phase-diagram", "--config", cfg.to_str().unwrap(), "--seed", "10", "--output",
        overridden.to_str().unwrap(),
    ])
    .status
    .success());
    let text = std::fs::read_to_string(&overridden).unwrap();
    assert!(text.contains("# seed=10 "));

    let missing = covnorm(&["phase-diagram", "--config", dir.path().join("none.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn verify_subset_and_mutation() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let ok = covnorm(&["verify", "--only", "T2,T10", "--report", report.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
    let stdout = String::from_utf8(ok.stdout).unwrap();
    assert!(stdout.lines().any(|l| l.starts_with("PASS T2 ")));
    assert!(stdout.lines().any(|l| l.starts_with("PASS T10 ")));
    let json: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["passed"], true);
    assert_eq!(json["criteria"].as_array().unwrap().len(), 2);
    assert!(json["criteria"][0]["margin"].as_f64().unwrap() > 0.0);

    let mutated = covnorm(&["verify", "--only", "T10", "--psi-scale", "1.01"]);
    assert_eq!(mutated.status.code(), Some(1));
    assert!(String::from_utf8(mutated.stdout).unwrap().starts_with("FAIL T10 "));

    let quick = covnorm(&["verify", "--quick", "--only", "T3"]);
    assert_eq!(quick.status.code(), Some(0));

    assert_eq!(covnorm(&["verify", "--only", "T12"]).status.code(), Some(2));
}
