use std::fs;

use mmes::cli::{run, EXIT_INVALID, EXIT_IO, EXIT_NOT_MMES, EXIT_OK, EXIT_USAGE};

struct Run {
    code: u8,
    out: String,
    err: String,
}

fn mmes(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("mmes").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn check_hs_is_mmes() {
    let r = mmes(&["check", "--state", "hs/omega"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.starts_with("MMES: yes (K = "), "{}", r.out);
    assert!(r.out.trim_end().ends_with("≤ 1e-8)"), "{}", r.out);
}

#[test]
fn check_ghz_is_not() {
    let r = mmes(&["check", "--expr", "(|0000>+|1111>)/sqrt(2)"]);
    assert_eq!(r.code, EXIT_NOT_MMES);
    assert!(r.out.starts_with("MMES: no (K = 1.0e0 > 1e-8)"), "{}", r.out);
}

#[test]
fn check_exit_code_ignores_format() {
    for fmt in ["text", "json"] {
        assert_eq!(mmes(&["check", "--state", "yc/signs", "--format", fmt]).code, EXIT_OK);
        assert_eq!(
            mmes(&["check", "--state", "eq13/uniform", "--format", fmt]).code,
            EXIT_NOT_MMES
        );
    }
}

#[test]
fn analyze_json_yc() {
    let r = mmes(&["analyze", "--state", "yc/signs", "--format", "json"]);
    assert_eq!(r.code, EXIT_OK);
    let v = json(&r.out);
    for (k, want) in [("12", 0.25), ("13", 0.25), ("14", 0.5)] {
        assert!((v["purities"][k].as_f64().unwrap() - want).abs() < 1e-12);
    }
    assert_eq!(v["verdict"], "mmes");
}

#[test]
fn text_and_json_agree() {
    let text = mmes(&["analyze", "--state", "eq13/uniform"]).out;
    let v = json(&mmes(&["analyze", "--state", "eq13/uniform", "--format", "json"]).out);
    let field = |name: &str| -> f64 {
        let line = text
            .lines()
            .find(|l| l.trim_start().starts_with(name))
            .unwrap_or_else(|| panic!("{name} missing from\n{text}"));
        line.rsplit(" = ").next().unwrap().parse().unwrap()
    };
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-11 * b.abs().max(1e-300);
    assert!(close(field("pi_ME"), v["pi_me"].as_f64().unwrap()));
    assert!(close(field("K1 ="), v["k1"].as_f64().unwrap()));
    assert!(close(field("pi_14"), v["purities"]["14"].as_f64().unwrap()));
}

#[test]
fn parse_error_reports_span() {
    let r = mmes(&["parse", "--expr", "|00> + |0>"]);
    assert_eq!(r.code, EXIT_INVALID);
    assert!(r.err.contains("|00> + |0>"), "{}", r.err);
    assert!(r.err.contains('^'), "{}", r.err);
}

#[test]
fn strict_and_renormalize() {
    let r = mmes(&["parse", "--expr", "|0>+|1>"]);
    assert_eq!(r.code, EXIT_INVALID);
    let r = mmes(&["parse", "--expr", "|0>+|1>", "--renormalize", "--format", "json"]);
    assert_eq!(r.code, EXIT_OK);
    let v = json(&r.out);
    assert_eq!(v["n"], 1);
    let a0 = v["amplitudes"][0][0].as_f64().unwrap();
    assert!((a0 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
}

#[test]
fn files() {
    let dir = tempfile::tempdir().unwrap();
    let ket = dir.path().join("hs.ket");
    fs::write(
        &ket,
        "# cube roots of unity\n(|0011>+|1100>+w*(|0101>+|1010>)+w*w*(|0110>+|1001>))/sqrt(6)\n",
    )
    .unwrap();
    assert_eq!(mmes(&["check", "--file", ket.to_str().unwrap()]).code, EXIT_OK);

    let state = json(&mmes(&["parse", "--state", "cluster/sign", "--format", "json"]).out);
    let js = dir.path().join("cluster.json");
    fs::write(&js, state.to_string()).unwrap();
    assert_eq!(mmes(&["check", "--file", js.to_str().unwrap()]).code, EXIT_OK);

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"n": 2, "amplitudes": [[1, 0]]}"#).unwrap();
    assert_eq!(mmes(&["analyze", "--file", bad.to_str().unwrap()]).code, EXIT_INVALID);

    let missing = dir.path().join("nope.ket");
    let r = mmes(&["analyze", "--file", missing.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_IO);
    assert!(!r.err.is_empty());
}

#[test]
fn usage_errors() {
    assert_eq!(mmes(&[]).code, EXIT_USAGE);
    assert_eq!(mmes(&["analyze"]).code, EXIT_USAGE);
    assert_eq!(
        mmes(&["analyze", "--state", "hs/omega", "--expr", "|0>"]).code,
        EXIT_USAGE
    );
    assert_eq!(mmes(&["analyze", "--state", "hs/omega", "--bogus"]).code, EXIT_USAGE);
    assert_eq!(mmes(&["minimize", "--method", "newton"]).code, EXIT_USAGE);
    let help = mmes(&["--help"]);
    assert_eq!(help.code, EXIT_OK);
    assert!(help.out.contains("minimize"));
}

#[test]
fn unknown_catalog_state() {
    let r = mmes(&["analyze", "--state", "hs/nope"]);
    assert_eq!(r.code, EXIT_INVALID);
    assert!(r.err.contains("hs/nope"));
}

#[test]
fn states_listing() {
    let r = mmes(&["states"]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(r.out.lines().count(), 11);
    let v = json(&mmes(&["states", "--format", "json"]).out);
    assert_eq!(v.as_array().unwrap().len(), 11);
    let one = json(&mmes(&["states", "--state", "hs/omega", "--format", "json"]).out);
    assert_eq!(one["name"], "hs");
    assert!(one["ket"].as_str().unwrap().contains("|0011>"));
}

#[test]
fn minimize_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("trace.csv");
    let r = mmes(&[
        "minimize",
        "--n",
        "2",
        "--restarts",
        "3",
        "--seed",
        "1",
        "--trace-csv",
        csv.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let v = json(&r.out);
    assert!((v["best_value"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert_eq!(v["restarts"].as_array().unwrap().len(), 3);
    let trace = fs::read_to_string(&csv).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("iteration,restart,value"));
    let restarts: std::collections::BTreeSet<&str> =
        lines.map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(restarts.len(), 3);

    let again = mmes(&["minimize", "--n", "2", "--restarts", "3", "--seed", "1", "--format", "json"]);
    assert_eq!(json(&again.out)["best_value"], v["best_value"]);
}

#[test]
fn minimize_text_reports_ket() {
    let r = mmes(&["minimize", "--n", "4", "--restarts", "4", "--seed", "42"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.starts_with("best pi_ME = 0.3333333"), "{}", r.out);
    assert!(r.out.contains("|0000>"));
}
