use std::path::PathBuf;

use clap::Parser;
use foldmin_cli::{run, Cli, EXIT_HYPOTHESIS, EXIT_OK, EXIT_PARSE};
use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn invoke(args: &[&str]) -> (i32, String) {
    let cli = Cli::try_parse_from(std::iter::once("foldmin").chain(args.iter().copied())).expect("arguments");
    let mut out = Vec::new();
    let code = match run(cli, &mut out) {
        Ok(c) => c,
        Err(f) => f.code,
    };
    (code, String::from_utf8(out).unwrap())
}

fn status(json: &str) -> String {
    let v: Value = serde_json::from_str(json).unwrap();
    v["status"].as_str().unwrap().to_string()
}

#[test]
fn certify_statuses_and_exit_codes() {
    let cases = [
        ("coxeter_free.txt", "FreeCertified", EXIT_OK),
        ("coxeter_torsion.txt", "Witnessed", EXIT_OK),
        ("coxeter_threshold.txt", "HypothesisNotMet", EXIT_HYPOTHESIS),
        ("artin.txt", "FreeCertified", EXIT_OK),
        ("one_relator.txt", "FreeCertified", EXIT_OK),
    ];
    for (file, want, code) in cases {
        let (c, out) = invoke(&["certify", &data(file)]);
        assert_eq!((c, status(&out).as_str()), (code, want), "{file}");
    }
    let (c, out) = invoke(&["certify", "--half-rank", &data("half_rank.txt")]);
    assert_eq!((c, status(&out).as_str()), (EXIT_OK, "QuasiconvexCertified"));
    let (c, out) = invoke(&["separate", &data("separate.txt")]);
    assert_eq!((c, status(&out).as_str()), (EXIT_OK, "SeparableCertified"));
}

#[test]
fn parse_errors_exit_two() {
    assert_eq!(invoke(&["certify", &data("bad.txt")]).0, EXIT_PARSE);
    assert_eq!(invoke(&["certify", &data("missing.txt")]).0, EXIT_PARSE);
    assert_eq!(invoke(&["separate", &data("coxeter_free.txt")]).0, EXIT_PARSE);
    assert_eq!(invoke(&["wp", &data("coxeter_free.txt"), "--word", "a1'"]).0, EXIT_PARSE);
}

#[test]
fn word_problem() {
    let (c, out) = invoke(&["wp", &data("coxeter_torsion.txt"), "--word", "a b a b a b a b a b a b"]);
    assert_eq!(c, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["trivial"], Value::Bool(true));
    assert_eq!(v["hits"][0]["relator"], "a b a b a b a b a b a b");
    let (_, out) = invoke(&["wp", &data("one_relator.txt"), "--word", "a1 a2 a1' a2'"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["trivial"], Value::Bool(false));
    let (_, out) = invoke(&["wp", &data("artin.txt"), "--word", "a1 a2 a1 a2 a1 a2 a1 a2 a1 a2 a1' a2' a1' a2' a1' a2' a1' a2' a1' a2'"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["trivial"], Value::Bool(true));
    assert_eq!(v["reduced"], "");
}

#[test]
fn artifacts_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for round in 0..2 {
        let json = dir.path().join(format!("r{round}.json"));
        let dot = dir.path().join(format!("r{round}.dot"));
        let trace = dir.path().join(format!("r{round}.trace.json"));
        let (c, out) = invoke(&[
            "minimize",
            &data("coxeter_free.txt"),
            "--json",
            json.to_str().unwrap(),
            "--dot",
            dot.to_str().unwrap(),
            "--trace",
            trace.to_str().unwrap(),
            "--seed",
            "5",
        ]);
        assert_eq!(c, EXIT_OK);
        let files: Vec<String> = [&json, &dot, &trace].iter().map(|p| std::fs::read_to_string(p).unwrap()).collect();
        assert_eq!(files[0], out);
        assert!(files[1].starts_with("digraph"));
        assert!(serde_json::from_str::<Value>(&files[2]).unwrap().is_array());
        outputs.push(files);
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn corpus_is_reproducible() {
    let args = ["corpus", "--type", "coxeter", "--trials", "10", "--seed", "1"];
    let (c, a) = invoke(&args);
    assert_eq!(c, EXIT_OK);
    assert_eq!(a, invoke(&args).1);
    assert!(a.contains("trials") && a.contains("10"));
    let other = invoke(&["corpus", "--type", "coxeter", "--trials", "10", "--seed", "2"]).1;
    assert_ne!(a, other);
    assert_eq!(invoke(&["corpus", "--type", "one-relator", "--n", "2", "--m", "12", "--relator", "a1 a1"]).0, EXIT_PARSE);
}

#[test]
fn rpp_report() {
    let (c, out) = invoke(&["rpp", &data("coxeter_free.txt")]);
    assert_eq!(c, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["minimized"].is_object());
}

#[test]
fn max_iter_cap_is_inconclusive() {
    let (c, out) = invoke(&["certify", &data("coxeter_torsion.txt"), "--max-iter", "0"]);
    assert_eq!((c, status(&out).as_str()), (foldmin_cli::EXIT_INCONCLUSIVE, "Inconclusive"));
}
