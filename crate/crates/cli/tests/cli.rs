use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isbell"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = run(&all);
    let value = serde_json::from_slice(&out.stdout).expect("json on stdout");
    (value, out.status.code().unwrap())
}

#[test]
fn validate_exit_codes() {
    assert_eq!(
        run(&["validate", &data("c2_regular.json")]).status.code(),
        Some(0)
    );
    let broken = run(&["validate", &data("c2_broken.json")]);
    assert_eq!(broken.status.code(), Some(1));
    let text = String::from_utf8(broken.stdout).unwrap();
    assert!(text.contains("m1"), "{text}");
    assert_eq!(
        run(&["validate", &data("malformed.json")]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["validate", &data("missing.json")]).status.code(),
        Some(2)
    );
}

#[test]
fn conjugate_of_regular_action() {
    let (v, code) = json(&["conj", &data("c2_regular.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["conjugate"]["variance"], "co");
    assert_eq!(v["conjugate"]["sets"]["*"].as_array().unwrap().len(), 2);
    let swapped = &v["conjugate"]["actions"]["m1"];
    assert_ne!(swapped["0"], "0");
}

#[test]
fn iterated_conjugates() {
    let (v, code) = json(&["conj", &data("c3_free2.json"), "--iterate", "3"]);
    assert_eq!(code, 0);
    let orbits: Vec<u64> = v["steps"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["orbits"].as_u64().unwrap())
        .collect();
    assert_eq!(orbits, vec![2, 3, 9]);
    assert!(v["steps"]
        .as_array()
        .unwrap()
        .iter()
        .all(|s| s["iso_to"].is_null()));
}

#[test]
fn representable_conjugates_to_representable() {
    let (v, _) = json(&["conj", &data("c3_rep.json")]);
    assert_eq!(v["conjugate"]["variance"], "contra");
    assert_eq!(v["conjugate"]["sets"]["*"].as_array().unwrap().len(), 3);
}

#[test]
fn reflexivity() {
    assert_eq!(
        run(&["reflexive", &data("c2_terminal.json")]).status.code(),
        Some(0)
    );
    assert_eq!(
        run(&["reflexive", &data("c3_rep.json")]).status.code(),
        Some(0)
    );
    let (v, code) = json(&["reflexive", &data("c3_free2.json")]);
    assert_eq!(code, 1);
    assert_eq!(v["reflexive"], false);
    assert_eq!(v["failing_object"], "*");
}

#[test]
fn completions() {
    for (cat, bound, classes) in [
        ("corpus:c2", "4", 4),
        ("corpus:idempotent", "4", 2),
        ("corpus:discrete2", "3", 4),
    ] {
        let (v, code) = json(&["complete", cat, "--bound", bound]);
        assert_eq!(code, 0);
        assert_eq!(v["classes"].as_array().unwrap().len(), classes, "{cat}");
        assert_eq!(v["complete_within_bound"], true);
    }
    let (v, _) = json(&["cauchy", "corpus:idempotent"]);
    assert_eq!(v["category"]["objects"].as_array().unwrap().len(), 2);
    assert_eq!(v["split_idempotents_reflexive"], true);
}

#[test]
fn cut_lattices() {
    for (poset, cuts) in [
        ("corpus:antichain2", 4),
        ("corpus:chain3", 3),
        ("corpus:empty", 1),
        ("corpus:waist5", 7),
    ] {
        let (v, code) = json(&["dm", poset]);
        assert_eq!(code, 0);
        assert_eq!(v["cuts"].as_array().unwrap().len(), cuts, "{poset}");
        assert_eq!(v["crosscheck"], true);
    }
}

#[test]
fn metric_commands() {
    let (v, code) = json(&[
        "metric",
        "corpus:two_point_1",
        "isbell",
        &data("cost_03_08.json"),
    ]);
    assert_eq!((v["isbell_point"].clone(), code), (Value::Bool(true), 0));
    let (v, code) = json(&["metric", "corpus:two_point_1", "tightspan", "0,0"]);
    assert_eq!(
        (v["tight_span_point"].clone(), code),
        (Value::Bool(false), 1)
    );
    assert_eq!(v["conjugate"], serde_json::json!(["1", "1"]));
    let (v, _) = json(&[
        "metric",
        "corpus:two_point_2",
        "dist",
        "yoneda:0",
        "yoneda:D",
    ]);
    assert_eq!(v["distance"], "2");
    let (v, _) = json(&["metric", "corpus:two_point_1", "conj", "0.3,0.8"]);
    assert_eq!(v["f"], serde_json::json!(["1/5", "7/10"]));
    assert_eq!(
        run(&["metric", "corpus:two_point_1", "isbell", "0,2"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["metric", "corpus:two_point_1", "isbell", "x"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn corpus_matrix_passes() {
    let out = run(&["corpus"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");
}

#[test]
fn ceiling_is_enforced() {
    assert_eq!(run(&["--ceiling", "100", "corpus"]).status.code(), Some(2));
    let out = run(&[
        "--ceiling",
        "10000",
        "conj",
        &data("c3_free2.json"),
        "--iterate",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().contains("ceiling"));
}

#[test]
fn json_is_byte_stable() {
    let a = run(&["complete", "corpus:c2", "--format", "json"]).stdout;
    let b = run(&["complete", "corpus:c2", "--format", "json"]).stdout;
    assert_eq!(a, b);
}
