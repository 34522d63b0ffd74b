use std::process::{Command, Output};

use serde_json::Value;

fn kchains(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kchains")).args(args).output().expect("spawn kchains")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn envelope_has_contract_keys() {
    let out = kchains(&["count", "--structure", "Fp:3", "--random", "5", "--seed", "11", "--alpha", "1,2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for key in ["tool", "version", "command", "argv", "structure", "seeds", "payload", "summary"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["tool"], "kchains");
    assert_eq!(v["command"], "count");
    assert_eq!(v["structure"], "Fp:3");
    assert_eq!(v["seeds"][0], "11");
    assert!(v["payload"]["count"].is_string());
}

#[test]
fn seeded_runs_are_identical() {
    let args = ["lemma-check", "1dp", "--structure", "Fp:5", "--d", "2", "--trials", "5", "--seed", "99"];
    let a = kchains(&args);
    let b = kchains(&args);
    assert_eq!(a.stdout, b.stdout);
    let c = kchains(&["lemma-check", "1dp", "--structure", "Fp:5", "--d", "2", "--trials", "5", "--seed", "100"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn full_plane_count() {
    let v = json(&kchains(&["count", "--structure", "Fp:3", "--random", "9", "--alpha", "1,1"]));
    // each of the 8 nonzero y has a 3-point line of partners
    assert_eq!(v["payload"]["count"], "72");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(kchains(&["count", "--alpha", "1"]).status.code(), Some(2));
    assert_eq!(kchains(&["count", "--structure", "Fp:4", "--random", "2", "--alpha", "1"]).status.code(), Some(2));
    assert_eq!(kchains(&["count", "--structure", "Fp:3", "--random", "2", "--alpha", "7"]).status.code(), Some(2));
    assert_eq!(kchains(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(kchains(&["lemma-check", "mn", "--trials", "0"]).status.code(), Some(2));
}

#[test]
fn failed_check_exits_one() {
    let out = kchains(&[
        "experiment", "sweep", "--structure", "Z:3^2", "--alpha", "1,2", "--multiple", "3", "--trials", "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["summary"]["pass"], false);
    assert!(v["summary"]["note"].as_str().unwrap().contains("satur"));
}

#[test]
fn construct_prints_point_set_text() {
    let out = kchains(&["construct", "axes", "--structure", "Fp:3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("Fp:3 2"));
    assert_eq!(lines.count(), 5);
}

#[test]
fn constructed_set_round_trips_through_a_file() {
    let out = kchains(&["construct", "erratum-family", "--structure", "Z:3^2", "--alpha", "2", "--beta", "4"]);
    let dir = std::env::temp_dir().join(format!("kchains-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("family.txt");
    std::fs::write(&path, &out.stdout).unwrap();
    let v = json(&kchains(&[
        "count", "--set", path.to_str().unwrap(), "--alpha", "2,4", "--policy", "pairwise", "--method", "brute",
    ]));
    assert_eq!(v["payload"]["count"], "45");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_csv_has_header_and_rows() {
    let out = kchains(&[
        "experiment", "sweep", "--structure", "Fp:5", "--alpha", "1", "--size", "10,20", "--trials", "3", "--format", "csv",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 2 * 3);
    let cols = lines[0].split(',').count();
    assert!(lines.iter().all(|l| l.split(',').count() == cols), "{text}");
}

#[test]
fn exact_values_are_strings() {
    let v = json(&kchains(&["decompose", "--structure", "Fp:3", "--random", "6", "--alpha", "1,2,0"]));
    fn walk(v: &Value, key: &str) {
        match v {
            Value::Number(_) => assert!(key.ends_with("_approx"), "bare number under {key}"),
            Value::Array(a) => a.iter().for_each(|x| walk(x, key)),
            Value::Object(m) => m.iter().for_each(|(k, x)| walk(x, k)),
            _ => {}
        }
    }
    walk(&v, "");
}
