use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trace-repair"))
        .args(args.split_whitespace())
        .output()
        .expect("binary runs")
}

fn reports(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("one JSON report per line"))
        .collect()
}

fn per_rn_totals(report: &Value) -> Vec<u64> {
    report["rns"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["total"].as_u64().unwrap())
        .collect()
}

#[test]
fn four_node_run() {
    let out = run("--p 2 --m 1 --t 2 --scheme depth1 --erase 2,3 --message 1,0,0,1 --json");
    assert_eq!(out.status.code(), Some(0));
    let reps = reports(&out);
    assert_eq!(reps.len(), 1);
    assert_eq!(reps[0]["scheme"], "depth1");
    assert_eq!(reps[0]["erased"], serde_json::json!([2, 3]));
    assert_eq!(per_rn_totals(&reps[0]), [3, 3]);
    assert_eq!(reps[0]["verdict"], serde_json::json!([true, true]));

    let table = run("--p 2 --m 1 --t 2 --scheme depth1 --erase 2,3 --message 1,0,0,1");
    let text = String::from_utf8(table.stdout).unwrap();
    assert!(text.contains("depth1  2,3     2+1 2+1"), "{text}");
    assert!(text.ends_with("1/1 trials passed\n"));
}

#[test]
fn inapplicable_scheme_exits_2() {
    let out = run("--p 3 --m 1 --t 2 --scheme depth1");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("char 3 does not divide t=2"));
    assert!(out.stdout.is_empty());

    let out = run("--p 2 --t 2 --scheme gw --erase 1,2");
    assert_eq!(out.status.code(), Some(2));

    let out = run("--p 2 --t 4 --k 9 --scheme depth2");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        "--scheme depth3",
        "--p 4",
        "--erase 5",
        "--erase 1,1",
        "--erase 1,2,3",
        "--message 1,0,1",
        "--message 1,0,2,0",
        "--trials 0",
        "--n 3 --k 3",
        "--frobnicate",
    ] {
        let out = run(args);
        assert_eq!(
            out.status.code(),
            Some(64),
            "{args}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    assert_eq!(run("--help").status.code(), Some(0));
}

#[test]
fn thousand_depth_two_trials_on_gf16() {
    let out = run("--p 2 --m 1 --t 4 --scheme depth2 --trials 1000 --seed 7 --json");
    assert_eq!(out.status.code(), Some(0));
    let reps = reports(&out);
    assert_eq!(reps.len(), 1000);
    for r in &reps {
        assert_eq!(per_rn_totals(r), [15, 15]);
        assert_eq!(r["verdict"], serde_json::json!([true, true]));
    }
}

#[test]
fn output_is_reproducible() {
    let args = "--p 3 --t 2 --scheme all --trials 40 --seed 11 --json";
    let a = run(args);
    let b = run(args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = run("--p 3 --t 2 --scheme all --trials 40 --seed 12 --json");
    assert_ne!(a.stdout, c.stdout);
    // GF(9) skips depth one
    let schemes: Vec<String> = reports(&a)
        .iter()
        .map(|r| r["scheme"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(schemes.len(), 80);
    assert!(schemes.iter().all(|s| s == "naive" || s == "depth2"));
}

#[test]
fn all_schemes_agree() {
    let out = run("--p 2 --m 2 --t 2 --scheme all --trials 5 --seed 3");
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for s in ["naive", "depth1", "depth2"] {
        let rows = text
            .lines()
            .filter(|l| l.split_whitespace().nth(1) == Some(s))
            .count();
        assert_eq!(rows, 5, "{text}");
    }
    assert!(!text.contains("disagree"));

    let single = run("--p 2 --t 4 --scheme all --erase 7 --message zero --json");
    let schemes: Vec<Value> = reports(&single)
        .iter()
        .map(|r| r["scheme"].clone())
        .collect();
    assert_eq!(schemes, [Value::from("naive"), Value::from("gw")]);
}
