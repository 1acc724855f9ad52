use std::process::{Command, Output};

use serde_json::Value;

fn exunit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exunit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn keys(v: &Value) -> Vec<&str> {
    let mut k: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    k.sort_unstable();
    k
}

#[test]
fn count_record_has_exact_schema() {
    let o = exunit(&["count", "--n", "5", "--k", "2", "--c", "0", "--e", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(keys(&v), ["count", "elapsed", "method", "query"]);
    assert_eq!(keys(&v["query"]), ["c", "e", "k", "n"]);
    assert_eq!(v["count"], "4");
    assert_eq!(v["method"], "closed");
    assert_eq!(v["query"]["n"], 5);
    assert!(v["elapsed"].is_u64());
}

#[test]
fn count_examples_and_methods_agree() {
    for (args, expect) in [
        (["--n", "4", "--k", "2", "--c", "1", "--e", "2"], "0"),
        (["--n", "15", "--k", "3", "--c", "1", "--e", "1"], "0"),
        (["--n", "7", "--k", "2", "--c", "-1", "--e", "2"], "8"),
    ] {
        for method in ["closed", "convolution", "naive"] {
            let mut full = vec!["count"];
            full.extend(args);
            full.extend(["--method", method]);
            let o = exunit(&full);
            assert_eq!(o.status.code(), Some(0), "{full:?}");
            assert_eq!(json(&o)["count"], expect, "{full:?}");
        }
    }
}

#[test]
fn sequential_flag_gives_same_answer() {
    let par = exunit(&["count", "--n", "1155", "--k", "3", "--c", "7", "--e", "2", "--method", "convolution"]);
    let seq = exunit(&["--sequential", "count", "--n", "1155", "--k", "3", "--c", "7", "--e", "2", "--method", "convolution"]);
    assert_eq!(json(&par)["count"], json(&seq)["count"]);
}

#[test]
fn sweep_csv_golden() {
    let o = exunit(&["sweep", "--n", "5", "--k", "2", "--e", "2", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "c,count\n0,4\n1,0\n2,1\n3,4\n4,0\ntotal,9\nexpected,9\n");
}

#[test]
fn sweep_json_totals() {
    let o = exunit(&["sweep", "--n", "35", "--k", "3", "--e", "1"]);
    let v = json(&o);
    assert_eq!(keys(&v), ["records", "summary"]);
    assert_eq!(v["records"].as_array().unwrap().len(), 35);
    assert_eq!(keys(&v["records"][0]), ["count", "elapsed", "method", "query"]);
    assert_eq!(v["summary"]["total"], v["summary"]["expected"]);
    assert_eq!(v["summary"]["expected"], "3375");
}

#[test]
fn verify_counts_comparisons() {
    let o = exunit(&["verify", "--max-n", "1", "--k", "2", "--e", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["comparisons"], 1);
    assert_eq!(v["mismatches"].as_array().unwrap().len(), 0);

    let o = exunit(&["verify", "--max-n", "60", "--k", "2,3", "--e", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["comparisons"], 2 * (1..=60).sum::<u64>());
}

#[test]
fn lemma_suites_and_fault_injection() {
    let o = exunit(&["lemmas", "--only", "gauss"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines.iter().all(|l| l.starts_with("PASS ")));

    let o = exunit(&["lemmas", "--only", "exunits", "--inject-fault", "exunits"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL exunit-count"));

    assert_eq!(exunit(&["lemmas", "--only", "nonsense"]).status.code(), Some(2));
}

#[test]
fn bench_rows_agree() {
    let o = exunit(&["bench", "--n", "105,1155", "--k", "3", "--e", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,method,elapsed_us,count"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    for pair in rows.chunks(2) {
        assert_eq!(pair[0][0], pair[1][0]);
        assert_eq!(pair[0][3], pair[1][3]);
    }
}

#[test]
fn exit_codes() {
    // usage
    assert_eq!(exunit(&["count", "--n", "5", "--k", "1", "--e", "2"]).status.code(), Some(2));
    assert_eq!(exunit(&["count", "--n", "0", "--k", "2", "--e", "2"]).status.code(), Some(2));
    assert_eq!(exunit(&["count", "--n", "9", "--k", "2", "--e", "3", "--method", "closed"]).status.code(), Some(2));
    assert_eq!(exunit(&["bench", "--n", "", "--k", "2", "--e", "2"]).status.code(), Some(2));
    assert_eq!(exunit(&["frobnicate"]).status.code(), Some(2));
    // capacity
    let o = exunit(&["count", "--n", "111546435", "--k", "50", "--c", "2", "--e", "2", "--method", "convolution"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("capacity"));
    assert_eq!(
        exunit(&["count", "--n", "99999", "--k", "8", "--e", "2", "--method", "naive"]).status.code(),
        Some(3)
    );
    // the closed form handles the same modulus
    let o = exunit(&["count", "--n", "111546435", "--k", "50", "--c", "2", "--e", "2"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn arithmetic_helpers() {
    let v = json(&exunit(&["exunits", "--n", "15"]));
    assert_eq!(v["members"], serde_json::json!([2, 8, 14]));
    assert_eq!(v["count"], "3");

    let v = json(&exunit(&["factor", "--n", "360"]));
    assert_eq!(v["factors"], serde_json::json!([[2, 3], [3, 2], [5, 1]]));
    assert_eq!(v["omega"], 3);

    let v = json(&exunit(&["gauss", "--p", "3", "--alpha", "2"]));
    assert_eq!(v["pass"], true);
    assert!((v["predicted"][1].as_f64().unwrap() + 3f64.sqrt()).abs() < 1e-9);

    let v = json(&exunit(&["charsum", "--p", "5", "--alpha", "2"]));
    assert_eq!(v["pass"], true);
    assert!(exunit(&["gauss", "--p", "9", "--alpha", "1"]).status.code() == Some(2));
}

#[test]
fn lifting_commands() {
    let v = json(&exunit(&["lift", "root", "--coeffs", "-2,0,1", "--a0", "3", "--p", "7", "--s", "2"]));
    assert_eq!(v["root"], 10);
    assert_eq!(v["modulus"], 49);

    let v = json(&exunit(&[
        "lift", "solution", "--sol", "2,2", "--p", "3", "--c", "2", "--e", "2", "--s", "2", "--offsets", "3",
    ]));
    assert_eq!(v["solution"], serde_json::json!([5, 2]));

    let o = exunit(&["lift", "solution", "--sol", "2,2", "--p", "3", "--c", "2", "--e", "3", "--s", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = exunit(&["lift", "root", "--coeffs", "0,0,1", "--a0", "0", "--p", "3", "--s", "2"]);
    assert_eq!(o.status.code(), Some(2));
}
