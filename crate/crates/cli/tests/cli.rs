use serde_json::Value;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cryptalg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = run(&full);
    let v: Value =
        serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)));
    (v, out.status.code().unwrap())
}

#[test]
fn polybius_friend() {
    let (v, code) = json(&["polybius", "--cipher", "21.42.24.15.33.14."]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["subcommand"], "polybius");
    assert_eq!(v["payload"]["plaintext"], "FRIEND");
    let text = run(&["polybius", "--cipher", "21.42.24.15.33.14."]);
    assert_eq!(String::from_utf8(text.stdout).unwrap(), "FRIEND\n");
}

#[test]
fn wallet_is_infeasible_but_succeeds() {
    let (v, code) = json(&["wallet", "--total", "2022", "--target", "8"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "infeasible");
    assert_eq!(v["payload"]["equation"], "2014 = 9n");
    assert_eq!(v["payload"]["splits"], Value::Null);
    let (v, code) = json(&["wallet", "--total", "2024", "--target", "8"]);
    assert_eq!((code, &v["status"]), (0, &Value::from("ok")));
    assert_eq!(v["payload"]["splits"], 224);
}

#[test]
fn usage_errors_exit_2() {
    for args in [&["nosuchcmd"][..], &["wallet", "--bogus"], &["sbox", "count"], &[]] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn pipeline_errors_exit_1() {
    let (v, code) = json(&["polybius", "--cipher", "99."]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "error");
    assert!(v["message"].is_string());
    let (v, code) = json(&["interp", "--input", "/nonexistent/points.csv"]);
    assert_eq!((code, &v["status"]), (1, &Value::from("error")));
}

#[test]
fn puzzles() {
    let (v, _) = json(&["pin"]);
    assert_eq!(v["payload"]["pin"], 1379);
    let (v, _) = json(&["primes"]);
    assert_eq!(v["payload"]["primes"], serde_json::json!([2, 3, 337]));
    assert_eq!(v["payload"]["quotient"], 113);
    let (v, _) = json(&["bobsymbol", "--n", "6", "--exhaustive"]);
    assert_eq!(v["payload"]["exhaustive"]["agrees"], true);
    let (v, _) = json(&["bobsymbol", "--n", "3", "--a", "1"]);
    assert_eq!(v["payload"]["symbol"], 0);
    assert_eq!(v["payload"]["trace"], 1);
}

#[test]
fn quadcipher_ranks_by_words() {
    let (v, code) = json(&[
        "quadcipher",
        "--cipher",
        "L78V8LC7GBEYEE",
        "--words",
        "nsucrypto,2022",
        "--limit",
        "1",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["key"], serde_json::json!({ "a": 19, "b": 0, "c": 19 }));
    assert_eq!(v["payload"]["candidates"], serde_json::json!(["NSUCRYPTO 2022"]));
    let (v, _) = json(&["quadcipher", "--encrypt", "NSUCRYPTO 2022"]);
    assert_eq!(v["payload"]["ciphertext"], "L78V8LC7GBEYEE");
}

#[test]
fn hill_recovery() {
    let (v, code) = json(&["hill", "--cipher", "CYPHXWQE!WNKHZ0Z"]);
    assert_eq!(code, 0);
    let cands = v["payload"]["alignments"][0]["candidates"].as_array().unwrap();
    assert_eq!(cands.len(), 4);
    let good: Vec<&Value> = cands.iter().filter(|c| c["plaintext"] == "GOODLUCKFORWIN!!").collect();
    assert_eq!(good.len(), 1);
    assert_eq!(good[0]["lift"], serde_json::json!([[0, 1], [0, 0]]));
    assert_eq!(good[0]["invertible"], true);
}

#[test]
fn big_integers_and_empty_lists() {
    let (v, _) = json(&["sbox", "count", "--n", "3"]);
    assert_eq!(v["payload"]["s"], 24576);
    let (v, _) = json(&["sbox", "count", "--n", "4", "--bounds"]);
    assert_eq!(v["payload"]["lower_decimal"], "19284081868800");
    assert_eq!(v["payload"]["upper_decimal"], "20513112883200");
    assert_eq!(v["payload"]["h"], serde_json::json!([0, 2, 2, 58, 12618]));
    let (v, code) = json(&[
        "interp",
        "--synth",
        "1",
        "--points",
        "80",
        "--correct",
        "60",
        "--need",
        "70",
        "--budget",
        "5",
    ]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "no-candidate");
    assert_eq!(v["payload"]["candidates"], serde_json::json!([]));
    let raw = run(&[
        "--json",
        "interp",
        "--synth",
        "1",
        "--points",
        "80",
        "--correct",
        "60",
        "--need",
        "70",
        "--budget",
        "5",
    ]);
    assert!(String::from_utf8(raw.stdout).unwrap().contains("\"candidates\": []"));
}

#[test]
fn interp_recovers_small_instance() {
    let args = [
        "interp",
        "--synth",
        "4",
        "--points",
        "120",
        "--correct",
        "100",
        "--need",
        "95",
    ];
    let (v, code) = json(&args);
    assert_eq!(code, 0, "{v}");
    let c = &v["payload"]["candidates"][0];
    assert!(c["satisfied"].as_u64().unwrap() >= 100);
    let mut one_thread = vec!["--threads", "1"];
    one_thread.extend_from_slice(&args);
    assert_eq!(json(&one_thread).0, v);
}

#[test]
fn feistel_verify() {
    let (v, code) = json(&["feistel", "verify", "--matrix", "a1", "--m", "2", "--rounds", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["all_hold"], true);
    assert_eq!(v["payload"]["reports"].as_array().unwrap().len(), 4);
    let (v, _) = json(&[
        "feistel", "verify", "--matrix", "a2", "--m", "3", "--rounds", "3", "--sbox", "perm:9",
    ]);
    assert_eq!(v["payload"]["all_hold"], true);
    let (v, code) = json(&[
        "feistel",
        "verify",
        "--matrix",
        "a2-typeset",
        "--m",
        "3",
        "--rounds",
        "1",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["all_hold"], false);
    assert!(v["payload"]["reports"][0]["counterexample"].is_object());
}

#[test]
fn qsim_demos() {
    let (v, _) = json(&["qsim", "demo", "--experiment", "ghz-plus"]);
    let plus = &v["payload"]["selections"][1];
    assert_eq!(plus["entangled"], true);
    assert!((plus["probability"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let (v, _) = json(&["qsim", "demo", "--experiment", "w-measure"]);
    let sel = v["payload"]["selections"].as_array().unwrap();
    assert!((sel[0]["probability"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
    assert_eq!(sel[1]["entangled"], false);
    let (v, _) = json(&["qsim", "demo", "--experiment", "reversed-cnot"]);
    assert_eq!(v["payload"]["truth_table"].as_array().unwrap().len(), 4);
}

#[test]
fn protocols() {
    let (v, _) = json(&["threepass", "--mode", "shamir", "--p", "23", "--m", "4"]);
    assert_eq!(v["payload"]["recovered"], 4);
    let (v, _) = json(&["threepass", "--mode", "attack"]);
    assert_eq!(v["payload"]["xor"]["recovered"], true);
    assert_eq!(v["payload"]["add"]["recovered"], true);
    assert_eq!(v["payload"]["shamir"]["recovered"], false);
    let (v, _) = json(&["threepass", "--mode", "xor-demo"]);
    assert_eq!(v["payload"]["xor"]["success"], true);
    for scheme in ["rabin", "group"] {
        let (v, code) = json(&["ecoin", "--scheme", scheme, "--coins", "3"]);
        assert_eq!(code, 0);
        assert_eq!(v["payload"]["as_expected"], true);
    }
}

#[test]
fn same_seed_same_bytes() {
    for args in [
        &["--seed", "7", "ecoin", "--scheme", "group", "--coins", "2"][..],
        &["--seed", "7", "sbox", "count", "--n", "4", "--mc", "20000"],
        &[
            "--seed", "7", "feistel", "verify", "--matrix", "a1", "--m", "2", "--rounds", "1",
        ],
        &["--seed", "7", "threepass", "--mode", "attack"],
    ] {
        let mut full = vec!["--json"];
        full.extend_from_slice(args);
        assert_eq!(run(&full).stdout, run(&full).stdout, "{args:?}");
    }
}

#[test]
fn every_subcommand_has_help() {
    for cmd in [
        "polybius",
        "quadcipher",
        "hill",
        "pin",
        "wallet",
        "primes",
        "bobsymbol",
        "interp",
        "feistel",
        "sbox",
        "qsim",
        "threepass",
        "ecoin",
    ] {
        let out = run(&[cmd, "--help"]);
        assert_eq!(out.status.code(), Some(0), "{cmd}");
        assert!(out.stdout.len() > 40, "{cmd}");
    }
}
