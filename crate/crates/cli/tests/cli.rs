use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn cvwitness(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvwitness"))
        .args(args)
        .env_remove("CVWITNESS_PRECISION")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn ghzw_witness_is_genuine_at_every_order() {
    let out = cvwitness(&["witness", "--family", "ghzw", "--a", "1.5", "--mmax", "12"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["overall"], "genuine-entanglement-detected");
    let per_m = v["per_m"].as_array().unwrap();
    assert_eq!(per_m.len(), 12);
    assert!(per_m
        .iter()
        .all(|o| o["verdict"] == "genuine-entanglement-detected"));
}

#[test]
fn out_of_domain_xi_is_a_usage_error() {
    let out = cvwitness(&["moments", "--family", "xi", "--xi", "1.0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        cvwitness(&["moments", "--family", "vacuum", "--mmax", "65"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cvwitness(&["moments", "--family", "vacuum", "--precision", "29"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cvwitness(&["moments", "--family", "xi"]).status.code(),
        Some(2)
    );
    assert_eq!(cvwitness(&["bogus"]).status.code(), Some(2));
}

#[test]
fn exact_series_output() {
    let out = cvwitness(&["moments", "--family", "xi", "--xi", "0.5", "--mmax", "2"]);
    let v = json(&out);
    assert_eq!(v["arithmetic_mode"], "exact-rational");
    assert_eq!(v["values"][1]["value_decimal"], "1.375");
    assert_eq!(v["values"][2]["value_rational"], "243/128");
    let csv = cvwitness(&[
        "moments", "--family", "xi", "--xi", "0.5", "--mmax", "1", "--format", "csv",
    ]);
    assert_eq!(
        String::from_utf8(csv.stdout).unwrap(),
        "m,value_decimal,value_rational\n0,1,1/1\n1,1.375,11/8\n"
    );
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_cvwitness"))
        .args(["moments", "--family", "ghzw", "--a", "1.5", "--mmax", "1"])
        .env("CVWITNESS_PRECISION", "30")
        .output()
        .unwrap();
    let v = json(&out);
    assert_eq!(v["precision"], 30);
    assert_eq!(v["arithmetic_mode"], "high-precision");
    // thirty significant digits, with the trailing zero dropped
    assert_eq!(
        v["values"][1]["value_decimal"],
        "1.3232152608042847109561663509"
    );
}

#[test]
fn state_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.json");
    let out = cvwitness(&[
        "state",
        "--family",
        "xi",
        "--xi",
        "0.25",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let from_file = cvwitness(&["moments", "--state", path.to_str().unwrap(), "--mmax", "4"]);
    let from_flags = cvwitness(&["moments", "--family", "xi", "--xi", "0.25", "--mmax", "4"]);
    assert_eq!(from_file.stdout, from_flags.stdout);
}

#[test]
fn raw_state_numbers_are_read_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("raw.json");
    fs::write(&path, r#"{"A": [[2, 0.1, 0], [0.1, 1, 0], [0, 0, 1]]}"#).unwrap();
    let out = cvwitness(&["state", "--state", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["kind"], "raw");
    assert_eq!(v["A"][0][1], "0.1");
    // inverse entry −0.1/1.99 is not a terminating decimal; 50 digits are kept
    assert!(v["A_inverse"][0][1]
        .as_str()
        .unwrap()
        .starts_with("-0.050251256281407035175879396984924623115577889447"));

    fs::write(&path, r#"{"A": [[1, 2, 0], [2, 1, 0], [0, 0, 1]]}"#).unwrap();
    assert_eq!(
        cvwitness(&["state", "--state", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    fs::write(&path, "not json").unwrap();
    assert_eq!(
        cvwitness(&["state", "--state", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn outputs_are_byte_identical_and_metadata_is_separate() {
    let dir = tempfile::tempdir().unwrap();
    let meta = dir.path().join("meta.json");
    let args = [
        "simulate", "--family", "xi", "--xi", "0.5", "--shots", "20000", "--seed", "42",
    ];
    let a = cvwitness(&args);
    let mut with_meta: Vec<&str> = args.to_vec();
    with_meta.extend(["--metadata", meta.to_str().unwrap()]);
    let b = cvwitness(&with_meta);
    assert_eq!(a.stdout, b.stdout);
    assert!(!String::from_utf8_lossy(&a.stdout).contains("timestamp"));
    let m: Value = serde_json::from_str(&fs::read_to_string(&meta).unwrap()).unwrap();
    assert!(m["timestamp_unix"].as_u64().unwrap() > 0);
    let v = json(&a);
    assert_eq!(v["analytic_t_prime"], "8.2500000000000000e0");
}

#[test]
fn batch_file_layout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("batch.bin");
    let out = cvwitness(&[
        "simulate",
        "--family",
        "vacuum",
        "--shots",
        "100",
        "--seed",
        "9",
        "--batch",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let bytes = fs::read(&path).unwrap();
    assert_eq!(bytes.len(), 16 + 100 * 4 * 8);
    assert_eq!(&bytes[..3], b"T3H");
    assert_eq!(bytes[3], 1);
    assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 100);
    assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 9);
    assert_eq!(
        cvwitness(&["simulate", "--family", "vacuum", "--shots", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn ppt_report() {
    let v = json(&cvwitness(&["ppt", "--family", "xi", "--xi", "0.5"]));
    assert_eq!(v["class1"], true);
    assert_eq!(v["physical"], true);
    let v = json(&cvwitness(&["ppt", "--family", "vacuum"]));
    assert_eq!(v["class1"], false);
}

#[test]
fn oracle_subcommands() {
    let v = json(&cvwitness(&[
        "oracle", "moments", "--family", "xi", "--xi", "0.3", "--mmax", "4",
    ]));
    assert_eq!(v["entries"].as_array().unwrap().len(), 12);
    let v = json(&cvwitness(&[
        "oracle", "reorder", "--n", "3", "--m", "2", "--dim", "16",
    ]));
    assert_eq!(v["verified"], true);
    assert_eq!(
        cvwitness(&["oracle", "reorder", "--n", "3", "--m", "2", "--dim", "4"])
            .status
            .code(),
        Some(2)
    );
    let v = json(&cvwitness(&["oracle", "epr", "--n", "1", "--r", "0.5"]));
    assert_eq!(v["violated"], true);
}

#[test]
fn reproduce_reports_per_criterion() {
    let ok = cvwitness(&["reproduce", "--criterion", "11"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stderr).contains("criterion 11 PASS"));
    // the consecutive-ratio clause of criterion 3 does not hold at m = 12
    let failing = cvwitness(&["reproduce", "--criterion", "3"]);
    assert_eq!(failing.status.code(), Some(4));
    let v = json(&failing);
    assert_eq!(v["pass"], false);
    let failed: Vec<&Value> = v["criteria"][0]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .collect();
    assert_eq!(failed.len(), 1);
}

#[test]
fn outputs_carry_every_required_schema_field() {
    let cases: [(&str, Vec<&str>); 5] = [
        ("state", vec!["state", "--family", "ghzw", "--a", "1.5"]),
        ("moments", vec!["moments", "--family", "xi", "--xi", "0.5"]),
        ("witness", vec!["witness", "--family", "proposition"]),
        ("ppt", vec!["ppt", "--family", "xi", "--xi", "0.5"]),
        (
            "simulate",
            vec!["simulate", "--family", "vacuum", "--shots", "100"],
        ),
    ];
    for (name, args) in cases {
        let path = format!(
            "{}/schemas/{name}.v1.schema.json",
            env!("CARGO_MANIFEST_DIR")
        );
        let schema: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
        let v = json(&cvwitness(&args));
        for key in schema["required"].as_array().unwrap() {
            assert!(
                v.get(key.as_str().unwrap()).is_some(),
                "{name} output lacks {key}"
            );
        }
    }
}
