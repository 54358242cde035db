use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

use twobridge_torsion::cli::{run, CliOutcome, EXIT_FAIL, EXIT_INVALID, EXIT_PASS};

fn twobridge(args: &[&str]) -> CliOutcome {
    run(std::iter::once("twobridge").chain(args.iter().copied()))
}

fn json(out: &CliOutcome) -> Value {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout))
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

#[test]
fn riley_json_matches_golden() {
    let out = twobridge(&["riley", "--p", "3", "--q", "1"]);
    assert_eq!(out.exit_code, EXIT_PASS);
    let path = golden("riley_3_1.json");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &out.stdout).unwrap();
    }
    assert_eq!(out.stdout, std::fs::read_to_string(&path).unwrap());
    assert_eq!(json(&out)["phi_w"], "m^2 + m^-2 - 1 - u");
}

#[test]
fn riley_figure_eight_and_invalid_forms() {
    let out = twobridge(&["riley", "--p", "5", "--q", "3"]);
    let v = json(&out);
    assert_eq!(v["k"], 3);
    assert_eq!(v["degree_u"], 2);
    assert!(v["identities"].as_object().unwrap().values().all(|b| b == true));

    for bad in [["--p", "4", "--q", "1"], ["--p", "9", "--q", "3"], ["--p", "5", "--q", "7"]] {
        let out = twobridge(&["riley", bad[0], bad[1], bad[2], bad[3]]);
        assert_eq!(out.exit_code, EXIT_INVALID, "{bad:?}");
        assert!(out.stderr.starts_with("error:"));
        assert_eq!(out.stderr.lines().count(), 1);
    }
    assert_eq!(twobridge(&["riley", "--p", "5"]).exit_code, EXIT_INVALID);
    assert_eq!(twobridge(&["riley", "--p", "5", "--q", "3", "--tolerance", "root_gap=-1"]).exit_code, EXIT_INVALID);
}

#[test]
fn verify_is_byte_identical_across_runs() {
    let args = ["verify", "--p", "7", "--q", "3", "--trials", "20", "--seed", "1"];
    let a = twobridge(&args);
    let b = twobridge(&args);
    assert_eq!(a.exit_code, EXIT_PASS);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["pass"], true);
    assert!(v["max_relative_residual"].as_f64().unwrap() <= 1e-7);
    assert_eq!(v["trials"].as_array().unwrap().len(), 20);
}

#[test]
fn verify_torus_knot_targets_minus_two_q() {
    let out = twobridge(&["verify", "--p", "5", "--q", "1", "--trials", "20"]);
    assert_eq!(out.exit_code, EXIT_PASS);
    let v = json(&out);
    assert_eq!(v["target"], serde_json::json!([-2.0, 0.0]));
    for trial in v["trials"].as_array().unwrap() {
        let sum = &trial["report"]["inverse_sum"];
        assert!((sum[0].as_f64().unwrap() + 2.0).abs() < 1e-8);
        assert!(sum[1].as_f64().unwrap().abs() < 1e-8);
    }
}

#[test]
fn pinned_trace_two_is_rejected_or_resampled() {
    let out = twobridge(&["verify", "--p", "5", "--q", "3", "--trials", "1", "--c", "2.0+0i"]);
    assert_eq!(out.exit_code, EXIT_FAIL);
    assert!(out.stderr.contains("non-generic"));

    let out = twobridge(&["verify", "--p", "5", "--q", "3", "--trials", "1", "--c", "2.0+0i", "--resample"]);
    assert_eq!(out.exit_code, EXIT_PASS);
    assert_eq!(json(&out)["resampled"], true);

    let out = twobridge(&["verify", "--p", "5", "--q", "3", "--c", "2.5-0.5i"]);
    assert_eq!(out.exit_code, EXIT_PASS);
    assert_eq!(json(&out)["trials"][0]["report"]["c"], serde_json::json!([2.5, -0.5]));
}

#[test]
fn oracle_command() {
    let out = twobridge(&["oracle", "--p", "5", "--q", "3", "--samples", "10"]);
    assert_eq!(out.exit_code, EXIT_PASS);
    let v = json(&out);
    assert!(v["max_relative_difference"].as_f64().unwrap() <= 1e-8);
    assert!(v["sign"].is_i64());

    let out = twobridge(&["oracle", "--p", "3", "--q", "1", "--samples", "5", "--format", "csv"]);
    assert_eq!(out.exit_code, EXIT_PASS);
    let mut reader = csv::Reader::from_reader(out.stdout.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 5);
    for row in rows {
        assert!((row[4].parse::<f64>().unwrap() - 0.5).abs() < 1e-8);
    }
}

#[test]
fn dump_cochain_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("cochain.json");
    let report = dir.path().join("report.json");
    let out = twobridge(&[
        "oracle",
        "--p",
        "7",
        "--q",
        "3",
        "--samples",
        "2",
        "--dump-cochain",
        dump.to_str().unwrap(),
        "--output",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.exit_code, EXIT_PASS);
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let entries = report["entries"].as_array().unwrap().len();
    assert_eq!(entries, 6);
    let dump: Value = serde_json::from_str(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    let records = dump.as_array().unwrap();
    assert_eq!(records.len(), entries);
    assert_eq!(records[0]["delta1"].as_array().unwrap().len(), 3);
    assert_eq!(records[0]["delta1"][0].as_array().unwrap().len(), 6);
    assert_eq!(records[0]["h2_rep"][2].as_array().unwrap().len(), 2);
}

#[test]
fn batch_over_hyperbolic_knots() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("knots.csv");
    let output = dir.path().join("out.json");
    std::fs::write(&input, "p,q\n5,3\n7,3\n7,5\n9,5\n11,7\n13,5\n").unwrap();
    let args = ["batch", "--input", input.to_str().unwrap(), "--trials", "5", "--output", output.to_str().unwrap()];
    let out = twobridge(&args);
    assert_eq!(out.exit_code, EXIT_PASS, "{}", out.stderr);
    let first = std::fs::read_to_string(&output).unwrap();
    let v: Value = serde_json::from_str(&first).unwrap();
    let rows = v["rows"].as_array().unwrap();
    let knots: Vec<(i64, i64)> = rows.iter().map(|r| (r["p"].as_i64().unwrap(), r["q"].as_i64().unwrap())).collect();
    assert_eq!(knots, [(5, 3), (7, 3), (7, 5), (9, 5), (11, 7), (13, 5)]);
    assert!(rows.iter().all(|r| r["status"] == "pass"));
    assert_eq!(v["pass"], true);

    twobridge(&args);
    assert_eq!(std::fs::read_to_string(&output).unwrap(), first);
}

#[test]
fn batch_keeps_going_past_bad_rows() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("knots.csv");
    std::fs::write(&input, "p,q\n5,3\n4,1\n3,1\n").unwrap();
    let out = twobridge(&["batch", "--input", input.to_str().unwrap(), "--trials", "2"]);
    assert_eq!(out.exit_code, EXIT_INVALID);
    let v = json(&out);
    let statuses: Vec<&str> = v["rows"].as_array().unwrap().iter().map(|r| r["status"].as_str().unwrap()).collect();
    assert_eq!(statuses, ["pass", "invalid", "pass"]);
    assert!(v["rows"][1]["error"].as_str().unwrap().contains("odd"));

    let missing = dir.path().join("missing.csv");
    assert_eq!(twobridge(&["batch", "--input", missing.to_str().unwrap()]).exit_code, EXIT_INVALID);
}

#[test]
fn config_file_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("twobridge.toml");
    std::fs::write(&config, "seed = 5\ntrials = 3\nformat = \"csv\"\n\n[tolerances]\nvanishing = 1e-9\n").unwrap();
    let bin = env!("CARGO_BIN_EXE_twobridge");
    let out = Command::new(bin)
        .args(["verify", "--p", "7", "--q", "5"])
        .env("TWOBRIDGE_CONFIG", &config)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_PASS));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4, "{text}");
    assert!(text.starts_with("trial,"));

    // Flags beat the file.
    let out = Command::new(bin)
        .args(["verify", "--p", "7", "--q", "5", "--format", "json", "--trials", "2"])
        .env("TWOBRIDGE_CONFIG", &config)
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], 5);
    assert_eq!(v["trials"].as_array().unwrap().len(), 2);
    assert_eq!(v["threshold"], 1e-9);

    let out = Command::new(bin)
        .args(["riley", "--p", "3", "--q", "1"])
        .env("TWOBRIDGE_CONFIG", dir.path().join("absent.toml"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_INVALID));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_twobridge");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["riley", "--p", "3", "--q", "1"]), Some(EXIT_PASS));
    assert_eq!(status(&["riley", "--p", "4", "--q", "1"]), Some(EXIT_INVALID));
    assert_eq!(status(&["verify", "--p", "3", "--q", "1", "--c", "-2+0i"]), Some(EXIT_FAIL));
    assert_eq!(status(&["--help"]), Some(EXIT_PASS));
}
