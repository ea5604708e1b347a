//! End-to-end CLI tests: output shapes, JSON round trips, batch ordering
//! and exit codes, and error reporting.

use std::io::Write;
use std::process::{Command, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_linkcount"))
}

fn run(args: &[&str]) -> (String, String, i32) {
    let out = bin().args(args).output().expect("binary runs");
    (
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
        out.status.code().unwrap_or(-1),
    )
}

fn run_stdin(args: &[&str], input: &str) -> (String, i32) {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    (
        String::from_utf8_lossy(&out.stdout).into_owned(),
        out.status.code().unwrap_or(-1),
    )
}

#[test]
fn epsilon_undefined_marker_and_empty_bound() {
    // 2 divides both fundamental parts of 8 and 12.
    let (out, _, code) = run(&["epsilon", "--d1", "8", "--d2", "12", "--bound", "10"]);
    assert_eq!(code, 0);
    let eps_row = out.lines().nth(1).unwrap();
    assert!(eps_row.split_whitespace().any(|c| c == "·"), "{out}");

    let (out, _, code) = run(&["epsilon", "--d1", "5", "--d2", "381", "--bound", "0"]);
    assert_eq!(code, 0);
    for line in out.lines() {
        assert_eq!(line.split_whitespace().count(), 1, "nonempty table: {out}");
    }
}

#[test]
fn invalid_discriminants_are_rejected() {
    let (_, err, code) = run(&["epsilon", "--d1", "4", "--d2", "8", "--bound", "10"]);
    assert_eq!(code, 2);
    assert!(err.contains("NotADiscriminant"), "{err}");

    let (_, err, code) = run(&["algebras", "--d1", "7", "--d2", "5"]);
    assert_eq!(code, 2);
    assert!(err.contains("NotADiscriminant"), "{err}");
}

#[test]
fn count_plain_and_level_restricted() {
    let (out, _, code) = run(&[
        "count", "--d1", "73", "--d2", "937", "--x", "89", "--disc", "35", "--level", "1",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "160");

    let (out, _, code) = run(&[
        "count", "--d1", "73", "--d2", "937", "--x", "89", "--disc", "35", "--level", "1",
        "--ell", "12",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("12"), "{out}");
    let count: i64 = out
        .lines()
        .nth(1)
        .unwrap()
        .split_whitespace()
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(count, 16);

    // Non-nice triples are refused with a machine-readable code.
    let (_, err, code) = run(&[
        "count", "--d1", "20", "--d2", "68", "--x", "2", "--disc", "339", "--level", "1",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("NotNice"), "{err}");
}

#[test]
fn intersect_json_round_trips() {
    let (out, _, code) = run(&[
        "intersect", "--d1", "5", "--d2", "381", "--disc", "6", "--format", "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], "linkcount/1");
    let report: linkcount::intersection::IntersectionReport =
        serde_json::from_value(v["report"].clone()).unwrap();
    assert_eq!(report.total_unsigned, 128);
    assert_eq!(report.total_signed, 0);
    // Round trip: render -> parse -> render is stable.
    let again = serde_json::to_value(&report).unwrap();
    assert_eq!(again, v["report"]);
}

#[test]
fn order_json_has_expected_fields() {
    let (out, _, code) = run(&["order", "--d1", "5", "--d2", "381", "--x", "3"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], "linkcount/1");
    assert_eq!(v["reduced_discriminant"], "474");
    assert_eq!(v["lattice"]["algebra"][0], "5");
    assert_eq!(v["lattice"]["algebra"][1], "-1896");
    let json: linkcount::orders::LatticeJson =
        serde_json::from_value(v["lattice"].clone()).unwrap();
    let lat = linkcount::orders::RationalLattice::from_json(&json).unwrap();
    assert_eq!(lat.to_json().unwrap(), json, "canonical form survives");

    let (out, _, code) = run(&["order", "--d1", "73", "--d2", "937", "--x", "89", "--ell", "2"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["reduced_discriminant"], "3780");
    assert_eq!(v["frame_determinant"], "1/32");

    let (_, err, code) = run(&["order", "--d1", "5", "--d2", "381", "--x", "3", "--ell", "5"]);
    assert_eq!(code, 2);
    assert!(err.contains("LevelNotAllowed"), "{err}");
}

#[test]
fn oriented_counts_without_transversality() {
    // x^2 > D1*D2: no sign, count 2^(n+1) per orientation pair.
    let (out, _, code) = run(&[
        "count", "--d1", "5", "--d2", "381", "--x", "45", "--disc", "6", "--ell", "1",
        "--oriented",
    ]);
    assert_eq!(code, 0);
    let count: i64 = out
        .lines()
        .nth(1)
        .unwrap()
        .split_whitespace()
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(count, 4);

    let (_, err, code) = run(&[
        "count", "--d1", "5", "--d2", "381", "--x", "45", "--disc", "6", "--ell", "1",
        "--oriented", "--positive",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("NoSignDefined"), "{err}");
}

#[test]
fn json_formats_carry_the_schema() {
    let (out, _, code) = run(&[
        "epsilon", "--d1", "5", "--d2", "381", "--bound", "10", "--format", "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], "linkcount/1");
    assert_eq!(v["epsilon"]["2"], -1);
    assert_eq!(v["epsilon"]["5"], 1);

    let (out, _, code) = run(&[
        "count", "--d1", "73", "--d2", "937", "--x", "89", "--disc", "35", "--format", "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["counts"][0]["count"], 160);

    let (out, _, code) = run(&["algebras", "--d1", "5", "--d2", "381", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["algebras"].as_array().unwrap().len(), 22);
}

#[test]
fn angle_output() {
    let (out, _, code) = run(&["angle", "--d1", "5", "--d2", "381", "--x", "3"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "tan(theta) = sqrt(1896)/3");

    let (_, err, code) = run(&["angle", "--d1", "5", "--d2", "381", "--x", "45"]);
    assert_eq!(code, 2);
    assert!(err.contains("NoTransversalIntersection"), "{err}");
}

#[test]
fn batch_orders_output_reports_errors_and_sets_exit_code() {
    let input = "\
# comment line
5 381 3
20 68 2
73 937 89

5 381
oops
";
    let (out, code) = run_stdin(&["batch", "--disc", "35", "--jobs", "4"], input);
    assert_eq!(code, 1, "errors present: {out}");
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 5);
    // Output order matches input line order despite 4 workers.
    let line_nos: Vec<i64> = lines
        .iter()
        .map(|l| {
            l.split_whitespace()
                .nth(1)
                .unwrap()
                .parse::<i64>()
                .unwrap()
        })
        .collect();
    assert_eq!(line_nos, vec![2, 3, 4, 6, 7]);
    assert!(lines[0].contains("\"count\":0"), "{}", lines[0]);
    assert!(lines[1].contains("error[NotNice]"), "{}", lines[1]);
    assert!(lines[2].contains("\"count\":160"), "{}", lines[2]);
    assert!(lines[4].contains("error[InvalidArgument]"), "{}", lines[4]);

    // All-good batch exits 0.
    let (out, code) = run_stdin(&["batch"], "5 381 3\n73 937 89\n");
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().all(|l| l.contains("ok")), "{out}");

    // JSON format collects rows under the schema header.
    let (out, code) = run_stdin(&["batch", "--format", "json"], "5 381\n");
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], "linkcount/1");
    assert_eq!(v["rows"][0]["summary"]["x_count"], 22);
}

#[test]
fn equal_discriminants_filter_the_degenerate_diagonal() {
    // D1 = D2 is allowed; x^2 = D1*D2 never enumerates since only
    // x^2 < D1*D2 appears.
    let (out, _, code) = run(&["algebras", "--d1", "5", "--d2", "5", "--format", "tsv"]);
    assert_eq!(code, 0);
    let xs: Vec<&str> = out
        .lines()
        .skip(1)
        .map(|l| l.split('\t').next().unwrap())
        .collect();
    assert_eq!(xs, vec!["1", "3"]);
}

#[test]
fn jobs_env_variable_is_honored() {
    let mut child = bin()
        .args(["batch", "--disc", "35"])
        .env("LINKCOUNT_JOBS", "3")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(b"73 937 89\n73 937 91\n73 937 93\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    let line_nos: Vec<&str> = text
        .lines()
        .map(|l| l.split_whitespace().nth(1).unwrap())
        .collect();
    assert_eq!(line_nos, vec!["1", "2", "3"], "{text}");
}

#[test]
fn verify_subcommands_pass() {
    for suite in ["tree", "tables", "gz"] {
        let (out, _, code) = run(&["verify", suite]);
        assert_eq!(code, 0, "{suite}: {out}");
        assert!(out.contains("PASS"), "{suite}: {out}");
    }
}
