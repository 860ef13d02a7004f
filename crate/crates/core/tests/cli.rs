use std::fs;

use steinperm::analysis::rate_table_from_csv;
use steinperm::cli::run;
use steinperm::exact_dist::IntegerDistribution;
use steinperm::matrix::AntisymmetricMatrix;
use steinperm::verify::WORKED_PI;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["steinperm"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn verify_descents_passes() {
    let (code, out, _) = call(&["verify", "--stat", "descents", "--n", "6"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["all_passed"], true);
    assert!(v["checks"].as_array().unwrap().len() >= 10);
}

#[test]
fn verify_smallest_inversions() {
    assert_eq!(call(&["verify", "--stat", "inversions", "--n", "2"]).0, 0);
}

#[test]
fn verify_custom_matrix_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    let m = AntisymmetricMatrix::from_json(
        r#"{"n": 4, "entries": [["0","1/2","-3","0"],["-1/2","0","2","1"],["3","-2","0","-1/3"],["0","-1","1/3","0"]]}"#,
    )
    .unwrap();
    fs::write(&path, m.to_json()).unwrap();
    let p = path.to_str().unwrap();
    let (code, out, _) = call(&["verify", "--matrix", p, "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("check,passed,detail\n"));
    assert!(!out.contains(",false,"));
    assert_eq!(call(&["verify", "--matrix", p, "--n", "5"]).0, 2);
}

#[test]
fn bad_matrix_names_entry() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"{"n": 3, "entries": [["0","1","2"],["-1","0","4"],["-2","5","0"]]}"#).unwrap();
    let (code, out, err) = call(&["verify", "--matrix", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("(2, 3)"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["verify"][..],
        &["verify", "--stat", "descents"],
        &["verify", "--stat", "triangles", "--n", "4"],
        &["verify", "--stat", "descents", "--n", "12"],
        &["dist", "--stat", "descents", "--n", "4", "--format", "csv"],
        &["rate", "--n-list", "10"],
        &["sample", "--stat", "descents", "--n", "4"],
        &["bounds", "--stat", "descents", "--n", "5", "--mode", "mc"],
        &["nonsense"],
    ] {
        assert_eq!(call(args).0, 2, "{args:?}");
    }
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("verify"));
}

#[test]
fn enumeration_override_warns_and_applies() {
    let (code, _, err) = call(&["verify", "--stat", "descents", "--n", "5", "--enum-limit", "4"]);
    assert_eq!(code, 2);
    assert!(err.contains("warning: enumeration limit"));
}

#[test]
fn example_text_and_json() {
    let (code, out, _) = call(&["example"]);
    assert_eq!(code, 0);
    assert!(out.contains("6 4 3 5 2 1 7"));
    assert!(out.contains("X(π) = 1, X(π′) = 9"));
    let (code, out, _) = call(&["example", "--format", "json"]);
    assert_eq!(code, 0);
    let v = json(&out);
    let pi: Vec<usize> = serde_json::from_value(v["pi"].clone()).unwrap();
    assert_eq!(pi, WORKED_PI);
    assert_eq!(v["inversions"]["x_prime"], "9");
}

#[test]
fn dist_round_trips() {
    let (code, out, _) = call(&["dist", "--stat", "descents", "--n", "4"]);
    assert_eq!(code, 0);
    let d = IntegerDistribution::from_json(&out).unwrap();
    let counts: Vec<String> = d.counts.iter().map(|c| c.to_string()).collect();
    assert_eq!(counts, ["1", "11", "11", "1"]);
    let (_, out, _) = call(&["dist", "--stat", "inversions", "--n", "3"]);
    let d = IntegerDistribution::from_json(&out).unwrap();
    assert_eq!(d.counts.iter().map(|c| c.to_string()).collect::<Vec<_>>(), ["1", "2", "2", "1"]);
}

#[test]
fn rate_csv_round_trips() {
    let (code, out, _) = call(&["rate", "--stat", "inversions", "--n-list", "10,20", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 3);
    let rows = rate_table_from_csv(&out).unwrap();
    assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), [10, 20]);
    let (_, out_json, _) = call(&["rate", "--stat", "inversions", "--n-list", "10,20"]);
    let back: Vec<steinperm::analysis::RateRow> = serde_json::from_str(&out_json).unwrap();
    assert_eq!(back, rows);
}

#[test]
fn bounds_exact_and_mc() {
    let (code, out, _) = call(&["bounds", "--stat", "descents", "--n", "8", "--mode", "exact"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["ingredients"]["lambda"], "1/4");
    let ing: steinperm::stein::BoundIngredients = serde_json::from_value(v["ingredients"].clone()).unwrap();
    let rep = steinperm::stein::BoundReport::evaluate(&ing).unwrap();
    let rep_back: steinperm::stein::BoundReport = serde_json::from_value(v["report"].clone()).unwrap();
    assert_eq!(rep, rep_back);

    let (code, out, _) = call(&["bounds", "--stat", "inversions", "--n", "9", "--mode", "mc", "--seed", "1", "--trials", "4000"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["ingredients"]["mode"], "mc");
    assert_eq!(v["ingredients"]["seed"], 1);
    assert!(v["ingredients"]["var_cond_w"].is_null());

    let (code, out, _) = call(&["bounds", "--stat", "descents", "--n-list", "4,5,6"]);
    assert_eq!(code, 0);
    let rows: Vec<steinperm::stein::ScalingRow> = serde_json::from_str(&out).unwrap();
    assert_eq!(rows.len(), 3);
}

#[test]
fn sample_is_deterministic_and_consistent() {
    let args = ["sample", "--stat", "descents", "--n", "7", "--seed", "99", "--trials", "20"];
    let (code, a, _) = call(&args);
    assert_eq!(code, 0);
    assert_eq!(a, call(&args).1);
    let v = json(&a);
    let samples: Vec<steinperm::chain::PairSample> = serde_json::from_value(v["samples"].clone()).unwrap();
    assert_eq!(samples.len(), 20);
    for s in &samples {
        assert!(s.position >= 1 && s.position <= 7);
        let d = &s.x_prime - &s.x;
        assert!(d.numer().to_string().parse::<i64>().unwrap().abs() <= 2);
    }
    assert_ne!(a, call(&["sample", "--stat", "descents", "--n", "7", "--seed", "100", "--trials", "20"]).1);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.json");
    let (code, out, _) = call(&["dist", "--stat", "descents", "--n", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let d = IntegerDistribution::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(d.total.to_string(), "120");
}
