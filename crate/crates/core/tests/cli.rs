use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use troplaur::localization::LocalizationReport;
use troplaur::polygon::{certify_window, NewtonPolygon};
use troplaur::series::{CoefficientProvider, Generator, IndexRange};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn troplaur(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_troplaur")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn rational_toy_polygon_reports_two_infinite_roots() {
    let o = troplaur(&["polygon", fixture("rational-toy.json").to_str().unwrap()]);
    assert!(o.status.success());
    let v = json(&o);
    let roots = v["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 2);
    assert!(roots.iter().all(|r| r["mult"] == "inf"));
}

#[test]
fn rational_toy_csv_marks_every_point_on_the_hull() {
    let o = troplaur(&["polygon", fixture("rational-toy.json").to_str().unwrap(), "--window", "-8:8", "--out", "csv"]);
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 17);
    assert!(rows.iter().all(|r| r.ends_with("true")), "{text}");
}

#[test]
fn harmonic_window_has_a_vertex_per_index() {
    let o = troplaur(&["polygon", fixture("harmonic-exp.json").to_str().unwrap(), "--window", "1:200"]);
    let v = json(&o);
    assert_eq!(v["polygon"]["vertices"].as_array().unwrap().len(), 200);
    let roots = v["roots"].as_array().unwrap();
    let finite: Vec<f64> = roots.iter().filter(|r| r["provenance"]["type"] == "hull_segment").map(|r| r["log_alpha"].as_f64().unwrap()).collect();
    for (k, y) in finite.iter().enumerate() {
        assert!((y + 1.0 / (k as f64 + 2.0)).abs() < 1e-12);
    }
}

#[test]
fn single_coefficient_gives_one_vertex_and_no_roots() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(&dir, "one.json", r#"{"kind":"explicit","coeffs":[{"j":0,"log_b":2.0}]}"#);
    let v = json(&troplaur(&["polygon", &spec]));
    assert_eq!(v["polygon"]["vertices"].as_array().unwrap().len(), 1);
    assert!(v["roots"].as_array().unwrap().is_empty());
}

#[test]
fn polygon_json_matches_the_in_memory_polygon() {
    let o = troplaur(&["polygon", fixture("rational-toy.json").to_str().unwrap(), "--window", "-40:40"]);
    let v = json(&o);
    let read: NewtonPolygon = serde_json::from_value(v["polygon"].clone()).unwrap();
    let p = CoefficientProvider::generator(Generator::RationalToy);
    assert_eq!(read, certify_window(&p, IndexRange::new(-40, 40).unwrap()).unwrap());
}

#[test]
fn perturbed_exp_localizes_and_validates() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = troplaur(&[
        "localize",
        fixture("perturbed-exp.json").to_str().unwrap(),
        "--updates",
        fixture("perturbed-exp-updates.json").to_str().unwrap(),
        "--mode",
        "sharp",
        "--output",
        report.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: LocalizationReport = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let outer: Vec<f64> = r
        .applicable()
        .filter(|i| i.kind.name() == "exclusion-annulus")
        .map(|i| i.kind.radii_log().1.exp())
        .collect();
    assert_eq!(outer.len(), 2);
    assert!((outer[1] - 5.27).abs() / 5.27 < 5e-2);
    let v = troplaur(&["validate", fixture("perturbed-exp.json").to_str().unwrap(), report.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
}

#[test]
fn perturbed_two_sided_exp_annuli() {
    let o = troplaur(&[
        "localize",
        fixture("perturbed-two-sided-exp.json").to_str().unwrap(),
        "--updates",
        fixture("perturbed-two-sided-exp-updates.json").to_str().unwrap(),
        "--mode",
        "sharp",
        "--out",
        "csv",
    ]);
    let text = stdout(&o);
    let annuli: Vec<(f64, f64)> = text
        .lines()
        .filter(|l| l.starts_with("exclusion-annulus,true"))
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[2].parse().unwrap(), f[3].parse().unwrap())
        })
        .collect();
    assert_eq!(annuli.len(), 2, "{text}");
    assert!((annuli[0].0 - 0.05).abs() < 0.0026 && (annuli[1].1 - 3.41).abs() < 0.01);
}

#[test]
fn advise_on_quartic_report() {
    let o = troplaur(&["advise", fixture("quartic-report.json").to_str().unwrap(), "--epsilon", "1e-15"]);
    let n: u64 = stdout(&o).trim().parse().unwrap();
    assert!(n == 18 || n == 19);
}

#[test]
fn tampered_report_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(&dir, "p.json", r#"{"kind":"explicit","coeffs":[{"j":0,"re":-0.01},{"j":1,"re":1}]}"#);
    let report = write(
        &dir,
        "r.json",
        r#"{"mode":"wide","n":1,"items":[{"kind":"InclusionDisk","radius_log":0.0,"count_eig_minus_poles":3,"applicable":true}]}"#,
    );
    let o = troplaur(&["validate", &spec, &report]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(json(&o)["mismatches"][0]["found"], 1);
}

#[test]
fn closely_spaced_roots_are_inapplicable() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(&dir, "p.json", r#"{"kind":"explicit","coeffs":[{"j":0,"log_b":0},{"j":1,"log_b":1},{"j":2,"log_b":1.5}]}"#);
    assert_eq!(troplaur(&["localize", &spec]).status.code(), Some(2));
}

#[test]
fn saturating_update_truncates() {
    let o = troplaur(&[
        "update",
        fixture("saturating.json").to_str().unwrap(),
        "--updates",
        fixture("saturating-update.json").to_str().unwrap(),
    ]);
    let v = json(&o);
    assert_eq!(v["outcomes"][0]["kind"], "InfiniteTruncation");
    assert_eq!(v["outcomes"][0]["side"], "right");
}

#[test]
fn malformed_spec_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(&dir, "bad.json", "{\n  \"kind\": \"explicit\",\n  \"coeffs\": [ {\"j\": 0, \"log_b\": } ]\n}\n");
    let o = troplaur(&["polygon", &spec]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn synthetic_seed_comes_from_the_environment() {
    let run = |seed: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_troplaur"))
            .args(["roots", fixture("synthetic-quartic.json").to_str().unwrap()])
            .env("TROPLAUR_SEED", seed)
            .output()
            .unwrap();
        stdout(&o)
    };
    assert_eq!(run("42"), run("42"));
    assert_ne!(run("42"), run("43"));
}
