use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use orbitcount::arith::rational::rat;
use orbitcount::counting::Payload;
use orbitcount::orders::OrderSpec;
use orbitcount::{presets, Family, Mode, ScenarioSpec};

fn orbitcount(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbitcount")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn model_quadric_series_has_one_row_per_level() {
    let o = orbitcount(&["count", "--preset", "model-quadric", "--rmax", "100"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 100);
    assert_eq!(rows[4], "5,2,3,2,1,true");
    assert!(text.contains("# config_sha256: "));
    assert!(text.contains("# exact: true"));
}

#[test]
fn zero_radius_gives_header_only() {
    let o = orbitcount(&["count", "--preset", "gauss", "--rmax", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(data_rows(&text).is_empty());
    assert!(text.lines().any(|l| l == "level,n_prim,n_all,weighted_num,weighted_den,exact_flag"));
}

#[test]
fn unsaturated_box_mode_exits_2_unless_allowed() {
    let o = orbitcount(&["count", "--preset", "zsqrt2", "--rmax", "40", "--mode", "box:1", "--full-group"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("did not saturate"));
    let o = orbitcount(&["count", "--preset", "zsqrt2", "--rmax", "40", "--mode", "box:1", "--allow-heuristic"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("# saturated: false"));
    assert!(data_rows(&text).iter().all(|r| r.ends_with(",false")));
}

#[test]
fn output_is_independent_of_jobs() {
    let a = orbitcount(&["count", "--preset", "hurwitz", "--rmax", "300", "--jobs", "1"]);
    let b = orbitcount(&["count", "--preset", "hurwitz", "--rmax", "300", "--jobs", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let a = orbitcount(&["fit", "--preset", "model-quadric", "--rmax", "500", "--jobs", "1", "--aggregation"]);
    let b = orbitcount(&["fit", "--preset", "model-quadric", "--rmax", "500", "--jobs", "4", "--aggregation"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn presets_and_model_quadric_validate() {
    for name in ["model-quadric", "hurwitz", "lipschitz", "gauss", "zsqrt2"] {
        let o = orbitcount(&["validate", "--preset", name]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stderr(&o));
    }
}

#[test]
fn split_product_payload_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let order = OrderSpec::new(presets::split_product_algebra(), None).unwrap();
    let s = ScenarioSpec::new(Family::NormForm, Payload::Order(order), rat(10), Mode::Box(3)).unwrap();
    let cfg = write_config(dir.path(), "split.json", &format!("{{\"scenario\": {}}}", serde_json::to_string(&s).unwrap()));
    let o = orbitcount(&["validate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("zero divisors") && err.contains("irreducib"), "{err}");
    let o = orbitcount(&["count", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_errors_point_at_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", "{\n  \"preset\": \"gauss\",\n  \"r_max\": [1]\n}\n");
    let o = orbitcount(&["count", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad.json:3:"), "{}", stderr(&o));
    let o = orbitcount(&["count", "--preset", "nope"]);
    assert_eq!(o.status.code(), Some(1));
    let o = orbitcount(&["count", "--preset", "gauss", "--mode", "box:0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.json", r#"{"preset": "lipschitz", "r_max": 60, "jobs": 2}"#);
    let a = orbitcount(&["count", "--config", &cfg]);
    let b = orbitcount(&["count", "--preset", "lipschitz", "--rmax", "60"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn zsqrt2_fit_reports_the_ideal_constant() {
    let o = orbitcount(&["fit", "--preset", "zsqrt2", "--rmax", "20000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["fit"]["expected_lambda"], "1");
    assert!((v["fit"]["predicted_c"].as_f64().unwrap() - 0.62323).abs() < 1e-5);
    assert!(v["fit"]["relative_error"].as_f64().unwrap() < 0.02);
    assert_eq!(v["exact"], true);
    assert_eq!(v["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn fit_of_an_empty_series_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(orbitcount(&["count", "--preset", "gauss", "--rmax", "0", "--out", out]).status.code(), Some(0));
    let series = dir.path().join("series.csv");
    let o = orbitcount(&["fit", "--preset", "gauss", "--rmax", "0", "--series", series.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("empty series"));
}

#[test]
fn oracle_compare_on_presets() {
    let o = orbitcount(&["oracle-compare", "--preset", "gauss", "--rmax", "10000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("0 diffs over 10000 levels"));
    let o = orbitcount(&["oracle-compare", "--preset", "model-quadric", "--rmax", "10000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("oracle two-squares: 0 diffs"));
}

#[test]
fn corrupted_series_reports_first_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(orbitcount(&["count", "--preset", "lipschitz", "--rmax", "50", "--out", out]).status.code(), Some(0));
    let path = dir.path().join("series.csv");
    let text = fs::read_to_string(&path).unwrap();
    let row = data_rows(&text).into_iter().find(|r| r.starts_with("17,")).unwrap().to_string();
    let fields: Vec<&str> = row.split(',').collect();
    let bumped = format!("17,{},{},,,true", fields[1], fields[2].parse::<u64>().unwrap() + 1);
    fs::write(&path, text.replace(&row, &bumped)).unwrap();
    let o = orbitcount(&["oracle-compare", "--preset", "lipschitz", "--rmax", "50", "--series", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("first divergence at level 17"), "{}", stdout(&o));
}

#[test]
fn report_bundles_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    let o = orbitcount(&["report", "--preset", "hurwitz", "--rmax", "200", "--aggregation", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["validation.json", "series.csv", "fit.json", "oracle.csv", "report.json"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let sha = summary["config_sha256"].as_str().unwrap().to_string();
    assert!(fs::read_to_string(out.join("series.csv")).unwrap().contains(&sha));
    assert!(fs::read_to_string(out.join("oracle.csv")).unwrap().contains(&sha));
    let fit: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("fit.json")).unwrap()).unwrap();
    assert_eq!(fit["config_sha256"].as_str().unwrap(), sha);
    assert!(fit["fit"]["zeta_factor"].as_f64().is_some());
    assert_eq!(summary["exit_code"], 0);
}
