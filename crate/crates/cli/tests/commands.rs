use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cogsimplex::lns::{load, print, scene_to_script};
use cogsimplex::scene::Item;
use cogsimplex_cli::{csv_scenes, parse_samples, parse_timestamp, round_sig9, SampleRow};
use proptest::prelude::*;
use serde_json::Value;

const LISTING: &str = include_str!("../../core/tests/fixtures/tetrahedron.lns");
const OBJECTS: &str = include_str!("fixtures/objects.lns");

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cogsimplex")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn inspect(path: &Path) -> Value {
    let out = cli(&["inspect", s(path)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn render_listing_to_png() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "listing.lns", LISTING);
    let out = dir.path().join("listing.png");
    let res = cli(&["render", s(&input), "-o", s(&out)]);
    assert_eq!(res.status.code(), Some(0));
    assert!(fs::read(&out).unwrap().starts_with(b"\x89PNG"));
}

#[test]
fn render_defaults_to_svg_next_to_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "objects.lns", OBJECTS);
    assert_eq!(cli(&["render", s(&input)]).status.code(), Some(0));
    let svg = fs::read_to_string(dir.path().join("objects.svg")).unwrap();
    assert!(svg.contains(r#"width="800" height="600""#));
}

#[test]
fn format_flag_overrides_extension() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "objects.lns", OBJECTS);
    let out = dir.path().join("picture.img");
    assert_eq!(cli(&["render", s(&input), "-o", s(&out)]).status.code(), Some(1));
    assert!(!out.exists());
    assert_eq!(
        cli(&["render", s(&input), "-o", s(&out), "--format", "png", "--width", "200", "--height", "150"])
            .status
            .code(),
        Some(0)
    );
    assert!(fs::read(&out).unwrap().starts_with(b"\x89PNG"));
}

#[test]
fn camera_flags_change_the_picture() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "listing.lns", LISTING);
    let (a, b) = (dir.path().join("a.svg"), dir.path().join("b.svg"));
    assert!(cli(&["render", s(&input), "-o", s(&a)]).status.success());
    assert!(cli(&["render", s(&input), "-o", s(&b), "--azimuth", "-40", "--elevation", "10"]).status.success());
    assert_ne!(fs::read(a).unwrap(), fs::read(b).unwrap());
}

#[test]
fn syntax_error_exits_1_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "bad.lns", "addPoint(;");
    let out = dir.path().join("bad.svg");
    let res = cli(&["render", s(&input), "-o", s(&out)]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("1:10"));
    assert!(!out.exists());
}

#[test]
fn unwritable_output_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "objects.lns", OBJECTS);
    let out = dir.path().join("missing").join("objects.svg");
    assert_eq!(cli(&["render", s(&input), "-o", s(&out)]).status.code(), Some(2));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn missing_input_exits_2() {
    assert_eq!(cli(&["validate", "/definitely/not/here.lns"]).status.code(), Some(2));
}

#[test]
fn bad_viewport_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "objects.lns", OBJECTS);
    assert_eq!(cli(&["render", s(&input), "--width", "32"]).status.code(), Some(1));
    assert_eq!(cli(&["from-csv", s(&input), "--prism-length", "0"]).status.code(), Some(1));
}

#[test]
fn validate_reports_ok_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "objects.lns", OBJECTS);
    let res = cli(&["validate", s(&good)]);
    assert_eq!(res.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&res.stdout).contains("ok"));
    let bad = write(
        dir.path(),
        "bad.lns",
        "addTriangle(\"#000\", 1, [], 10);\naddPoint(\"#000\", 6, \"Circle\", 10, [1, 2]);",
    );
    let res = cli(&["validate", s(&bad)]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("2:1"));
}

#[test]
fn inspect_equal_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    // edge 2·√3 gives height 3
    let src = "addTriangle(\"#000\", 1, [], 3.4641016151377544);\naddPoint(\"#000\", 6, \"Circle\", 3.4641016151377544, [1, 1, 1]);";
    let report = inspect(&write(dir.path(), "eq.lns", src));
    assert_eq!(report["simplex"]["height"], 3.0);
    assert_eq!(report["points"][0]["distances"], serde_json::json!([1.0, 1.0, 1.0]));
    assert_eq!(report["points"][0]["sum"], 3.0);
    assert_eq!(report["points"][0]["prism_offset"], Value::Null);
}

#[test]
fn inspect_listing_reports_two_points() {
    let dir = tempfile::tempdir().unwrap();
    let report = inspect(&write(dir.path(), "listing.lns", LISTING));
    let points = report["points"].as_array().unwrap();
    assert_eq!(points.len(), 2);
    for p in points {
        assert_eq!(p["distances"].as_array().unwrap().len(), 4);
        assert_eq!(p["position"].as_array().unwrap().len(), 3);
    }
    let keys: Vec<&String> = points[0].as_object().unwrap().keys().collect();
    assert!(keys.contains(&&"coefficients".to_string()));
}

#[test]
fn inspect_prism_offset_at_t_max_is_length() {
    let dir = tempfile::tempdir().unwrap();
    let src = "addPrism(\"#000\", 1, [], 100, 250, 10, 30);\naddPoint(\"#000\", 6, \"Circle\", 100, [1, 2, 3], 10);\naddPoint(\"#000\", 6, \"Circle\", 100, [3, 2, 1], 30);";
    let report = inspect(&write(dir.path(), "prism.lns", src));
    assert_eq!(report["points"][0]["prism_offset"], 0.0);
    assert_eq!(report["points"][1]["prism_offset"], 250.0);
}

#[test]
fn inspect_output_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "listing.lns", LISTING);
    assert_eq!(cli(&["inspect", s(&input)]).stdout, cli(&["inspect", s(&input)]).stdout);
}

#[test]
fn csv_with_three_coefficients_makes_one_prism() {
    let dir = tempfile::tempdir().unwrap();
    let csv = "object_id,timestamp,a1,a2,a3\nx,0,0.2,0.3,0.9\nx,5,0.4,0.4,0.4\nx,10,0.9,0.2,0.1\n";
    let input = write(dir.path(), "three.csv", csv);
    let res = cli(&["from-csv", s(&input), "--prism-length", "120"]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let scene = load(&fs::read_to_string(dir.path().join("three.lns")).unwrap()).unwrap();
    assert_eq!(scene.prism.unwrap().length(), 120.0);
    let paths: Vec<usize> = scene
        .items
        .iter()
        .filter_map(|i| if let Item::Trajectory(t) = i { Some(t.waypoints.len()) } else { None })
        .collect();
    assert_eq!(paths, [3]);
    assert_eq!(scene.markers().count(), 3);
    assert_eq!(scene.items.iter().filter(|i| matches!(i, Item::SliceTriangle(_))).count(), 3);
}

#[test]
fn csv_errors_exit_1_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("empty.csv", "object_id,timestamp,a1,a2,a3\n", "no samples"),
        ("schema.csv", "id,time,a1,a2,a3\nx,0,1,1,1\n", "header"),
        ("ragged.csv", "object_id,timestamp,a1,a2,a3\nx,0,1,1,1\nx,1,1,1\n", "line"),
        ("neg.csv", "object_id,timestamp,a1,a2,a3\nx,0,1,-1,1\n", "negative"),
        ("two.csv", "object_id,timestamp,a1,a2,a3\nx,0,1,1,1\ny,1,1,1,1\n", "one object"),
        ("worse.csv", "object_id,timestamp,a1,a2,a3,a4,stage\nx,0,1,1,1,1,1\nx,1,1,1,1,1,3\n", "non-increasing"),
    ];
    for (name, text, needle) in cases {
        let input = write(dir.path(), name, text);
        let res = cli(&["from-csv", s(&input)]);
        assert_eq!(res.status.code(), Some(1), "{name}");
        let err = String::from_utf8_lossy(&res.stderr).to_lowercase();
        assert!(err.contains(needle), "{name}: {err}");
        assert!(!input.with_extension("lns").exists(), "{name}");
    }
}

#[test]
fn stage_column_is_optional_for_four_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let csv = "object_id,timestamp,a1,a2,a3,a4\np,1,0,0,0,1\np,2,0,0,1,0.5\np,3,0,1,0.5,0\n";
    let input = write(dir.path(), "p.csv", csv);
    assert!(cli(&["from-csv", s(&input)]).status.success());
    // no sample reaches stage 0, so everything lands in the first prism
    assert!(dir.path().join("p_A.lns").exists());
    assert!(!dir.path().join("p_B.lns").exists());
}

#[test]
fn timestamps_accept_reals_and_iso_dates() {
    assert_eq!(parse_timestamp("12.5"), Some(12.5));
    assert_eq!(parse_timestamp("1970-01-02"), Some(86_400.0));
    assert_eq!(parse_timestamp("1970-01-01T00:01:00Z"), Some(60.0));
    assert_eq!(parse_timestamp("1970-01-01T01:00:00+01:00"), Some(0.0));
    assert_eq!(parse_timestamp("1970-01-01T00:00:01.5"), Some(1.5));
    assert_eq!(parse_timestamp("soon"), None);
    assert_eq!(parse_timestamp("NaN"), None);
}

#[test]
fn rounding_keeps_nine_significant_digits() {
    assert_eq!(round_sig9(1.0 / 3.0), 0.333333333);
    assert_eq!(round_sig9(163.29931618554522), 163.299316);
    assert_eq!(round_sig9(-0.0), 0.0);
    assert_eq!(round_sig9(2.0), 2.0);
}

fn rows() -> impl Strategy<Value = Vec<SampleRow>> {
    let row =
        (0u32..1000, prop::collection::vec(0u32..100, 3)).prop_filter("non-zero", |(_, a)| a.iter().any(|&x| x > 0));
    prop::collection::vec(row, 1..8).prop_map(|rs| {
        rs.into_iter()
            .map(|(t, a)| SampleRow {
                object_id: "o".into(),
                timestamp: f64::from(t) * 0.25,
                coefficients: a.into_iter().map(|x| f64::from(x) / 7.0).collect(),
                stage: None,
            })
            .collect()
    })
}

fn staged_rows() -> impl Strategy<Value = Vec<SampleRow>> {
    prop::collection::vec((0usize..4, prop::collection::vec(1u32..100, 4)), 1..8).prop_map(|mut rs| {
        rs.sort_by_key(|r| std::cmp::Reverse(r.0));
        rs.into_iter()
            .enumerate()
            .map(|(i, (stage, a))| SampleRow {
                object_id: "o".into(),
                timestamp: i as f64,
                coefficients: a.into_iter().map(f64::from).collect(),
                stage: cogsimplex::scene::Stage::from_index(stage),
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn generated_scripts_reload_to_the_built_scenes(rows in rows(), len in 1u32..500) {
        for s in csv_scenes(&rows, f64::from(len)).unwrap() {
            let text = print(&scene_to_script(&s.scene).unwrap());
            prop_assert_eq!(load(&text).unwrap(), s.scene);
        }
    }

    #[test]
    fn split_series_cover_every_row(rows in staged_rows()) {
        let scenes = csv_scenes(&rows, 100.0).unwrap();
        let mut seen = vec![0usize; rows.len()];
        for s in &scenes {
            let text = print(&scene_to_script(&s.scene).unwrap());
            prop_assert_eq!(&load(&text).unwrap(), &s.scene);
            prop_assert_eq!(s.scene.markers().count(), s.rows.len());
            for &r in &s.rows {
                seen[r] += 1;
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1 || c == 2));
    }
}

#[test]
fn parse_samples_reads_stage_column() {
    let rows = parse_samples("object_id,timestamp,a1,a2,a3,a4,stage\nq, 3 ,1,2,3,4, 2\n").unwrap();
    assert_eq!(rows[0].timestamp, 3.0);
    assert_eq!(rows[0].stage, cogsimplex::scene::Stage::from_index(2));
    assert!(parse_samples("object_id,timestamp,a1,a2,a3,stage\nq,3,1,2,3,2\n").is_err());
    assert!(parse_samples("object_id,timestamp,a1,a2,a3,a4,stage\nq,3,1,2,3,4,7\n").is_err());
}
