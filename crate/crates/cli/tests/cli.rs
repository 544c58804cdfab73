use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).to_string_lossy().into_owned()
}

fn tropjac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tropjac")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap().trim_end().to_string()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> String {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn theta_golden() {
    let out = tropjac(&["theta", &data("q1.json"), "--point", "1/2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), r#"{"value":"0","argmax":[["0"],["1"]],"on_divisor":true}"#);
}

#[test]
fn period_matrix_with_explicit_tree_and_orientation() {
    let out = tropjac(&["period-matrix", &data("k4.json"), "--tree", "0,1,2", "--as-given"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), r#"{"g":3,"entries":[["22","-7","-13"],["-7","23","-11"],["-13","-11","27"]]}"#);
}

#[test]
fn period_matrix_default_conventions() {
    let out = tropjac(&["period-matrix", &data("k4.json")]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), r#"{"g":3,"entries":[["22","-7","13"],["-7","23","11"],["13","11","27"]]}"#);
}

#[test]
fn schottky_recovers_prism_lengths() {
    let out = tropjac(&["schottky", &data("q4.json"), "--emit-witness"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["in_schottky_locus"], true);
    let lengths: Vec<&str> = v["lengths"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert_eq!(lengths, ["2", "2", "3", "4", "7", "8", "9", "9", "12"]);
    assert_eq!(v["graph"]["vertices"].as_array().unwrap().len(), 6);
    assert_eq!(v["witness"].as_array().unwrap().len(), 4);
}

#[test]
fn schottky_rejects_d4() {
    let out = tropjac(&["schottky", &data("d4.json")]);
    assert!(out.status.success());
    assert_eq!(json(&out)["in_schottky_locus"], false);
}

#[test]
fn schottky_genus_cap() {
    let out = tropjac(&["schottky", &data("q4.json"), "--genus-max", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["code"], "unsupported_dimension");
}

#[test]
fn pipeline_from_points_to_theta_check() {
    let graph = scratch("pipeline_graph.json");
    let cover = scratch("pipeline_cover.json");
    let out = tropjac(&["hyperelliptic", "--input", &data("points.json"), "--out", &graph, "--emit-cover", &cover]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["genus"], 2);
    let plucker: Vec<&str> = v["plucker"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert_eq!(plucker, ["0", "0", "1", "0", "0", "0", "0", "1", "0", "0", "0", "1", "0", "0", "0"]);

    let q = scratch("pipeline_q.json");
    let out = tropjac(&["period-matrix", &graph]);
    assert!(out.status.success());
    std::fs::write(&q, &out.stdout).unwrap();
    assert_eq!(stdout(&out), r#"{"g":2,"entries":[["4","2"],["2","4"]]}"#);

    let out = tropjac(&["schottky", &q]);
    assert_eq!(json(&out)["in_schottky_locus"], true);
    let out = tropjac(&["delaunay", &q]);
    assert_eq!(json(&out)["cells"].as_array().unwrap().len(), 2);
    let out = tropjac(&["theta-check", &graph]);
    assert!(out.status.success());
    assert_eq!(json(&out)["verified"], true);
    let c: Value = serde_json::from_str(&std::fs::read_to_string(&cover).unwrap()).unwrap();
    assert!(c["edge_image"].as_array().unwrap().iter().all(|e| e["dilation"] == 1 || e["dilation"] == 2));
}

#[test]
fn plane_tropicalization_certificates() {
    let skel = scratch("quartic_skeleton.json");
    let out = tropjac(&["plane-trop", "--input", &data("quartic_transformed.json"), "--certify", "--skeleton", &skel]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["certificate"]["certified"], true);
    assert_eq!(v["first_betti"], 3);
    let out = tropjac(&["period-matrix", &skel]);
    assert_eq!(json(&out)["g"], 3);

    let out = tropjac(&["plane-trop", "--input", &data("quartic_explicit.json"), "--certify"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["certificate"]["certified"], false);
    let violations = v["certificate"]["violations"].as_array().unwrap();
    assert!(violations.iter().any(|s| s.as_str().unwrap().contains("normalized area 4")));

    let out = tropjac(&["plane-trop", "--input", &data("quartic_explicit.json"), "--skeleton", &scratch("never.json")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn voronoi_and_secondary_cone_of_k4() {
    let q = scratch("k4_q.json");
    let out = tropjac(&["period-matrix", &data("k4.json")]);
    std::fs::write(&q, &out.stdout).unwrap();
    let out = tropjac(&["voronoi", &q, "--f-vector"]);
    assert_eq!(stdout(&out), r#"{"divisor_counts":[6,12,7],"f_vector":[24,36,14]}"#);
    let from_form = json(&tropjac(&["secondary-cone", &q]));
    let from_graph = json(&tropjac(&["secondary-cone", &data("k4.json")]));
    assert_eq!(from_form, from_graph);
    assert_eq!(from_form["rays"].as_array().unwrap().len(), 6);
}

#[test]
fn abel_jacobi_and_w_cells() {
    let out = tropjac(&["abel-jacobi", &data("k4.json"), "--point", "vertex=0"]);
    assert_eq!(json(&out)["image"], serde_json::json!(["0", "0", "0"]));
    let a = json(&tropjac(&["abel-jacobi", &data("k4.json"), "--point", "edge=0,t=1/2", "--point", "edge=0,t=1/2"]));
    let b = json(&tropjac(&["abel-jacobi", &data("k4.json"), "--point", "edge=0,t=1/2"]));
    assert_eq!(a["image"].as_array().unwrap().len(), 3);
    assert_ne!(a, b);
    let out = tropjac(&["w-cells", &data("k4.json")]);
    assert_eq!(json(&out)["count"], 21);
}

#[test]
fn realize_and_dot() {
    let out = tropjac(&["realize", &data("cubics_and_lines.json")]);
    let v = json(&out);
    assert_eq!(v["degrees"], serde_json::json!([3, 3, 1, 1]));
    assert_eq!(v["total_blow_ups"], 15);
    let out = tropjac(&["export-dot", &data("k4.json")]);
    let dot = stdout(&out);
    assert!(dot.starts_with("graph"));
    assert!(dot.contains("0(w=0)"));
}

#[test]
fn exit_codes() {
    assert_eq!(tropjac(&["no-such-command"]).status.code(), Some(64));
    assert_eq!(tropjac(&["theta", &data("q1.json")]).status.code(), Some(64));
    assert_eq!(tropjac(&["period-matrix", &data("missing.json")]).status.code(), Some(1));
    assert_eq!(tropjac(&["period-matrix", &data("q1.json")]).status.code(), Some(1));
    assert_eq!(tropjac(&["theta", &data("q1.json"), "--point", "x"]).status.code(), Some(1));
    let out = tropjac(&["theta", &data("q1.json"), "--point", "1,2"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["code"], "dimension_mismatch");
    let out = tropjac(&["--version"]);
    assert!(out.status.success());
    assert!(stdout(&out).ends_with(env!("CARGO_PKG_VERSION")));
}

#[test]
fn output_is_byte_stable() {
    for args in [
        vec!["schottky".to_string(), data("q4.json"), "--emit-witness".into()],
        vec!["delaunay".to_string(), data("q4.json")],
        vec!["hyperelliptic".to_string(), "--input".into(), data("points.json")],
    ] {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(tropjac(&args).stdout, tropjac(&args).stdout);
    }
}
