use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use flaglab::constructions::stacked_cross_polytopal_sphere;
use flaglab::io::read_complex;

fn flaglab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flaglab")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = flaglab(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

fn reports(text: &str) -> Vec<Value> {
    text.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_cross_polytope_has_coloring() {
    let v = json(&["gen", "cross-polytope", "--d", "4"]);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 8);
    assert_eq!(v["facets"].as_array().unwrap().len(), 16);
    assert_eq!(v["coloring"].as_object().unwrap().len(), 8);
}

#[test]
fn gen_stacked_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("st.json");
    ok(&["gen", "stacked", "--d", "4", "--n", "3", "--seed", "5", "--out", path(&file)]);
    let back = read_complex(&file).unwrap();
    let (c, col, _) = stacked_cross_polytopal_sphere(4, 3, 5);
    assert_eq!(back.complex.facets(), c.facets());
    assert_eq!(back.coloring.unwrap(), col);
}

#[test]
fn gen_walkup_trace_replays() {
    let args = ["gen", "walkup", "--d", "4", "--sums", "2", "--handles", "1", "--seed", "7"];
    let text = ok(&args);
    assert_eq!(text, ok(&args), "same seed, same bytes");
    let loaded = flaglab::io::from_json(&text).unwrap();
    let trace = loaded.trace.expect("walkup output carries its trace");
    assert_eq!(trace.handles(), 1);
    assert_eq!(trace.replay().unwrap().0, loaded.complex);
}

#[test]
fn gen_barycentric_of_rp2() {
    let dir = tempfile::tempdir().unwrap();
    let rp2 = dir.path().join("rp2_6.json");
    ok(&["gen", "builtin", "--name", "rp2_6", "--out", path(&rp2)]);
    let sd = json(&["gen", "barycentric", "--in", path(&rp2)]);
    // 6 vertices, 15 edges, 10 triangles
    assert_eq!(sd["vertices"].as_array().unwrap().len(), 31);
    assert_eq!(sd["coloring"].as_object().unwrap().len(), 31);
}

#[test]
fn invariants_of_octahedron() {
    let v = json(&["invariants", "--in", "cross_polytope:3"]);
    assert_eq!(v["h"], serde_json::json!([1, 3, 3, 1]));
    let entries = v["flag_h"]["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 8);
    assert!(entries.iter().all(|e| e["v"] == 1));
}

#[test]
fn invariants_of_stacked_sphere() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("st.json");
    ok(&["gen", "stacked", "--d", "4", "--n", "2", "--out", path(&file)]);
    let v = json(&["invariants", "--in", path(&file), "--field", "Q"]);
    assert_eq!(v["h"], serde_json::json!([1, 8, 12, 8, 1]));
    assert_eq!(v["fields"][0]["betti"], serde_json::json!([0, 0, 0, 1]));
}

#[test]
fn invariants_of_rp2_over_two_fields() {
    let v = json(&["invariants", "--in", "rp2_6", "--field", "F2,Q"]);
    let fields = v["fields"].as_array().unwrap();
    assert_eq!(fields.len(), 2);
    assert_eq!(fields[0]["betti"], serde_json::json!([0, 1, 1]));
    assert_eq!(fields[1]["betti"], serde_json::json!([0, 0, 0]));
    assert_eq!(fields[0]["orientable"], true);
    assert_eq!(fields[1]["orientable"], false);
}

#[test]
fn verify_schenzel_on_octahedron() {
    let dir = tempfile::tempdir().unwrap();
    let oct = dir.path().join("oct.json");
    ok(&["gen", "cross-polytope", "--d", "3", "--out", path(&oct)]);
    let rs = reports(&ok(&["verify", "--in", path(&oct), "--check", "schenzel"]));
    assert_eq!(rs.len(), 1);
    assert_eq!(rs[0]["status"], "verified");
    assert_eq!(rs[0]["lhs"], "(1,3,3,1)");
}

#[test]
fn verify_nonpure_g2_is_unmet_with_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("nonpure.json");
    std::fs::write(&file, r#"{"facets": [[1,2,3],[3,4]]}"#).unwrap();
    let out = flaglab(&["verify", "--in", path(&file), "--check", "g2"]);
    assert_eq!(out.status.code(), Some(0));
    let rs = reports(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rs[0]["status"], "hypothesis-unmet");
}

#[test]
fn verify_is_deterministic_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("st.json");
    ok(&["gen", "stacked", "--d", "4", "--n", "2", "--out", path(&file)]);
    let args = ["verify", "--in", path(&file), "--check", "thm44,average,hdprime", "--field", "Q,F2", "--seed", "4"];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    let rs = reports(&a);
    assert!(rs.iter().all(|r| r["status"] == "verified" || r["status"] == "hypothesis-unmet"), "{a}");
    let csv = ok(&["verify", "--in", "cross_polytope:3", "--check", "stanley", "--format", "csv"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("instance,check,field,status,lhs,rhs"));
    assert!(lines.next().unwrap().contains("verified"));
}

#[test]
fn operational_errors_exit_two() {
    assert_eq!(flaglab(&["invariants", "--in", "cross_polytope:3", "--field", "F4"]).status.code(), Some(2));
    assert_eq!(flaglab(&["invariants", "--in", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(flaglab(&["verify", "--in", "cross_polytope:3", "--check", "nope"]).status.code(), Some(2));
    assert_eq!(flaglab(&["gen", "handle", "--in", "cross_polytope:3"]).status.code(), Some(2));
}
