use std::path::PathBuf;
use std::process::{Command, Output};

use homsel::constructions::{root_cover, Wedge};
use serde_json::Value;

fn homsel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homsel")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("homsel-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn homology_of_a_circle_file() {
    let p = scratch(
        "circle.json",
        r#"{"degrees":1,"cells":[["a","b","c"],["ab","bc","ca"]],"boundaries":[[[0,0,-1],[1,0,1],[1,1,-1],[2,1,1],[2,2,-1],[0,2,1]]]}"#,
    );
    let out = homsel(&["homology", "--complex", p.to_str().unwrap(), "--degree", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["betti"], 1);
    assert_eq!(v["torsion"], serde_json::json!([]));
    assert_eq!(v["provenance"]["config"]["homology"]["degree"], 1);
}

#[test]
fn graph_of_h_c_has_one_loop() {
    let v = json_of(&homsel(&["repro", "gr-hc"]));
    assert_eq!(v["H1"], serde_json::json!({"betti": 1, "torsion": []}));
    assert_eq!(v["alpha_generates"], true);
}

#[test]
fn matching_pennies_certificate_and_byte_identical_reruns() {
    let args = ["nash", "solve", "--game", "matching_pennies", "--resolution", "128", "--tol", "0.01"];
    let a = homsel(&args);
    let b = homsel(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    let certs = v["search"]["certificates"].as_array().unwrap();
    assert_eq!(certs.len(), 1);
    for x in certs[0]["point"].as_array().unwrap() {
        assert!((x.as_f64().unwrap() - 0.5).abs() <= 1.0 / 128.0);
    }
}

#[test]
fn selection_test_reads_a_multifunction_file() {
    let f = root_cover(8, 1, false).unwrap();
    let p = scratch("disk.json", &serde_json::to_string(&f).unwrap());
    let out = homsel(&["selection-test", "--multifunction", p.to_str().unwrap(), "--eps-steps", "2,3", "--strict"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["rungs"].as_array().unwrap().len(), 2);
    assert_eq!(v["rungs"][0]["verdict"], "ADMITS");
}

#[test]
fn obstructed_lift_exits_with_two_only_when_strict() {
    let f = Wedge::default().sample_h_c(32).unwrap();
    let p = scratch("hc.json", &serde_json::to_string(&f).unwrap());
    let path = p.to_str().unwrap();
    let lenient = homsel(&["lift", "--multifunction", path, "--weight", "3"]);
    assert_eq!(lenient.status.code(), Some(0));
    assert_eq!(json_of(&lenient)["outcome"]["status"], "obstructed");
    let strict = homsel(&["lift", "--multifunction", path, "--weight", "3", "--strict"]);
    assert_eq!(strict.status.code(), Some(2));
}

#[test]
fn malformed_input_is_an_error_naming_the_place() {
    let p = scratch("bad.json", r#"{"m":1,"n":1,"resolution":2,"k":1,"values":[[[0.1]],[[1.5]],[[0.2]]]}"#);
    let out = homsel(&["lift", "--multifunction", p.to_str().unwrap(), "--weight", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("values[1][0]"), "{err}");
    let out = homsel(&["nash", "solve", "--game", "matching_pennies", "--resolution", "100"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn selftest_passes() {
    let out = homsel(&["selftest", "--cases", "200", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["passed"], true);
}
