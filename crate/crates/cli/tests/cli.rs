use std::process::{Command, Output};

const FIGURE_EIGHT: &str = "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]";
const TREFOIL: &str = "X[1,5,2,4] X[3,1,4,6] X[5,3,6,2]";

fn foamcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_foamcalc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn homology_json_for_figure_eight() {
    let o = foamcalc(&["homology", "--pd", FIGURE_EIGHT, "--spec", "a=0,h=0", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys.len(), 6);
    for k in ["(-2,5)", "(-1,1)", "(0,-1)", "(0,1)", "(1,-1)", "(2,-5)"] {
        assert_eq!(v[k], 1, "{k}");
    }
}

#[test]
fn p2_prints_polynomial() {
    let o = foamcalc(&["p2", "--pd", FIGURE_EIGHT]);
    assert_eq!(stdout(&o), "q^5 + q^-5\n");
}

#[test]
fn relcheck_exit_zero() {
    let o = foamcalc(&["relcheck", "--seed", "3", "--words", "200"]);
    assert!(o.status.success());
    let out = stdout(&o);
    for id in ["2D", "SF", "UFO", "CN", "curtain", "G2", "T", "UFO~", "CN~", "RSC~", "deloop-maps"] {
        assert!(out.lines().any(|l| l.split_whitespace().next() == Some(id) && l.ends_with("PASS")), "{id}");
    }
}

#[test]
fn oracle_prints_match() {
    let o = foamcalc(&["oracle", "--pd", TREFOIL, "--debug-checks", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "MATCH\n");
}

#[test]
fn csv_and_braid_input() {
    let o = foamcalc(&["homology", "--braid", "s1 s1 s1", "--format", "csv"]);
    let out = stdout(&o);
    assert!(out.starts_with("i,j,rank\n"));
    assert_eq!(out.lines().count(), 5);
}

#[test]
fn deformed_specialization_is_ungraded() {
    let o = foamcalc(&["homology", "--knot", "4_1", "--spec", "a=1,h=0", "--format", "json"]);
    assert_eq!(stdout(&o).trim(), r#"{"(0)":2}"#);
}

#[test]
fn dump_complex_writes_json() {
    let path = std::env::temp_dir().join(format!("foamcalc-dump-{}.json", std::process::id()));
    let o = foamcalc(&["dump", "--knot", "3_1", "--dump-complex", path.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(!v["objects"].as_array().unwrap().is_empty());
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn bench_json_report() {
    let o = foamcalc(&["bench", "--knot", "4_1", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let e = &v["entries"][0];
    assert!(e["stats"]["max_objects"].as_u64().unwrap() <= 8);
    assert_eq!(e["naive"]["Ok"]["resolutions"], 16);
}

#[test]
fn errors_exit_nonzero() {
    let o = foamcalc(&["homology", "--pd", "X[1,2,3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    let o = foamcalc(&["homology"]);
    assert_eq!(o.status.code(), Some(2));
    let o = foamcalc(&["homology", "--knot", "3_1", "--spec", "b=2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = foamcalc(&["homology", "--knot", "3_1", "--braid", "s1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn stats_and_orders() {
    let o = foamcalc(&["homology", "--pd", FIGURE_EIGHT, "--order", "all:4", "--stats"]);
    assert!(o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("max_objects"));
    assert!(err.contains("crossing orders agree"));
}
