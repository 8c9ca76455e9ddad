use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn run(args: &[&str], file: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdim"))
        .args(args)
        .arg("--input")
        .arg(data(file))
        .output()
        .expect("binary runs")
}

fn report(args: &[&str], file: &str) -> Value {
    let out = run(args, file);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn sqrt2_sqrt3_dim_report() {
    let v = report(&["dim"], "sqrt2_sqrt3.json");
    assert_eq!(v["schema_version"], 1);
    assert_eq!(
        (v["p"].clone(), v["r"].clone(), v["q"].clone()),
        (json!(3), json!(0), json!(3))
    );
    assert_eq!(v["rank_MH"], 3);
    assert_eq!(v["dense_in_ambient"], true);
    assert_eq!(v["heuristic"], false);
    assert_eq!(
        v["MH"],
        json!([[0, 0, 1, 0, 0], [1, 0, 0, 1, 1], [0, 1, 0, 0, 1]])
    );
    assert_eq!(v["I"], json!({"4": [2], "5": [3], "6": [1, 2], "7": [2]}));
}

#[test]
fn sqrt2_mh_columns() {
    let v = report(&["mh"], "sqrt2.json");
    assert_eq!(v["MH"], json!([[0, 1, 2, 0], [1, 0, 0, 3], [0, 1, 3, 1]]));
    let gens = v["generators"].as_array().unwrap();
    assert_eq!(gens.len(), 4);
    let columns: Vec<Value> = gens
        .iter()
        .flat_map(|g| g["u_prime"].as_array().unwrap().clone())
        .map(|u| u["column"].clone())
        .collect();
    assert_eq!(
        columns,
        vec![
            json!([0, 1, 0]),
            json!([1, 0, 1]),
            json!([2, 0, 3]),
            json!([0, 3, 1])
        ]
    );
}

#[test]
fn integer_lattice_is_purely_discrete() {
    let v = report(&["dim"], "z2.json");
    assert_eq!((v["p"].clone(), v["r"].clone()), (json!(0), json!(2)));
    assert_eq!(v["dense_in_span"], false);
}

#[test]
fn negative_radicand_is_an_input_error() {
    let out = run(&["dim"], "bad_sqrt.json");
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("generators[1][2]"), "{err}");
    assert!(err.contains("position 5"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_json_reports_line_and_column() {
    let dir = std::env::temp_dir().join(format!("cdim-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.json");
    std::fs::write(
        &path,
        "{ \"ambient_dim\": 2,\n  \"generators\": [[\"1\" \"0\"]] }",
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_cdim"))
        .args(["dim", "--input"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn output_is_byte_identical_across_runs() {
    for cmd in ["dim", "mh", "closure", "densify"] {
        let a = run(&[cmd], "sqrt2_sqrt3.json");
        let b = run(&[cmd], "sqrt2_sqrt3.json");
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
}

#[test]
fn float_mode_is_flagged_heuristic() {
    let v = report(&["dim"], "floats.json");
    assert_eq!(v["heuristic"], true);
    assert_eq!((v["p"].clone(), v["r"].clone()), (json!(1), json!(1)));
}

#[test]
fn mode_flag_overrides_the_file() {
    let v = report(&["dim", "--mode", "float"], "sqrt2_sqrt3.json");
    assert_eq!(v["heuristic"], true);
    assert_eq!(v["rank_MH"], 3);
}

#[test]
fn densify_reaches_full_dimension() {
    let v = report(&["densify"], "z2.json");
    assert_eq!(v["dimension"]["text"], "2 + 0i");
    assert_eq!(v["generator"], json!(["sqrt(2)", "sqrt(3)"]));
}

#[test]
fn oracle_cross_check_agrees_on_the_integer_lattice() {
    let v = report(&["dense", "--oracle", "--bound", "50"], "z2.json");
    assert_eq!(v["oracle"]["covered"], false);
    assert_eq!(v["oracle"]["agrees"], true);
}

#[test]
fn morphism_report() {
    let v = report(&["morphism"], "morphism.json");
    assert_eq!(v["injective"], true);
    assert_eq!(v["surjective"], false);
    assert_eq!(v["kernel"]["dimension"]["text"], "0 + 0i");
    assert_eq!(v["image"]["dimension"], v["domain_dimension"]);
    assert!(v["laws"].as_object().unwrap().values().all(|x| x == true));
}

#[test]
fn relation_among_square_roots() {
    let v = report(&["relation"], "relation.json");
    assert_eq!(v["found"], true);
    assert_eq!(v["coefficients"], json!([1, 1, -1]));
}

#[test]
fn bad_delta_is_rejected() {
    let out = run(&["relation", "--lll-delta", "0.2"], "relation.json");
    assert_eq!(out.status.code(), Some(1));
}
