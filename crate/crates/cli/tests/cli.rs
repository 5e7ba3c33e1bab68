use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stabcoh")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let out = run(&a);
    let v = serde_json::from_slice(&out.stdout).expect("valid json");
    (out.status.code().unwrap(), v)
}

fn column(v: &Value, table: &str, col: usize) -> Vec<String> {
    let t = v["tables"].as_array().unwrap().iter().find(|t| t["name"] == table).expect("table");
    t["rows"].as_array().unwrap().iter().map(|r| r["cells"][col].as_str().unwrap().to_string()).collect()
}

#[test]
fn betti_table() {
    let (code, v) = json(&["betti", "--ring", "F101[x,y]/(x^3,y^3)", "--max", "4"]);
    assert_eq!(code, 0);
    assert_eq!(column(&v, "betti", 1), ["1", "2", "3", "4", "5"]);
    assert_eq!(v["schema"], 1);
}

#[test]
fn nonsymmetric_witness() {
    let (code, v) = json(&["check-symmetry", "--ring", "F101[x,y]/(x*y)", "--max", "3"]);
    assert_eq!(code, 0);
    let verdict = &v["verdicts"][0];
    assert_eq!(verdict["verdict"], "not symmetric");
    let w = verdict["witness"].as_array().unwrap();
    assert!(w.iter().any(|x| x["class"] == "[S1]" && x["left"] == "0" && x["right_signed"] == "[T1]"));
}

#[test]
fn hypersurface_laurent() {
    let (code, v) = json(&["stable", "--ring", "F101[x]/(x^2)", "--window", "4"]);
    assert_eq!(code, 0);
    assert!(column(&v, "Laurent model Λ(ξ)⊗k[t,t⁻¹]", 1).iter().all(|d| d == "1"));
    assert_eq!(v["verdicts"][0]["verdict"], "equal");
}

#[test]
fn stable_x3y3_commutative() {
    let (code, v) = json(&["stable", "--ring", "F101[x,y]/(x^3,y^3)", "--window", "3"]);
    assert_eq!(code, 0);
    assert_eq!(column(&v, "stable cohomology", 3), ["3", "2", "1", "1", "2", "3", "4"]);
    let verdicts: Vec<&str> = v["verdicts"].as_array().unwrap().iter().map(|x| x["verdict"].as_str().unwrap()).collect();
    assert_eq!(verdicts, ["equal", "graded-commutative"]);
}

#[test]
fn deterministic_bytes() {
    for fmt in ["json", "table"] {
        let args = ["actions", "--ring", "F101[x,y]/(x*y)", "--max", "3", "--format", fmt];
        assert_eq!(run(&args).stdout, run(&args).stdout);
    }
}

#[test]
fn json_and_table_agree() {
    let args = ["tor", "--ring", "F101[x,y]/(x^3,y^3)", "--max", "3"];
    let (_, v) = json(&args);
    let table = String::from_utf8(run(&args).stdout).unwrap();
    for (n, d) in column(&v, "Tor^R(k,N)", 0).iter().zip(column(&v, "Tor^R(k,N)", 1)) {
        assert!(table.lines().any(|l| l.split_whitespace().take(2).eq([n.as_str(), d.as_str()])), "{n} {d}");
    }
}

#[test]
fn exit_codes() {
    let (code, v) = json(&["betti", "--ring", "F101[x,y]/(x^3,y^"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "parse");
    assert_eq!(v["error"]["position"], 17);
    assert_eq!(run(&["betti"]).status.code(), Some(2));
    assert_eq!(run(&["betti", "--ring", "F101[x]/(x^2)", "--max", "0"]).status.code(), Some(2));

    let (code, v) = json(&["stable", "--ring", "F101[x,y]/(x^2,x*y,y^2)", "--window", "2"]);
    assert_eq!(code, 3);
    assert_eq!(v["error"]["kind"], "refusal");
    let (code, _) = json(&["stable", "--ring", "F101[x,y]/(x^3,y^3)", "--window", "2", "--field", "F7"]);
    assert_eq!(code, 0);

    let (code, v) = json(&["betti", "--ring", "F101[x,y]/(x*y)", "--max", "5", "--degree-bound", "3"]);
    assert_eq!(code, 4);
    assert!(!v["incomplete"].as_array().unwrap().is_empty());
    let rows = v["tables"][0]["rows"].as_array().unwrap();
    assert!(rows.iter().any(|r| r["incomplete"] == true));
}

#[test]
fn model_matches_tor() {
    let (code, v) = json(&["model", "--ring", "F101[x,y]/(x^3,y^3)", "--max", "3"]);
    assert_eq!(code, 0);
    assert!(v["verdicts"].as_array().unwrap().iter().all(|x| x["verdict"] == "equal" || x["verdict"] == "graded-commutative"));
    let (code, _) = json(&["model", "--ring", "F101[x,y]/(x^2,x*y,y^2)", "--max", "3"]);
    assert_eq!(code, 3);
}

#[test]
fn commutativity_witness() {
    let (code, v) = json(&["check-commutativity", "--ring", "F101[x,y]/(x^2,y^2)", "--max", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdicts"][0]["verdict"], "not graded-commutative");
}
