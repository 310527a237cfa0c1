use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    run_with_stdin(args, "")
}

fn run_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_granulum"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_lines(o: &Output) -> Vec<Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).expect("json line")).collect()
}

fn doc(o: &Output) -> Value {
    let mut v = json_lines(o);
    assert_eq!(v.len(), 1, "{}", stdout(o));
    v.remove(0)
}

fn five() -> String {
    data("five.json").to_string_lossy().into_owned()
}

#[test]
fn approx_of_ab() {
    let o = run(&["approx", "--space", &five(), "--x", "a,b"]);
    assert_eq!(o.status.code(), Some(0));
    let v = doc(&o);
    assert_eq!(v["lower"], serde_json::json!(["a"]));
    assert_eq!(v["upper"], serde_json::json!(["a", "b", "e"]));
    assert_eq!(v["schema"], "granulum/1");
}

#[test]
fn axiom_violation_exits_one_with_witness() {
    let o = run(&["check", "--ggs", data("pt2_violation.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v = doc(&o);
    let pt2 = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "PT2").unwrap();
    assert_eq!(pt2["status"], "fails");
    assert_eq!(pt2["witness"], serde_json::json!(["0", "x"]));
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\"universe\": [").unwrap();
    let o = run(&["approx", "--space", p.to_str().unwrap(), "--x", "a"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(doc(&o)["error"]["kind"], "input");
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["approx", "--space", &five(), "--bogus"]).status.code(), Some(2));
}

#[test]
fn grif_matrix_json() {
    let o = run(&["grif", "--space", &five(), "--tau", "k0", "--a", "a,b", "--b", "a,c,f"]);
    assert_eq!(o.status.code(), Some(0));
    let v = doc(&o);
    assert_eq!((v["ll"].as_str(), v["lu"].as_str(), v["ul"].as_str(), v["uu"].as_str()),
        (Some("1/1"), Some("1/1"), Some("1/3"), Some("1/1")));
}

#[test]
fn grif_theorem_reports() {
    let o = run(&["grif", "--space", &five(), "--check", "monotonicity"]);
    assert_eq!(o.status.code(), Some(0));
    // The disjunctive converse is refuted on this space, so the report is red.
    let o = run(&["grif", "--space", &five(), "--check", "forms"]);
    assert_eq!(o.status.code(), Some(1));
    let v = doc(&o);
    assert!(v["checks"].as_array().unwrap().iter().any(|c| c["name"] == "upper form converse" && c["witness"].is_array()));
    let o = run(&["grif", "--check", "semiring", "--tnorm", "product", "--snorm", "luk"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn granules_from_relation_and_table_view() {
    let o = run(&["granules", "--relation", data("five_relation.json").to_str().unwrap()]);
    let v = doc(&o);
    assert_eq!(v["granules"].as_array().unwrap().len(), 5);
    let t = run(&["--table", "approx", "--space", &five()]);
    assert_eq!(t.status.code(), Some(0));
    assert!(stdout(&t).lines().next().unwrap().starts_with("members"));
}

#[test]
fn granules_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t.csv");
    std::fs::write(&p, "id,colour,size\no1,red,big\no2,red,big\no3,blue,big\n").unwrap();
    let o = run(&["granules", "--csv", p.to_str().unwrap(), "--attrs", "colour"]);
    let v = doc(&o);
    assert_eq!(v["granules"], serde_json::json!([["o1", "o2"], ["o3"]]));
}

#[test]
fn riff_profile_and_value() {
    let o = run(&["riff", "--fn", "k0", "--space", &five(), "--profile"]);
    assert_eq!(doc(&o)["classification"], "RIF");
    let o = run(&["riff", "--fn", "k0", "--space", &five(), "--a", "a,b", "--b", "b,c"]);
    assert_eq!(doc(&o)["value"], "1/2");
    let o = run(&["riff", "--fn", "kst", "--space", &five(), "--profile"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn inverse_streams_and_ignores_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("obs.json");
    std::fs::write(
        &p,
        r#"{"observations": [{"subject": ["x"], "lower": ["x"], "upper": ["x", "y"]},
                             {"subject": ["z"], "lower": [], "upper": ["y", "z"]}]}"#,
    )
    .unwrap();
    let args = ["inverse", "--obs", p.to_str().unwrap(), "--universe", "x,y,z", "--gen", "relations", "--tau", "k0"];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0));
    let lines = json_lines(&a);
    assert!(!lines.is_empty());
    assert!(lines.iter().all(|l| l["schema"] == "granulum/1" && l["granules"].is_array()));
    let mut one = vec!["--workers", "1"];
    one.extend(args);
    assert_eq!(stdout(&run(&one)), stdout(&a));
}

#[test]
fn pilot_generate_and_run_are_deterministic() {
    let gen = ["pilot", "gen", "--n", "5", "--r", "3", "--q", "2", "--l", "3", "--seed", "7"];
    let d1 = run(&gen);
    assert_eq!(d1.status.code(), Some(0));
    assert_eq!(stdout(&d1), stdout(&run(&gen)));
    assert!(doc(&d1)["checks"].as_array().unwrap().iter().all(|c| c["status"] != "fails"));

    let mut sgen = gen.to_vec();
    sgen.push("--scenario");
    let sc = run(&sgen);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("scenario.json");
    std::fs::write(&p, stdout(&sc)).unwrap();
    let args = ["pilot", "run", "--scenario", p.to_str().unwrap(), "--measure", "grif"];
    let r1 = run(&args);
    assert!(matches!(r1.status.code(), Some(0 | 1)));
    let lines = json_lines(&r1);
    assert_eq!(lines.len(), 15);
    assert_eq!(lines[13]["step"], 14);
    assert!(lines[14]["improvement"]["status"].is_string());
    assert_eq!(stdout(&r1), stdout(&run(&args)));

    let mut inter = args.to_vec();
    inter.push("--interactive");
    let r2 = run_with_stdin(&inter, "1\n1\n");
    let lines = json_lines(&r2);
    let rank: Vec<String> = lines[6]["data"]["ranked"].as_array().unwrap().iter().map(|a| a["name"].as_str().unwrap().to_string()).collect();
    assert_eq!(lines[7]["data"]["action"], rank[1].as_str());
    assert!(String::from_utf8_lossy(&r2.stderr).contains("step 7"));
}

#[test]
fn norms_values() {
    let o = run(&["norms", "--tnorm", "product", "--op", "t", "--args", "1/2,1/2"]);
    assert_eq!(doc(&o)["value"], "1/4");
    let o = run(&["norms", "--tnorm", "luk", "--op", "implication", "--args", "3/4,1/4"]);
    assert_eq!(doc(&o)["value"], "1/2");
    let o = run(&["norms", "--op", "axioms"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["norms", "--tnorm", "bogus", "--args", "1/2"]);
    assert_eq!(o.status.code(), Some(2));
}
