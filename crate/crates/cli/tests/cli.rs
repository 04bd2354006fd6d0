use std::process::Command;

use serde_json::Value;

struct Run {
    stdout: String,
    stderr: String,
    code: i32,
}

fn taut(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_taut")).args(args).output().expect("binary runs");
    Run {
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
        code: out.status.code().unwrap(),
    }
}

fn json(args: &[&str]) -> Value {
    let r = taut(args);
    assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
    serde_json::from_str(&r.stdout).unwrap()
}

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn dim_examples() {
    assert_eq!(taut(&["dim", "--g", "0", "--n", "6"]).stdout, "16\n");
    assert_eq!(taut(&["dim", "--g", "2"]).stdout, "2\n");
    assert_eq!(taut(&["dim", "--g", "1", "--markings", "p,q"]).stdout, "2\n");
}

#[test]
fn kernel_of_xi_in_genus_one() {
    let j = json(&["kernel", "--map", "xi", "--g", "1", "--n", "3"]);
    assert_eq!(j["dim"], 1);
    let terms = j["basis"][0]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0]["gen"], "delta_irr");
    assert_eq!(json(&["kernel", "--map", "boundary", "--g", "0", "--n", "6"])["dim"], 0);
}

#[test]
fn euler_values() {
    assert_eq!(taut(&["euler", "--g", "1", "--n", "3", "--space", "compact"]).stdout, "12\n");
    assert_eq!(taut(&["euler", "--g", "0", "--n", "6", "--space", "open"]).stdout, "-6\n");
    let explain = taut(&["euler", "--g", "1", "--n", "2", "--space", "compact", "--explain"]).stdout;
    let lines: Vec<&str> = explain.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines.last().unwrap().ends_with("\t4"));
}

#[test]
fn quotient_json_shape() {
    let j = json(&["quotient", "--g", "1", "--n", "2"]);
    assert_eq!(j["dim"], 2);
    assert_eq!(j["n"], 2);
    assert_eq!(j["basis"].as_array().unwrap().len(), 2);
    assert!(j["relations_rank"].as_u64().unwrap() > 0);
}

#[test]
fn generators_and_relations() {
    let gens = json(&["generators", "--g", "0", "--n", "4"]);
    assert!(gens.as_array().unwrap().contains(&Value::from("delta_irr")));
    let rels = json(&["relations", "--g", "2"]);
    assert_eq!(rels.as_array().unwrap().len(), 1);
}

#[test]
fn reduce_class_file() {
    let j = json(&["reduce", "--class", &data("genus1_class.json")]);
    // δ_{1,∅} − ψ_z ≡ −δ_irr/12
    let terms = j["class"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0]["gen"], "delta_irr");
    assert_eq!(terms[0]["coeff"], "-1/12");
}

#[test]
fn pullback_matrices() {
    let j = json(&["pullback", "--map", "xi", "--g", "2"]);
    assert_eq!(j["kind"], "xi");
    assert_eq!(j["target"]["g"], 1);
    assert_eq!(j["target"]["n"], 2);
    let j = json(&["pullback", "--map", "theta", "--g", "2", "--markings", "p", "--a", "1", "--subset", "p"]);
    assert_eq!(j["matrix"][0][0], "1/12");
    assert_eq!(taut(&["pullback", "--map", "theta", "--g", "2"]).code, 2);
    assert_eq!(taut(&["pullback", "--map", "pi", "--g", "1", "--n", "1", "--q", "1"]).code, 2);
}

#[test]
fn graph_counts() {
    for (g, n, count) in [("1", "2", 5), ("1", "3", 23), ("0", "4", 4)] {
        assert_eq!(json(&["graphs", "--g", g, "--n", n]).as_array().unwrap().len(), count);
    }
    assert_eq!(json(&["graphs", "--g", "0", "--n", "5", "--max-codim", "1"]).as_array().unwrap().len(), 11);
}

#[test]
fn families_report() {
    let j = json(&["families"]);
    for case in j["independence"].as_array().unwrap() {
        assert_eq!(case["verdict"], "independent");
    }
    let j = json(&["families", "--fixture", &data("two_families.tsv"), "--keys", "delta_irr,delta:1:{}"]);
    assert_eq!(j["rank"], 2);
    assert_eq!(j["verdict"], "independent");
}

#[test]
fn invalid_input_exits_two() {
    let r = taut(&["dim", "--bogus"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("Usage"));
    assert_eq!(taut(&["dim", "--g", "0", "--n", "2"]).code, 2);
    assert_eq!(taut(&["dim", "--g", "0", "--n", "9"]).code, 2);
    assert_eq!(taut(&["dim", "--g", "4"]).code, 2);
    assert_eq!(taut(&["dim", "--g", "1", "--n", "2", "--markings", "a,b"]).code, 2);
    assert_eq!(taut(&["dim", "--g", "1", "--markings", "a,a"]).code, 2);
    assert_eq!(taut(&["verify", "--suite", "nope"]).code, 2);
    assert_eq!(taut(&["reduce", "--class", "/nonexistent.json"]).code, 2);
    assert_eq!(taut(&["dim", "--g", "0", "--n", "9", "--caps", "9,5,4,2"]).stdout, "219\n");
}

#[test]
fn identical_argv_identical_bytes() {
    let args = ["graphs", "--g", "1", "--n", "3", "--format", "tsv"];
    assert_eq!(taut(&args).stdout, taut(&args).stdout);
    let args = ["verify", "--suite", "relations", "--seed", "11"];
    assert_eq!(taut(&args).stdout, taut(&args).stdout);
}

#[test]
fn verify_suites_pass() {
    for suite in ["squares", "kernels", "families"] {
        let r = taut(&["verify", "--suite", suite, "--format", "tsv"]);
        assert_eq!(r.code, 0, "{}", r.stdout);
        assert!(r.stdout.lines().last().unwrap().starts_with("PASS "));
    }
}

#[test]
fn verify_all_passes() {
    let j = json(&["verify", "--suite", "all"]);
    let summary = j["summary"].as_str().unwrap();
    assert!(summary.starts_with("PASS "), "{summary}");
}
