use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use tds::cli::run;
use tds::io::{self, LoadOptions, LoadedModel};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

struct Outcome {
    code: i32,
    out: String,
    err: String,
}

fn tds(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("tds").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Outcome {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn json(o: &Outcome) -> Value {
    serde_json::from_str(&o.out).unwrap_or_else(|e| panic!("{e}: {}", o.out))
}

#[test]
fn validate_m1_only_warns() {
    let o = tds(&["validate", "-m", &fixture("m1.json")]);
    assert_eq!(o.code, 1, "{}", o.out);
    assert!(o.out.contains("warning SER"));
    assert!(o.out.contains("0 violation(s), 1 warning(s)"));
    let strict = tds(&["validate", "-m", &fixture("m1.json"), "--strict-serial"]);
    assert_eq!(strict.code, 2);
}

#[test]
fn validate_json_is_an_array_of_violations() {
    let o = tds(&["validate", "-m", &fixture("m1.json"), "--json"]);
    assert_eq!(o.code, 1);
    let v = json(&o);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["condition"], "SER");
    assert_eq!(rows[0]["severity"], "warning");
    assert_eq!(rows[0]["witnesses"].as_array().unwrap().len(), 4);
}

#[test]
fn axioms_hold_on_seed_seven() {
    let o = tds(&["axioms", "-m", &fixture("gen_seed7.json"), "--depth", "1"]);
    assert_eq!(o.code, 0, "{}", o.out);
    assert!(o.out.contains(" 0 counterexample(s)"));
    let j = tds(&["axioms", "-m", &fixture("gen_seed7.json"), "--json"]);
    assert_eq!(json(&j)["counterexamples"].as_array().unwrap().len(), 0);
}

#[test]
fn axioms_report_seriality_in_strict_mode() {
    let o = tds(&[
        "axioms",
        "-m",
        &fixture("m1.json"),
        "--strict-serial",
        "--json",
    ]);
    assert_eq!(o.code, 2);
    let v = json(&o);
    let rows = v["counterexamples"].as_array().unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r["schema"] == "A19"));
}

#[test]
fn proof_fixtures() {
    let bad = tds(&["proof", "-d", &fixture("bad_r2.json")]);
    assert_eq!(bad.code, 2);
    assert_eq!(bad.out.trim(), "line 2: R2 side condition, p occurs in φ");
    let r1 = tds(&["proof", "-d", &fixture("illegal_r1.json")]);
    assert_eq!(r1.code, 2);
    assert!(r1.out.starts_with("line 2: "), "{}", r1.out);
    let ok = tds(&["proof", "-d", &fixture("a13_weakening.json"), "--json"]);
    assert_eq!(ok.code, 0);
    let v = json(&ok);
    assert_eq!(v["valid"], true);
    assert_eq!(v["conclusion"], "~ (box p & ~ O{1} p)");
    let err = tds(&["proof", "-d", &fixture("bad_r2.json"), "--json"]);
    assert_eq!(json(&err)["line"], 2);
}

#[test]
fn parse_echoes_the_tree() {
    let o = tds(&["parse", "-f", "O{1} p -> dia p"]);
    assert_eq!(o.code, 0);
    assert!(o.out.starts_with("~ (O{1} p & ~ ~ box ~ p)\n"));
    let j = tds(&["parse", "-f", "[2] q", "--json"]);
    let v = json(&j);
    assert_eq!(v["ast"]["op"], "stit");
    assert_eq!(v["ast"]["agent"], 2);
    assert_eq!(tds(&["parse", "-f", "p &"]).code, 65);
    assert_eq!(tds(&["parse", "-f", "[3] p", "--agents", "2"]).code, 65);
}

#[test]
fn usage_errors() {
    assert_eq!(tds(&["frobnicate"]).code, 64);
    assert_eq!(tds(&[]).code, 64);
    assert_eq!(tds(&["validate"]).code, 64);
    assert_eq!(tds(&["validate", "-m", "/nonexistent/model.json"]).code, 64);
    assert_eq!(
        tds(&["dominance", "-m", &fixture("m1.json"), "-a", "3"]).code,
        64
    );
    assert_eq!(tds(&["ctd"]).code, 64);
    let help = tds(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.out.contains("validate"));
}

#[test]
fn malformed_files_are_format_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\"agents\": 2").unwrap();
    let o = tds(&["validate", "-m", path.to_str().unwrap()]);
    assert_eq!(o.code, 65);
    assert!(o.err.contains("malformed JSON"));
    let text = std::fs::read_to_string(fixture("m1.json")).unwrap();
    std::fs::write(&path, text.replacen("\"agents\"", "\"agentz\"", 1)).unwrap();
    assert_eq!(tds(&["validate", "-m", path.to_str().unwrap()]).code, 65);
}

#[test]
fn eval_prints_truth_per_world() {
    let o = tds(&["eval", "-m", &fixture("m1.json"), "-f", "O{1} p"]);
    assert_eq!(o.code, 0);
    assert_eq!(o.out, "w00\ttrue\nw01\ttrue\nw10\ttrue\nw11\ttrue\n");
    let one = tds(&[
        "eval",
        "-m",
        &fixture("m1.json"),
        "-f",
        "[2] p",
        "-w",
        "w10",
        "--json",
    ]);
    let v = json(&one);
    assert_eq!(v["truth"][0]["world"], "w10");
    assert_eq!(v["truth"][0]["value"], false);
    assert_eq!(
        tds(&["eval", "-m", &fixture("m1.json"), "-f", "[3] p"]).code,
        65
    );
}

#[test]
fn transform_writes_a_utility_model() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("util.json");
    let o = tds(&[
        "transform",
        "-m",
        &fixture("m1.json"),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.code, 0, "{}{}", o.out, o.err);
    assert!(o.out.contains("0 disagreement(s)"));
    match io::load_model(&out, LoadOptions::default()).unwrap() {
        LoadedModel::Util(u) => assert_eq!(u.utilities(), &[1, 0, 0, 0]),
        LoadedModel::Neutral(_) => panic!("transform must write utilities"),
    }
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("\"util\"") && !text.contains("\"ideal\""));
    let j = tds(&[
        "transform",
        "-m",
        &fixture("gen_seed7.json"),
        "-o",
        out.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(j.code, 0);
    let v = json(&j);
    assert_eq!(v["disagreements"].as_array().unwrap().len(), 0);
    assert!(v["formulas"].as_u64().unwrap() > 3000);
}

#[test]
fn gen_is_reproducible() {
    let o = tds(&["gen", "--seed", "7"]);
    assert_eq!(o.code, 0);
    let stored = std::fs::read_to_string(fixture("gen_seed7.json")).unwrap();
    assert_eq!(o.out, stored);
    let again = tds(&[
        "gen",
        "--agents",
        "2",
        "--depth",
        "2",
        "--choices",
        "2,2",
        "--seed",
        "7",
    ]);
    assert_eq!(again.out, stored);
}

#[test]
fn gen_mutations_are_caught_by_validate() {
    let dir = tempfile::tempdir().unwrap();
    for cond in [
        "C2", "C3", "T4", "T5", "T6", "T7", "D9", "D11", "C1", "D8", "D10",
    ] {
        let path = dir.path().join(format!("{cond}.json"));
        let p = path.to_str().unwrap();
        let g = tds(&["gen", "--seed", "3", "--mutate", cond, "-o", p]);
        assert_eq!(g.code, 0, "{cond}: {}", g.err);
        let v = tds(&["validate", "-m", p, "--permissive", "--json"]);
        assert_eq!(v.code, 2, "{cond}");
        let rows = json(&v);
        assert!(
            rows.as_array()
                .unwrap()
                .iter()
                .any(|r| r["condition"] == cond && r["severity"] == "violation"),
            "{cond}: {}",
            v.out
        );
    }
    assert_eq!(tds(&["gen", "--mutate", "SER"]).code, 64);
    assert_eq!(tds(&["gen", "--mutate", "XYZ"]).code, 64);
}

#[test]
fn dominance_matrices() {
    let o = tds(&["dominance", "-m", &fixture("m1.json"), "-a", "1", "--json"]);
    assert_eq!(o.code, 0);
    let v = json(&o);
    assert_eq!(
        v[0]["strict"],
        serde_json::json!([[false, false], [true, false]])
    );
    assert_eq!(v[0]["undominated"], serde_json::json!([0]));
    let text = tds(&["dominance", "-m", &fixture("m1.json"), "-a", "2"]);
    assert!(text.out.contains("strict (row ≺ column)"));
}

#[test]
fn ctd_diagnosis_and_census() {
    let o = tds(&["ctd", "-m", &fixture("m1.json"), "--json"]);
    assert_eq!(o.code, 0);
    let v = json(&o);
    assert_eq!(
        v["moments"][0]["collapse"],
        serde_json::json!([false, false])
    );
    assert_eq!(
        v["moments"][0]["deliberative"][0],
        serde_json::json!(["w00", "w01"])
    );
    let c = tds(&["ctd", "--census", "--json"]);
    let v = json(&c);
    assert_eq!(v["assignments"], 16);
    assert_eq!(
        c.code,
        if v["reproduces_all_scenarios"] == true {
            0
        } else {
            2
        }
    );
    assert_eq!(tds(&["ctd", "--census", "--cells-per", "4"]).code, 64);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_tds");
    let status = Command::new(bin)
        .args(["validate", "-m", &fixture("m1.json")])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(1));
    let proof = Command::new(bin)
        .args(["proof", "-d", &fixture("bad_r2.json")])
        .output()
        .unwrap();
    assert_eq!(proof.status.code(), Some(2));
    assert!(
        String::from_utf8_lossy(&proof.stdout).contains("line 2: R2 side condition, p occurs in φ")
    );
    let usage = Command::new(bin).arg("--bogus").output().unwrap();
    assert_eq!(usage.status.code(), Some(64));
}
