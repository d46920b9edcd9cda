use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn bsaks(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bsaks")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn catalog_list_names_sequences_and_sets() {
    let o = bsaks(&["catalog", "list"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    for id in ["ell1-basis", "schreier-basis", "omega-example:<n>", "ball-c0"] {
        assert!(text.contains(id), "{id} missing");
    }
}

#[test]
fn shown_terms_feed_the_minimizer() {
    let o = bsaks(&["catalog", "show", "c0-basis", "--k", "3"]);
    assert_eq!(code(&o), 0);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("units.toml");
    fs::write(&path, &o.stdout).unwrap();
    let m = bsaks(&["sm-min", "--vectors", path.to_str().unwrap()]);
    assert_eq!(code(&m), 0);
    let r = json(&m);
    assert_eq!(r["value"]["exact"], "1/3");
    assert_eq!(r["method"], "face-lp-exact");
    // The command-line space overrides the file.
    let l1 = json(&bsaks(&["sm-min", "--space", "l1", "--vectors", path.to_str().unwrap()]));
    assert_eq!(l1["value"]["exact"], "1");
}

#[test]
fn catalog_spec_output_parses() {
    let o = bsaks(&["catalog", "show", "schreier-basis", "--spec"]);
    assert_eq!(code(&o), 0);
    let spec = bsaks_core::catalog::spec_from_toml(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    assert_eq!(spec, bsaks_core::catalog::lookup("schreier-basis").unwrap().spec);
}

#[test]
fn quantity_asep_on_l1_basis() {
    let o = bsaks(&["quantity", "asep", "--sequence", "ell1-basis", "--horizon", "10", "--max-block", "5"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["quantity"], "asep");
    assert_eq!(r["value"]["exact"], "2");
    assert_eq!(r["bound_kind"], "upper");
    assert_eq!(r["witness"]["f"], serde_json::json!([1]));
    assert_eq!(r["witness"]["h"], serde_json::json!([2]));
}

#[test]
fn quantity_profile_and_csv() {
    let r = json(&bsaks(&["quantity", "cca", "--sequence", "c-signflip", "--horizon", "6"]));
    assert_eq!(r["profile"].as_array().unwrap().len(), 6);
    let o = bsaks(&["quantity", "cca", "--sequence", "c-signflip", "--horizon", "6", "--csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("quantity,m,value,bound_kind,horizon\n"));
    assert!(text.contains("D,3,1,exact,6"));
}

#[test]
fn sm_delta_check_sets_exit_code() {
    let ok = bsaks(&["quantity", "sm", "--sequence", "c0-basis", "--horizon", "10", "--delta", "1/5"]);
    assert_eq!(code(&ok), 0);
    assert_eq!(json(&ok)["delta_check"]["pass"], true);
    let bad = bsaks(&["quantity", "sm", "--sequence", "c0-basis", "--horizon", "10", "--delta", "1/4"]);
    assert_eq!(code(&bad), 1);
    let r = json(&bad);
    assert_eq!(r["delta_check"]["pass"], false);
    assert!(!r["delta_check"]["violations"].as_array().unwrap().is_empty());
}

#[test]
fn bad_input_is_an_infrastructure_error() {
    assert_eq!(code(&bsaks(&["quantity", "nope", "--sequence", "ell1-basis", "--horizon", "4"])), 2);
    assert_eq!(code(&bsaks(&["quantity", "ca", "--sequence", "no-such-id", "--horizon", "4"])), 2);
    assert_eq!(code(&bsaks(&["sm-min", "--vectors", "/nonexistent/file.toml"])), 2);
    assert_eq!(code(&bsaks(&["verify", "paper", "--only", "no-such-check"])), 2);
    let bad_threads = Command::new(env!("CARGO_BIN_EXE_bsaks"))
        .args(["catalog", "list"])
        .env("BSAKS_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&bad_threads), 2);
}

#[test]
fn ramsey_dichotomy_both_cases() {
    let b = json(&bsaks(&["ramsey", "dichotomy", "--family", "schreier", "--n", "18", "--m", "5"]));
    assert_eq!(b["result"]["case"], "b");
    assert_eq!(b["certificate_verified"], true);
    let a = json(&bsaks(&["ramsey", "dichotomy", "--family", "cardinality-cap:3", "--n", "18", "--m", "6"]));
    assert_eq!(a["result"]["case"], "a");
    assert_eq!(a["result"]["d"], 3);
}

#[test]
fn ramsey_extract_from_file() {
    // Color a pair by the parity of its sum; {1,3,5} is the first monochromatic triple.
    let mut text = String::from("# i j color\n");
    for i in 1..=6 {
        for j in i + 1..=6 {
            text.push_str(&format!("{i} {j} {}\n", (i + j) % 2));
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("coloring.txt");
    fs::write(&path, text).unwrap();
    let o = bsaks(&["ramsey", "extract", "--d", "2", "--n", "6", "--coloring", path.to_str().unwrap(), "--t", "3"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["set"], serde_json::json!([1, 3, 5]));
    assert_eq!(r["color"], 0);
}

#[test]
fn verify_writes_reproducible_report() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let o = bsaks(&["verify", "paper", "--only", "ell1-asep", "--only", "c-signflip-pair", "--report", path.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        fs::read_to_string(path).unwrap()
    };
    let (first, second) = (run("a.json"), run("b.json"));
    assert_eq!(first, second);
    let r: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(r["passed"], 2);
    let ids: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["c-signflip-pair", "ell1-asep"]);
}

#[test]
fn verify_config_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    fs::write(&cfg, "[horizons]\nomega_max = 6\n").unwrap();
    let o = bsaks(&["verify", "paper", "--only", "omega-example-norm", "--config", cfg.to_str().unwrap(), "--csv"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("id,pass,"));
    assert!(text.contains("omega-example-norm,pass"));
    assert!(text.contains("pairs=36"));
    fs::write(&cfg, "[horizons]\nbogus = 1\n").unwrap();
    assert_eq!(code(&bsaks(&["verify", "paper", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn timings_are_opt_in() {
    let plain = json(&bsaks(&["verify", "paper", "--only", "c-signflip-pair"]));
    assert!(plain["checks"][0].get("runtime_ms").is_none());
    let timed = json(&bsaks(&["verify", "paper", "--only", "c-signflip-pair", "--timings"]));
    assert!(timed["checks"][0]["runtime_ms"].is_u64());
}

#[test]
fn fuzz_regression_seed_passes() {
    let o = Command::new(env!("CARGO_BIN_EXE_bsaks"))
        .args(["fuzz", "--seed", "0", "--trials", "10", "--dims", "4", "--horizon", "8"])
        .env("BSAKS_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["failed"], 0);
    assert_eq!(r["parameters"]["seed"], "0");
    let single = bsaks(&["fuzz", "--seed", "0", "--trial", "3"]);
    assert_eq!(code(&single), 0);
}
