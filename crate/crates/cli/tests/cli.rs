use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn qfp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfp"))
        .args(args)
        .env_remove("QFP_SEED")
        .output()
        .unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("qfp-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn gen_code(name: &str, args: &[&str]) -> String {
    let path = tmp(name);
    let p = path.to_str().unwrap().to_string();
    let mut all = vec!["gen-code", "--out", &p];
    all.extend_from_slice(args);
    assert!(qfp(&all).status.success());
    p
}

#[test]
fn recipe_reports_formula_values() {
    let v = json(&qfp(&["recipe", "--n", "16", "--c", "1"]));
    assert_eq!(v["command"], "recipe");
    assert_eq!((v["result"]["k"].as_u64(), v["result"]["d"].as_u64(), v["result"]["r"].as_u64()), (Some(16), Some(76), Some(252)));
    assert_eq!(v["result"]["feasible"], false);
    assert_eq!(v["tool"], "qfp");
    assert!(v["version"].is_string());
}

#[test]
fn gen_code_is_deterministic() {
    let a = gen_code("det-a.json", &["--n", "8", "--k", "2", "--r", "6", "--d", "10", "--seed", "7"]);
    let b = gen_code("det-b.json", &["--n", "8", "--k", "2", "--r", "6", "--d", "10", "--seed", "7"]);
    let c = gen_code("det-c.json", &["--n", "8", "--k", "2", "--r", "6", "--d", "10", "--seed", "8"]);
    let read = |p: &str| std::fs::read(p).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
}

#[test]
fn env_seed_is_a_fallback() {
    let flag = qfp(&["gen-code", "--n", "4", "--k", "0", "--r", "2", "--d", "4", "--seed", "99"]);
    let env = Command::new(env!("CARGO_BIN_EXE_qfp"))
        .args(["gen-code", "--n", "4", "--k", "0", "--r", "2", "--d", "4"])
        .env("QFP_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(flag.stdout, env.stdout);
    let v = json(&env);
    assert_eq!(v["seed"], 99);
    assert_eq!(v["config"]["seed"], 99);
}

#[test]
fn config_supplies_defaults_and_flags_override() {
    let cfg = tmp("config.json");
    std::fs::write(&cfg, r#"{"n": 5, "k": 1, "r": 3, "d": 4, "seed": 3}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    let v = json(&qfp(&["gen-code", "--config", cfg]));
    assert_eq!((v["result"]["n"].as_u64(), v["seed"].as_u64()), (Some(5), Some(3)));
    let v = json(&qfp(&["gen-code", "--config", cfg, "--d", "5", "--seed", "4"]));
    assert_eq!((v["result"]["d"].as_u64(), v["seed"].as_u64()), (Some(5), Some(4)));
    assert_eq!(v["config"]["n"], 5);
}

#[test]
fn error_scan_reports_zero_false_rejects() {
    let code = gen_code("scan.json", &["--n", "8", "--k", "2", "--r", "6", "--d", "10", "--seed", "1"]);
    let v = json(&qfp(&["error-scan", "--code", &code, "--exhaustive"]));
    assert!(v["result"]["eps_minus"].as_f64().unwrap() <= 1e-9);
    assert_eq!(v["result"]["exhaustive"], true);
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    let code = gen_code("csv.json", &["--n", "6", "--k", "1", "--r", "3", "--d", "6", "--seed", "2"]);
    let j = qfp(&["extract", "--code", &code, "--bases", "4", "--seed", "5"]);
    let c = qfp(&["extract", "--code", &code, "--bases", "4", "--seed", "5", "--format", "csv"]);
    let v = json(&j);
    let text = String::from_utf8(c.stdout).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let mut seen = 0;
    for rec in rows.records() {
        let rec = rec.unwrap();
        let (key, value) = (&rec[0], &rec[1]);
        if let Some(rest) = key.strip_prefix("result.") {
            let ptr = format!("/{}", rest.replace('.', "/"));
            let want = &v["result"].pointer(&ptr).unwrap();
            if let Some(f) = want.as_f64() {
                assert_eq!(value.parse::<f64>().unwrap(), f, "{key}");
                seen += 1;
            }
        }
    }
    assert!(seen >= 6);
    // JSON floats keep 17 significant digits
    let raw = String::from_utf8(j.stdout).unwrap();
    assert!(raw.contains("\"mean_bits\": ") && raw.contains("e"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(qfp(&["recipe", "--n", "16", "--c", "1", "--bogus"]).status.code(), Some(1));
    assert_eq!(qfp(&["no-such-command"]).status.code(), Some(1));
    let out = qfp(&["gen-code", "--n", "8", "--k", "2", "--r", "12", "--d", "10"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("r < n + k"));
    assert_eq!(qfp(&["recipe", "--c", "1"]).status.code(), Some(1));
}

#[test]
fn failing_bound_exits_two_with_report() {
    let out = qfp(&["classical", "--n", "6", "--m", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["bound_holds"], false);
    let ok = qfp(&["classical", "--n", "5", "--m", "5", "--family", "identity"]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn protocols_and_fingerprints() {
    let code = gen_code("proto.json", &["--n", "6", "--k", "0", "--r", "4", "--d", "8", "--seed", "3"]);
    let v = json(&qfp(&["smp", "--code", &code, "--x", "2a", "--y", "2a", "--shots", "50"]));
    assert_eq!(v["result"]["verdict"], "equal");
    assert_eq!(v["result"]["accepts"], 50);
    let v = json(&qfp(&["one-way", "--code", &code, "--x", "01", "--y", "02"]));
    assert_eq!(v["result"]["model"], "one-way");
    let v = json(&qfp(&["fingerprint", "--code", &code, "--input", "3f"]));
    assert_eq!(v["result"]["input"], "3f");
    assert_eq!(v["result"]["signs"].as_array().unwrap().len(), 1);
}

#[test]
fn threads_do_not_change_reports() {
    let code = gen_code("threads.json", &["--n", "6", "--k", "2", "--r", "4", "--d", "6", "--seed", "9"]);
    let run = |t: &str| qfp(&["leakage", "--code", &code, "--restarts", "6", "--iters", "20", "--bases", "6", "--threads", t]).stdout;
    assert_eq!(run("1"), run("3"));
}

#[test]
fn timing_flag_embeds_duration() {
    let v = json(&qfp(&["recipe", "--n", "8", "--c", "1", "--timing"]));
    assert!(v["duration_seconds"].as_f64().unwrap() >= 0.0);
    let v = json(&qfp(&["recipe", "--n", "8", "--c", "1"]));
    assert!(v.get("duration_seconds").is_none());
}

#[test]
fn validate_bounds_emits_one_result_per_suite() {
    let v = json(&qfp(&["validate-bounds", "--scale", "0.01", "--seed", "2"]));
    let suites = v["result"].as_array().unwrap();
    assert_eq!(suites.len(), 13);
    assert!(suites.iter().all(|s| s["passed"] == true));
}
