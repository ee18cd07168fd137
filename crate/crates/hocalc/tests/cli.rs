use std::process::{Command, Output};

use serde_json::Value;

fn ho(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ho")).args(args).output().expect("run ho")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn pair_k(p: &Value) -> Vec<(String, String)> {
    p["sigma_pi"]["positive"].as_array().unwrap().iter().map(|r| (r["root"].as_str().unwrap().to_string(), r["k"].as_str().unwrap().to_string())).collect()
}

#[test]
fn match_solve_sp21_pi2() {
    let out = ho(&["match", "solve", "--roots", "BC1", "--m", "4,3", "--kappa", "0,-1", "--out", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let valid: Vec<Vec<(String, String)>> = v["pairs"].as_array().unwrap().iter().filter(|p| p["valid"] == true).map(pair_k).collect();
    let want = |a: &str, b: &str| vec![("(2)".to_string(), a.to_string()), ("(4)".to_string(), b.to_string())];
    assert!(valid.contains(&want("5", "-3/2")), "{:?}", valid);
    assert!(valid.contains(&want("1", "5/2")), "{:?}", valid);
}

#[test]
fn hyper_eval_a1_closed_form() {
    let out = ho(&["hyper", "eval", "--roots", "A1", "--k", "1", "--lambda", "1.0", "--grid", "-3:-0.2:15"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,t,s_1,re,im"));
    let mut n = 0;
    for line in lines {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        // λ(α^∨) = 1, so λ(H) = α(H)/2
        let x = f[2];
        let want = (0.5 * x).sinh() / (0.5 * x).sinh();
        assert!((f[3] - want).abs() < 1e-10 && f[4].abs() < 1e-10, "{}", line);
        n += 1;
    }
    assert_eq!(n, 15);
}

#[test]
fn hyper_eval_a1_generic_lambda() {
    let out = ho(&["hyper", "eval", "--roots", "A1", "--k", "1", "--lambda", "0.7", "--grid", "-2:-0.5:4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        let x = f[2];
        let want = (0.35 * x).sinh() / (0.7 * (0.5 * x).sinh());
        assert!((f[3] - want).abs() < 1e-10 * want.abs(), "{} vs {}", line, want);
    }
}

#[test]
fn ktypes_list_g2() {
    let out = ho(&["ktypes", "list", "--family", "G2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let entries = v.as_array().unwrap();
    assert_eq!(entries.len(), 2);
    let flagged: Vec<&Value> = entries.iter().filter(|e| e["note"].as_str().is_some_and(|n| n.contains("no hypergeometric expression"))).collect();
    assert_eq!(flagged.len(), 1);
    assert!(flagged[0]["ktype"].as_str().unwrap().contains("2"));
}

#[test]
fn usage_error_exit_64() {
    let out = ho(&["hyper", "eval", "--roots"]);
    assert_eq!(out.status.code(), Some(64));
    let out = ho(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn domain_error_exit_2_with_json() {
    let out = ho(&["roots", "show", "--roots", "Q7"]);
    assert_eq!(out.status.code(), Some(2));
    let e: Value = serde_json::from_slice(&out.stderr).expect("error json on stderr");
    assert_eq!(e["error"]["kind"], "UnknownFamily");
    assert!(e["error"]["message"].as_str().is_some());
}

#[test]
fn output_is_deterministic() {
    let args = ["match", "solve", "--roots", "B2", "--m", "2,1", "--kappa", "0,-1/4", "--out", "json"];
    let a = ho(&args);
    let b = ho(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let args = ["ktypes", "list", "--family", "so", "--p", "7", "--q", "3"];
    assert_eq!(ho(&args).status.code(), Some(0));
    assert_eq!(ho(&args).stdout, ho(&args).stdout);
}

#[test]
fn transform_roundtrip_bc1() {
    let out = ho(&["transform", "roundtrip", "--roots", "BC1", "--k", "2,0.5", "--bump", "width=1.0", "--grid", "400", "--out", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["max_abs_error"].as_f64().unwrap() < 1e-6);
    assert!(v["plancherel_mismatch"].as_f64().unwrap() < 1e-8);
}
