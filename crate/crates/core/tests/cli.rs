use std::process::{Command, Output};

use serde_json::Value;

fn ergolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ergolab"))
        .args(args)
        .env_remove("ERGOLAB_THREADS")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn gen_birkhoff() {
    let v = json(&ergolab(&["gen", "--alpha", "0", "--n", "5", "--seed", "1"]));
    assert_eq!(v["result"]["bits"], serde_json::json!([1, 1, 1, 1, 1]));
    assert_eq!(v["config"]["command"], "gen");
    assert_eq!(v["config"]["master_seed"], 1);
}

#[test]
fn cz_point_mass() {
    let v = json(&ergolab(&["cz", "--phi", "point:8@0", "--lambda", "1"]));
    let bad = v["result"]["decomposition"]["bad"].as_array().unwrap();
    assert_eq!(bad.len(), 1);
    assert_eq!((bad[0]["s"].as_u64(), bad[0]["k"].as_i64()), (Some(2), Some(0)));
}

#[test]
fn chernoff_exact() {
    let v = json(&ergolab(&["chernoff", "--exact", "--n", "2", "--dist", "rademacher", "--lambda", "1"]));
    let r = &v["result"];
    assert_eq!(r["empirical_p"], 0.5);
    assert!((r["bound"].as_f64().unwrap() - 1.5576).abs() < 1e-4);
    assert_eq!(r["satisfied"], true);
    assert_eq!(v["verdict"], "pass");
}

#[test]
fn reports_are_reproducible() {
    let args = ["cancels", "--n", "60", "--theta", "40", "--trials", "2000", "--seed", "5"];
    let a = ergolab(&args);
    let b = ergolab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = ergolab(&["cancels", "--n", "60", "--theta", "40", "--trials", "2000", "--seed", "6"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn usage_errors_exit_two() {
    for args in [&["bogus"][..], &["gen", "--nope"], &[]] {
        let out = ergolab(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"), "{args:?}");
        assert!(out.stdout.is_empty());
    }
    let out = ergolab(&["gen", "--n", "abc"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid value"));
}

#[test]
fn invalid_values_exit_two() {
    let out = ergolab(&["cz", "--phi", "point:8@0", "--lambda", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    let out = ergolab(&["gen", "--tau", "explicit:0.2,0.5", "--n", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown profile kind"));

    // an increasing profile read from a file
    let path = std::env::temp_dir().join(format!("ergolab-tau-{}.txt", std::process::id()));
    std::fs::write(&path, "0.2 0.5\n").unwrap();
    let arg = format!("file:{}", path.display());
    let out = ergolab(&["gen", "--tau", &arg, "--n", "2"]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
}

#[test]
fn signal_literals() {
    let v = json(&ergolab(&["autocorr", "--phi", "block:1@0..2"]));
    assert_eq!(v["result"]["autocorrelation"], serde_json::json!({"offset": -1, "values": [1.0, 2.0, 1.0]}));
    assert_eq!(v["result"]["sup_off_origin"], 1.0);
}

#[test]
fn thread_variable_is_validated() {
    for bad in ["0", "abc", "-3"] {
        let out = Command::new(env!("CARGO_BIN_EXE_ergolab"))
            .args(["gen", "--alpha", "0", "--n", "2"])
            .env("ERGOLAB_THREADS", bad)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(2), "{bad}");
    }
    let one = Command::new(env!("CARGO_BIN_EXE_ergolab"))
        .args(["gen", "--alpha", "0.5", "--n", "1000", "--seed", "3"])
        .env("ERGOLAB_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(one.stdout, ergolab(&["gen", "--alpha", "0.5", "--n", "1000", "--seed", "3"]).stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("ergolab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = ergolab(&["gen", "--alpha", "0", "--n", "3", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["result"]["count"], 3);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn csv_format() {
    let out = ergolab(&["--format", "csv", "gen", "--alpha", "0", "--n", "3"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "n,xi\n1,1\n2,1\n3,1\n");
}

#[test]
fn dichotomy_block_arity() {
    let base = ["dichotomy", "--n", "10000", "--seeds", "2", "--windows", "100", "--trials", "1000"];
    let ok = ergolab(&[&base[..], &["--block", "2,2,3"]].concat());
    let v = json(&ok);
    assert_eq!(v["result"]["block"]["spec"]["r"], 2);
    let short = ergolab(&[&base[..], &["--block", "2,2"]].concat());
    assert_eq!(short.status.code(), Some(2));
}

#[test]
fn every_subcommand_has_help() {
    for cmd in [
        "gen", "density", "growth", "autocorr", "cz", "esets", "maximal", "chernoff", "cancels", "corollary",
        "sufficient", "dichotomy", "dyn", "transfer",
    ] {
        let out = ergolab(&[cmd, "--help"]);
        assert!(out.status.success(), "{cmd}");
        assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"), "{cmd}");
    }
}
