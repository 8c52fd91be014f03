use std::process::{Command, Output};

use choquet_core::{DistortionSpec, QsmParams};
use serde_json::Value;

const QSM: &str = r#"{"type":"qsm","a":1.0,"b":2.0,"k":0.5,"alpha":0.3,"c":0.4}"#;

fn choquet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_choquet"))
        .args(args)
        .env_remove("CHOQUET_SEED")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn eval_identity_is_the_mean() {
    let v = json(&choquet(&[
        "eval",
        "identity",
        "--dist",
        "1:0.3333333333333333,2:0.3333333333333333,3:0.3333333333333334",
    ]));
    assert!((v["value"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn eval_reads_csv_samples() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    std::fs::write(&path, "value\n1\n2\n3\n4\n").unwrap();
    let v = json(&choquet(&[
        "eval",
        "identity",
        "--data",
        path.to_str().unwrap(),
        "--oracle",
    ]));
    assert!((v["value"].as_f64().unwrap() - 2.5).abs() < 1e-12);
    assert!(v["discrepancy"].as_f64().unwrap() < 1e-8);
}

#[test]
fn eval_with_transform() {
    let v = json(&choquet(&[
        "eval",
        "identity",
        "--dist",
        "-1:0.5,2:0.5",
        "--v",
        "power:2",
    ]));
    assert!((v["value"].as_f64().unwrap() - 2.5).abs() < 1e-12);
}

#[test]
fn classify_recognises_step_form() {
    let v = json(&choquet(&["classify", QSM]));
    assert_eq!(v["quasi_convex_in_mixtures"], Value::Bool(true));
}

#[test]
fn battery_is_deterministic_and_coherent() {
    let args = [
        "check",
        QSM,
        "--battery",
        "--seed",
        "42",
        "--grid",
        "32",
        "--trials",
        "200",
    ];
    let (a, b) = (choquet(&args), choquet(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["coherent"], Value::Bool(true));
}

#[test]
fn seed_can_come_from_the_environment() {
    let run = |env: Option<&str>, flag: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_choquet"));
        cmd.args([
            "check",
            "cap:0.5",
            "--property",
            "m-quasi-convex",
            "--grid",
            "32",
            "--trials",
            "200",
        ])
        .args(flag);
        match env {
            Some(s) => cmd.env("CHOQUET_SEED", s),
            None => cmd.env_remove("CHOQUET_SEED"),
        };
        cmd.output().unwrap()
    };
    assert_eq!(run(Some("9"), &[]).stdout, run(None, &["--seed", "9"]).stdout);
}

#[test]
fn counterexample_for_concave_cap() {
    let v = json(&choquet(&[
        "counterexample",
        "cap:0.5",
        "--grid",
        "32",
        "--trials",
        "200",
    ]));
    assert!(v["margin"].as_f64().unwrap() > 0.0);
}

#[test]
fn no_counterexample_for_step_form() {
    let v = json(&choquet(&["counterexample", QSM, "--grid", "32", "--trials", "200"]));
    assert_eq!(v, Value::String("none".into()));
}

#[test]
fn conflict_on_affine_is_scaled_mean() {
    let v = json(&choquet(&["conflict", "identity", "--grid", "32", "--trials", "200"]));
    assert_eq!(v["result"], "scaled_mean");
}

#[test]
fn transform_check_agrees() {
    let out = choquet(&["check", "cap:0.5", "--v", "power:3", "--grid", "32", "--trials", "200"]);
    assert_eq!(json(&out)["agree"], Value::Bool(true));
}

#[test]
fn malformed_input_exits_two() {
    for args in [
        &["classify", "{\"type\":\"qsm\"}"][..],
        &["classify", "nonsense:1"],
        &["eval", "identity", "--dist", "1:0.5"],
        &["check", "identity", "--property", "m-quasi-convex", "--grid", "2"],
        &["check", "identity", "--property", "no-such-property"],
    ] {
        let out = choquet(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error"), "{args:?}");
    }
}

#[test]
fn plot_data_round_trips_breakpoints() {
    let params = QsmParams::new(1.0, 2.0, 0.5, 0.3, 0.4).unwrap();
    let h = DistortionSpec::Qsm {
        a: params.a,
        b: params.b,
        k: params.k,
        alpha: params.alpha,
        c: params.c,
    }
    .build()
    .unwrap();
    let out = choquet(&["plot-data", QSM, "--samples", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,kind,value"));
    let mut points = 0;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let p: f64 = cols[0].parse().unwrap();
        let value: f64 = cols[2].parse().unwrap();
        let expected = match cols[1] {
            "point" => {
                points += 1;
                h.eval(p).unwrap()
            }
            "left-limit" => h.eval_left(p).unwrap(),
            "right-limit" => h.eval_right(p).unwrap(),
            "segment" => {
                let (l, r) = (h.eval_left(p).unwrap_or(f64::NAN), h.eval_right(p).unwrap_or(f64::NAN));
                let m = h.eval(p).unwrap();
                assert!([l, r, m].iter().any(|x| (x - value).abs() < 1e-12), "{line}");
                continue;
            }
            other => panic!("unknown kind {other}"),
        };
        assert_eq!(value, expected, "{line}");
    }
    assert_eq!(points, h.breakpoints().len());
}
