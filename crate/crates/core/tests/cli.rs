use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn conic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp_file(name: &str, body: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("conic-cli-{}-{name}", std::process::id()));
    std::fs::write(&p, body).unwrap();
    p
}

fn json_lines(o: &Output) -> Vec<Value> {
    stdout(o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

const HALF: [&str; 4] = ["--model", "truncated-cone:angle=4pi", "--bc", "half"];

#[test]
fn records_have_fixed_key_order() {
    let o = conic(&["cone-smatrix", "--angle", "4pi", "--lambda", "-1,-2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    for line in text.lines() {
        let pos: Vec<usize> = ["\"op\"", "\"inputs\"", "\"value\"", "\"diagnostics\""]
            .iter()
            .map(|k| line.find(k).unwrap())
            .collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]), "{line}");
    }
    let v = json_lines(&o);
    assert_eq!(v[0]["op"], "cone-smatrix");
}

#[test]
fn output_is_independent_of_thread_count() {
    let mut args = vec!["shift"];
    args.extend(HALF);
    args.extend(["--lambda-grid=-20:300:40", "--out", "csv"]);
    let one = conic(&[args.as_slice(), &["--jobs", "1"]].concat());
    let four = conic(&[args.as_slice(), &["--jobs", "4"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.stdout, conic(&args).stdout);
}

#[test]
fn empty_grid_gives_header_only() {
    let mut args = vec!["shift"];
    args.extend(HALF);
    args.extend(["--lambda-grid=-2:-1:0", "--out", "csv"]);
    let o = conic(&args);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "lambda,re_d,im_d,xi\n");
}

#[test]
fn exit_codes() {
    assert_eq!(
        conic(&["spectrum", "--model", "cone:angle=-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        conic(&["spectrum", "--no-such-flag"]).status.code(),
        Some(2)
    );
    assert_eq!(
        conic(&["det-ratio", "--model", "torus", "--bc", "log"])
            .status
            .code(),
        Some(2)
    );
    let mut args = vec!["trace-check"];
    args.extend(HALF);
    args.extend(["--lambda", "-1", "--max", "1e3", "--tol", "1e-12"]);
    let failed = conic(&args);
    assert_eq!(failed.status.code(), Some(3));
    let rec = &json_lines(&failed)[0];
    assert!(rec["diagnostics"]["residual"].as_f64().unwrap() > 1e-12);

    let mut args = vec!["trace-check"];
    args.extend(HALF);
    args.extend(["--lambda", "-1", "--max", "1e6"]);
    assert_eq!(conic(&args).status.code(), Some(0));
}

#[test]
fn flags_override_config_file() {
    let cfg = temp_file(
        "run.toml",
        r#"
[model]
type = "truncated-cone"
angle = 12.566370614359172
radius = 1.0

[bc]
preset = "half"

[lambda]
values = [-3.0]

[output]
format = "json"
"#,
    );
    let cfg = cfg.to_str().unwrap();
    let from_file = json_lines(&conic(&["shift", "--config", cfg]));
    assert_eq!(from_file.len(), 1);
    assert_eq!(from_file[0]["inputs"]["lambda"], -3.0);

    let flagged = json_lines(&conic(&["shift", "--config", cfg, "--lambda", "-5,-6"]));
    let lambdas: Vec<f64> = flagged
        .iter()
        .map(|r| r["inputs"]["lambda"].as_f64().unwrap())
        .collect();
    assert_eq!(lambdas, [-5.0, -6.0]);

    let csv = conic(&["shift", "--config", cfg, "--out", "csv"]);
    assert!(stdout(&csv).starts_with("lambda,re_d,im_d,xi\n"));

    let bad = temp_file(
        "bad.toml",
        "[model]\ntype = \"cone\"\nangle = 1.0\nextra = 2\n",
    );
    let o = conic(&["spectrum", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn relzeta_from_spectrum_files() {
    let mut args = vec!["spectrum"];
    args.extend(HALF);
    let l = conic(&[args.as_slice(), &["--max", "1e5", "--out", "csv"]].concat());
    assert_eq!(l.status.code(), Some(0));
    let f = conic(&[
        "spectrum",
        "--model",
        "truncated-cone:angle=4pi",
        "--bc",
        "friedrichs",
        "--max",
        "1e5",
        "--out",
        "csv",
    ]);
    let lp = temp_file("l.csv", &stdout(&l));
    let fp = temp_file("f.csv", &stdout(&f));
    let o = conic(&[
        "relzeta",
        "--spectrum-l",
        lp.to_str().unwrap(),
        "--spectrum-f",
        fp.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let rec = &json_lines(&o)[0];
    let zeta0 = rec["diagnostics"]["result"]["zeta_at_zero"]
        .as_f64()
        .unwrap();
    assert!((zeta0 - 0.5).abs() < 1e-4, "{rec}");
    assert!((rec["value"].as_f64().unwrap() - 1.0).abs() < 1e-6);
}
