use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn jsr() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_jsr"));
    c.env_remove("JSR_BUDGET");
    c
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    jsr().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json_out(o: &Output) -> Value {
    assert_eq!(code(o), 0, "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn bounds_on_the_rank_one_pair() {
    let pair = data("pair.json");
    let v = json_out(&run(&["bounds", "--input", p(&pair), "--n", "6"]));
    assert_eq!(v["result"]["lower"], 1.0);
    assert_eq!(v["result"]["upper"], 1.0);
    assert_eq!(v["tool"], "jsr");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["n"], 6);
    assert!(v["provenance"].is_object());
}

#[test]
fn bounds_csv_has_a_preamble() {
    let o = run(&["bounds", "--input", p(&data("pair.json")), "--n", "4", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("# tool: jsr "));
    assert!(text.contains("# config: "));
    assert!(text.contains("lower,upper,depth_n,witness,norm_tag\n1,1,4,"));
}

#[test]
fn extremal_norm_option() {
    let v = json_out(&run(&["bounds", "--input", p(&data("pair2x2.json")), "--n", "6", "--extremal", "3"]));
    assert!(v["result"]["lower"].as_f64().unwrap() <= v["result"]["upper"].as_f64().unwrap());
    let v = json_out(&run(&["bounds", "--input", p(&data("pair2x2.json")), "--n", "6", "--ellipsoid", "6"]));
    assert!(v["result"]["lower"].as_f64().unwrap() <= v["result"]["upper"].as_f64().unwrap());
    assert_eq!(v["config"]["ellipsoid"], 6);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(code(&run(&["bounds", "--input", p(&bad)])), 2);
    assert_eq!(code(&run(&["bounds", "--input", p(&dir.path().join("missing.json"))])), 2);
    assert_eq!(code(&run(&["bounds"])), 2);

    let o = jsr()
        .args(["bounds", "--input", p(&data("pair.json")), "--n", "12"])
        .env("JSR_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
    let o = jsr()
        .args(["bounds", "--input", p(&data("pair.json"))])
        .env("JSR_BUDGET", "lots")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);

    // two far-apart points leave nothing to fit
    let curve = dir.path().join("c.csv");
    std::fs::write(&curve, "epsilon,lower,upper,depth_n\n0,1,1,3\n0.1,1,1.2,3\n").unwrap();
    assert_eq!(code(&run(&["fit", "--curve", p(&curve)])), 4);
}

#[test]
fn inflate_fit_and_plot() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("nil.csv");
    let svg = dir.path().join("nil.svg");
    let o = run(&[
        "inflate",
        "--input",
        p(&data("nilpotent.json")),
        "--grid",
        "geo:1e-4:1e-1:36",
        "--n",
        "6",
        "--fit",
        "--out",
        p(&csv),
        "--plot",
        p(&svg),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.contains("# seed: 0"));
    assert!(text.contains("# fit: "));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 37);
    let plot = std::fs::read_to_string(&svg).unwrap();
    assert!(plot.starts_with("<svg") && plot.trim_end().ends_with("</svg>"));
    assert!(plot.contains("<polygon"));

    let v = json_out(&run(&["fit", "--curve", p(&csv)]));
    let alpha = v["result"]["alpha_hat"].as_f64().unwrap();
    assert!((0.4..=0.6).contains(&alpha), "{alpha}");
}

#[test]
fn inflate_json_round_trips_through_fit() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("pair.json");
    let o = run(&[
        "inflate",
        "--input",
        p(&data("pair.json")),
        "--grid",
        "geo:1e-4:1e-2:25",
        "--n",
        "4",
        "--format",
        "json",
        "--out",
        p(&out),
    ]);
    assert_eq!(code(&o), 0);
    let v = json_out(&run(&["fit", "--curve", p(&out)]));
    let alpha = v["result"]["alpha_hat"].as_f64().unwrap();
    assert!((0.8..=1.2).contains(&alpha), "{alpha}");
}

#[test]
fn flag_of_triangular_singleton() {
    let v = json_out(&run(&["flag", "--input", p(&data("triangular.json"))]));
    assert_eq!(v["result"]["m"], 2);
    assert_eq!(v["result"]["dims"], serde_json::json!([1, 2]));
    assert!(v["result"]["residual"].as_f64().unwrap() <= 1e-8);
    let v = json_out(&run(&["flag", "--input", p(&data("pair.json"))]));
    assert_eq!(v["result"]["m"], 1);
}

#[test]
fn cert_then_verify() {
    let dir = TempDir::new().unwrap();
    let cert = dir.path().join("cert.json");
    let o = run(&[
        "cert", "--input", p(&data("pair.json")), "--lambda", "1", "--r", "1", "--kmax", "12", "--out", p(&cert),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let c = &v["result"];
    assert_eq!(c["omega"], 2.0);
    assert!((c["tau"].as_f64().unwrap() - 0.125).abs() <= 1e-12);
    assert!(c["n0"].as_u64().unwrap() >= 1);
    assert_eq!(v["provenance"]["lambda"]["kind"], "supplied");
    assert_eq!(v["provenance"]["theta"]["kind"], "empirical");

    let v = json_out(&run(&[
        "verify", "--input", p(&data("pair.json")), "--cert", p(&cert), "--trials", "30", "--seed", "3",
    ]));
    assert_eq!(v["result"]["fail"], 0);
    assert_eq!(v["seed"], 3);

    let o = run(&[
        "verify", "--input", p(&data("pair.json")), "--cert", p(&cert), "--trials", "5", "--format", "csv",
    ]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("trial,eps_n,lower,upper,guarantee,verdict"));
}

#[test]
fn dim2_elsner_resolvent_lift() {
    let v = json_out(&run(&["dim2", "--input", p(&data("pair2x2.json")), "--kmax", "20"]));
    assert_eq!(v["result"]["verdict"], "PASS");

    let v = json_out(&run(&["elsner", "--trials", "300"]));
    assert_eq!(v["result"]["violations"], 0);

    let v = json_out(&run(&["resolvent", "--input", p(&data("diag10.json")), "--delta", "0.25"]));
    let r0 = v["result"]["certificate"]["r0"].as_f64().unwrap();
    assert!((r0 - 0.25).abs() <= 0.0025);
    assert_eq!(v["result"]["trials"]["violations"], 0);

    let dir = TempDir::new().unwrap();
    let lifted = dir.path().join("lifted.json");
    let v = json_out(&run(&["lift", "--input", p(&data("diag.json")), "--steps", "16", "--export", p(&lifted)]));
    let lower = v["result"]["estimate"]["lower"].as_f64().unwrap();
    assert!((lower + 1.0).abs() <= 1e-8);
    let back = jsr_core::io::parse_matrix_set(&std::fs::read_to_string(&lifted).unwrap()).unwrap();
    assert_eq!(back.len(), 1);

    let v = json_out(&run(&["lift", "--input", p(&data("nilpotent.json"))]));
    assert_eq!(v["result"]["estimate"]["lower"], 0.0);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let input = data("pair2x2.json");
    let args = [
        "inflate",
        "--input",
        p(&input),
        "--grid",
        "geo:1e-3:1e-1:8",
        "--n",
        "4",
        "--seed",
        "17",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);

    let cmd = ["lift", "--input", p(&input), "--samples", "20", "--seed", "5"];
    assert_eq!(run(&cmd).stdout, run(&cmd).stdout);
}
