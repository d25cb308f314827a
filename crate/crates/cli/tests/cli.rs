use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use ockham_cli::{parse_args, run, Command as Cmd, Format, Value};
use serde_json::Value as Json;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ockham"))
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn read_json(p: &Path) -> Json {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn usage_message(argv: &[&str]) -> String {
    match parse_args(argv) {
        Err(e) => {
            assert_eq!(e.exit_code(), 2, "{e}");
            e.to_string()
        }
        Ok(c) => panic!("accepted {c:?}"),
    }
}

#[test]
fn evidence_config_is_resolved_with_defaults() {
    let c = parse_args(&["evidence", "--data", "d.csv", "--sigma", "1", "--lambda", "1", "--out", "r.json"]).unwrap();
    assert_eq!(c.command, Cmd::Evidence);
    assert_eq!(c.data_path, Some(PathBuf::from("d.csv")));
    assert_eq!(c.output_path, PathBuf::from("r.json"));
    assert_eq!(c.format, Format::Json);
    assert_eq!(c.params["sigma"], Value::Real(1.0));
    assert_eq!(c.params["seed"], Value::Int(0));
    assert_eq!(c.params["estimator"], Value::Text("glm-exact".into()));
}

#[test]
fn degree_ranges_expand() {
    let c = parse_args(&[
        "select", "--degrees", "0..9", "--sigma", "1", "--lambda", "1", "--data", "d.csv", "--out", "s.csv",
        "--format", "csv",
    ])
    .unwrap();
    assert_eq!(c.params["degrees"], Value::Ints((0..=9).collect()));
    assert_eq!(c.format, Format::Csv);
    let mixed = parse_args(&[
        "select", "--degrees", "1,3..4", "--sigma", "1", "--lambda", "1", "--data", "d.csv", "--out", "s.csv",
    ])
    .unwrap();
    assert_eq!(mixed.params["degrees"], Value::Ints(vec![1, 3, 4]));
}

#[test]
fn usage_errors_name_the_problem() {
    let m = usage_message(&["evidence", "--data", "d.csv", "--sigma", "-1", "--lambda", "1", "--out", "r.json"]);
    assert!(m.contains("sigma must be positive"), "{m}");
    let m = usage_message(&["evidence", "--data", "d.csv", "--lambda", "1", "--out", "r.json"]);
    assert!(m.contains("--sigma"), "{m}");
    let m = usage_message(&["evidence", "--data", "d.csv", "--sigma", "1", "--lambda", "1", "--out", "r", "--bogus", "3"]);
    assert!(m.contains("--bogus"), "{m}");
    let m = usage_message(&["evidence", "--data", "d.csv", "--sigma", "1x", "--lambda", "1", "--out", "r"]);
    assert!(m.contains("1x") && m.contains("argument 5"), "{m}");
    let m = usage_message(&["bic-sweep", "--ns", "100,abc", "--out", "r"]);
    assert!(m.contains("entry 2") && m.contains("argument 3"), "{m}");
    let m = usage_message(&["risk", "--degrees", "0,4", "--sigma", "1", "--lambda", "1", "--n", "5", "--out", "r", "--grid", "3"]);
    assert!(m.contains("--grid"), "{m}");
}

#[test]
fn help_prints_the_grammar() {
    let out = bin().arg("--help").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for cmd in ["fit", "evidence", "decompose", "select", "risk", "poly-demo", "mackay-demo", "bic-sweep"] {
        assert!(text.contains(cmd), "{cmd} missing from help");
    }
}

#[test]
fn worked_example_through_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "d.csv", "y\n2\n");
    let before = fs::read(&data).unwrap();
    let out = dir.path().join("r.json");
    let status = bin()
        .args(["evidence", "--data", &s(&data), "--sigma", "1", "--lambda", "1", "--out", &s(&out)])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert_eq!(fs::read(&data).unwrap(), before);
    let j = read_json(&out);
    let r = &j["result"];
    assert!((r["log_evidence"].as_f64().unwrap() + 2.265512).abs() < 1e-6);
    assert!((r["flexibility"].as_f64().unwrap() - 0.846574).abs() < 1e-6);
    assert!((r["log_fit"].as_f64().unwrap() + 1.418939).abs() < 1e-6);
    assert_eq!(j["config"]["seed"], 0);
    assert!(j["diagnostics"].is_object());
}

#[test]
fn outputs_use_seventeen_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "d.csv", "y\n2\n");
    let out = dir.path().join("r.json");
    let c = parse_args(&["evidence", "--data", &s(&data), "--sigma", "1", "--lambda", "1", "--out", &s(&out)]).unwrap();
    assert_eq!(run(&c), 0);
    let text = fs::read_to_string(&out).unwrap();
    let line = text.lines().find(|l| l.contains("\"log_evidence\"")).unwrap();
    let number = line.split(':').nth(1).unwrap().trim().trim_end_matches(',');
    let mantissa = number.trim_start_matches('-').split('e').next().unwrap().replace('.', "");
    assert_eq!(mantissa.len(), 17, "{number}");
    let parsed: f64 = number.parse().unwrap();
    let exact = ockham_cli::execute(&c).unwrap().result["log_evidence"].as_f64().unwrap();
    assert_eq!(parsed.to_bits(), exact.to_bits());
}

#[test]
fn echoed_argv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "d.csv", "x,y\n-1,0.5\n0,0.1\n1,1.7\n2,3.9\n");
    let cases: Vec<Vec<String>> = vec![
        vec!["fit", "--data", &s(&data), "--sigma", "0.3", "--lambda", "2", "--degree", "2"],
        vec!["decompose", "--data", &s(&data), "--sigma", "1", "--lambda", "0.7", "--penalty", "1.25"],
        vec!["select", "--data", &s(&data), "--sigma", "1", "--lambda", "1", "--degrees", "0..2", "--weights", "1,2,1", "--rule", "max-posterior"],
        vec!["mackay-demo", "--y-min", "-3", "--y-max", "3.5", "--grid", "41"],
        vec!["bic-sweep", "--ns", "10,100", "--theta", "-0.25,1", "--seed", "4"],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect();
    for (i, mut argv) in cases.into_iter().enumerate() {
        let out = dir.path().join(format!("o{i}.json"));
        argv.extend(["--out".to_string(), s(&out)]);
        let c = parse_args(&argv).unwrap();
        assert_eq!(run(&c), 0, "{argv:?}");
        let echoed: Vec<String> = read_json(&out)["config"]["argv"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_str().unwrap().to_string())
            .collect();
        assert_eq!(parse_args(&echoed).unwrap(), c);
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run_once = |name: &str| {
        let out = dir.path().join(name);
        let status = bin()
            .args(["risk", "--degrees", "0,2", "--sigma", "0.5", "--lambda", "1", "--n", "30", "--reps", "40", "--seed", "7"])
            .args(["--out", &s(&out)])
            .status()
            .unwrap();
        assert!(status.success());
        fs::read_to_string(out).unwrap()
    };
    let a = run_once("a.json");
    let b = run_once("b.json");
    assert_eq!(a.replace("a.json", ""), b.replace("b.json", ""));
    let same_path_a = run_once("c.json");
    let same_path_b = run_once("c.json");
    assert_eq!(same_path_a, same_path_b);
}

#[test]
fn mackay_csv_has_grid_and_two_crossovers() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.csv");
    let c = parse_args(&["mackay-demo", "--out", &s(&out), "--format", "csv"]).unwrap();
    assert_eq!(run(&c), 0);
    let mut reader = csv::Reader::from_path(&out).unwrap();
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        ["kind", "y", "log_evidence_simple", "log_evidence_complex"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.iter().filter(|r| &r[0] == "grid").count(), 1001);
    let crossings: Vec<_> = rows.iter().filter(|r| &r[0] == "crossover").collect();
    assert_eq!(crossings.len(), 2);
    for r in crossings {
        let (a, b): (f64, f64) = (r[2].parse().unwrap(), r[3].parse().unwrap());
        assert!((a - b).abs() < 1e-8);
    }
    let meta = read_json(&ockham_cli::meta_path(&out));
    assert_eq!(meta["config"]["command"], "mackay-demo");
    assert!(meta.get("result").is_none());
}

#[test]
fn bad_rows_are_reported_with_their_number() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "d.csv", "x,y\n1,2\n2,abc\n");
    let out = dir.path().join("r.json");
    let c = parse_args(&["fit", "--data", &s(&data), "--sigma", "1", "--lambda", "1", "--out", &s(&out)]).unwrap();
    let err = ockham_cli::execute(&c).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().contains("row 2"), "{err}");
    let bad_header = write(dir.path(), "h.csv", "a,b\n1,2\n");
    let c = parse_args(&["fit", "--data", &s(&bad_header), "--sigma", "1", "--lambda", "1", "--out", &s(&out)]).unwrap();
    assert!(ockham_cli::execute(&c).unwrap_err().to_string().contains("header"));
    assert!(!out.exists());
}

#[test]
fn domain_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "d.csv", "y\n1\n2\n");
    let out = dir.path().join("r.json");
    let status = bin()
        .args(["fit", "--data", &s(&data), "--sigma", "1", "--lambda", "1", "--degree", "2", "--out", &s(&out)])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    let status = bin().args(["fit", "--sigma", "1"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn select_picks_the_generating_degree() {
    let dir = tempfile::tempdir().unwrap();
    let mut body = String::from("x,y\n");
    for i in 0..40 {
        let x = -2.0 + 4.0 * i as f64 / 39.0;
        let wiggle = 0.05 * ((i * 7919) % 13) as f64 / 13.0 - 0.025;
        body.push_str(&format!("{x},{}\n", 1.0 - 2.0 * x * x + wiggle));
    }
    let data = write(dir.path(), "d.csv", &body);
    let out = dir.path().join("s.json");
    let c = parse_args(&[
        "select", "--data", &s(&data), "--sigma", "0.1", "--lambda", "1", "--degrees", "0..5", "--out", &s(&out),
    ])
    .unwrap();
    assert_eq!(run(&c), 0);
    assert_eq!(read_json(&out)["result"]["chosen_degree"], 2);
}

#[test]
fn decompose_reports_pen_prime_against_bic() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "d.csv", "y\n2\n");
    let out = dir.path().join("r.json");
    let c = parse_args(&["decompose", "--data", &s(&data), "--sigma", "1", "--lambda", "1", "--out", &s(&out)]).unwrap();
    assert_eq!(run(&c), 0);
    let p = &read_json(&out)["result"]["penalty"];
    // n = 1 makes the BIC penalty zero, so pen' = -flexibility.
    assert_eq!(p["bic_penalty"].as_f64().unwrap(), 0.0);
    assert!((p["pen_prime"].as_f64().unwrap() + 0.846574).abs() < 1e-6);
}

#[test]
fn output_may_not_overwrite_the_data() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "d.csv", "y\n2\n");
    let m = usage_message(&["fit", "--data", &s(&data), "--sigma", "1", "--lambda", "1", "--out", &s(&data)]);
    assert!(m.contains("differ"), "{m}");
}
