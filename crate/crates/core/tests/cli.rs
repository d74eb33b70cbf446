use std::path::Path;

use qconcept::cli::run;
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<String> = std::iter::once("qconcept")
        .chain(args.iter().copied())
        .map(String::from)
        .collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const STATE3: &str = r#"{"dim":3,"amplitudes":[[0.7071067811865476,0],[0.5477225575051661,0],[0.4472135954999579,0]]}"#;

#[test]
fn microstates_all() {
    let (code, out, _) = call(&["microstates", "--n", "2", "--k", "2", "--stats", "all"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v, serde_json::json!({"MB": 4, "BE": 3, "FD": 1}));
}

#[test]
fn microstates_fd_exclusion_is_an_input_error() {
    let (code, out, err) = call(&["microstates", "--n", "3", "--k", "2", "--stats", "fd"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(!err.is_empty());
}

#[test]
fn percept_worked_example() {
    let (code, out, _) = call(&["percept", "--theta-a", "1.0471975512", "--theta-b", "2.0943951024"]);
    assert_eq!(code, 0);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert!((row[2].parse::<f64>().unwrap() - 1.0 / 3.0).abs() < 1e-9);
    assert!((row[3].parse::<f64>().unwrap() - 0.5).abs() < 1e-9);
    assert_eq!(row[4], "dilation");
}

#[test]
fn born_check_matches_born() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(dir.path(), "s.json", STATE3);
    let args = [
        "born-check",
        "--dim",
        "3",
        "--state",
        &state,
        "--runs",
        "1000000",
        "--seed",
        "42",
    ];
    let (code, out, _) = call(&args);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["maxAbsDev"].as_f64().unwrap() < 0.002);
    assert_eq!(v["born"].as_array().unwrap().len(), 3);
    let (_, again, _) = call(&args);
    assert_eq!(out, again);
}

#[test]
fn stochastic_commands_need_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(dir.path(), "s.json", STATE3);
    let (code, out, err) = call(&["measure", "--state", &state]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("--seed"));
    assert_eq!(call(&["born-check", "--dim", "3"]).0, 2);
}

#[test]
fn measure_output_is_byte_identical_and_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(dir.path(), "s.json", STATE3);
    let out_path = dir.path().join("runs.csv");
    let out_path = out_path.to_string_lossy();
    let (c1, o1, _) = call(&["measure", "--state", &state, "--seed", "3", "--runs", "100"]);
    let (c2, o2, _) = call(&[
        "measure", "--state", &state, "--seed", "3", "--runs", "100", "--output", &out_path,
    ]);
    assert_eq!((c1, c2), (0, 0));
    assert!(o2.is_empty());
    assert_eq!(std::fs::read_to_string(&*out_path).unwrap(), o1);
    assert!(o1.starts_with("run,outcome,lambda_0,lambda_1,lambda_2\n"));
    assert_eq!(o1.lines().count(), 101);
}

#[test]
fn invalid_state_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"dim":2,"amplitudes":[[1,0],[1,0]]}"#);
    let (code, _, err) = call(&["measure", "--state", &bad, "--seed", "1"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error:"));
}

#[test]
fn tolerance_override_admits_looser_states() {
    let dir = tempfile::tempdir().unwrap();
    let loose = write(dir.path(), "s.json", r#"{"dim":2,"amplitudes":[[1.000001,0],[0,0]]}"#);
    let tol = write(dir.path(), "tol.json", r#"{"state":1e-4}"#);
    assert_eq!(call(&["measure", "--state", &loose, "--seed", "1"]).0, 2);
    assert_eq!(
        call(&["measure", "--state", &loose, "--seed", "1", "--tolerances", &tol]).0,
        0
    );
}

#[test]
fn unknown_flags_and_subcommands_are_rejected() {
    assert_eq!(call(&["chsh", "--bogus"]).0, 2);
    assert_eq!(call(&["nonsense"]).0, 2);
    assert_eq!(call(&["--help"]).0, 0);
}

#[test]
fn every_subcommand_has_help() {
    for cmd in [
        "measure",
        "born-check",
        "percept",
        "entangle",
        "chsh",
        "nosignal",
        "wordgas-fit",
        "zipf",
        "microstates",
        "connectives",
        "interference",
        "render-screen",
    ] {
        let (code, out, _) = call(&[cmd, "--help"]);
        assert_eq!(code, 0, "{cmd}");
        assert!(out.lines().next().unwrap().len() > 10, "{cmd}");
    }
}

#[test]
fn config_file_supplies_flags_and_command_line_wins() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"n": 3, "k": 2, "stats": "mb"}"#);
    let (code, out, _) = call(&["microstates", "--config", &cfg]);
    assert_eq!(code, 0);
    assert!(out.contains("\"MB\": 8"));
    let (_, out, _) = call(&["microstates", "--config", &cfg, "--stats", "be"]);
    assert!(out.contains("\"BE\": 4"));
}

#[test]
fn chsh_default_is_tsirelson() {
    let (code, out, _) = call(&["chsh"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!((v["S"].as_f64().unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-11);
}

#[test]
fn nosignal_from_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("setting,outcome_a,outcome_b,count\n");
    for s in ["AB", "AB'", "A'B", "A'B'"] {
        for (a, b, c) in [("+", "+", 250), ("+", "-", 250), ("-", "+", 250), ("-", "-", 250)] {
            csv.push_str(&format!("{s},{a},{b},{c}\n"));
        }
    }
    let path = write(dir.path(), "counts.csv", &csv);
    let (code, out, _) = call(&["nosignal", "--input", &path]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passes"], Value::Bool(true));
}

#[test]
fn wordgas_infeasible_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    // equal counts put the mean energy at the upper feasibility limit
    let text = write(dir.path(), "t.txt", "alpha beta gamma");
    let (code, _, err) = call(&["wordgas-fit", "--input", &text, "--model", "be"]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn wordgas_sample_prefers_be_and_writes_side_files() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spectrum.csv");
    let plot = dir.path().join("plot.csv");
    let (code, out, _) = call(&[
        "wordgas-fit",
        "--sample",
        "--spectrum-out",
        &spec.to_string_lossy(),
        "--plot-out",
        &plot.to_string_lossy(),
    ]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["better"], "BE");
    assert!(std::fs::read_to_string(spec)
        .unwrap()
        .starts_with("rank,token,count,energy\n1,the,"));
    assert!(std::fs::read_to_string(plot).unwrap().starts_with("log_energy,"));
}

#[test]
fn interference_and_screen_on_synthetic_data() {
    let (code, out, _) = call(&["interference", "--synthetic", "--format", "json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 24);
    assert!(v["normalizationResidual"].as_f64().unwrap().abs() < 1e-12);

    let (code, out, _) = call(&["render-screen", "--synthetic", "--width", "16", "--height", "8"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1 + 16 * 8);
    let mass: f64 = out
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .sum();
    assert!(mass > 0.0);
}

#[test]
fn entangle_composes_singlet_by_default() {
    let (code, out, _) = call(&["entangle"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!((v["corrNorm"].as_f64().unwrap() - 1.0).abs() < 1e-11);
    assert_eq!(v["productCorrelation"], Value::Bool(false));
}
