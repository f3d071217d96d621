// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use toml::Value;

const BIN: &str = env!("CARGO_BIN_EXE_signed-influence");

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn cli(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("SIGNED_INFLUENCE_JOBS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Value {
    let out = cli(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    toml::from_str(&String::from_utf8(out.stdout).unwrap()).expect("stdout is TOML")
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_float().or_else(|| x.as_integer().map(|i| i as f64)).unwrap())
        .collect()
}

fn ints(v: &Value) -> Vec<i64> {
    v.as_array().unwrap().iter().map(|x| x.as_integer().unwrap()).collect()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn classify_reports_sinks_and_influence_free_set() {
    let v = ok(&["classify", fixture("eleven_agents.toml").to_str().unwrap()]);
    let c = &v["classification"];
    assert_eq!(ints(&c["influence_free_sinks"]), vec![0, 2]);
    assert_eq!(ints(&c["followers"]), vec![0, 1, 2, 3]);
    assert_eq!(c["sinks"].as_array().unwrap().len(), 3);
    assert_eq!(v["convergence"]["kind"].as_str(), Some("SemiConvergent"));
}

#[test]
fn classify_single_agent() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "one.toml", "n = 1\nedges = []\ngamma = [0.0]\n");
    let v = ok(&["classify", f.to_str().unwrap()]);
    assert_eq!(ints(&v["classification"]["singleton_leaders"]), vec![0]);
}

#[test]
fn invalid_parameters_exit_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "bad.toml",
        "n = 2\ngamma = [0.6, 0.1]\nbeta = [0.5, 0.0]\n[[edges]]\nfrom = 0\nto = 1\nweight = 1.0\n",
    );
    let out = cli(&["classify", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let f = write(dir.path(), "typo.toml", "n = 1\nedges = []\ngama = [0.0]\n");
    assert_eq!(cli(&["classify", f.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(cli(&["classify", "/nonexistent/net.toml"]).status.code(), Some(2));
}

#[test]
fn simulate_writes_trajectory_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("traj.csv");
    let v = ok(&[
        "simulate",
        fixture("eleven_agents.toml").to_str().unwrap(),
        "--csv",
        csv_path.to_str().unwrap(),
        "--record-every",
        "10",
    ]);
    let z = floats(&v["steady_state"]["z"]);
    assert!((z[0] - 5.1787).abs() < 1e-3);

    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header.len(), 12);
    assert_eq!(header[0], "k");
    assert_eq!(header[1], "x_0");
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert!(rows.len() > 2);
    assert_eq!(&rows[0][0], "0");
    assert_eq!(rows[0][8].parse::<f64>().unwrap(), -10.0);
    let last: f64 = rows.last().unwrap()[1].parse().unwrap();
    assert!((last - z[0]).abs() < 1e-6);
}

#[test]
fn simulate_iteration_cap_keeps_partial_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("traj.csv");
    let out = cli(&[
        "simulate",
        fixture("eleven_agents.toml").to_str().unwrap(),
        "--csv",
        csv_path.to_str().unwrap(),
        "--max-iters",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = fs::read_to_string(&csv_path).unwrap();
    assert_eq!(text.lines().count(), 2, "{text}");
}

#[test]
fn tighter_tolerance_moves_closer_to_the_limit() {
    let mut errors = Vec::new();
    for tol in ["1e-3", "1e-6", "1e-10"] {
        let v = ok(&[
            "simulate",
            fixture("eleven_agents.toml").to_str().unwrap(),
            "--route",
            "iteration",
            "--tol",
            tol,
        ]);
        let z = floats(&v["steady_state"]["z"]);
        errors.push((z[0] - 5.178745098039).abs());
    }
    assert!(errors[0] >= errors[1] && errors[1] >= errors[2], "{errors:?}");
    assert!(errors[2] < 1e-8);
}

#[test]
fn mason_and_solve_agree_and_check_passes() {
    let f = fixture("eleven_agents.toml");
    let f = f.to_str().unwrap();
    let m = ok(&["influence", f, "--method", "mason"]);
    let s = ok(&["influence", f, "--method", "solve"]);
    let tm = m["influence"]["theta"].as_array().unwrap();
    let ts = s["influence"]["theta"].as_array().unwrap();
    for (a, b) in tm.iter().zip(ts) {
        for (x, y) in floats(a).iter().zip(floats(b)) {
            assert!((x - y).abs() < 1e-9);
        }
    }
    let row0 = floats(&m["influence"]["collective"].as_array().unwrap()[0]);
    let expected = [0.02, 0.12, 0.04, 0.5, 0.32];
    assert!(row0.iter().zip(expected).all(|(a, b)| (a - b).abs() < 1e-9));
    ok(&["influence", f, "--check"]);
}

#[test]
fn centrality_ranks_the_stubborn_leader_first() {
    let v = ok(&["centrality", fixture("eleven_agents.toml").to_str().unwrap()]);
    assert_eq!(v["centrality"]["most_influential"].as_integer(), Some(5));
    assert_eq!(ints(&v["centrality"]["ranking"])[0], 5);
    let scores = floats(&v["centrality"]["scores"]);
    assert!((scores[5] - 3.92).abs() < 1e-9);
}

#[test]
fn whatif_flip_and_perturb() {
    let f = fixture("eleven_agents.toml");
    let f = f.to_str().unwrap();
    let v = ok(&["whatif", f, "--flip-edge", "0", "5", "--flip-edge", "1", "9"]);
    let w = &v["whatif"];
    assert!((w["mean_abs_deviation"].as_float().unwrap() - 0.15).abs() < 0.01);
    let unchanged = ints(&w["unchanged"]);
    assert!([5, 6, 7].iter().all(|a| unchanged.contains(a)));

    let v = ok(&["whatif", f, "--perturb", "5", "1.0"]);
    assert!((v["whatif"]["unit_deviation"].as_float().unwrap() - 3.92).abs() < 1e-9);
    let v = ok(&["whatif", f, "--perturb", "5", "-2.5"]);
    assert!((v["whatif"]["unit_deviation"].as_float().unwrap() - 3.92).abs() < 1e-9);

    assert_eq!(cli(&["whatif", f, "--flip-edge", "5", "0"]).status.code(), Some(2));
    assert_eq!(cli(&["whatif", f, "--perturb", "5", "0"]).status.code(), Some(2));
    assert_eq!(cli(&["whatif", f]).status.code(), Some(2));
}

fn dot_counts(text: &str) -> (usize, usize) {
    let nodes = text
        .lines()
        .filter(|l| l.contains("[label=") && !l.contains("->"))
        .count();
    let branches = text.lines().filter(|l| l.contains("->")).count();
    (nodes, branches)
}

#[test]
fn export_full_and_reduced_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("eleven_agents.toml");
    let dot = dir.path().join("full.dot");
    let out = cli(&["export-sfg", f.to_str().unwrap(), "--dot", dot.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph"));
    assert_eq!(dot_counts(&text).0, 13);

    let out = cli(&["export-sfg", f.to_str().unwrap(), "--reduced"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let sources = text
        .lines()
        .filter(|l| {
            !l.contains("->")
                && ["box", "diamond", "hexagon", "doubleoctagon"]
                    .iter()
                    .any(|s| l.contains(s))
        })
        .count();
    assert_eq!(sources, 5);

    let one = write(dir.path(), "one.toml", "n = 1\nedges = []\ngamma = [0.0]\n");
    let out = cli(&["export-sfg", one.to_str().unwrap()]);
    assert_eq!(dot_counts(&String::from_utf8(out.stdout).unwrap()), (1, 0));
}

#[test]
fn report_round_trip_and_diff() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("eleven_agents.toml");
    let a = dir.path().join("a.toml");
    let b = dir.path().join("b.toml");
    for (path, method) in [(&a, "mason"), (&b, "solve")] {
        let out = cli(&[
            "influence",
            f.to_str().unwrap(),
            "--method",
            method,
            "-o",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let out = cli(&["diff", a.to_str().unwrap(), a.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());

    // only the gain_method label differs
    let out = cli(&["diff", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1, "{text}");
    assert!(text.contains("gain_method"));
}

#[test]
fn jobs_flag_and_environment_give_identical_output() {
    let f = fixture("eleven_agents.toml");
    let f = f.to_str().unwrap();
    let base = cli(&["influence", f, "--method", "mason"]).stdout;
    assert_eq!(cli(&["--jobs", "1", "influence", f, "--method", "mason"]).stdout, base);
    assert_eq!(cli(&["influence", f, "--method", "mason", "--jobs", "3"]).stdout, base);
    let env = Command::new(BIN)
        .args(["influence", f, "--method", "mason"])
        .env("SIGNED_INFLUENCE_JOBS", "2")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(0));
    assert_eq!(env.stdout, base);
}

#[test]
fn enumeration_cap_exits_with_complexity_code() {
    let f = fixture("eleven_agents.toml");
    let out = cli(&[
        "influence",
        f.to_str().unwrap(),
        "--method",
        "mason",
        "--max-objects",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(4));
    // the automatic method falls back to the linear solve instead
    let v = ok(&[
        "influence",
        f.to_str().unwrap(),
        "--method",
        "auto",
        "--max-objects",
        "1",
    ]);
    assert_eq!(v["influence"]["gain_method"].as_str(), Some("Solve"));
}
