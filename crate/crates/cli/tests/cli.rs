use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn tteig(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tteig")).args(args).env("TTEIG_OUT", out).output().expect("binary runs")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn summary(dir: &Path, run_id: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(format!("{run_id}.summary.json"))).unwrap()).unwrap()
}

fn small(run_id: &str, method: &str, extra: &str) -> String {
    format!(
        r#"{{"run_id": "{run_id}", "problem": {{"kind": "laplacian", "d": 2, "n": 6}}, "method": "{method}",
            "solver": {{"m": 1, "strategy": {{"kind": "svd", "max_rank": 3}}, "tol": 1e-9 {extra}}}, "oracle": true}}"#
    )
}

#[test]
fn heisenberg_run_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("heisenberg_l10_subspace.json");
    let out = tteig(&["run", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(dir.path(), "heisenberg_l10_subspace");
    assert_eq!(s["format_version"], 1);
    assert_eq!(s["ritz_values"].as_array().unwrap().len(), 5);
    for e in s["oracle"]["errors"].as_array().unwrap() {
        assert!(e.as_f64().unwrap().abs() < 1e-9, "{e}");
    }
}

#[test]
fn lanczos_stagnates_and_compares_badly() {
    let dir = tempfile::tempdir().unwrap();
    let lz = configs().join("heisenberg_l10_lanczos.json");
    let out = tteig(&["run", lz.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));

    let sub = configs().join("heisenberg_l10_subspace.json");
    assert_eq!(tteig(&["run", sub.to_str().unwrap()], dir.path()).status.code(), Some(0));
    let traces = [dir.path().join("heisenberg_l10_subspace.trace.csv"), dir.path().join("heisenberg_l10_lanczos.trace.csv")];
    let out = tteig(&["compare", traces[0].to_str().unwrap(), traces[1].to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let table = String::from_utf8(out.stdout).unwrap();
    let mut lines = table.lines().skip(1);
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let (cs, cl) = (col("heisenberg_l10_subspace:lambda_1"), col("heisenberg_l10_lanczos:lambda_1"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    let last = |c: usize| rows.iter().rev().find(|r| !r[c].is_empty()).unwrap()[c].parse::<f64>().unwrap();
    let exact = summary(dir.path(), "heisenberg_l10_subspace")["oracle"]["eigenvalues"][0].as_f64().unwrap();
    let ratio = (last(cl) - exact).abs() / (last(cs) - exact).abs().max(1e-15);
    assert!(ratio >= 1e4, "{ratio}");
}

#[test]
fn invalid_block_size_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", &small("bad", "subspace", "").replace("\"m\": 1", "\"m\": 0"));
    let out = tteig(&["run", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "config");
    assert!(err["error"]["message"].as_str().unwrap().contains("solver.m"));
}

#[test]
fn unknown_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", &small("bad", "subspace", ", \"colour\": 3"));
    assert_eq!(tteig(&["run", cfg.to_str().unwrap()], dir.path()).status.code(), Some(1));
}

#[test]
fn iteration_limit_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "p.json", &small("p", "power", ""));
    let out = tteig(&["run", cfg.to_str().unwrap(), "--max-iters", "2"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(summary(dir.path(), "p")["iterations"], 2);
}

#[test]
fn annihilated_iterate_exits_with_three() {
    // J = h = 0 is the zero operator, which annihilates any start vector
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"run_id": "z", "problem": {"kind": "heisenberg", "length": 3, "j": 0.0, "h": 0.0},
        "method": "power", "solver": {"m": 1, "strategy": {"kind": "svd", "max_rank": 2}}}"#;
    let cfg = write(dir.path(), "z.json", text);
    let out = tteig(&["run", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(summary(dir.path(), "z")["status"], "breakdown");
}

#[test]
fn same_seed_gives_identical_traces() {
    let dir = tempfile::tempdir().unwrap();
    let text = small("r", "subspace", ", \"guard\": 1, \"filter\": {\"degree\": 3}");
    let cfg = write(dir.path(), "r.json", &text);
    let strip = |p: &Path| -> Vec<String> {
        std::fs::read_to_string(p)
            .unwrap()
            .lines()
            .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string())
            .collect()
    };
    let mut traces = Vec::new();
    for sub in ["a", "b"] {
        let out = dir.path().join(sub);
        assert_eq!(tteig(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], dir.path()).status.code(), Some(0));
        traces.push(strip(&out.join("r.trace.csv")));
    }
    assert_eq!(traces[0], traces[1]);
    assert!(traces[0][0].starts_with("# tteig-trace v1 problem="));

    let other = dir.path().join("c");
    tteig(&["run", cfg.to_str().unwrap(), "--out", other.to_str().unwrap(), "--seed", "7"], dir.path());
    assert_eq!(summary(&other, "r")["config"]["solver"]["seed"], 7);
}

#[test]
fn compare_missing_file_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = tteig(&["compare", dir.path().join("nope.csv").to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn oracle_prints_reference_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "o.json", &small("o", "subspace", ""));
    let out = tteig(&["oracle", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let lam = doc["eigenvalues"][0].as_f64().unwrap();
    let s = (std::f64::consts::PI / 14.0).sin();
    assert!((lam - 8.0 * s * s).abs() < 1e-12, "{lam}");
    assert!(dir.path().join("o.oracle.json").exists());
}
