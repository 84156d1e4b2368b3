use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = r#"
seed = 5
[gen]
n = 40
[identities]
instances = 2
n_min = 30
n_max = 40
lambdas = [-2.0, 0.5]
etas = [0.5, 0.05]
quasi_etas = [0.1]
suite_instances = 1
suite_eigenpairs = 3
[ergodicity]
sizes = [30, 40]
seeds_per_size = 2
[anderson]
sizes = [30]
seeds_per_size = 1
[bs_check]
n = 120
disorder = 0.5
pool = 2000
shards = 2
grid_step = 0.05
phi_lengths = [0, 1]
bins = 10
"#;

fn qergo(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qergo"))
        .args(args)
        .current_dir(dir)
        .env_remove("QERGO_THREADS")
        .output()
        .expect("spawn")
}

fn setup(extra: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), format!("{SMALL}\n{extra}")).unwrap();
    dir
}

fn manifest(p: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(p.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn identities_pass_at_default_tolerance() {
    let d = setup("");
    let out = qergo(&["identities", "--config", "run.toml", "--out", "a"], d.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let m = manifest(&d.path().join("a"));
    assert_eq!(m["pass"], true);
    assert!(m["summary"]["max_field_residual"].as_f64().unwrap() <= 1e-8);
    let csv = std::fs::read_to_string(d.path().join("a/residuals.csv")).unwrap();
    assert!(csv.starts_with("instance,n,stage,lambda,eta,relation,residual\n"));
    assert_eq!(csv.matches("instance,").count(), 1);
}

#[test]
fn identities_fail_below_rounding_floor() {
    let d = setup("");
    let text = std::fs::read_to_string(d.path().join("run.toml")).unwrap();
    let text = text.replace("suite_eigenpairs = 3", "suite_eigenpairs = 3\ntol = 1e-15");
    std::fs::write(d.path().join("run.toml"), text).unwrap();
    let out = qergo(&["identities", "--config", "run.toml", "--out", "a"], d.path());
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("[FAIL] field identities"), "{stdout}");
    assert_eq!(manifest(&d.path().join("a"))["pass"], false);
}

#[test]
fn seeded_reruns_and_thread_counts_give_identical_bytes() {
    let d = setup("");
    for (dir, threads) in [("a", "1"), ("b", "3")] {
        let out = qergo(&["ergodicity", "--config", "run.toml", "--out", dir, "--threads", threads], d.path());
        assert!(out.status.code().is_some_and(|c| c <= 1));
    }
    for f in ["variance.csv", "terms.csv", "medians.csv"] {
        let a = std::fs::read(d.path().join("a").join(f)).unwrap();
        let b = std::fs::read(d.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
    assert_eq!(manifest(&d.path().join("a"))["threads"], 1);
}

#[test]
fn manifest_replay_is_bit_exact() {
    let d = setup("");
    assert!(qergo(&["gen", "--config", "run.toml", "--seed", "9", "--out", "a"], d.path()).status.success());
    assert!(qergo(&["gen", "--config", "a/manifest.json", "--out", "b"], d.path()).status.success());
    assert!(qergo(&["gen", "--config", "a/config.toml", "--out", "c"], d.path()).status.success());
    for f in ["graph.txt", "potential.csv"] {
        let a = std::fs::read(d.path().join("a").join(f)).unwrap();
        assert_eq!(a, std::fs::read(d.path().join("b").join(f)).unwrap());
        assert_eq!(a, std::fs::read(d.path().join("c").join(f)).unwrap());
    }
    assert_eq!(manifest(&d.path().join("b"))["config"]["seed"], 9);
    let text = std::fs::read_to_string(d.path().join("a/graph.txt")).unwrap();
    let g = qergo::graph::Graph::from_text(&text).unwrap();
    assert_eq!(g.n(), 40);
    assert!(g.degrees().iter().all(|&k| k == 3));
}

#[test]
fn unknown_keys_are_rejected() {
    let d = setup("[gen.extra]\nfoo = 1\n");
    let out = qergo(&["gen", "--config", "run.toml", "--out", "a"], d.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown field"));
}

#[test]
fn thread_count_falls_back_to_environment() {
    let d = setup("");
    let out = Command::new(env!("CARGO_BIN_EXE_qergo"))
        .args(["gen", "--config", "run.toml", "--out", "a"])
        .current_dir(d.path())
        .env("QERGO_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(manifest(&d.path().join("a"))["threads"], 2);
}

#[test]
fn anderson_keeps_disorder_defaults_under_partial_config() {
    let d = setup("");
    let out = qergo(&["anderson", "--config", "run.toml", "--out", "a"], d.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let m = manifest(&d.path().join("a"));
    assert_eq!(m["config"]["anderson"]["disorder"], 0.5);
    assert_eq!(m["config"]["anderson"]["min_average"], 0.2);
    assert_eq!(m["config"]["ergodicity"]["disorder"], 0.0);
    assert!(m["summary"]["min_average"].as_f64().unwrap() >= 0.2);
}

#[test]
fn bs_check_constant_row_is_exact() {
    let d = setup("");
    let out = qergo(&["bs-check", "--config", "run.toml", "--out", "a"], d.path());
    assert!(out.status.code().is_some_and(|c| c <= 1));
    let csv = std::fs::read_to_string(d.path().join("a/comparison.csv")).unwrap();
    let row = csv.lines().nth(1).unwrap();
    assert!(row.starts_with("constant,,,1.0,1.0,"), "{row}");
    for f in ["density.csv", "histogram.csv", "phi_k0.csv", "phi_k1.csv"] {
        assert!(d.path().join("a").join(f).exists(), "{f}");
    }
}
