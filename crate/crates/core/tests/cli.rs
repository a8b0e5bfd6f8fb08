use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sgg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sgg")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

fn small_config(out: &Path) -> String {
    format!(
        r#"{{"n": 30, "d": 2, "algorithms": ["randomized", "greedy", "sample_greedy"],
            "p_values": [0.5], "L": 40, "runs": 20, "field": {{"kind": "linear"}},
            "master_seed": 3, "output_path": "{}"}}"#,
        out.display()
    )
}

#[test]
fn simulate_writes_csv_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("res.csv");
    let cfg = write_config(dir.path(), "c.json", &small_config(&out));
    let o = sgg(&["simulate", "--config", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "algorithm,p,d,iteration,mean_rel_error,std_rel_error,mean_probe_msgs,mean_exchange_msgs,runs"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3 * 41);
    for r in &rows {
        let err: f64 = r[4].parse().unwrap();
        assert!((0.0..=1.0).contains(&err));
        assert_eq!(r[8], "20");
    }

    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("res.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["n"], 30);
    assert_eq!(meta["dense_record_limit"], 10_000);
}

#[test]
fn output_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("t{threads}.csv"));
        let cfg = write_config(dir.path(), &format!("c{threads}.json"), &small_config(&out));
        assert!(sgg(&["--threads", threads, "simulate", "--config", &cfg]).status.success());
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn seed_override_changes_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"n": 20, "d": 2, "algorithms": ["randomized"], "L": 10, "runs": 3, "field": {"kind": "random_normal"}}"#;
    let cfg = write_config(dir.path(), "c.json", cfg);
    let a = sgg(&["simulate", "--config", &cfg]);
    let b = sgg(&["--seed", "0", "simulate", "--config", &cfg]);
    let c = sgg(&["--seed", "1", "simulate", "--config", &cfg]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn sweeps_cover_their_grids() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"n": 25, "d": 2, "d_values": [1.5, 3], "algorithms": ["sample_greedy"],
                  "p_values": [0, 0.5, 1], "L": 5, "runs": 4, "field": {"kind": "spike"}}"#;
    let cfg = write_config(dir.path(), "c.json", cfg);
    let p = String::from_utf8(sgg(&["sweep-p", "--config", &cfg]).stdout).unwrap();
    assert_eq!(p.lines().count(), 1 + 3 * 6);
    let d = String::from_utf8(sgg(&["sweep-d", "--config", &cfg]).stdout).unwrap();
    assert_eq!(d.lines().count(), 1 + 2 * 3 * 6);
    assert!(d.lines().nth(1).unwrap().contains(",1.5000000000000000e0,"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(
        dir.path(),
        "bad.json",
        r#"{"n": 30, "d": 2, "algorithms": ["randomized"], "L": 10, "runs": 0, "field": {"kind": "linear"}}"#,
    );
    assert_eq!(sgg(&["simulate", "--config", &bad]).status.code(), Some(2));

    let no_grid = write_config(
        dir.path(),
        "nogrid.json",
        r#"{"n": 30, "d": 2, "algorithms": ["greedy"], "L": 10, "runs": 1, "field": {"kind": "linear"}}"#,
    );
    assert_eq!(sgg(&["sweep-p", "--config", &no_grid]).status.code(), Some(2));

    let sparse = write_config(
        dir.path(),
        "sparse.json",
        r#"{"n": 50, "d": 0.1, "algorithms": ["greedy"], "L": 10, "runs": 1, "field": {"kind": "linear"}}"#,
    );
    let o = sgg(&["simulate", "--config", &sparse]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("connected"));

    let unwritable = write_config(
        dir.path(),
        "io.json",
        r#"{"n": 10, "d": 3, "algorithms": ["greedy"], "L": 1, "runs": 1, "field": {"kind": "linear"},
            "output_path": "/nonexistent-dir/out.csv"}"#,
    );
    assert_eq!(sgg(&["simulate", "--config", &unwritable]).status.code(), Some(4));
    assert_eq!(sgg(&["simulate", "--config", "/nonexistent-dir/c.json"]).status.code(), Some(4));
}

fn analyze(args: &[&str]) -> Value {
    let o = sgg(args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn analyze_reports_ordered_bounds() {
    let r0 = analyze(&["analyze", "--graph", "gen:40,2", "--field", "random_normal", "--p", "0"]);
    assert_eq!(r0["eta"], 0.0);
    let r1 = analyze(&["analyze", "--graph", "gen:40,2", "--field", "random_normal", "--p", "1"]);
    assert_eq!(r1["gamma"], 0.0);
    for p in ["0.2", "0.5", "0.9"] {
        let r = analyze(&["analyze", "--graph", "gen:40,2", "--field", "linear", "--p", p]);
        let keys: Vec<&str> = r.as_object().unwrap().keys().map(String::as_str).collect();
        for k in ["p", "rg", "sgg", "gg", "eta", "gamma", "lambda2", "rg_bound_eps"] {
            assert!(keys.contains(&k), "missing {k}");
        }
        let (rg, s, gg) = (r["rg"].as_f64().unwrap(), r["sgg"].as_f64().unwrap(), r["gg"].as_f64().unwrap());
        assert!(rg <= s && s <= gg);
    }
}

#[test]
fn dump_graph_round_trips_through_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let path = path.to_str().unwrap();
    assert!(sgg(&["--seed", "5", "dump-graph", "--n", "30", "--d", "2", "--out", path]).status.success());
    let from_file = analyze(&["analyze", "--graph", path, "--field", "spike:3", "--p", "0.5", "--out", "/dev/stdout"]);
    let generated = analyze(&["--seed", "5", "analyze", "--graph", "gen:30,2", "--field", "spike:3", "--p", "0.5"]);
    assert_eq!(from_file, generated);

    std::fs::write(
        dir.path().join("split.json"),
        r#"{"n": 4, "d": 1, "seed": 0, "positions": [[0,0],[0,1],[1,0],[1,1]], "edges": [[0,1],[2,3]]}"#,
    )
    .unwrap();
    let split = dir.path().join("split.json");
    let o = sgg(&["analyze", "--graph", split.to_str().unwrap(), "--field", "linear", "--p", "0.5"]);
    assert_eq!(o.status.code(), Some(3));
    let o = sgg(&["analyze", "--graph", "gen:30,2", "--field", "bogus", "--p", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
}
