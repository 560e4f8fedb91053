use std::path::Path;
use std::process::{Command, Output};

fn drcr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drcr")).args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = drcr(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(drcr(&[]).status.code(), Some(1));
    assert_eq!(drcr(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(drcr(&["gen-graph", "--topology", "ring", "--nodes", "5"]).status.code(), Some(1));
    assert_eq!(drcr(&["--help"]).status.code(), Some(0));
}

#[test]
fn data_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    let out = drcr(&["solve-drcr", "--graph", s(&missing), "--tasks", s(&missing)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "nodes,3\n0,7,1,1\n").unwrap();
    let tasks = dir.path().join("t.csv");
    std::fs::write(&tasks, "0,1,0,10\n").unwrap();
    assert_eq!(drcr(&["solve-drcr", "--graph", s(&bad), "--tasks", s(&tasks)]).status.code(), Some(2));
}

#[test]
fn pipeline_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name);
    let (g, srlg, t, f) = (p("g.csv"), p("s.csv"), p("t.csv"), p("f.csv"));

    run_ok(&["gen-graph", "--topology", "er", "--nodes", "120", "--seed", "4", "--out", s(&g)]);
    assert!(p("g.csv.manifest.json").exists());
    let again = run_ok(&["gen-graph", "--topology", "er", "--nodes", "120", "--seed", "4"]);
    assert_eq!(std::fs::read_to_string(&g).unwrap(), again);

    run_ok(&["gen-srlg", "--graph", s(&g), "--pattern", "random", "--seed", "4", "--out", s(&srlg)]);
    run_ok(&["gen-tasks", "--graph", s(&g), "--srlg", s(&srlg), "--kind", "srlg", "--count", "30", "--seed", "4", "--out", s(&t)]);
    run_ok(&["filter-tasks", "--graph", s(&g), "--srlg", s(&srlg), "--tasks", s(&t), "--out", s(&f)]);

    let solve = |workers: &str| {
        run_ok(&["solve-srlg", "--graph", s(&g), "--srlg", s(&srlg), "--tasks", s(&f), "--workers", workers])
    };
    let first = solve("1");
    assert_eq!(first.lines().count(), std::fs::read_to_string(&f).unwrap().lines().count());
    assert_eq!(first, solve("1"));
    assert_eq!(first, solve("4"));

    let drcr_tasks = p("d.csv");
    run_ok(&["gen-tasks", "--graph", s(&g), "--kind", "drcr", "--count", "10", "--seed", "1", "--out", s(&drcr_tasks)]);
    let pulse = run_ok(&["solve-drcr", "--graph", s(&g), "--tasks", s(&drcr_tasks), "--solver", "pulse"]);
    let btbu = run_ok(&["solve-drcr", "--graph", s(&g), "--tasks", s(&drcr_tasks), "--solver", "btbu1"]);
    let costs = |text: &str| -> Vec<Option<u64>> {
        text.lines()
            .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
            .map(|v| v.pointer("/path/cost").and_then(|c| c.as_u64()).or_else(|| v["cost"].as_u64()))
            .collect()
    };
    assert_eq!(costs(&pulse), costs(&btbu));
}

#[test]
fn histogram_and_bench_render() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.csv");
    std::fs::write(&g, "nodes,4\n0,1,1,10\n1,3,1,10\n0,2,5,1\n2,3,5,1\n").unwrap();
    let hist = run_ok(&["histogram", "--graph", s(&g), "--task", "0,3,0,15", "--bin", "10"]);
    assert_eq!(hist, "bin_low,all,feasible\n0,1,0\n10,1,1\n# truncated=false\n");

    let t = dir.path().join("t.csv");
    std::fs::write(&t, "0,3,0,15\n0,3,0,25\n").unwrap();
    let csv = run_ok(&["bench", "--graph", s(&g), "--tasks", s(&t), "--format", "csv"]);
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 4, "{csv}");
    assert!(rows[1].starts_with("pulse,2,"));
}
