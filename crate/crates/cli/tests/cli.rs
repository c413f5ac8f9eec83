use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

const DB1: &str = "domain 6\nB 1\nB 2\nR 4\nR 5\nE 2 4\n";
const EXAMPLE: &str = "B(x) & R(y) & !E(x,y)";

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lowdeg-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn db1_file() -> PathBuf {
    let p = scratch("db1.facts");
    fs::write(&p, DB1).unwrap();
    p
}

fn lowdeg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lowdeg")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn ingest_summary() {
    let db = db1_file();
    let o = lowdeg(&["ingest", "--db", db.to_str().unwrap()]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.starts_with("domain 6\n"));
    assert!(s.contains("E/2 1 tuples"));
    assert!(s.ends_with("degree 1\n"));
}

#[test]
fn example_count_test_enumerate() {
    let db = db1_file();
    let db = db.to_str().unwrap();
    let o = lowdeg(&["count", "--db", db, "--query", EXAMPLE]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "3\n"));

    let o = lowdeg(&["test", "--db", db, "--query", EXAMPLE, "--tuple", "1,5"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "true\n"));
    let o = lowdeg(&["test", "--db", db, "--query", EXAMPLE, "--tuple", "2,4"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(1), "false\n"));

    let o = lowdeg(&["enumerate", "--db", db, "--query", EXAMPLE, "--stats"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let mut lines: Vec<&str> = out.lines().collect();
    lines.sort();
    assert_eq!(lines, ["1 4", "1 5", "2 5"]);
    let stats: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(stats["answers"], 3);
    assert!(stats["max_delay_steps"].as_u64().unwrap() > 0);

    let o = lowdeg(&["enumerate", "--db", db, "--query", EXAMPLE, "--limit", "1"]);
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn query_from_file_and_epsilon() {
    let db = db1_file();
    let q = scratch("example.q");
    fs::write(&q, EXAMPLE).unwrap();
    for e in ["0.25", "1/3", "1"] {
        let o = lowdeg(&["count", "--db", db.to_str().unwrap(), "--query-file", q.to_str().unwrap(), "--epsilon", e]);
        assert_eq!(stdout(&o), "3\n");
    }
}

#[test]
fn dump_reduced_writes_graph_and_map() {
    let db = db1_file();
    let dump = scratch("reduced.facts");
    let o = lowdeg(&["count", "--db", db.to_str().unwrap(), "--query", EXAMPLE, "--dump-reduced", dump.to_str().unwrap()]);
    assert!(o.status.success());
    let facts = fs::read_to_string(&dump).unwrap();
    assert!(facts.starts_with("domain "));
    let map = fs::read_to_string(format!("{}.map", dump.display())).unwrap();
    assert_eq!(map.lines().count(), 4);
}

#[test]
fn gen_is_deterministic() {
    let a = lowdeg(&["gen", "--n", "100", "--schedule", "const:3", "--seed", "7"]);
    let b = lowdeg(&["gen", "--n", "100", "--schedule", "const:3", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let out = scratch("gen.facts");
    let o = lowdeg(&["gen", "--n", "100", "--schedule", "const:3", "--seed", "7", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(fs::read(&out).unwrap(), a.stdout);
    let o = lowdeg(&["ingest", "--db", out.to_str().unwrap()]);
    let degree: usize = stdout(&o).lines().last().unwrap().trim_start_matches("degree ").parse().unwrap();
    assert!(degree <= 3);
}

#[test]
fn bench_report_schema() {
    let db = db1_file();
    let keys = |mode: &str| {
        let o = lowdeg(&["bench", "--db", db.to_str().unwrap(), "--query", EXAMPLE, "--mode", mode]);
        assert!(o.status.success());
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        let mut k: Vec<String> = v.as_object().unwrap().keys().cloned().collect();
        k.sort();
        (k.join(","), v)
    };
    let (k, v) = keys("count");
    assert_eq!(k, "answers,d,mode,n,per_op_steps,prep_steps,prep_wall_ms");
    assert_eq!(v["answers"], 3);
    let (k, _) = keys("enumerate");
    assert_eq!(k, "answers,d,max_delay_steps,mode,n,per_op_steps,prep_steps,prep_wall_ms");
    let (k, v) = keys("test");
    assert_eq!(k, "answers,d,mode,n,per_op_steps,prep_steps,prep_wall_ms");
    assert_eq!(v["per_op_steps"].as_object().unwrap().len(), 2);
}

#[test]
fn exit_codes() {
    let db = db1_file();
    let db = db.to_str().unwrap();
    assert_eq!(lowdeg(&["count", "--db", db]).status.code(), Some(2));
    assert_eq!(lowdeg(&["count", "--db", db, "--query", "B(x) &"]).status.code(), Some(2));
    assert_eq!(lowdeg(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(lowdeg(&["count", "--db", db, "--query", EXAMPLE, "--epsilon", "0"]).status.code(), Some(2));
    assert_eq!(lowdeg(&["gen", "--n", "10", "--schedule", "const:-1"]).status.code(), Some(2));
    let o = lowdeg(&["count", "--db", db, "--query", "exists z. (E(x,z) | E(z,x))", "--cap-neighborhood", "1"]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn check_runs_the_corpus() {
    let o = lowdeg(&["check"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let last = s.lines().last().unwrap();
    assert!(last.ends_with("cases passed"), "{last}");
    assert!(!s.contains("FAIL"));
}
