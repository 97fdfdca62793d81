// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn sti(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sti")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn build(dir: &TempDir, body: &str) -> (PathBuf, Output) {
    let g = write(dir, "g.txt", body);
    let idx = dir.path().join("g.idx");
    let o = sti(&["build", s(&g), "-o", s(&idx)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    (idx, o)
}

const TWO_K4S: &str = "# two cliques and a middle vertex\n\
    10 11\n10 12\n10 13\n11 12\n11 13\n12 13\n\
    20 21\n20 22\n20 23\n21 22\n21 23\n22 23\n\
    99 10\n99 20\n";

#[test]
fn build_triangle_reports_phases() {
    let dir = TempDir::new().unwrap();
    let (idx, o) = build(&dir, "1 2\n2 3\n3 1\n");
    let text = stdout(&o);
    for phase in ["peel_ms", "dag_ms", "tree_ms"] {
        let line = text.lines().find(|l| l.starts_with(phase)).unwrap();
        let ms: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();
        assert!(ms >= 0.0);
    }
    assert_eq!(std::fs::read_to_string(idx).unwrap().lines().count(), 2);
}

#[test]
fn comments_only_gives_root_only() {
    let dir = TempDir::new().unwrap();
    let (idx, _) = build(&dir, "# nothing here\n# at all\n");
    assert_eq!(std::fs::read_to_string(idx).unwrap(), "NODE 0 0 -1\n");
}

#[test]
fn two_cliques_index_and_queries() {
    let dir = TempDir::new().unwrap();
    let (idx, _) = build(&dir, TWO_K4S);
    let h = stdout(&sti(&["query", s(&idx), "hierarchy"]));
    assert_eq!(h, "NODE 0 0 -1\nNODE 1 2 0 99\nNODE 2 3 1 10 11 12 13\nNODE 3 3 1 20 21 22 23\n");
    assert_eq!(stdout(&sti(&["query", s(&idx), "k", "99"])), "2\n");
    assert_eq!(stdout(&sti(&["query", s(&idx), "core", "21", "3"])), "20\n21\n22\n23\n");
    let all = stdout(&sti(&["query", s(&idx), "k", "--all"]));
    assert_eq!(all.lines().next(), Some("10 3"));
    assert_eq!(all.lines().last(), Some("99 2"));
}

#[test]
fn isolated_vertex_and_missing_core() {
    let dir = TempDir::new().unwrap();
    let (idx, o) = build(&dir, "1 2\n2 3\n3 1\n7 7\n");
    assert!(String::from_utf8_lossy(&o.stderr).contains("1 self-loops"));
    assert_eq!(stdout(&sti(&["query", s(&idx), "k", "7"])), "0\n");
    let miss = sti(&["query", s(&idx), "core", "1", "3"]);
    assert_eq!(miss.status.code(), Some(2));
    assert!(miss.stdout.is_empty());
    assert!(String::from_utf8_lossy(&miss.stderr).contains("not in any 3-core"));
    let unknown = sti(&["query", s(&idx), "k", "42"]);
    assert_eq!(unknown.status.code(), Some(1));
    assert_eq!(stdout(&sti(&["query", s(&idx), "hierarchy"])).lines().count(), 2);
}

#[test]
fn malformed_edge_list_names_the_line() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "bad.txt", "1 2\nx 3\n");
    let o = sti(&["build", s(&g), "-o", s(&dir.path().join("bad.idx"))]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

fn bench_csv(dir: &TempDir, graph: &Path, seed: &str) -> String {
    let out = dir.path().join(format!("b{seed}.csv"));
    let o = sti(&[
        "bench",
        s(graph),
        "--sizes",
        "1,8",
        "--trials",
        "2",
        "--algos",
        "fs,se,ba",
        "--seed",
        seed,
        "-o",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read_to_string(out).unwrap()
}

#[test]
fn bench_rows_and_determinism() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("sf.txt");
    let o = sti(&["generate", "scale-free", "--n", "300", "--avg", "3", "--seed", "5", "-o", s(&g)]);
    assert!(o.status.success());
    let a = bench_csv(&dir, &g, "9");
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines.len(), 13);
    assert_eq!(lines[0], "graph,algo,batch_size,trial,wall_ms,vertices_visited,tree_nodes_touched,dag_nodes_rebuilt");
    assert!(lines[1].starts_with("sf,fs,1,0,"));
    let strip = |csv: &str| -> Vec<String> {
        csv.lines()
            .map(|l| l.split(',').enumerate().filter(|&(i, _)| i != 4).map(|(_, c)| c).collect::<Vec<_>>().join(","))
            .collect()
    };
    let b = bench_csv(&dir, &g, "9");
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn bench_rejects_oversized_batches() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "tri.txt", "1 2\n2 3\n3 1\n");
    let o = sti(&["bench", s(&g), "--sizes", "4", "--trials", "1"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("exceeds"));
    let o = sti(&["bench", s(&g), "--algos", "xx"]);
    assert!(!o.status.success());
}
