// SPDX-License-Identifier: Apache-2.0

//! Batch-size sweeps over the three update paths, plus the synthetic graphs
//! used to drive them.
//!
//! Each trial removes `B` random edges from the loaded graph, builds the
//! index on the remainder, and then re-inserts the removed edges as one
//! batch. Only the re-insertion is timed. Every algorithm works on a clone
//! of the same starting engine, so all of them see identical batches.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coreness::peel;
use crate::error::{Result, StiError};
use crate::graph::{ChangeBatch, EdgeChange, Graph, VertexId};
use crate::maintenance::{Algo, MaintenanceEngine, UpdateStats};
use crate::oracle::canonicalize;
use crate::shell_tree::Sti;
use crate::subcore_dag::SubcoreDag;

pub const CSV_HEADER: &str =
    "graph,algo,batch_size,trial,wall_ms,vertices_visited,tree_nodes_touched,dag_nodes_rebuilt";

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    /// Name written into the `graph` column.
    pub graph_name: String,
    pub batch_sizes: Vec<usize>,
    pub trials: usize,
    pub algos: Vec<Algo>,
    pub seed: u64,
    /// Half of each batch deletes other edges instead of re-inserting.
    pub mixed: bool,
    pub verify: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            graph_name: "graph".into(),
            batch_sizes: vec![1, 10, 100],
            trials: 3,
            algos: vec![Algo::Fs, Algo::Se, Algo::Ba],
            seed: 0,
            mixed: false,
            verify: true,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.trials == 0 {
            return Err(StiError::Config("trials must be at least 1".into()));
        }
        if self.algos.is_empty() {
            return Err(StiError::Config("no algorithms selected".into()));
        }
        for &b in &self.batch_sizes {
            if b == 0 {
                return Err(StiError::Config("batch sizes must be at least 1".into()));
            }
            if b > g.m() {
                return Err(StiError::Config(format!("batch size {b} exceeds the edge count {}", g.m())));
            }
        }
        if self.batch_sizes.is_empty() {
            return Err(StiError::Config("no batch sizes given".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub graph: String,
    pub algo: Algo,
    pub batch_size: usize,
    pub trial: usize,
    pub stats: UpdateStats,
}

impl BenchRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{:.3},{},{},{}",
            self.graph,
            self.algo.name(),
            self.batch_size,
            self.trial,
            self.stats.wall_time.as_secs_f64() * 1e3,
            self.stats.vertices_visited,
            self.stats.tree_nodes_touched,
            self.stats.dag_nodes_rebuilt
        )
    }
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", r.csv());
    }
    out
}

/// Draws one trial's starting graph and batch.
pub fn draw_trial(g: &Graph, size: usize, mixed: bool, rng: &mut ChaCha8Rng) -> (Graph, ChangeBatch) {
    let mut edges: Vec<(VertexId, VertexId)> = g.edges().collect();
    edges.sort_unstable();
    let (removed, _) = edges.partial_shuffle(rng, size);
    let removed: Vec<(VertexId, VertexId)> = removed.to_vec();
    let mut base = g.clone();
    for &(u, v) in &removed {
        base.delete_edge(u, v).expect("sampled edge exists");
    }
    let mut changes: Vec<EdgeChange> = Vec::with_capacity(size);
    if mixed {
        let inserts = size.div_ceil(2);
        changes.extend(removed[..inserts].iter().map(|&(u, v)| EdgeChange::insert(u, v)));
        let mut rest: Vec<(VertexId, VertexId)> = base.edges().collect();
        rest.sort_unstable();
        let (dels, _) = rest.partial_shuffle(rng, size - inserts);
        changes.extend(dels.iter().map(|&(u, v)| EdgeChange::delete(u, v)));
        changes.shuffle(rng);
    } else {
        changes.extend(removed.iter().map(|&(u, v)| EdgeChange::insert(u, v)));
    }
    (base, ChangeBatch::new(changes))
}

pub fn apply(engine: &mut MaintenanceEngine, algo: Algo, batch: &ChangeBatch) -> Result<UpdateStats> {
    match algo {
        Algo::Fs => engine.fs_apply(batch),
        Algo::Se => engine.se_apply(batch),
        Algo::Ba => engine.ba_apply(batch),
    }
}

/// Runs the sweep. With verification on, every updated index is compared
/// against one built from scratch (outside the timed region).
pub fn run_bench(g: &Graph, cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    cfg.validate(g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    for &size in &cfg.batch_sizes {
        for trial in 0..cfg.trials {
            let (base, batch) = draw_trial(g, size, cfg.mixed, &mut rng);
            let start = MaintenanceEngine::new(base)?;
            let mut expected = None;
            for &algo in &cfg.algos {
                let mut engine = start.clone();
                let stats = apply(&mut engine, algo, &batch)?;
                if cfg.verify {
                    let want = expected.get_or_insert_with(|| {
                        let (sti, _, _) = Sti::from_scratch(engine.graph()).expect("graph is valid");
                        canonicalize(&sti)
                    });
                    if canonicalize(engine.sti()) != *want {
                        return Err(StiError::Integrity(format!(
                            "{} result differs from scratch at size {size}, trial {trial}",
                            algo.name()
                        )));
                    }
                }
                rows.push(BenchRow { graph: cfg.graph_name.clone(), algo, batch_size: size, trial, stats });
            }
        }
    }
    Ok(rows)
}

/// Wall time of the three from-scratch phases.
#[derive(Debug, Clone, Copy, Default)]
pub struct BuildTimings {
    pub peel: Duration,
    pub dag: Duration,
    pub tree: Duration,
}

pub fn timed_build(g: &Graph) -> Result<(Sti, BuildTimings)> {
    let t = Instant::now();
    let kappa = peel(g);
    let peel_t = t.elapsed();
    let t = Instant::now();
    let dag = SubcoreDag::build(g, &kappa)?;
    let dag_t = t.elapsed();
    let t = Instant::now();
    let (sti, _) = Sti::build(&dag, g.n())?;
    let tree_t = t.elapsed();
    Ok((sti, BuildTimings { peel: peel_t, dag: dag_t, tree: tree_t }))
}

/// G(n, m): `m` distinct edges chosen uniformly.
pub fn erdos_renyi(n: usize, m: usize, seed: u64) -> Graph {
    assert!(n >= 2 && m <= n * (n - 1) / 2, "too many edges for {n} vertices");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::with_vertices(n);
    while g.m() < m {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v && !g.has_edge(u, v) {
            g.insert_edge(u, v).expect("checked");
        }
    }
    g
}

/// Preferential attachment where vertex `i` attaches with a number of edges
/// drawn uniformly from `1..=2 * avg - 1`, so the coreness spectrum is
/// spread out instead of collapsing onto a single level.
pub fn scale_free(n: usize, avg: usize, seed: u64) -> Graph {
    assert!(avg >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::with_vertices(n);
    let mut ends: Vec<VertexId> = Vec::new();
    let seed_size = (2 * avg).min(n);
    for u in 0..seed_size {
        for v in 0..u {
            if rng.gen_bool(0.5) {
                g.insert_edge(u, v).expect("fresh");
                ends.extend([u, v]);
            }
        }
    }
    for u in seed_size..n {
        let want = rng.gen_range(1..=2 * avg - 1).min(u);
        let mut picked = 0;
        let mut tries = 0;
        while picked < want && tries < 20 * want {
            tries += 1;
            let v = if ends.is_empty() || rng.gen_bool(0.1) {
                rng.gen_range(0..u)
            } else {
                ends[rng.gen_range(0..ends.len())]
            };
            if v != u && !g.has_edge(u, v) {
                g.insert_edge(u, v).expect("checked");
                ends.extend([u, v]);
                picked += 1;
            }
        }
    }
    g
}
