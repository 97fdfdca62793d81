// SPDX-License-Identifier: Apache-2.0

//! Browser bindings: build an index from pasted edges, apply batches with
//! either update algorithm, and pull cores or the hierarchy back out as
//! JSON. Vertex ids on this side are the ids that appear in the text.

use serde::Serialize;
use sti_core::{load_edge_list, Algo, ChangeBatch, CoreQuery, EdgeChange, IdMap, MaintenanceEngine, StiError};
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct NodeOut {
    k: u32,
    parent: Option<usize>,
    vertices: Vec<u64>,
}

#[derive(Serialize)]
struct StatsOut {
    algo: &'static str,
    changes: usize,
    vertices_visited: usize,
    tree_nodes_touched: usize,
    dag_nodes_rebuilt: usize,
    coreness_changed: usize,
    micros: u128,
}

#[wasm_bindgen]
pub struct Demo {
    engine: MaintenanceEngine,
    ids: IdMap,
}

fn msg(e: StiError) -> String {
    e.to_string()
}

#[wasm_bindgen]
impl Demo {
    /// Builds the index from an edge list (`u v` per line, `#` comments).
    #[wasm_bindgen(constructor)]
    pub fn new(edges: &str) -> Result<Demo, String> {
        let list = load_edge_list(edges.as_bytes()).map_err(msg)?;
        let engine = MaintenanceEngine::new(list.graph).map_err(msg)?;
        Ok(Demo { engine, ids: list.ids })
    }

    /// Applies `+ u v` / `- u v` lines as one batch with `se` or `ba`, and
    /// returns the work counters as JSON.
    pub fn apply(&mut self, batch: &str, algo: &str) -> Result<String, String> {
        let algo: Algo = algo.parse().map_err(msg)?;
        let mut changes = Vec::new();
        let mut ids = self.ids.clone();
        for (i, line) in batch.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let bad = || format!("line {}: expected `+ u v` or `- u v`", i + 1);
            let mut tok = t.split_whitespace();
            let sign = tok.next().ok_or_else(bad)?;
            let mut id = || tok.next().and_then(|x| x.parse::<u64>().ok()).ok_or_else(bad);
            let (a, b) = (id()?, id()?);
            let (u, v) = (ids.intern(a), ids.intern(b));
            changes.push(match sign {
                "+" => EdgeChange::insert(u, v),
                "-" => EdgeChange::delete(u, v),
                _ => return Err(bad()),
            });
        }
        let batch = ChangeBatch::new(changes);
        let stats = match algo {
            Algo::Se => self.engine.se_apply(&batch),
            Algo::Ba => self.engine.ba_apply(&batch),
            Algo::Fs => self.engine.fs_apply(&batch),
        }
        .map_err(msg)?;
        // new ids only stick once the batch went through
        self.ids = ids;
        let out = StatsOut {
            algo: algo.name(),
            changes: batch.len(),
            vertices_visited: stats.vertices_visited,
            tree_nodes_touched: stats.tree_nodes_touched,
            dag_nodes_rebuilt: stats.dag_nodes_rebuilt,
            coreness_changed: self.engine.last_delta().len(),
            micros: stats.wall_time.as_micros(),
        };
        serde_json::to_string(&out).map_err(|e| e.to_string())
    }

    /// Sorted ids of the connected k-core around `vertex`, or `null` when
    /// `k` exceeds its coreness.
    pub fn core(&self, vertex: u64, k: u32) -> Result<String, String> {
        let v = self.ids.dense(vertex).ok_or_else(|| format!("unknown vertex {vertex}"))?;
        let out = match self.engine.query_core(v, k).map_err(msg)? {
            CoreQuery::Found(vs) => {
                let mut o: Vec<u64> = vs.into_iter().map(|v| self.ids.original(v)).collect();
                o.sort_unstable();
                Some(o)
            }
            CoreQuery::NotInCore => None,
        };
        serde_json::to_string(&out).map_err(|e| e.to_string())
    }

    pub fn coreness(&self, vertex: u64) -> Result<u32, String> {
        let v = self.ids.dense(vertex).ok_or_else(|| format!("unknown vertex {vertex}"))?;
        self.engine.query_k(v).map_err(msg)
    }

    /// Tree nodes, parents first, as a JSON array.
    pub fn hierarchy(&self) -> String {
        let nodes: Vec<NodeOut> = self
            .engine
            .sti()
            .snapshot_by(|v| self.ids.original(v))
            .into_iter()
            .map(|n| NodeOut {
                k: n.k,
                parent: n.parent,
                vertices: n.vertices.into_iter().map(|v| self.ids.original(v)).collect(),
            })
            .collect();
        serde_json::to_string(&nodes).expect("plain data serializes")
    }

    pub fn vertex_count(&self) -> usize {
        self.engine.graph().n()
    }

    pub fn edge_count(&self) -> usize {
        self.engine.graph().m()
    }
}
