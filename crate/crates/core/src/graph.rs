// SPDX-License-Identifier: Apache-2.0

//! Mutable undirected simple graph and the edge-change stream model.
//!
//! Vertices are dense `usize` ids. Ids read from files are compacted through
//! an [`IdMap`] so the original labels can be restored on output.

use std::io::{BufRead, Write};

use crate::error::{Result, StiError};
use crate::{HashMap, HashSet};

pub type VertexId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChangeKind {
    Insert,
    Delete,
}

/// One edge insertion or deletion. Endpoints are unordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeChange {
    pub kind: ChangeKind,
    pub u: VertexId,
    pub v: VertexId,
}

impl EdgeChange {
    pub fn insert(u: VertexId, v: VertexId) -> Self {
        EdgeChange { kind: ChangeKind::Insert, u, v }
    }

    pub fn delete(u: VertexId, v: VertexId) -> Self {
        EdgeChange { kind: ChangeKind::Delete, u, v }
    }

    pub fn inverse(self) -> Self {
        let kind = match self.kind {
            ChangeKind::Insert => ChangeKind::Delete,
            ChangeKind::Delete => ChangeKind::Insert,
        };
        EdgeChange { kind, ..self }
    }
}

/// Ordered list of edge changes applied as one unit.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChangeBatch {
    pub changes: Vec<EdgeChange>,
}

impl ChangeBatch {
    pub fn new(changes: Vec<EdgeChange>) -> Self {
        ChangeBatch { changes }
    }

    pub fn len(&self) -> usize {
        self.changes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.changes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &EdgeChange> {
        self.changes.iter()
    }

    /// Every endpoint mentioned by the batch, deduplicated, in first-seen order.
    pub fn endpoints(&self) -> Vec<VertexId> {
        let mut seen = HashSet::default();
        let mut out = Vec::new();
        for c in &self.changes {
            for x in [c.u, c.v] {
                if seen.insert(x) {
                    out.push(x);
                }
            }
        }
        out
    }
}

impl FromIterator<EdgeChange> for ChangeBatch {
    fn from_iter<I: IntoIterator<Item = EdgeChange>>(iter: I) -> Self {
        ChangeBatch { changes: iter.into_iter().collect() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<HashSet<VertexId>>,
    m: usize,
}

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    /// Graph with `n` isolated vertices.
    pub fn with_vertices(n: usize) -> Self {
        Graph { adj: vec![HashSet::default(); n], m: 0 }
    }

    /// Builds a simple graph, silently dropping loops and duplicates.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (VertexId, VertexId)>) -> Self {
        let mut g = Graph::with_vertices(n);
        for (u, v) in edges {
            if u != v && !g.has_edge(u, v) {
                g.insert_edge(u, v).expect("checked above");
            }
        }
        g
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        v < self.adj.len()
    }

    /// Grows the vertex range so that `v` exists.
    pub fn ensure_vertex(&mut self, v: VertexId) {
        if v >= self.adj.len() {
            self.adj.resize_with(v + 1, HashSet::default);
        }
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        u < self.adj.len() && self.adj[u].contains(&v)
    }

    pub fn neighbors(&self, v: VertexId) -> Result<impl Iterator<Item = VertexId> + '_> {
        self.adj.get(v).map(|s| s.iter().copied()).ok_or(StiError::UnknownVertex(v as u64))
    }

    /// Neighbor set of a vertex known to exist.
    #[inline]
    pub fn adj(&self, v: VertexId) -> &HashSet<VertexId> {
        &self.adj[v]
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.adj.len()
    }

    /// Each edge once, as `(min, max)`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, s)| s.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn insert_edge(&mut self, u: VertexId, v: VertexId) -> Result<()> {
        if u == v {
            return Err(StiError::SelfLoop(u));
        }
        self.ensure_vertex(u.max(v));
        if self.adj[u].contains(&v) {
            return Err(StiError::EdgeExists(u, v));
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        self.m += 1;
        Ok(())
    }

    pub fn delete_edge(&mut self, u: VertexId, v: VertexId) -> Result<()> {
        if u == v {
            return Err(StiError::SelfLoop(u));
        }
        if !self.has_edge(u, v) {
            return Err(StiError::EdgeMissing(u, v));
        }
        self.adj[u].remove(&v);
        self.adj[v].remove(&u);
        self.m -= 1;
        Ok(())
    }

    pub fn apply_change(&mut self, c: EdgeChange) -> Result<()> {
        match c.kind {
            ChangeKind::Insert => self.insert_edge(c.u, c.v),
            ChangeKind::Delete => self.delete_edge(c.u, c.v),
        }
    }

    /// Checks that `c` would apply cleanly without mutating anything.
    pub fn check_change(&self, c: EdgeChange) -> Result<()> {
        if c.u == c.v {
            return Err(StiError::SelfLoop(c.u));
        }
        match (c.kind, self.has_edge(c.u, c.v)) {
            (ChangeKind::Insert, true) => Err(StiError::EdgeExists(c.u, c.v)),
            (ChangeKind::Delete, false) => Err(StiError::EdgeMissing(c.u, c.v)),
            _ => Ok(()),
        }
    }
}

/// Bidirectional map between file vertex labels and dense ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdMap {
    original: Vec<u64>,
    dense: HashMap<u64, VertexId>,
}

impl IdMap {
    pub fn new() -> Self {
        IdMap::default()
    }

    /// Identity map over `0..n`.
    pub fn identity(n: usize) -> Self {
        let mut ids = IdMap::new();
        for i in 0..n {
            ids.intern(i as u64);
        }
        ids
    }

    pub fn intern(&mut self, original: u64) -> VertexId {
        if let Some(&d) = self.dense.get(&original) {
            return d;
        }
        let d = self.original.len();
        self.original.push(original);
        self.dense.insert(original, d);
        d
    }

    pub fn dense(&self, original: u64) -> Option<VertexId> {
        self.dense.get(&original).copied()
    }

    pub fn original(&self, v: VertexId) -> u64 {
        self.original[v]
    }

    pub fn len(&self) -> usize {
        self.original.len()
    }

    pub fn is_empty(&self) -> bool {
        self.original.is_empty()
    }

    /// Two-column `original dense` text, sorted by original id.
    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut pairs: Vec<_> = self.original.iter().copied().enumerate().collect();
        pairs.sort_by_key(|&(_, o)| o);
        for (d, o) in pairs {
            writeln!(out, "{o} {d}")?;
        }
        Ok(())
    }
}

/// A cleaned edge list: the simple graph plus ingest counters.
#[derive(Debug, Clone, Default)]
pub struct EdgeList {
    pub graph: Graph,
    pub ids: IdMap,
    pub self_loops: usize,
    pub duplicates: usize,
}

/// Reads a SNAP-style edge list. Lines starting with `#` (or `%`) and blank
/// lines are skipped; extra columns after the first two are ignored.
pub fn load_edge_list<R: BufRead>(source: R) -> Result<EdgeList> {
    let mut out = EdgeList::default();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut tok = trimmed.split_whitespace();
        let a = parse_id(tok.next(), line_no)?;
        let b = parse_id(tok.next(), line_no)?;
        let u = out.ids.intern(a);
        let v = out.ids.intern(b);
        out.graph.ensure_vertex(u.max(v));
        if u == v {
            out.self_loops += 1;
        } else if out.graph.has_edge(u, v) {
            out.duplicates += 1;
        } else {
            out.graph.insert_edge(u, v)?;
        }
    }
    Ok(out)
}

fn parse_id(tok: Option<&str>, line: usize) -> Result<u64> {
    let tok = tok.ok_or_else(|| StiError::Parse { line, msg: "expected two vertex ids".into() })?;
    tok.parse::<u64>().map_err(|_| StiError::Parse { line, msg: format!("invalid vertex id {tok:?}") })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(s: &str) -> EdgeList {
        load_edge_list(s.as_bytes()).unwrap()
    }

    #[test]
    fn triangle_file() {
        let el = load("1 2\n2 3\n3 1\n");
        assert_eq!((el.graph.n(), el.graph.m()), (3, 3));
    }

    #[test]
    fn loops_and_duplicates_dropped() {
        let el = load("1 1\n1 2\n1 2\n");
        assert_eq!((el.graph.n(), el.graph.m()), (2, 1));
        assert_eq!((el.self_loops, el.duplicates), (1, 1));
    }

    #[test]
    fn comments_skipped_and_ids_kept() {
        let el = load("# c\n5 9\n");
        assert_eq!((el.graph.n(), el.graph.m()), (2, 1));
        let d5 = el.ids.dense(5).unwrap();
        let d9 = el.ids.dense(9).unwrap();
        assert!(el.graph.has_edge(d5, d9));
        assert_eq!(el.ids.original(d9), 9);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = load_edge_list("1 2\n3 x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, StiError::Parse { line: 2, .. }), "{err}");
        let err = load_edge_list("7\n".as_bytes()).unwrap_err();
        assert!(matches!(err, StiError::Parse { line: 1, .. }));
    }

    #[test]
    fn insert_on_empty_creates_vertices() {
        let mut g = Graph::new();
        g.apply_change(EdgeChange::insert(0, 1)).unwrap();
        assert_eq!((g.n(), g.m()), (2, 1));
    }

    #[test]
    fn delete_lowers_degrees() {
        let mut g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]);
        g.apply_change(EdgeChange::delete(0, 1)).unwrap();
        assert_eq!((g.degree(0), g.degree(1), g.m()), (1, 1, 2));
    }

    #[test]
    fn insert_then_delete_is_identity() {
        let start = Graph::from_edges(4, [(0, 1), (2, 3)]);
        let mut g = start.clone();
        let c = EdgeChange::insert(1, 2);
        g.apply_change(c).unwrap();
        g.apply_change(c.inverse()).unwrap();
        assert_eq!(g, start);
    }

    #[test]
    fn idempotence_violations() {
        let mut g = Graph::from_edges(2, [(0, 1)]);
        let e = g.apply_change(EdgeChange::insert(1, 0)).unwrap_err();
        assert!(e.is_idempotence_violation());
        g.delete_edge(0, 1).unwrap();
        let e = g.apply_change(EdgeChange::delete(0, 1)).unwrap_err();
        assert!(e.is_idempotence_violation());
        assert!(matches!(g.insert_edge(1, 1), Err(StiError::SelfLoop(1))));
    }

    #[test]
    fn neighbor_iteration() {
        let tri = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]);
        let mut nb: Vec<_> = tri.neighbors(0).unwrap().collect();
        nb.sort();
        assert_eq!(nb, vec![1, 2]);

        let isolated = Graph::with_vertices(1);
        assert_eq!(isolated.neighbors(0).unwrap().count(), 0);

        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]);
        assert_eq!(star.neighbors(0).unwrap().count(), 3);
        assert!(matches!(star.neighbors(9), Err(StiError::UnknownVertex(9))));
    }
}
