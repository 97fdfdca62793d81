// SPDX-License-Identifier: Apache-2.0

//! Heap-driven conversion of a subcore DAG (or a region of one) into shell
//! tree nodes.
//!
//! Work nodes start as single subcores. Processing runs from the highest
//! level down: a popped node absorbs every same-level neighbour, takes its
//! highest in-neighbour as parent, and hands all other in-arcs to that
//! parent. Merged nodes are tracked with union-find; each arc remembers the
//! subcore it originally pointed into so the boundary of every finished
//! subtree can be recorded.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{NodeId, Sti};
use crate::error::Result;
use crate::subcore_dag::{DagId, SubcoreDag};
use crate::{HashMap, HashSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorkKind {
    Dag(DagId),
    /// An existing tree node whose subtree is kept as is.
    Frozen(NodeId),
}

#[derive(Debug, Clone, Copy)]
struct Arc {
    src: u32,
    dst: u32,
    dst_dag: DagId,
}

/// Counters from one builder run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildWork {
    pub nodes_processed: usize,
    pub arcs_moved: usize,
}

#[derive(Debug, Default)]
pub struct ShellTreeBuilder {
    kind: Vec<WorkKind>,
    level: Vec<u32>,
    uf: Vec<u32>,
    inn: Vec<Vec<u32>>,
    out: Vec<Vec<u32>>,
    arcs: Vec<Arc>,
    parent: Vec<Option<u32>>,
    done: Vec<bool>,
    boundary: Vec<Vec<DagId>>,
    work_of_dag: HashMap<DagId, u32>,
}

impl ShellTreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every live subcore becomes a work node; every DAG arc a work arc.
    pub fn from_dag(dag: &SubcoreDag) -> Result<Self> {
        let mut b = ShellTreeBuilder::new();
        for (id, node) in dag.iter() {
            b.add_dag(id, node.level);
        }
        for (id, node) in dag.iter() {
            let src = b.work_of_dag[&id];
            for &o in &node.out {
                let dst = b.work_of_dag[&o];
                b.add_arc(src, dst, o);
            }
        }
        Ok(b)
    }

    fn push(&mut self, kind: WorkKind, level: u32) -> u32 {
        let w = self.kind.len() as u32;
        self.kind.push(kind);
        self.level.push(level);
        self.uf.push(w);
        self.inn.push(Vec::new());
        self.out.push(Vec::new());
        self.parent.push(None);
        self.done.push(false);
        self.boundary.push(Vec::new());
        w
    }

    pub fn add_dag(&mut self, id: DagId, level: u32) -> u32 {
        let w = self.push(WorkKind::Dag(id), level);
        self.work_of_dag.insert(id, w);
        w
    }

    pub fn add_frozen(&mut self, node: NodeId, level: u32) -> u32 {
        self.push(WorkKind::Frozen(node), level)
    }

    pub fn work_of_dag(&self, id: DagId) -> Option<u32> {
        self.work_of_dag.get(&id).copied()
    }

    /// Arc from work node `src` into `dst`, which contains subcore `dst_dag`.
    pub fn add_arc(&mut self, src: u32, dst: u32, dst_dag: DagId) {
        let e = self.arcs.len() as u32;
        self.arcs.push(Arc { src, dst, dst_dag });
        self.out[src as usize].push(e);
        self.inn[dst as usize].push(e);
    }

    pub fn len(&self) -> usize {
        self.kind.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kind.is_empty()
    }

    pub fn find(&mut self, w: u32) -> u32 {
        let mut r = w;
        while self.uf[r as usize] != r {
            r = self.uf[r as usize];
        }
        let mut c = w;
        while self.uf[c as usize] != r {
            let next = self.uf[c as usize];
            self.uf[c as usize] = r;
            c = next;
        }
        r
    }

    /// Representative lookup without path compression.
    pub fn class(&self, w: u32) -> u32 {
        let mut r = w;
        while self.uf[r as usize] != r {
            r = self.uf[r as usize];
        }
        r
    }

    pub fn kind(&self, w: u32) -> WorkKind {
        self.kind[w as usize]
    }

    pub fn level(&self, w: u32) -> u32 {
        self.level[w as usize]
    }

    /// Representative of the chosen parent, if any.
    pub fn parent_of(&self, w: u32) -> Option<u32> {
        self.parent[self.class(w) as usize].map(|p| self.class(p))
    }

    /// Subcores in the finished subtree of `w` that receive arcs from below.
    pub fn boundary(&self, w: u32) -> &[DagId] {
        &self.boundary[self.class(w) as usize]
    }

    /// Representatives of all classes.
    pub fn classes(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.kind.len() as u32).filter(|&w| self.uf[w as usize] == w)
    }

    /// Members of each class, keyed by representative.
    pub fn members(&self) -> HashMap<u32, Vec<u32>> {
        let mut m: HashMap<u32, Vec<u32>> = HashMap::default();
        for w in 0..self.kind.len() as u32 {
            m.entry(self.class(w)).or_default().push(w);
        }
        m
    }

    fn union_into(&mut self, keep: u32, gone: u32) {
        self.uf[gone as usize] = keep;
        self.done[gone as usize] = true;
        for side in [&mut self.inn, &mut self.out] {
            let moved = std::mem::take(&mut side[gone as usize]);
            let target = &mut side[keep as usize];
            if target.len() < moved.len() {
                let small = std::mem::replace(target, moved);
                target.extend(small);
            } else {
                target.extend(moved);
            }
        }
    }

    pub fn run(&mut self) -> BuildWork {
        let mut work = BuildWork::default();
        let mut heap: BinaryHeap<(u32, Reverse<u32>)> = BinaryHeap::new();
        for w in 0..self.kind.len() as u32 {
            if self.out[w as usize].is_empty() {
                heap.push((self.level[w as usize], Reverse(w)));
            }
        }
        while let Some((_, Reverse(w))) = heap.pop() {
            let w = self.find(w);
            if self.done[w as usize] {
                continue;
            }
            self.done[w as usize] = true;
            work.nodes_processed += 1;
            let lvl = self.level[w as usize];

            // absorb same-level neighbours, rescanning only arcs that arrive
            // with each absorbed node
            let mut pending: Vec<u32> =
                self.inn[w as usize].iter().chain(self.out[w as usize].iter()).copied().collect();
            while let Some(e) = pending.pop() {
                let a = self.arcs[e as usize];
                let (s, d) = (self.find(a.src), self.find(a.dst));
                let other = if s == w { d } else { s };
                if other == w || self.level[other as usize] != lvl {
                    continue;
                }
                debug_assert!(!self.done[other as usize], "same-level neighbour already finished");
                pending.extend(self.inn[other as usize].iter().chain(self.out[other as usize].iter()));
                work.nodes_processed += 1;
                self.union_into(w, other);
            }

            // in-neighbours, dropping arcs that became internal
            let arcs_in = std::mem::take(&mut self.inn[w as usize]);
            let mut live: Vec<(u32, u32)> = Vec::with_capacity(arcs_in.len());
            for e in arcs_in {
                let s = self.find(self.arcs[e as usize].src);
                if s != w {
                    live.push((e, s));
                }
            }
            let mut boundary: HashSet<DagId> = HashSet::default();
            for &(e, _) in &live {
                boundary.insert(self.arcs[e as usize].dst_dag);
            }
            let mut b: Vec<DagId> = boundary.into_iter().collect();
            b.sort_unstable();
            self.boundary[w as usize] = b;

            let Some(t) = live.iter().map(|&(_, s)| s).max_by_key(|&s| (self.level[s as usize], Reverse(s))) else {
                continue;
            };
            self.parent[w as usize] = Some(t);
            let mut kept = Vec::new();
            let mut pushed: HashSet<u32> = HashSet::default();
            for (e, s) in live {
                if s == t {
                    kept.push(e);
                } else {
                    self.arcs[e as usize].dst = t;
                    self.inn[t as usize].push(e);
                    work.arcs_moved += 1;
                }
                if pushed.insert(s) {
                    heap.push((self.level[s as usize], Reverse(s)));
                }
            }
            self.inn[w as usize] = kept;
        }
        work
    }

    /// Runs over a whole DAG and materialises a fresh index for `n` vertices.
    pub fn finish_fresh(mut self, dag: &SubcoreDag, n: usize) -> Result<(Sti, BuildWork)> {
        let work = self.run();
        let mut sti = Sti::new();
        sti.node_of = vec![sti.root; n];
        sti.pos = vec![0; n];
        let mut node_for: HashMap<u32, NodeId> = HashMap::default();
        let reps: Vec<u32> = self.classes().collect();
        for &r in &reps {
            let id = if self.level(r) == 0 { sti.root } else { sti.new_node(self.level(r), None) };
            node_for.insert(r, id);
        }
        for &r in &reps {
            let id = node_for[&r];
            if id == sti.root {
                continue;
            }
            let p = self.parent_of(r).map_or(sti.root, |p| node_for[&p]);
            sti.set_parent(id, Some(p));
            sti.node_mut(id).boundary = Some(self.boundary(r).iter().copied().collect());
        }
        for (id, node) in dag.iter() {
            let w = self.work_of_dag[&id];
            let t = node_for[&self.class(w)];
            for &v in &node.members {
                sti.push_vertex(t, v);
            }
        }
        Ok((sti, work))
    }
}
