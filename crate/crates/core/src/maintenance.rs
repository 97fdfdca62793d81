// SPDX-License-Identifier: Apache-2.0

//! Keeps the shell tree index in step with the graph.
//!
//! Two update paths share one engine:
//!
//! * **SE** repairs the tree edge by edge: the moved part of the lower
//!   endpoint's shell becomes (or joins) a node one level up, adjacent
//!   higher cores are merged in or re-hung below it, and the two endpoint
//!   paths are merged towards the root. Deletions go through the batch path
//!   with a one-element batch.
//! * **BA** applies a whole batch to the graph and coreness first, refreshes
//!   the subcore DAG around the touched vertices, tears down the tree nodes
//!   whose cores can have changed, and rebuilds just that region with the
//!   heap-driven builder. Untouched subtrees below the region are carried
//!   over as frozen work nodes.
//!
//! The DAG is only needed by BA, so SE queues its touched vertices and the
//! DAG catches up on the next batch or [`MaintenanceEngine::sync_dag`].

use std::time::{Duration, Instant};

use crate::coreness::{peel, validate_batch, CorenessMap, DeltaSet, PeelWork};
use crate::error::{Result, StiError};
use crate::graph::{ChangeBatch, ChangeKind, EdgeChange, Graph, VertexId};
use crate::shell_tree::build::WorkKind;
use crate::shell_tree::{CoreQuery, NodeId, ShellTreeBuilder, SnapshotNode, Sti};
use crate::subcore_dag::{DagId, RegionChange, SubcoreDag};
use crate::{HashMap, HashSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algo {
    /// Rebuild everything from the graph.
    Fs,
    Se,
    Ba,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Fs => "fs",
            Algo::Se => "se",
            Algo::Ba => "ba",
        }
    }
}

impl std::str::FromStr for Algo {
    type Err = StiError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fs" => Ok(Algo::Fs),
            "se" => Ok(Algo::Se),
            "ba" => Ok(Algo::Ba),
            other => Err(StiError::Config(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// Index-maintenance work for one update. Coreness maintenance is shared by
/// every path and reported separately in `kappa_visited`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UpdateStats {
    pub vertices_visited: usize,
    pub tree_nodes_touched: usize,
    pub dag_nodes_rebuilt: usize,
    pub kappa_visited: usize,
    pub wall_time: Duration,
}

impl UpdateStats {
    pub fn absorb(&mut self, o: UpdateStats) {
        self.vertices_visited += o.vertices_visited;
        self.tree_nodes_touched += o.tree_nodes_touched;
        self.dag_nodes_rebuilt += o.dag_nodes_rebuilt;
        self.kappa_visited += o.kappa_visited;
        self.wall_time += o.wall_time;
    }

    /// The quantity compared across algorithms.
    pub fn index_work(&self) -> usize {
        self.vertices_visited + self.tree_nodes_touched
    }
}

#[derive(Debug, Clone)]
pub struct MaintenanceEngine {
    graph: Graph,
    kappa: CorenessMap,
    dag: SubcoreDag,
    sti: Sti,
    /// Vertices touched by SE since the DAG was last refreshed.
    pending: Vec<VertexId>,
    last_delta: DeltaSet,
    steps: usize,
}

impl MaintenanceEngine {
    pub fn new(graph: Graph) -> Result<Self> {
        let (sti, kappa, dag) = Sti::from_scratch(&graph)?;
        Ok(MaintenanceEngine { graph, kappa, dag, sti, pending: Vec::new(), last_delta: DeltaSet::default(), steps: 0 })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn coreness(&self) -> &CorenessMap {
        &self.kappa
    }

    pub fn sti(&self) -> &Sti {
        &self.sti
    }

    /// The subcore DAG, brought up to date first.
    pub fn dag(&mut self) -> Result<&SubcoreDag> {
        self.sync_dag()?;
        Ok(&self.dag)
    }

    /// Net coreness movement of the most recent update.
    pub fn last_delta(&self) -> &DeltaSet {
        &self.last_delta
    }

    /// `(subcore, tree node)` of `v`.
    pub fn links(&mut self, v: VertexId) -> Result<(DagId, NodeId)> {
        self.sync_dag()?;
        if v >= self.graph.n() {
            return Err(StiError::UnknownVertex(v as u64));
        }
        Ok((self.dag.label(v), self.sti.node_of(v)))
    }

    pub fn query_k(&self, u: VertexId) -> Result<u32> {
        self.sti.query_k(u)
    }

    pub fn query_core(&self, u: VertexId, k: u32) -> Result<CoreQuery> {
        self.sti.query_core(u, k)
    }

    pub fn query_hierarchy(&self) -> Vec<SnapshotNode> {
        self.sti.query_hierarchy()
    }

    fn grow_to(&mut self, n: usize) {
        if n > self.graph.n() {
            self.graph.ensure_vertex(n - 1);
        }
        self.kappa.ensure_len(n);
        self.dag.grow_to(n);
        self.sti.grow_to(n);
    }

    fn grow_for(&mut self, batch: &ChangeBatch) {
        if let Some(max) = batch.iter().map(|c| c.u.max(c.v)).max() {
            self.grow_to(max + 1);
        }
    }

    /// Folds vertices queued by SE into the DAG. The tree is already
    /// current; only cached boundaries around the refreshed subcores are
    /// dropped.
    pub fn sync_dag(&mut self) -> Result<()> {
        if self.pending.is_empty() {
            return Ok(());
        }
        let seeds = std::mem::take(&mut self.pending);
        let change = self.dag.rebuild_region(&self.graph, &self.kappa, &seeds)?;
        for &d in &change.created {
            for &v in &self.dag.node(d).members {
                self.sti.invalidate_up(self.sti.node_of(v));
            }
        }
        Ok(())
    }

    // ---- from scratch -----------------------------------------------------

    /// Applies the batch to the graph, then rebuilds coreness, DAG and tree.
    pub fn fs_apply(&mut self, batch: &ChangeBatch) -> Result<UpdateStats> {
        validate_batch(&self.graph, batch)?;
        let start = Instant::now();
        let before = self.kappa.clone();
        for &c in batch.iter() {
            self.graph.apply_change(c)?;
        }
        let n = self.graph.n();
        self.kappa = peel(&self.graph);
        self.dag = SubcoreDag::build(&self.graph, &self.kappa)?;
        let (sti, work) = Sti::build(&self.dag, n)?;
        self.sti = sti;
        self.pending.clear();
        self.last_delta = delta_between(&before, &self.kappa);
        Ok(UpdateStats {
            vertices_visited: n,
            tree_nodes_touched: work.nodes_processed,
            dag_nodes_rebuilt: self.dag.node_count(),
            kappa_visited: n,
            wall_time: start.elapsed(),
        })
    }

    // ---- single edge ------------------------------------------------------

    /// Inserts `{u, v}` and repairs the tree along the two endpoint paths.
    pub fn se_insert(&mut self, u: VertexId, v: VertexId) -> Result<UpdateStats> {
        self.graph.check_change(EdgeChange::insert(u, v))?;
        let start = Instant::now();
        self.grow_to(u.max(v) + 1);
        self.graph.insert_edge(u, v)?;
        let mut pw = PeelWork::default();
        let risen = self.kappa.on_insert(&self.graph, u, v, &mut pw)?;
        self.pending.extend([u, v]);
        self.pending.extend(risen.iter().copied());
        self.last_delta = DeltaSet { changed: risen.iter().map(|&w| (w, 1)).collect() };
        self.steps = 0;
        let mut visited = 2;

        if risen.is_empty() {
            let (a, b) = (self.sti.node_of(u), self.sti.node_of(v));
            self.merge_paths(a, b)?;
            self.sti.invalidate_up(self.sti.node_of(u));
            self.sti.invalidate_up(self.sti.node_of(v));
        } else {
            // the risen set always contains the lower endpoint
            let (low, high) = if risen.binary_search(&u).is_ok() { (u, v) } else { (v, u) };
            visited += self.se_lift(low, &risen)?;
            self.sti.invalidate_up(self.sti.node_of(high));
        }
        Ok(UpdateStats {
            vertices_visited: visited,
            tree_nodes_touched: self.steps,
            dag_nodes_rebuilt: 0,
            kappa_visited: pw.visited,
            wall_time: start.elapsed(),
        })
    }

    /// Moves the risen set `moved` (all at level k, containing `u`) one
    /// level up and reconnects it. Returns the number of vertices scanned.
    fn se_lift(&mut self, u: VertexId, moved: &[VertexId]) -> Result<usize> {
        let k = self.kappa.get(u) - 1;
        let shell = self.sti.node_of(u);
        debug_assert_eq!(self.sti.node(shell).k(), k);
        let root = self.sti.root();
        let whole = shell != root && self.sti.node(shell).vertices().len() == moved.len();
        let x = if whole {
            // the entire shell moves as one subcore
            self.sti.set_k(shell, k + 1);
            let same: Vec<NodeId> =
                self.sti.node(shell).children().filter(|&c| self.sti.node(c).k() == k + 1).collect();
            for c in same {
                self.steps += 1;
                self.sti.merge(shell, c)?;
            }
            shell
        } else {
            let x = self.sti.new_node(k + 1, Some(shell));
            for &w in moved {
                self.sti.move_vertex(w, x);
            }
            x
        };
        self.steps += 1;
        let mut scanned = moved.len();
        for &w in moved {
            let nbrs: Vec<VertexId> = self.graph.adj(w).iter().copied().collect();
            scanned += nbrs.len();
            for nb in nbrs {
                if self.kappa.get(nb) > k && self.sti.node_of(nb) != x {
                    let target = self.sti.node_of(nb);
                    self.merge_or_connect(x, target)?;
                }
            }
        }
        self.sti.invalidate_up(x);
        Ok(scanned)
    }

    /// Attaches the core above `n` to the new node `x`: the topmost
    /// ancestor of `n` at level >= `x.k` is merged into `x` when levels
    /// match, otherwise re-hung below it. The old parent's path is then
    /// merged with `x`'s.
    pub(crate) fn merge_or_connect(&mut self, x: NodeId, n: NodeId) -> Result<()> {
        let xk = self.sti.node(x).k();
        let mut a = n;
        while let Some(p) = self.sti.node(a).parent() {
            self.steps += 1;
            if self.sti.node(p).k() >= xk {
                a = p;
            } else {
                break;
            }
        }
        if a == x {
            return Ok(());
        }
        let old_parent = self.sti.node(a).parent().expect("non-root has a parent");
        if self.sti.node(a).k() == xk {
            self.sti.merge(x, a)?;
        } else {
            self.sti.make_child(x, a)?;
        }
        self.steps += 1;
        self.merge_paths(x, old_parent)
    }

    /// Merges the root paths of two nodes that now lie in one core at the
    /// lower of their two levels.
    pub(crate) fn merge_paths(&mut self, a: NodeId, b: NodeId) -> Result<()> {
        let (mut a, mut b) = (a, b);
        loop {
            if a == b {
                return Ok(());
            }
            if self.sti.node(a).k() > self.sti.node(b).k() {
                std::mem::swap(&mut a, &mut b);
            }
            let ka = self.sti.node(a).k();
            let mut below = None;
            let mut c = b;
            while self.sti.node(c).k() > ka {
                self.steps += 1;
                below = Some(c);
                c = self.sti.node(c).parent().expect("root has level 0");
            }
            if c == a {
                return Ok(());
            }
            self.steps += 1;
            self.sti.invalidate_up(a);
            if self.sti.node(c).k() == ka {
                let pa = self.sti.node(a).parent().expect("distinct level-k nodes are not the root");
                let pc = self.sti.node(c).parent().expect("distinct level-k nodes are not the root");
                self.sti.merge(a, c)?;
                if self.sti.node(pc).k() > self.sti.node(pa).k() {
                    self.sti.make_child(pc, a)?;
                }
                a = pa;
                b = pc;
            } else {
                let l = below.expect("b lies strictly above c");
                self.sti.make_child(a, l)?;
                let pa = self.sti.node(a).parent().expect("a is above the root");
                if self.sti.node(c).k() > self.sti.node(pa).k() {
                    self.sti.make_child(c, a)?;
                }
                a = pa;
                b = c;
            }
        }
    }

    /// Deletes `{u, v}` through the batch path.
    pub fn se_delete(&mut self, u: VertexId, v: VertexId) -> Result<UpdateStats> {
        self.ba_apply(&ChangeBatch::new(vec![EdgeChange::delete(u, v)]))
    }

    /// Applies a batch one change at a time through SE.
    pub fn se_apply(&mut self, batch: &ChangeBatch) -> Result<UpdateStats> {
        validate_batch(&self.graph, batch)?;
        let mut total = UpdateStats::default();
        for (index, c) in batch.iter().enumerate() {
            let s = match c.kind {
                ChangeKind::Insert => self.se_insert(c.u, c.v),
                ChangeKind::Delete => self.se_delete(c.u, c.v),
            }
            .map_err(|e| StiError::Batch { index, source: Box::new(e) })?;
            total.absorb(s);
        }
        Ok(total)
    }

    // ---- batch ------------------------------------------------------------

    pub fn ba_apply(&mut self, batch: &ChangeBatch) -> Result<UpdateStats> {
        validate_batch(&self.graph, batch)?;
        let start = Instant::now();
        self.grow_for(batch);
        let mut pw = PeelWork::default();
        let delta = self.kappa.maintain(&mut self.graph, batch, &mut pw)?;

        let mut seeds = std::mem::take(&mut self.pending);
        seeds.extend(batch.endpoints());
        seeds.extend(delta.vertices());
        let change = self.dag.rebuild_region(&self.graph, &self.kappa, &seeds)?;
        let touched = self.repair_tree(&change)?;
        self.last_delta = delta;
        Ok(UpdateStats {
            vertices_visited: change.visited,
            tree_nodes_touched: touched,
            dag_nodes_rebuilt: change.created.len(),
            kappa_visited: pw.visited,
            wall_time: start.elapsed(),
        })
    }

    /// Rebuilds the tree region whose cores can differ after `change`.
    /// Returns the number of tree and work nodes handled.
    fn repair_tree(&mut self, change: &RegionChange) -> Result<usize> {
        if change.created.is_empty() {
            return Ok(0);
        }
        let root = self.sti.root();
        let created: HashSet<DagId> = change.created.iter().copied().collect();

        // Tree nodes holding a reassigned vertex change directly. Nodes whose
        // cores gain an arc to a new subcore change at and below the new
        // subcore's level.
        let mut seeds: HashSet<NodeId> = HashSet::default();
        let mut extra_frozen: Vec<NodeId> = Vec::new();
        for &d in &change.created {
            let node = self.dag.node(d);
            for &v in &node.members {
                let t = self.sti.node_of(v);
                if t != root {
                    seeds.insert(t);
                }
            }
            let level = node.level;
            for &c in node.inn.iter().chain(node.out.iter()) {
                if created.contains(&c) {
                    continue;
                }
                let cn = self.dag.node(c);
                let tc = self.sti.node_of(cn.members[0]);
                if cn.level < level {
                    seeds.insert(tc);
                    continue;
                }
                let mut cur = tc;
                loop {
                    if let Some(b) = self.sti.node_mut(cur).boundary.as_mut() {
                        b.insert(c);
                    }
                    let p = self.sti.node(cur).parent().expect("non-root has a parent");
                    if p == root {
                        extra_frozen.push(cur);
                        break;
                    }
                    if self.sti.node(p).k() <= level {
                        seeds.insert(p);
                        break;
                    }
                    cur = p;
                }
            }
        }

        let mut dissolved: HashSet<NodeId> = HashSet::default();
        for s in seeds {
            let mut cur = s;
            while cur != root && dissolved.insert(cur) {
                cur = self.sti.node(cur).parent().expect("non-root has a parent");
            }
        }
        let mut dissolved: Vec<NodeId> = dissolved.into_iter().collect();
        dissolved.sort_unstable();
        let dissolved_set: HashSet<NodeId> = dissolved.iter().copied().collect();

        let mut region: Vec<DagId> = change.created.clone();
        let mut in_region: HashSet<DagId> = created.clone();
        for &t in &dissolved {
            for &v in self.sti.node(t).vertices() {
                let d = self.dag.label(v);
                if in_region.insert(d) {
                    region.push(d);
                }
            }
        }

        let mut frozen: Vec<NodeId> = Vec::new();
        let mut frozen_seen: HashSet<NodeId> = HashSet::default();
        for &t in &dissolved {
            let mut kids: Vec<NodeId> = self.sti.node(t).children().collect();
            kids.sort_unstable();
            for c in kids {
                if !dissolved_set.contains(&c) && frozen_seen.insert(c) {
                    frozen.push(c);
                }
            }
        }
        for c in extra_frozen {
            if !dissolved_set.contains(&c) && frozen_seen.insert(c) {
                frozen.push(c);
            }
        }

        let mut builder = ShellTreeBuilder::new();
        for &d in &region {
            builder.add_dag(d, self.dag.node(d).level);
        }
        for &d in &region {
            let wd = builder.work_of_dag(d).expect("region node registered");
            let node = self.dag.node(d);
            for &o in &node.out {
                if let Some(wo) = builder.work_of_dag(o) {
                    builder.add_arc(wd, wo, o);
                }
            }
            debug_assert!(
                node.inn.iter().all(|i| in_region.contains(i)),
                "region subcore has an in-arc from outside the region"
            );
        }
        for &r in &frozen {
            let k = self.sti.node(r).k();
            let boundary = match self.sti.node(r).boundary.clone() {
                Some(b) => b,
                None => {
                    let b = self.scan_boundary(r);
                    self.sti.node_mut(r).boundary = Some(b.clone());
                    b
                }
            };
            let wr = builder.add_frozen(r, k);
            let mut entry: Vec<DagId> = boundary.into_iter().collect();
            entry.sort_unstable();
            for b in entry {
                let Some(bn) = self.dag.get(b) else { continue };
                for &a in &bn.inn {
                    if self.dag.node(a).level < k {
                        match builder.work_of_dag(a) {
                            Some(wa) => builder.add_arc(wa, wr, b),
                            None => debug_assert!(false, "boundary arc from outside the region"),
                        }
                    }
                }
            }
        }

        let work = builder.run();

        // tear down
        for &r in &frozen {
            self.sti.set_parent(r, None);
        }
        for &t in &dissolved {
            if self.sti.node(t).parent() == Some(root) {
                self.sti.set_parent(t, None);
            }
        }
        for &t in &dissolved {
            self.sti.discard_node(t);
        }

        // rebuild
        let mut node_for: HashMap<u32, NodeId> = HashMap::default();
        for rep in builder.classes().collect::<Vec<_>>() {
            let id = match builder.kind(rep) {
                WorkKind::Frozen(r) => r,
                WorkKind::Dag(_) if builder.level(rep) == 0 => root,
                WorkKind::Dag(_) => {
                    let id = self.sti.new_node(builder.level(rep), None);
                    self.sti.node_mut(id).boundary = Some(builder.boundary(rep).iter().copied().collect());
                    id
                }
            };
            node_for.insert(rep, id);
        }
        for &d in &region {
            let w = builder.work_of_dag(d).expect("region node registered");
            let target = node_for[&builder.class(w)];
            let members = self.dag.node(d).members.clone();
            for v in members {
                // region vertices sit either in the root or in a discarded
                // node, whose id may already have been reused above
                if self.sti.node_of(v) == root {
                    if target == root {
                        continue;
                    }
                    self.sti.pull_vertex(v);
                }
                self.sti.push_vertex(target, v);
            }
        }
        for (&rep, &id) in &node_for {
            if id == root {
                continue;
            }
            let p = builder.parent_of(rep).map_or(root, |p| node_for[&p]);
            self.sti.set_parent(id, Some(p));
        }
        Ok(dissolved.len() + work.nodes_processed)
    }

    /// Subcores in the subtree of `r` with an in-arc from below `r.k`.
    fn scan_boundary(&mut self, r: NodeId) -> HashSet<DagId> {
        let k = self.sti.node(r).k();
        let mut out = HashSet::default();
        let mut seen = HashSet::default();
        let mut stack = vec![r];
        while let Some(id) = stack.pop() {
            self.steps += 1;
            let node = self.sti.node(id);
            for &v in node.vertices() {
                let d = self.dag.label(v);
                if seen.insert(d) && self.dag.node(d).inn.iter().any(|&a| self.dag.node(a).level < k) {
                    out.insert(d);
                }
            }
            stack.extend(node.children());
        }
        out
    }

    /// Full consistency check: coreness against peeling, DAG against the
    /// graph, tree structure, links and cached boundaries.
    pub fn check_invariants(&mut self) -> Result<()> {
        self.sync_dag()?;
        let fresh = peel(&self.graph);
        if fresh.as_slice() != self.kappa.as_slice() {
            return Err(StiError::Integrity("maintained coreness differs from peeling".into()));
        }
        if fresh.rho() != self.kappa.rho() {
            return Err(StiError::Integrity("degeneracy out of date".into()));
        }
        self.dag.check(&self.graph, &self.kappa)?;
        self.sti.check(Some(&self.kappa))?;
        if self.sti.vertex_count() != self.graph.n() {
            return Err(StiError::Integrity("vertex map size differs from graph".into()));
        }
        for id in self.sti.node_ids().collect::<Vec<_>>() {
            if id == self.sti.root() {
                continue;
            }
            if let Some(cached) = self.sti.node(id).boundary.clone() {
                let actual = self.scan_boundary(id);
                if let Some(missing) = actual.iter().find(|d| !cached.contains(d)) {
                    return Err(StiError::Integrity(format!(
                        "boundary cache of tree node {} lacks subcore {}",
                        id.0, missing.0
                    )));
                }
            }
        }
        Ok(())
    }
}

fn delta_between(before: &CorenessMap, after: &CorenessMap) -> DeltaSet {
    let changed = (0..after.len())
        .filter_map(|v| {
            let old = if v < before.len() { before.get(v) } else { 0 };
            let d = after.get(v) as i32 - old as i32;
            (d != 0).then_some((v, d))
        })
        .collect();
    DeltaSet { changed }
}
