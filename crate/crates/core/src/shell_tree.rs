// SPDX-License-Identifier: Apache-2.0

//! The shell tree index: a rooted tree whose nodes are k-shells ordered by
//! core containment, plus the map from each vertex to its shell.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::coreness::CorenessMap;
use crate::error::{Result, StiError};
use crate::graph::{Graph, IdMap, VertexId};
use crate::subcore_dag::{DagId, SubcoreDag};
use crate::{HashMap, HashSet};

pub(crate) mod build;

pub use build::{BuildWork, ShellTreeBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Default)]
pub struct TreeNode {
    k: u32,
    vertices: Vec<VertexId>,
    parent: Option<NodeId>,
    children: HashSet<NodeId>,
    /// Subcores inside this subtree with an arc from a level below `k`;
    /// `None` when unknown.
    pub(crate) boundary: Option<HashSet<DagId>>,
}

impl TreeNode {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn parent(&self) -> Option<NodeId> {
        self.parent
    }

    pub fn children(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.children.iter().copied()
    }

    pub fn child_count(&self) -> usize {
        self.children.len()
    }
}

/// Outcome of a core query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoreQuery {
    Found(Vec<VertexId>),
    /// The vertex exists but lies in no core of the requested level.
    NotInCore,
}

/// Core query result with the number of tree nodes the traversal touched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreTrace {
    pub result: CoreQuery,
    pub nodes_visited: usize,
    pub nodes_emitted: usize,
}

/// One node of a hierarchy snapshot. `parent` indexes into the snapshot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnapshotNode {
    pub k: u32,
    pub parent: Option<usize>,
    pub vertices: Vec<VertexId>,
}

#[derive(Debug, Clone)]
pub struct Sti {
    nodes: Vec<Option<TreeNode>>,
    free: Vec<u32>,
    root: NodeId,
    node_of: Vec<NodeId>,
    pos: Vec<u32>,
}

impl Default for Sti {
    fn default() -> Self {
        Sti::new()
    }
}

impl Sti {
    /// Tree holding only the root.
    pub fn new() -> Self {
        let root = TreeNode { boundary: Some(HashSet::default()), ..Default::default() };
        Sti { nodes: vec![Some(root)], free: Vec::new(), root: NodeId(0), node_of: Vec::new(), pos: Vec::new() }
    }

    /// Peel, subcore DAG and heap-based tree construction from scratch.
    pub fn from_scratch(g: &Graph) -> Result<(Sti, CorenessMap, SubcoreDag)> {
        let kappa = crate::coreness::peel(g);
        let dag = SubcoreDag::build(g, &kappa)?;
        let (sti, _) = Sti::build(&dag, g.n())?;
        Ok((sti, kappa, dag))
    }

    /// Builds the tree for a DAG covering `n` vertices.
    pub fn build(dag: &SubcoreDag, n: usize) -> Result<(Sti, BuildWork)> {
        ShellTreeBuilder::from_dag(dag)?.finish_fresh(dag, n)
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        self.nodes[id.index()].as_ref().expect("live tree node")
    }

    pub(crate) fn node_mut(&mut self, id: NodeId) -> &mut TreeNode {
        self.nodes[id.index()].as_mut().expect("live tree node")
    }

    pub fn is_live(&self, id: NodeId) -> bool {
        self.nodes.get(id.index()).is_some_and(|n| n.is_some())
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().enumerate().filter(|(_, n)| n.is_some()).map(|(i, _)| NodeId(i as u32))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len() - self.free.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.node_of.len()
    }

    /// The reverse map M.
    #[inline]
    pub fn node_of(&self, v: VertexId) -> NodeId {
        self.node_of[v]
    }

    /// Distinct subcores whose members sit in `id`.
    pub fn dag_links(&self, id: NodeId, dag: &SubcoreDag) -> BTreeSet<DagId> {
        self.node(id).vertices.iter().map(|&v| dag.label(v)).collect()
    }

    // ---- primitives -------------------------------------------------------

    pub(crate) fn new_node(&mut self, k: u32, parent: Option<NodeId>) -> NodeId {
        let node = TreeNode { k, parent, ..Default::default() };
        let id = match self.free.pop() {
            Some(i) => {
                self.nodes[i as usize] = Some(node);
                NodeId(i)
            }
            None => {
                self.nodes.push(Some(node));
                NodeId(self.nodes.len() as u32 - 1)
            }
        };
        if let Some(p) = parent {
            self.node_mut(p).children.insert(id);
        }
        id
    }

    /// Removes an emptied node. Its children must have been moved already.
    pub(crate) fn free_node(&mut self, id: NodeId) {
        let node = self.nodes[id.index()].take().expect("live tree node");
        debug_assert!(node.children.is_empty() && id != self.root);
        if let Some(p) = node.parent {
            if let Some(pn) = self.nodes[p.index()].as_mut() {
                pn.children.remove(&id);
            }
        }
        self.free.push(id.0);
    }

    /// Drops a node without touching its vertices' map entries or children;
    /// used when a whole region is torn down and rebuilt.
    pub(crate) fn discard_node(&mut self, id: NodeId) -> TreeNode {
        let node = self.nodes[id.index()].take().expect("live tree node");
        self.free.push(id.0);
        node
    }

    pub(crate) fn grow_to(&mut self, n: usize) {
        while self.node_of.len() < n {
            let v = self.node_of.len();
            self.node_of.push(self.root);
            self.pos.push(0);
            self.push_vertex(self.root, v);
        }
    }

    pub(crate) fn push_vertex(&mut self, id: NodeId, v: VertexId) {
        let node = self.nodes[id.index()].as_mut().expect("live tree node");
        self.pos[v] = node.vertices.len() as u32;
        node.vertices.push(v);
        self.node_of[v] = id;
    }

    /// Takes `v` out of its node's vertex list; the map entry is left for
    /// the caller to overwrite.
    pub(crate) fn pull_vertex(&mut self, v: VertexId) {
        let id = self.node_of[v];
        let at = self.pos[v] as usize;
        let node = self.nodes[id.index()].as_mut().expect("live tree node");
        debug_assert_eq!(node.vertices[at], v);
        node.vertices.swap_remove(at);
        if let Some(&moved) = node.vertices.get(at) {
            self.pos[moved] = at as u32;
        }
    }

    pub(crate) fn move_vertex(&mut self, v: VertexId, to: NodeId) {
        if self.node_of[v] != to {
            self.pull_vertex(v);
            self.push_vertex(to, v);
        }
    }

    pub(crate) fn set_k(&mut self, id: NodeId, k: u32) {
        self.node_mut(id).k = k;
    }

    /// Folds `from` into `into`: vertices, children and the map move over and
    /// `from` disappears. Both nodes must sit at the same level.
    pub fn merge(&mut self, into: NodeId, from: NodeId) -> Result<()> {
        if into == from {
            return Ok(());
        }
        let (ki, kf) = (self.node(into).k, self.node(from).k);
        if ki != kf {
            return Err(StiError::LevelMismatch(ki, kf));
        }
        let verts = std::mem::take(&mut self.node_mut(from).vertices);
        for v in verts {
            self.push_vertex(into, v);
        }
        let kids: Vec<NodeId> = self.node_mut(from).children.drain().collect();
        for c in kids {
            if c != into {
                self.node_mut(c).parent = Some(into);
                self.node_mut(into).children.insert(c);
            }
        }
        if self.node(into).parent == Some(from) {
            let p = self.node(from).parent;
            self.set_parent(into, p);
        }
        self.free_node(from);
        Ok(())
    }

    /// Re-hangs `child` under `new_parent`. Levels must increase downward.
    pub fn make_child(&mut self, new_parent: NodeId, child: NodeId) -> Result<()> {
        let (kp, kc) = (self.node(new_parent).k, self.node(child).k);
        if kp >= kc {
            return Err(StiError::Integrity(format!("cannot hang level-{kc} node under level-{kp} node")));
        }
        self.set_parent(child, Some(new_parent));
        Ok(())
    }

    /// Moves the child link `old_parent -> child` to `new_parent -> child`.
    pub fn move_edge(&mut self, old_parent: NodeId, child: NodeId, new_parent: NodeId) -> Result<()> {
        if self.node(child).parent != Some(old_parent) {
            return Err(StiError::Integrity(format!("node {} is not a child of {}", child.0, old_parent.0)));
        }
        self.make_child(new_parent, child)
    }

    pub(crate) fn set_parent(&mut self, child: NodeId, parent: Option<NodeId>) {
        if let Some(old) = self.node(child).parent {
            if let Some(n) = self.nodes[old.index()].as_mut() {
                n.children.remove(&child);
            }
        }
        self.node_mut(child).parent = parent;
        if let Some(p) = parent {
            self.node_mut(p).children.insert(child);
        }
    }

    /// Forgets cached boundary sets from `id` up to the root.
    pub(crate) fn invalidate_up(&mut self, id: NodeId) {
        let mut cur = Some(id);
        while let Some(c) = cur {
            if c == self.root {
                break;
            }
            let node = self.node_mut(c);
            node.boundary = None;
            cur = node.parent;
        }
    }

    // ---- queries ----------------------------------------------------------

    /// Coreness of `u`: the level of its shell.
    pub fn query_k(&self, u: VertexId) -> Result<u32> {
        self.check_vertex(u)?;
        Ok(self.node(self.node_of[u]).k)
    }

    fn check_vertex(&self, u: VertexId) -> Result<()> {
        if u >= self.node_of.len() {
            return Err(StiError::UnknownVertex(u as u64));
        }
        Ok(())
    }

    /// The connected k-core containing `u`.
    pub fn query_core(&self, u: VertexId, k: u32) -> Result<CoreQuery> {
        Ok(self.query_core_traced(u, k)?.result)
    }

    /// Like [`Sti::query_core`], also reporting how many tree nodes were
    /// touched. Climbs while the parent is at least `k`, then enumerates the
    /// subtree. At `k = 0` the climb stops below the root, so the answer is
    /// the connected component of `u`.
    pub fn query_core_traced(&self, u: VertexId, k: u32) -> Result<CoreTrace> {
        self.check_vertex(u)?;
        let start = self.node_of[u];
        let mut visited = 1;
        if self.node(start).k < k {
            return Ok(CoreTrace { result: CoreQuery::NotInCore, nodes_visited: visited, nodes_emitted: 0 });
        }
        if start == self.root {
            return Ok(CoreTrace { result: CoreQuery::Found(vec![u]), nodes_visited: visited, nodes_emitted: 1 });
        }
        let mut top = start;
        while let Some(p) = self.node(top).parent {
            visited += 1;
            if p == self.root || self.node(p).k < k {
                break;
            }
            top = p;
        }
        let mut out = Vec::new();
        let mut emitted = 0;
        let mut stack = vec![top];
        while let Some(id) = stack.pop() {
            visited += 1;
            emitted += 1;
            let node = self.node(id);
            out.extend_from_slice(&node.vertices);
            stack.extend(node.children.iter().copied());
        }
        // nodes on the upward path were counted once climbing and once
        // enumerating
        Ok(CoreTrace { result: CoreQuery::Found(out), nodes_visited: visited, nodes_emitted: emitted })
    }

    /// Every node once, parents first, children ordered by
    /// `(k, smallest label)` where labels come from `label`.
    pub fn snapshot_by(&self, label: impl Fn(VertexId) -> u64) -> Vec<SnapshotNode> {
        let mut out = Vec::with_capacity(self.node_count());
        let key = |id: NodeId| {
            let n = self.node(id);
            (n.k, n.vertices.iter().map(|&v| label(v)).min().unwrap_or(u64::MAX), id)
        };
        let mut stack: Vec<(NodeId, Option<usize>)> = vec![(self.root, None)];
        while let Some((id, parent)) = stack.pop() {
            let idx = out.len();
            let node = self.node(id);
            let mut vs = node.vertices.clone();
            vs.sort_by_key(|&v| label(v));
            out.push(SnapshotNode { k: node.k, parent, vertices: vs });
            let mut kids: Vec<_> = node.children.iter().map(|&c| key(c)).collect();
            kids.sort_unstable();
            // reversed so the smallest key is emitted first
            for (_, _, c) in kids.into_iter().rev() {
                stack.push((c, Some(idx)));
            }
        }
        out
    }

    pub fn query_hierarchy(&self) -> Vec<SnapshotNode> {
        self.snapshot_by(|v| v as u64)
    }

    /// `NODE id k parent_id v1 v2 ...`, root first with parent `-1`,
    /// vertices written as original ids.
    pub fn dump(&self, ids: &IdMap) -> String {
        let snap = self.snapshot_by(|v| ids.original(v));
        let mut s = String::new();
        for (i, n) in snap.iter().enumerate() {
            let parent = n.parent.map_or(-1, |p| p as i64);
            let _ = write!(s, "NODE {i} {} {parent}", n.k);
            for &v in &n.vertices {
                let _ = write!(s, " {}", ids.original(v));
            }
            s.push('\n');
        }
        s
    }

    /// Rebuilds tree and vertex map from [`Sti::dump`] output.
    pub fn load(text: &str) -> Result<(Sti, IdMap)> {
        let mut ids = IdMap::new();
        let mut sti = Sti::new();
        let mut by_file: HashMap<i64, NodeId> = HashMap::default();
        let mut placed: Vec<(VertexId, NodeId)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let perr = |msg: &str| StiError::Parse { line: line_no, msg: msg.to_string() };
            let mut tok = t.split_whitespace();
            if tok.next() != Some("NODE") {
                return Err(perr("expected NODE record"));
            }
            let mut num = |what: &str| -> Result<i64> {
                tok.next()
                    .and_then(|x| x.parse::<i64>().ok())
                    .ok_or_else(|| perr(&format!("missing or invalid {what}")))
            };
            let file_id = num("node id")?;
            let k = num("level")?;
            let parent = num("parent id")?;
            if k < 0 {
                return Err(perr("negative level"));
            }
            let id = if parent < 0 {
                if by_file.values().any(|&n| n == sti.root) {
                    return Err(perr("second root"));
                }
                if k != 0 {
                    return Err(perr("root must have level 0"));
                }
                sti.root
            } else {
                let p = *by_file.get(&parent).ok_or_else(|| perr("parent not defined before child"))?;
                if sti.node(p).k >= k as u32 {
                    return Err(perr("child level must exceed parent level"));
                }
                sti.new_node(k as u32, Some(p))
            };
            by_file.insert(file_id, id);
            for v in tok {
                let orig = v.parse::<u64>().map_err(|_| perr("invalid vertex id"))?;
                if ids.dense(orig).is_some() {
                    return Err(perr("vertex listed twice"));
                }
                placed.push((ids.intern(orig), id));
            }
        }
        sti.node_of = vec![sti.root; ids.len()];
        sti.pos = vec![0; ids.len()];
        for (v, id) in placed {
            sti.push_vertex(id, v);
        }
        for id in sti.node_ids().collect::<Vec<_>>() {
            if id != sti.root {
                sti.node_mut(id).boundary = None;
            }
        }
        Ok((sti, ids))
    }

    /// Structural checks: single rooted tree, levels strictly increasing
    /// downward, non-root nodes non-empty, size bounds, map consistent with
    /// node contents and, when given, with coreness.
    pub fn check(&self, kappa: Option<&CorenessMap>) -> Result<()> {
        let fail = |m: String| Err(StiError::Integrity(m));
        let n = self.node_of.len();
        if self.node(self.root).k != 0 || self.node(self.root).parent.is_some() {
            return fail("root must be level 0 without parent".into());
        }
        let mut seen_vertices = 0;
        for id in self.node_ids() {
            let node = self.node(id);
            seen_vertices += node.vertices.len();
            if id != self.root {
                if node.vertices.is_empty() {
                    return fail(format!("non-root node {} is empty", id.0));
                }
                let Some(p) = node.parent else {
                    return fail(format!("non-root node {} has no parent", id.0));
                };
                if !self.is_live(p) || !self.node(p).children.contains(&id) {
                    return fail(format!("node {} missing from its parent's children", id.0));
                }
                if self.node(p).k >= node.k {
                    return fail(format!("level does not increase from {} to {}", p.0, id.0));
                }
            }
            for &c in &node.children {
                if !self.is_live(c) || self.node(c).parent != Some(id) {
                    return fail(format!("child link {} -> {} not mirrored", id.0, c.0));
                }
            }
            for (i, &v) in node.vertices.iter().enumerate() {
                if self.node_of[v] != id || self.pos[v] as usize != i {
                    return fail(format!("vertex {v} map entry disagrees with node {}", id.0));
                }
                if let Some(kappa) = kappa {
                    if kappa.get(v) != node.k {
                        return fail(format!("vertex {v} has coreness {} in level-{} node", kappa.get(v), node.k));
                    }
                }
            }
        }
        if seen_vertices != n {
            return fail(format!("nodes hold {seen_vertices} vertices, expected {n}"));
        }
        let count = self.node_count();
        if count > n + 1 {
            return fail(format!("{count} nodes for {n} vertices"));
        }
        // reachability from the root rules out cycles among parent links
        let mut reached = 0;
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            reached += 1;
            if reached > count {
                return fail("cycle in child links".into());
            }
            stack.extend(self.node(id).children.iter().copied());
        }
        if reached != count {
            return fail(format!("{reached} of {count} nodes reachable from the root"));
        }
        Ok(())
    }

    /// Number of parent links.
    pub fn edge_count(&self) -> usize {
        self.node_count() - 1
    }
}
