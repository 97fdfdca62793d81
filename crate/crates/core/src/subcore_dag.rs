// SPDX-License-Identifier: Apache-2.0

//! The subcore DAG: vertices grouped into maximal connected regions of equal
//! coreness, with an arc from each region to every strictly-higher region it
//! touches.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::coreness::CorenessMap;
use crate::error::{Result, StiError};
use crate::graph::{Graph, VertexId};
use crate::{HashMap, HashSet};

/// Nodes as `(k, sorted members)` in canonical order, plus arcs between their indices.
pub type DagSignature = (Vec<(u32, Vec<VertexId>)>, Vec<(usize, usize)>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DagId(pub u32);

impl DagId {
    const NONE: DagId = DagId(u32::MAX);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Default)]
pub struct DagNode {
    pub level: u32,
    pub members: Vec<VertexId>,
    /// Arcs to strictly higher levels.
    pub out: HashSet<DagId>,
    /// Arcs from strictly lower levels.
    pub inn: HashSet<DagId>,
}

#[derive(Debug, Clone, Default)]
pub struct SubcoreDag {
    nodes: Vec<Option<DagNode>>,
    label: Vec<DagId>,
    live: usize,
}

/// What [`SubcoreDag::rebuild_region`] changed.
#[derive(Debug, Clone, Default)]
pub struct RegionChange {
    /// Nodes that were replaced, with their former members.
    pub removed: Vec<(DagId, Vec<VertexId>)>,
    pub created: Vec<DagId>,
    /// Vertices reassigned to fresh nodes.
    pub visited: usize,
}

impl SubcoreDag {
    /// One label-propagating BFS per unlabelled vertex, then one pass over
    /// the edges to emit low-to-high arcs.
    pub fn build(g: &Graph, kappa: &CorenessMap) -> Result<Self> {
        if kappa.len() != g.n() {
            return Err(StiError::Integrity(format!("coreness has {} entries for {} vertices", kappa.len(), g.n())));
        }
        let mut dag = SubcoreDag { nodes: Vec::new(), label: vec![DagId::NONE; g.n()], live: 0 };
        let mut queue = VecDeque::new();
        for v in g.vertices() {
            if dag.label[v] != DagId::NONE {
                continue;
            }
            let level = kappa.get(v);
            let id = dag.alloc(level);
            dag.label[v] = id;
            let mut members = vec![v];
            queue.push_back(v);
            while let Some(x) = queue.pop_front() {
                for &w in g.adj(x) {
                    if dag.label[w] == DagId::NONE && kappa.get(w) == level {
                        dag.label[w] = id;
                        members.push(w);
                        queue.push_back(w);
                    }
                }
            }
            dag.node_mut(id).members = members;
        }
        for (u, v) in g.edges() {
            let (a, b) = (dag.label[u], dag.label[v]);
            if a != b {
                dag.link(a, b)?;
            }
        }
        Ok(dag)
    }

    fn alloc(&mut self, level: u32) -> DagId {
        let id = DagId(self.nodes.len() as u32);
        self.nodes.push(Some(DagNode { level, ..Default::default() }));
        self.live += 1;
        id
    }

    /// Adds the arc between two distinct nodes, oriented low to high.
    fn link(&mut self, a: DagId, b: DagId) -> Result<()> {
        let (la, lb) = (self.node(a).level, self.node(b).level);
        let (lo, hi) = match la.cmp(&lb) {
            std::cmp::Ordering::Less => (a, b),
            std::cmp::Ordering::Greater => (b, a),
            std::cmp::Ordering::Equal => {
                return Err(StiError::Integrity(format!("adjacent subcores {} and {} share level {la}", a.0, b.0)))
            }
        };
        self.node_mut(lo).out.insert(hi);
        self.node_mut(hi).inn.insert(lo);
        Ok(())
    }

    pub fn node(&self, id: DagId) -> &DagNode {
        self.nodes[id.index()].as_ref().expect("live dag node")
    }

    fn node_mut(&mut self, id: DagId) -> &mut DagNode {
        self.nodes[id.index()].as_mut().expect("live dag node")
    }

    pub fn get(&self, id: DagId) -> Option<&DagNode> {
        self.nodes.get(id.index()).and_then(|n| n.as_ref())
    }

    pub fn is_live(&self, id: DagId) -> bool {
        self.get(id).is_some()
    }

    #[inline]
    pub fn label(&self, v: VertexId) -> DagId {
        self.label[v]
    }

    pub fn node_count(&self) -> usize {
        self.live
    }

    pub fn edge_count(&self) -> usize {
        self.iter().map(|(_, n)| n.out.len()).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (DagId, &DagNode)> {
        self.nodes.iter().enumerate().filter_map(|(i, n)| n.as_ref().map(|n| (DagId(i as u32), n)))
    }

    pub fn sinks(&self) -> impl Iterator<Item = DagId> + '_ {
        self.iter().filter(|(_, n)| n.out.is_empty()).map(|(id, _)| id)
    }

    /// Registers new isolated vertices as level-0 singleton nodes.
    pub fn grow_to(&mut self, n: usize) {
        while self.label.len() < n {
            let v = self.label.len();
            let id = self.alloc(0);
            self.node_mut(id).members.push(v);
            self.label.push(id);
        }
    }

    /// Recomputes the subcores of `seeds` against the current graph and
    /// coreness. Any old node that loses a member is retired and all of its
    /// members are recomputed too, so the result is again a partition into
    /// maximal subcores. Arcs of new nodes are re-derived from adjacency.
    pub fn rebuild_region(&mut self, g: &Graph, kappa: &CorenessMap, seeds: &[VertexId]) -> Result<RegionChange> {
        self.grow_to(g.n());
        let first_new = self.nodes.len();
        let is_new = |id: DagId| id.index() >= first_new;
        let mut change = RegionChange::default();
        let mut retired: HashSet<DagId> = HashSet::default();
        let mut work: Vec<VertexId> = seeds.to_vec();
        let mut queue = VecDeque::new();

        while let Some(s) = work.pop() {
            if is_new(self.label[s]) {
                continue;
            }
            let level = kappa.get(s);
            let id = self.alloc(level);
            change.created.push(id);
            let mut members = Vec::new();
            self.claim(s, id, &mut members, &mut retired, &mut work, &is_new);
            queue.push_back(s);
            while let Some(x) = queue.pop_front() {
                for &w in g.adj(x) {
                    if kappa.get(w) == level && !is_new(self.label[w]) {
                        self.claim(w, id, &mut members, &mut retired, &mut work, &is_new);
                        queue.push_back(w);
                    }
                }
            }
            change.visited += members.len();
            self.node_mut(id).members = members;
        }

        let mut retired: Vec<DagId> = retired.into_iter().collect();
        retired.sort_unstable();
        for id in retired {
            let node = self.nodes[id.index()].take().expect("retired node live");
            self.live -= 1;
            for o in &node.out {
                if let Some(n) = self.nodes[o.index()].as_mut() {
                    n.inn.remove(&id);
                }
            }
            for i in &node.inn {
                if let Some(n) = self.nodes[i.index()].as_mut() {
                    n.out.remove(&id);
                }
            }
            change.removed.push((id, node.members));
        }

        for &id in &change.created {
            let members = std::mem::take(&mut self.node_mut(id).members);
            for &w in &members {
                for &x in g.adj(w) {
                    let other = self.label[x];
                    if other != id {
                        self.link(id, other)?;
                    }
                }
            }
            self.node_mut(id).members = members;
        }
        Ok(change)
    }

    fn claim(
        &mut self,
        v: VertexId,
        id: DagId,
        members: &mut Vec<VertexId>,
        retired: &mut HashSet<DagId>,
        work: &mut Vec<VertexId>,
        is_new: &impl Fn(DagId) -> bool,
    ) {
        let old = self.label[v];
        if !is_new(old) && retired.insert(old) {
            work.extend(self.node(old).members.iter().copied());
        }
        self.label[v] = id;
        members.push(v);
    }

    /// Canonical form: nodes as `(level, sorted members)` in sorted order,
    /// arcs as index pairs into that order.
    pub fn signature(&self) -> DagSignature {
        let mut nodes: Vec<(u32, Vec<VertexId>, DagId)> = self
            .iter()
            .map(|(id, n)| {
                let mut m = n.members.clone();
                m.sort_unstable();
                (n.level, m, id)
            })
            .collect();
        nodes.sort();
        let pos: HashMap<DagId, usize> = nodes.iter().enumerate().map(|(i, n)| (n.2, i)).collect();
        let mut arcs: Vec<(usize, usize)> = self
            .iter()
            .flat_map(|(id, n)| n.out.iter().map(move |o| (id, *o)))
            .map(|(a, b)| (pos[&a], pos[&b]))
            .collect();
        arcs.sort_unstable();
        (nodes.into_iter().map(|(l, m, _)| (l, m)).collect(), arcs)
    }

    /// `NODE id level v1 v2 ...` and `ARC a b` lines, ids taken from the
    /// canonical order.
    pub fn dump(&self) -> String {
        let (nodes, arcs) = self.signature();
        let mut s = String::new();
        for (i, (level, members)) in nodes.iter().enumerate() {
            let _ = write!(s, "NODE {i} {level}");
            for v in members {
                let _ = write!(s, " {v}");
            }
            s.push('\n');
        }
        for (a, b) in arcs {
            let _ = writeln!(s, "ARC {a} {b}");
        }
        s
    }

    /// Verifies partition, labels, maximality and arc set against `g`.
    pub fn check(&self, g: &Graph, kappa: &CorenessMap) -> Result<()> {
        let fail = |m: String| Err(StiError::Integrity(m));
        if self.label.len() != g.n() {
            return fail(format!("{} labels for {} vertices", self.label.len(), g.n()));
        }
        let mut covered = 0;
        for (id, n) in self.iter() {
            covered += n.members.len();
            if n.members.is_empty() {
                return fail(format!("dag node {} is empty", id.0));
            }
            for &v in &n.members {
                if self.label[v] != id {
                    return fail(format!("vertex {v} listed in {} but labelled {}", id.0, self.label[v].0));
                }
                if kappa.get(v) != n.level {
                    return fail(format!("vertex {v} has coreness {} in level-{} node", kappa.get(v), n.level));
                }
            }
            let member_set: HashSet<VertexId> = n.members.iter().copied().collect();
            let reach = {
                let mut seen = HashSet::from_iter([n.members[0]]);
                let mut q = VecDeque::from([n.members[0]]);
                while let Some(x) = q.pop_front() {
                    for &w in g.adj(x) {
                        if member_set.contains(&w) && seen.insert(w) {
                            q.push_back(w);
                        }
                    }
                }
                seen.len()
            };
            if reach != n.members.len() {
                return fail(format!("dag node {} is not connected", id.0));
            }
            for &o in &n.out {
                if self.node(o).level <= n.level {
                    return fail(format!("arc {} -> {} does not increase level", id.0, o.0));
                }
                if !self.node(o).inn.contains(&id) {
                    return fail(format!("arc {} -> {} missing reverse entry", id.0, o.0));
                }
            }
        }
        if covered != g.n() {
            return fail(format!("dag nodes cover {covered} of {} vertices", g.n()));
        }
        let mut expect: HashSet<(DagId, DagId)> = HashSet::default();
        for (u, v) in g.edges() {
            let (a, b) = (self.label[u], self.label[v]);
            if a != b {
                if self.node(a).level == self.node(b).level {
                    return fail(format!("subcores {} and {} are adjacent at one level", a.0, b.0));
                }
                expect.insert(if self.node(a).level < self.node(b).level { (a, b) } else { (b, a) });
            }
        }
        let have: HashSet<(DagId, DagId)> =
            self.iter().flat_map(|(id, n)| n.out.iter().map(move |o| (id, *o))).collect();
        if have != expect {
            return fail(format!("arc set mismatch: {} stored, {} derived", have.len(), expect.len()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coreness::{peel, PeelWork};
    use crate::graph::{ChangeBatch, EdgeChange};

    fn clique(vs: &[VertexId]) -> Vec<(VertexId, VertexId)> {
        let mut e = Vec::new();
        for (i, &a) in vs.iter().enumerate() {
            for &b in &vs[i + 1..] {
                e.push((a, b));
            }
        }
        e
    }

    fn dag_of(g: &Graph) -> SubcoreDag {
        SubcoreDag::build(g, &peel(g)).unwrap()
    }

    #[test]
    fn triangle_is_one_subcore() {
        let g = Graph::from_edges(3, clique(&[0, 1, 2]));
        let (nodes, arcs) = dag_of(&g).signature();
        assert_eq!(nodes, vec![(2, vec![0, 1, 2])]);
        assert!(arcs.is_empty());
    }

    #[test]
    fn middle_vertex_points_at_both_cliques() {
        let mut e = clique(&[0, 1, 2, 3]);
        e.extend(clique(&[4, 5, 6, 7]));
        e.extend([(8, 0), (8, 4)]);
        let g = Graph::from_edges(9, e);
        let dag = dag_of(&g);
        let (nodes, arcs) = dag.signature();
        assert_eq!(nodes, vec![(2, vec![8]), (3, vec![0, 1, 2, 3]), (3, vec![4, 5, 6, 7])]);
        assert_eq!(arcs, vec![(0, 1), (0, 2)]);
        let mut sinks: Vec<u32> = dag.sinks().map(|d| dag.node(d).level).collect();
        sinks.sort_unstable();
        assert_eq!(sinks, vec![3, 3]);
        dag.check(&g, &peel(&g)).unwrap();
    }

    #[test]
    fn equal_level_bridge_vertex_joins_the_subcore() {
        // 3-clique {0,1,2}, 4-clique {3..6}, one edge between them, and x = 7
        // touching both
        let mut e = clique(&[0, 1, 2]);
        e.extend(clique(&[3, 4, 5, 6]));
        e.extend([(2, 3), (7, 0), (7, 4)]);
        let g = Graph::from_edges(8, e);
        let k = peel(&g);
        assert_eq!(k.as_slice(), &[2, 2, 2, 3, 3, 3, 3, 2]);
        let (nodes, arcs) = dag_of(&g).signature();
        // x joins the 3-clique's subcore at level 2
        assert_eq!(nodes, vec![(2, vec![0, 1, 2, 7]), (3, vec![3, 4, 5, 6])]);
        assert_eq!(arcs, vec![(0, 1)]);
    }

    #[test]
    fn directed_triangle_pattern() {
        // K4 {0..3} and K5 {4..8} joined by one edge; x = 9 touches both
        let mut e = clique(&[0, 1, 2, 3]);
        e.extend(clique(&[4, 5, 6, 7, 8]));
        e.extend([(3, 4), (9, 0), (9, 5)]);
        let g = Graph::from_edges(10, e);
        let (nodes, arcs) = dag_of(&g).signature();
        assert_eq!(nodes, vec![(2, vec![9]), (3, vec![0, 1, 2, 3]), (4, vec![4, 5, 6, 7, 8])]);
        assert_eq!(arcs, vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn closing_k4_replaces_the_subcore() {
        let mut g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]);
        let mut k = peel(&g);
        let mut dag = SubcoreDag::build(&g, &k).unwrap();
        let batch = ChangeBatch::new(vec![EdgeChange::insert(2, 3)]);
        let d = k.maintain(&mut g, &batch, &mut PeelWork::default()).unwrap();
        let mut seeds = vec![2, 3];
        seeds.extend(d.vertices());
        let change = dag.rebuild_region(&g, &k, &seeds).unwrap();
        assert_eq!(change.created.len(), 1);
        assert_eq!(change.removed.len(), 1);
        assert_eq!(dag.signature(), dag_of(&g).signature());
        assert_eq!(dag.signature().0, vec![(3, vec![0, 1, 2, 3])]);
    }

    #[test]
    fn bridge_merges_two_triangles() {
        let mut e = clique(&[0, 1, 2]);
        e.extend(clique(&[3, 4, 5]));
        let mut g = Graph::from_edges(6, e);
        let k = peel(&g);
        let mut dag = SubcoreDag::build(&g, &k).unwrap();
        assert_eq!(dag.node_count(), 2);
        g.insert_edge(2, 3).unwrap();
        dag.rebuild_region(&g, &k, &[2, 3]).unwrap();
        assert_eq!(dag.node_count(), 1);
        assert_eq!(dag.signature(), dag_of(&g).signature());
        dag.check(&g, &k).unwrap();
    }

    #[test]
    fn inverse_pair_leaves_dag_isomorphic() {
        let mut g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 0), (2, 3)]);
        let mut k = peel(&g);
        let mut dag = SubcoreDag::build(&g, &k).unwrap();
        let before = dag.signature();
        let batch = ChangeBatch::new(vec![EdgeChange::insert(3, 4), EdgeChange::delete(3, 4)]);
        let d = k.maintain(&mut g, &batch, &mut PeelWork::default()).unwrap();
        let mut seeds = batch.endpoints();
        seeds.extend(d.vertices());
        dag.rebuild_region(&g, &k, &seeds).unwrap();
        assert_eq!(dag.signature(), before);
    }

    #[test]
    fn dump_lists_nodes_then_arcs() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 0), (2, 3)]);
        assert_eq!(dag_of(&g).dump(), "NODE 0 1 3\nNODE 1 2 0 1 2\nARC 0 1\n");
    }

    #[test]
    fn equal_level_arc_is_rejected() {
        let g = Graph::from_edges(2, [(0, 1)]);
        let mut dag = dag_of(&g);
        let a = dag.label(0);
        assert!(dag.link(a, a).is_err());
    }
}
