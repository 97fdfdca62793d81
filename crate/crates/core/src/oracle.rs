// SPDX-License-Identifier: Apache-2.0

//! Brute-force references used to referee the fast paths.
//!
//! Nothing here shares code with peeling, the subcore DAG or the shell tree
//! builder: only degree arrays and breadth-first search over [`Graph`].

use std::collections::{BTreeSet, VecDeque};

use crate::graph::{Graph, IdMap, VertexId};
use crate::shell_tree::{NodeId, Sti};

/// A node's level and labels, with its parent's when it has one.
type Entry = (u32, Vec<u64>, Option<(u32, Vec<u64>)>);

/// Coreness by repeatedly deleting a minimum-degree vertex. Quadratic.
pub fn naive_coreness(g: &Graph) -> Vec<u32> {
    let n = g.n();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut alive = vec![true; n];
    let mut kappa = vec![0u32; n];
    let mut level = 0usize;
    for _ in 0..n {
        let v = (0..n).filter(|&v| alive[v]).min_by_key(|&v| (deg[v], v)).unwrap();
        level = level.max(deg[v]);
        kappa[v] = level as u32;
        alive[v] = false;
        for &w in g.adj(v) {
            if alive[w] {
                deg[w] -= 1;
            }
        }
    }
    kappa
}

/// Vertices that survive iterated removal of degree < `k` vertices.
fn k_core_survivors(g: &Graph, k: usize) -> Vec<bool> {
    let n = g.n();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut alive = vec![true; n];
    let mut changed = true;
    while changed {
        changed = false;
        for v in 0..n {
            if alive[v] && deg[v] < k {
                alive[v] = false;
                changed = true;
                for &w in g.adj(v) {
                    if alive[w] {
                        deg[w] -= 1;
                    }
                }
            }
        }
    }
    alive
}

fn bfs_within(g: &Graph, start: VertexId, keep: impl Fn(VertexId) -> bool) -> BTreeSet<VertexId> {
    let mut seen = BTreeSet::new();
    if !keep(start) {
        return seen;
    }
    seen.insert(start);
    let mut q = VecDeque::from([start]);
    while let Some(x) = q.pop_front() {
        for &y in g.adj(x) {
            if keep(y) && seen.insert(y) {
                q.push_back(y);
            }
        }
    }
    seen
}

/// The connected k-core containing `u`, or empty when `u` is in none.
pub fn naive_core(g: &Graph, u: VertexId, k: u32) -> BTreeSet<VertexId> {
    let alive = k_core_survivors(g, k as usize);
    bfs_within(g, u, |x| alive[x])
}

/// Same set computed from coreness values: component of `u` among
/// vertices with coreness at least `k`.
pub fn core_from_coreness(g: &Graph, kappa: &[u32], u: VertexId, k: u32) -> BTreeSet<VertexId> {
    bfs_within(g, u, |x| kappa[x] >= k)
}

/// Id- and order-independent description of a shell tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalTree {
    pub nodes: Vec<CanonicalNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CanonicalNode {
    pub k: u32,
    pub vertices: Vec<u64>,
    /// Index of the parent in `CanonicalTree::nodes`.
    pub parent: Option<usize>,
}

impl CanonicalTree {
    /// Builds from `(k, vertices, parent key)` triples. The root is the
    /// unique entry without a parent.
    fn from_entries(mut entries: Vec<Entry>) -> Self {
        for e in entries.iter_mut() {
            e.1.sort_unstable();
            if let Some(p) = e.2.as_mut() {
                p.1.sort_unstable();
            }
        }
        entries.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        let index = |key: &(u32, Vec<u64>)| {
            entries.binary_search_by(|e| (e.0, &e.1).cmp(&(key.0, &key.1))).expect("parent key present")
        };
        let nodes = entries
            .iter()
            .map(|(k, vs, p)| CanonicalNode { k: *k, vertices: vs.clone(), parent: p.as_ref().map(index) })
            .collect();
        CanonicalTree { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Canonical form of an index, labelling vertices through `ids`.
pub fn canonicalize_with(sti: &Sti, ids: &IdMap) -> CanonicalTree {
    canonical_from(sti, |v| ids.original(v))
}

/// Canonical form using dense vertex ids.
pub fn canonicalize(sti: &Sti) -> CanonicalTree {
    canonical_from(sti, |v| v as u64)
}

fn canonical_from(sti: &Sti, label: impl Fn(VertexId) -> u64) -> CanonicalTree {
    let key = |id: NodeId| {
        let n = sti.node(id);
        (n.k(), n.vertices().iter().map(|&v| label(v)).collect::<Vec<_>>())
    };
    let entries = sti
        .node_ids()
        .map(|id| {
            let (k, vs) = key(id);
            (k, vs, sti.node(id).parent().map(key))
        })
        .collect();
    CanonicalTree::from_entries(entries)
}

/// Shell tree computed straight from the definitions: for every k, the
/// components of the subgraph on `{v : kappa[v] >= k}`; each component with
/// a vertex at exactly k contributes a shell, whose parent is the shell of
/// the deepest strictly-lower level whose component contains it.
pub fn brute_force_tree(g: &Graph) -> CanonicalTree {
    let kappa = naive_coreness(g);
    let n = g.n();
    let rho = kappa.iter().copied().max().unwrap_or(0);
    // shell_at[k][v]: index of the shell node for v's k-core, if that core has a k-shell
    let mut entries: Vec<Entry> = Vec::new();
    let root: Vec<u64> = (0..n).filter(|&v| g.degree(v) == 0).map(|v| v as u64).collect();
    let mut comp_id: Vec<Vec<Option<usize>>> = vec![vec![None; n]; rho as usize + 1];
    let mut shells: Vec<Vec<Option<Vec<u64>>>> = vec![Vec::new(); rho as usize + 1];
    for k in 1..=rho {
        let ku = k as usize;
        for s in 0..n {
            if kappa[s] < k || comp_id[ku][s].is_some() {
                continue;
            }
            let comp = bfs_within(g, s, |x| kappa[x] >= k);
            let c = shells[ku].len();
            let shell: Vec<u64> = comp.iter().filter(|&&x| kappa[x] == k).map(|&x| x as u64).collect();
            for &x in &comp {
                comp_id[ku][x] = Some(c);
            }
            shells[ku].push((!shell.is_empty()).then_some(shell));
        }
    }
    for k in 1..=rho {
        let ku = k as usize;
        for shell in shells[ku].iter().flatten() {
            let rep = shell[0] as usize;
            let mut parent = (0u32, root.clone());
            for j in (1..k).rev() {
                let c = comp_id[j as usize][rep].unwrap();
                if let Some(ps) = &shells[j as usize][c] {
                    parent = (j, ps.clone());
                    break;
                }
            }
            entries.push((k, shell.clone(), Some(parent)));
        }
    }
    entries.push((0, root, None));
    CanonicalTree::from_entries(entries)
}
