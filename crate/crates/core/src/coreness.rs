// SPDX-License-Identifier: Apache-2.0

//! Coreness values: bucket peeling from scratch and single-edge maintenance
//! confined to the subcore of the lower endpoint.

use std::collections::VecDeque;

use crate::error::{Result, StiError};
use crate::graph::{ChangeBatch, ChangeKind, EdgeChange, Graph, VertexId};
use crate::{HashMap, HashSet};

/// Traversal work, in multiples of `n + m`, after which a batch falls back
/// to peeling.
const PEEL_FALLBACK_FACTOR: usize = 4;

/// Per-vertex coreness plus a histogram that keeps the degeneracy current.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorenessMap {
    kappa: Vec<u32>,
    level_count: Vec<usize>,
}

/// Vertices whose coreness differs between two snapshots, with the signed
/// net difference.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DeltaSet {
    pub changed: Vec<(VertexId, i32)>,
}

impl DeltaSet {
    pub fn len(&self) -> usize {
        self.changed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.changed.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.changed.iter().map(|&(v, _)| v)
    }
}

/// Work counters for one maintenance call.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PeelWork {
    pub visited: usize,
}

/// Computes coreness by bucket peeling in O(n + m). Vertices leave their
/// bucket in FIFO order.
pub fn peel(g: &Graph) -> CorenessMap {
    let n = g.n();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let max_deg = deg.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<VecDeque<VertexId>> = vec![VecDeque::new(); max_deg + 1];
    for v in 0..n {
        buckets[deg[v]].push_back(v);
    }
    let mut removed = vec![false; n];
    let mut kappa = vec![0u32; n];
    let mut d = 0;
    while d <= max_deg {
        let Some(v) = buckets[d].pop_front() else {
            d += 1;
            continue;
        };
        // stale entry left behind by a decrement
        if removed[v] || deg[v] != d {
            continue;
        }
        removed[v] = true;
        kappa[v] = d as u32;
        for &w in g.adj(v) {
            if !removed[w] && deg[w] > d {
                deg[w] -= 1;
                buckets[deg[w]].push_back(w);
            }
        }
    }
    CorenessMap::from_values(kappa)
}

impl CorenessMap {
    pub fn from_values(kappa: Vec<u32>) -> Self {
        let mut level_count = Vec::new();
        for &k in &kappa {
            bump(&mut level_count, k, 1);
        }
        CorenessMap { kappa, level_count }
    }

    pub fn len(&self) -> usize {
        self.kappa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappa.is_empty()
    }

    #[inline]
    pub fn get(&self, v: VertexId) -> u32 {
        self.kappa[v]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.kappa
    }

    /// Degeneracy: the largest coreness present.
    pub fn rho(&self) -> u32 {
        self.level_count.iter().rposition(|&c| c > 0).unwrap_or(0) as u32
    }

    /// Extends with zero entries for newly created vertices.
    pub fn ensure_len(&mut self, n: usize) {
        if n > self.kappa.len() {
            let added = n - self.kappa.len();
            self.kappa.resize(n, 0);
            bump(&mut self.level_count, 0, added as isize);
        }
    }

    fn set(&mut self, v: VertexId, k: u32) {
        let old = self.kappa[v];
        bump(&mut self.level_count, old, -1);
        bump(&mut self.level_count, k, 1);
        self.kappa[v] = k;
    }

    fn spot_check(&self, g: &Graph, v: VertexId) -> Result<()> {
        if v >= self.kappa.len() {
            return Err(StiError::Integrity(format!("no coreness for vertex {v}")));
        }
        // one unit of slack: on deletion the edge is already gone
        if self.kappa[v] as usize > g.degree(v) + 1 {
            return Err(StiError::Integrity(format!(
                "coreness {} of vertex {v} exceeds its degree {}",
                self.kappa[v],
                g.degree(v)
            )));
        }
        Ok(())
    }

    /// Updates coreness after `{u, v}` was inserted into `g`. Returns the
    /// vertices that moved up by one.
    pub fn on_insert(&mut self, g: &Graph, u: VertexId, v: VertexId, work: &mut PeelWork) -> Result<Vec<VertexId>> {
        self.ensure_len(g.n());
        self.spot_check(g, u)?;
        self.spot_check(g, v)?;
        let k = self.kappa[u].min(self.kappa[v]);
        let kappa = &self.kappa;

        // Traversal with purecore pruning: a level-k vertex is a candidate
        // only if more than k neighbors sit above k (mcd), and it is expanded
        // only while more than k of its neighbors can still support it (cd,
        // seeded with the purecore degree). Vertices falling to k support
        // are evicted and their neighbors lose one unit each.
        let mut mcd_cache: HashMap<VertexId, usize> = HashMap::default();
        let mut mcd = |w: VertexId| -> usize {
            *mcd_cache.entry(w).or_insert_with(|| g.adj(w).iter().filter(|&&x| kappa[x] >= k).count())
        };
        let mut cd: HashMap<VertexId, isize> = HashMap::default();
        let mut visited: HashSet<VertexId> = HashSet::default();
        let mut gone: HashSet<VertexId> = HashSet::default();
        let mut stack = Vec::new();
        for r in [u, v] {
            if kappa[r] == k && !visited.contains(&r) && mcd(r) > k as usize {
                visited.insert(r);
                stack.push(r);
            }
        }
        let roots = stack.clone();
        for r in roots {
            let p = purecore_degree(g, kappa, k, r, &mut mcd);
            *cd.entry(r).or_insert(0) += p as isize;
        }
        while let Some(w) = stack.pop() {
            work.visited += 1;
            if cd[&w] > k as isize {
                for &x in g.adj(w) {
                    if kappa[x] == k && !visited.contains(&x) && mcd(x) > k as usize {
                        visited.insert(x);
                        let p = purecore_degree(g, kappa, k, x, &mut mcd);
                        *cd.entry(x).or_insert(0) += p as isize;
                        stack.push(x);
                    }
                }
            } else if !gone.contains(&w) {
                let mut evict = vec![w];
                gone.insert(w);
                while let Some(y) = evict.pop() {
                    for &x in g.adj(y) {
                        if kappa[x] != k {
                            continue;
                        }
                        let c = cd.entry(x).or_insert(0);
                        *c -= 1;
                        if *c == k as isize && visited.contains(&x) && !gone.contains(&x) {
                            gone.insert(x);
                            evict.push(x);
                        }
                    }
                }
            }
        }
        let keys: Vec<VertexId> = visited.into_iter().collect();

        let mut risen: Vec<VertexId> = keys.into_iter().filter(|w| !gone.contains(w)).collect();
        risen.sort_unstable();
        for &w in &risen {
            self.set(w, k + 1);
        }
        Ok(risen)
    }

    /// Updates coreness after `{u, v}` was removed from `g`. Returns the
    /// vertices that moved down by one.
    pub fn on_delete(&mut self, g: &Graph, u: VertexId, v: VertexId, work: &mut PeelWork) -> Result<Vec<VertexId>> {
        self.ensure_len(g.n());
        self.spot_check(g, u)?;
        self.spot_check(g, v)?;
        let k = self.kappa[u].min(self.kappa[v]);
        if k == 0 {
            return Err(StiError::Integrity(format!("edge {{{u}, {v}}} had an endpoint at coreness 0")));
        }
        // Support of a level-k vertex: neighbors still at level >= k plus
        // dropped neighbors whose removal has not been propagated yet. Each
        // dropped vertex then decrements every neighbor exactly once.
        let mut support: HashMap<VertexId, usize> = HashMap::default();
        let mut queued: HashSet<VertexId> = HashSet::default();
        let mut dropped = Vec::new();
        let mut queue = Vec::new();

        for r in [u, v] {
            if self.kappa[r] == k && !support.contains_key(&r) {
                work.visited += 1;
                let s = self.level_support(g, r, k, &queued);
                support.insert(r, s);
                if s < k as usize {
                    self.set(r, k - 1);
                    dropped.push(r);
                    queue.push(r);
                    queued.insert(r);
                }
            }
        }
        while let Some(w) = queue.pop() {
            for &x in g.adj(w) {
                if self.kappa[x] != k {
                    continue;
                }
                let s = match support.get_mut(&x) {
                    Some(s) => {
                        *s -= 1;
                        *s
                    }
                    None => {
                        work.visited += 1;
                        let s = self.level_support(g, x, k, &queued) - 1;
                        support.insert(x, s);
                        s
                    }
                };
                if s < k as usize {
                    self.set(x, k - 1);
                    dropped.push(x);
                    queue.push(x);
                    queued.insert(x);
                }
            }
            queued.remove(&w);
        }
        dropped.sort_unstable();
        Ok(dropped)
    }

    fn level_support(&self, g: &Graph, w: VertexId, k: u32, queued: &HashSet<VertexId>) -> usize {
        g.adj(w).iter().filter(|&&x| self.kappa[x] >= k || queued.contains(&x)).count()
    }

    /// Applies one change to both the graph and the coreness values.
    pub fn apply_change(&mut self, g: &mut Graph, c: EdgeChange, work: &mut PeelWork) -> Result<Vec<VertexId>> {
        g.apply_change(c)?;
        self.ensure_len(g.n());
        match c.kind {
            ChangeKind::Insert => self.on_insert(g, c.u, c.v, work),
            ChangeKind::Delete => self.on_delete(g, c.u, c.v, work),
        }
    }

    /// Applies a whole batch to `g` and `self`. The batch is validated
    /// first, so on error nothing has been modified. Changes are applied one
    /// at a time until the traversal work exceeds a few passes over the
    /// graph; the remaining changes then go straight into `g` and coreness
    /// is recomputed by peeling. The returned set holds the net movers only.
    pub fn maintain(&mut self, g: &mut Graph, batch: &ChangeBatch, work: &mut PeelWork) -> Result<DeltaSet> {
        validate_batch(g, batch)?;
        let budget = work.visited + PEEL_FALLBACK_FACTOR * (g.n() + g.m() + batch.len());
        let mut start: HashMap<VertexId, u32> = HashMap::default();
        let mut rest = batch.changes.iter().enumerate();
        for (index, &c) in rest.by_ref() {
            let moved = self.apply_change(g, c, work).map_err(|e| StiError::Batch { index, source: Box::new(e) })?;
            for w in moved {
                // the pre-change value is one step away from the current one
                let prior = match c.kind {
                    ChangeKind::Insert => self.kappa[w] - 1,
                    ChangeKind::Delete => self.kappa[w] + 1,
                };
                start.entry(w).or_insert(prior);
            }
            if work.visited > budget {
                break;
            }
        }
        let mut tail = rest.peekable();
        if tail.peek().is_some() {
            let before = self.kappa.clone();
            for (index, &c) in tail {
                g.apply_change(c).map_err(|e| StiError::Batch { index, source: Box::new(e) })?;
            }
            let fresh = peel(g);
            work.visited += g.n() + g.m();
            for v in 0..fresh.len() {
                let old = if v < before.len() { before[v] } else { 0 };
                if fresh.kappa[v] != old {
                    start.entry(v).or_insert(old);
                }
            }
            *self = fresh;
        }
        let mut changed: Vec<(VertexId, i32)> = start
            .into_iter()
            .filter_map(|(w, k0)| {
                let d = self.kappa[w] as i32 - k0 as i32;
                (d != 0).then_some((w, d))
            })
            .collect();
        changed.sort_unstable();
        Ok(DeltaSet { changed })
    }
}

/// Neighbors above `k`, plus level-`k` neighbors that could themselves rise.
fn purecore_degree(g: &Graph, kappa: &[u32], k: u32, w: VertexId, mcd: &mut impl FnMut(VertexId) -> usize) -> usize {
    g.adj(w).iter().filter(|&&x| kappa[x] > k || (kappa[x] == k && mcd(x) > k as usize)).count()
}

fn bump(counts: &mut Vec<usize>, k: u32, by: isize) {
    let k = k as usize;
    if counts.len() <= k {
        counts.resize(k + 1, 0);
    }
    counts[k] = (counts[k] as isize + by) as usize;
}

/// Checks that every change applies in order, without touching `g`.
pub fn validate_batch(g: &Graph, batch: &ChangeBatch) -> Result<()> {
    let mut toggled: HashMap<(VertexId, VertexId), bool> = HashMap::default();
    for (index, c) in batch.changes.iter().enumerate() {
        let key = (c.u.min(c.v), c.u.max(c.v));
        let present = *toggled.entry(key).or_insert_with(|| g.has_edge(c.u, c.v));
        let err = if c.u == c.v {
            Some(StiError::SelfLoop(c.u))
        } else {
            match (c.kind, present) {
                (ChangeKind::Insert, true) => Some(StiError::EdgeExists(c.u, c.v)),
                (ChangeKind::Delete, false) => Some(StiError::EdgeMissing(c.u, c.v)),
                _ => None,
            }
        };
        if let Some(e) = err {
            return Err(StiError::Batch { index, source: Box::new(e) });
        }
        toggled.insert(key, c.kind == ChangeKind::Insert);
    }
    Ok(())
}
