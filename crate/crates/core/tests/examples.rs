// SPDX-License-Identifier: Apache-2.0

use std::io::Cursor;

use sti_core::oracle::{brute_force_tree, canonicalize, naive_core};
use sti_core::{load_edge_list, ChangeBatch, CoreQuery, EdgeChange, Graph, MaintenanceEngine, VertexId};

fn clique(vs: &[VertexId]) -> Vec<(VertexId, VertexId)> {
    let mut e = Vec::new();
    for (i, &a) in vs.iter().enumerate() {
        for &b in &vs[i + 1..] {
            e.push((a, b));
        }
    }
    e
}

fn engine(n: usize, edges: Vec<(VertexId, VertexId)>) -> MaintenanceEngine {
    MaintenanceEngine::new(Graph::from_edges(n, edges)).unwrap()
}

fn assert_scratch(e: &mut MaintenanceEngine) {
    e.check_invariants().unwrap();
    assert_eq!(canonicalize(e.sti()), brute_force_tree(e.graph()));
}

fn shape(e: &MaintenanceEngine) -> Vec<(u32, Vec<VertexId>, Option<usize>)> {
    e.query_hierarchy().into_iter().map(|n| (n.k, n.vertices, n.parent)).collect()
}

fn core(e: &MaintenanceEngine, u: VertexId, k: u32) -> Vec<VertexId> {
    match e.query_core(u, k).unwrap() {
        CoreQuery::Found(mut v) => {
            v.sort_unstable();
            v
        }
        CoreQuery::NotInCore => Vec::new(),
    }
}

fn two_k4s_and_w() -> MaintenanceEngine {
    let mut e = clique(&[0, 1, 2, 3]);
    e.extend(clique(&[4, 5, 6, 7]));
    e.extend([(8, 0), (8, 4)]);
    engine(9, e)
}

#[test]
fn two_separate_three_cores() {
    // two 4-cliques {1..4} and {7..10} linked through 5 and 6
    let text = "1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n7 8\n7 9\n7 10\n8 9\n8 10\n9 10\n4 5\n5 1\n5 6\n6 7\n";
    let list = load_edge_list(Cursor::new(text)).unwrap();
    let ids = &list.ids;
    let d = |x: u64| ids.dense(x).unwrap();
    let e = MaintenanceEngine::new(list.graph.clone()).unwrap();
    for x in [1, 2, 3, 4, 7, 8, 9, 10] {
        assert_eq!(e.query_k(d(x)).unwrap(), 3);
    }
    let orig = |vs: Vec<VertexId>| {
        let mut o: Vec<u64> = vs.into_iter().map(|v| ids.original(v)).collect();
        o.sort_unstable();
        o
    };
    assert_eq!(orig(core(&e, d(1), 3)), vec![1, 2, 3, 4]);
    assert_eq!(orig(core(&e, d(7), 3)), vec![7, 8, 9, 10]);
    assert_eq!(orig(naive_core(&list.graph, d(7), 3).into_iter().collect()), vec![7, 8, 9, 10]);
}

#[test]
fn whole_shell_moves_up() {
    let mut e = engine(4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]);
    let before = e.sti().node_of(0);
    e.se_insert(2, 3).unwrap();
    assert_eq!(e.sti().node_of(0), before);
    assert_eq!(shape(&e), vec![(0, vec![], None), (3, vec![0, 1, 2, 3], Some(0))]);
    assert_scratch(&mut e);
}

#[test]
fn bridge_merges_two_triangles() {
    let mut t = clique(&[0, 1, 2]);
    t.extend(clique(&[3, 4, 5]));
    let mut e = engine(6, t);
    let s = e.se_insert(2, 3).unwrap();
    assert!(e.last_delta().is_empty());
    assert!(s.tree_nodes_touched > 0);
    assert_eq!(shape(&e), vec![(0, vec![], None), (2, vec![0, 1, 2, 3, 4, 5], Some(0))]);
    assert_scratch(&mut e);
}

#[test]
fn cross_clique_edge_merges_the_cliques() {
    let mut e = two_k4s_and_w();
    e.se_insert(1, 5).unwrap();
    assert!(e.last_delta().is_empty());
    assert_eq!(shape(&e), vec![(0, vec![], None), (2, vec![8], Some(0)), (3, vec![0, 1, 2, 3, 4, 5, 6, 7], Some(1))]);
    assert_scratch(&mut e);
}

#[test]
fn two_cliques_queries() {
    let e = two_k4s_and_w();
    assert_eq!(core(&e, 0, 2), (0..9).collect::<Vec<_>>());
    assert_eq!(core(&e, 0, 3), vec![0, 1, 2, 3]);
    assert_eq!(e.query_hierarchy().len(), 4);
}

#[test]
fn nested_cliques_chain_is_kept_below_the_merge() {
    // K5 {0..4} hangs off the K4 {5..8}; a second K4 {9..12} sits at the
    // same level. Joining the K4s merges the level-3 nodes and keeps the
    // K5 below them.
    let mut t = clique(&[0, 1, 2, 3, 4]);
    t.extend(clique(&[5, 6, 7, 8]));
    t.push((5, 0));
    t.extend(clique(&[9, 10, 11, 12]));
    t.extend([(13, 5), (13, 9)]);
    let mut e = engine(14, t);
    assert_scratch(&mut e);
    e.se_insert(8, 12).unwrap();
    assert_scratch(&mut e);
    let h = shape(&e);
    let five = h.iter().position(|n| n.0 == 4).unwrap();
    let parent = h[five].2.unwrap();
    assert_eq!(h[parent].0, 3);
    assert!(h[parent].1.contains(&9) && h[parent].1.contains(&5));
}

#[test]
fn child_two_levels_up_is_hung_below() {
    // a K6 touching a triangle that grows into a K4 via one insert
    let mut t = clique(&[0, 1, 2, 3, 4, 5]);
    t.extend([(6, 7), (7, 8), (6, 8), (9, 6), (9, 7), (6, 0), (7, 1), (8, 2)]);
    let mut e = engine(10, t);
    assert_scratch(&mut e);
    e.se_insert(9, 8).unwrap();
    assert_scratch(&mut e);
}

#[test]
fn deleting_a_triangle_edge() {
    let mut e = engine(3, clique(&[0, 1, 2]));
    e.se_delete(0, 1).unwrap();
    assert_eq!(shape(&e), vec![(0, vec![], None), (1, vec![0, 1, 2], Some(0))]);
    assert_scratch(&mut e);
}

#[test]
fn deleting_the_bridge_splits_the_shell() {
    let mut t = clique(&[0, 1, 2]);
    t.extend(clique(&[3, 4, 5]));
    t.push((2, 3));
    let mut e = engine(6, t);
    assert_eq!(e.sti().node_count(), 2);
    e.se_delete(2, 3).unwrap();
    assert_eq!(shape(&e), vec![(0, vec![], None), (2, vec![0, 1, 2], Some(0)), (2, vec![3, 4, 5], Some(0))]);
    assert_scratch(&mut e);
}

#[test]
fn delete_then_reinsert_is_identity() {
    let mut e = two_k4s_and_w();
    let start = canonicalize(e.sti());
    e.se_delete(0, 1).unwrap();
    e.se_insert(0, 1).unwrap();
    assert_eq!(canonicalize(e.sti()), start);
    assert_scratch(&mut e);
}

#[test]
fn square_diagonals_as_one_batch() {
    let c4 = vec![(0, 1), (1, 2), (2, 3), (3, 0)];
    let batch = ChangeBatch::new(vec![EdgeChange::insert(0, 2), EdgeChange::insert(1, 3)]);
    let mut ba = engine(4, c4.clone());
    let stats = ba.ba_apply(&batch).unwrap();
    assert_eq!(ba.coreness().as_slice(), &[3, 3, 3, 3]);
    assert_eq!(ba.last_delta().len(), 4);
    assert_eq!(stats.dag_nodes_rebuilt, 1);
    assert_eq!(shape(&ba), vec![(0, vec![], None), (3, vec![0, 1, 2, 3], Some(0))]);
    assert_scratch(&mut ba);

    // one at a time, the region is walked on both inserts
    let mut se = engine(4, c4);
    let first = se.se_insert(0, 2).unwrap();
    let second = se.se_insert(1, 3).unwrap();
    assert!(first.vertices_visited > 0 && second.vertices_visited > 0);
    // both endpoints, the four risen vertices and their twelve neighbor slots
    assert_eq!(second.vertices_visited, 2 + 4 + 12);
    assert_eq!(canonicalize(se.sti()), canonicalize(ba.sti()));
}

/// Cycle on `n` vertices and the batch that completes it to a clique.
fn cycle_to_clique(n: usize) -> (MaintenanceEngine, ChangeBatch) {
    let e = engine(n, (0..n).map(|i| (i, (i + 1) % n)).collect());
    let missing: Vec<EdgeChange> = clique(&(0..n).collect::<Vec<_>>())
        .into_iter()
        .filter(|&(a, b)| !e.graph().has_edge(a, b))
        .map(|(a, b)| EdgeChange::insert(a, b))
        .collect();
    (e, ChangeBatch::new(missing))
}

#[test]
fn six_vertices_lifted_three_levels() {
    let (start, batch) = cycle_to_clique(6);
    let mut ba = start.clone();
    let stats = ba.ba_apply(&batch).unwrap();
    assert!(ba.coreness().as_slice().iter().all(|&k| k == 5));
    assert_eq!(stats.dag_nodes_rebuilt, 1);
    assert_scratch(&mut ba);

    let mut se = start;
    let mut moves = 0;
    for c in batch.iter() {
        se.se_insert(c.u, c.v).unwrap();
        if !se.last_delta().is_empty() {
            moves += 1;
        }
    }
    assert!(moves >= 3, "{moves} shell moves");
    assert_eq!(canonicalize(se.sti()), canonicalize(ba.sti()));
}

#[test]
fn batch_work_independent_of_lift_height() {
    let mut se_work = Vec::new();
    for n in 5..=10 {
        let (start, batch) = cycle_to_clique(n);
        let mut ba = start.clone();
        assert_eq!(ba.ba_apply(&batch).unwrap().dag_nodes_rebuilt, 1);
        let mut se = start;
        se_work.push(se.se_apply(&batch).unwrap().tree_nodes_touched);
    }
    assert!(se_work.windows(2).all(|w| w[0] < w[1]), "{se_work:?}");
}

#[test]
fn net_zero_mixed_batch() {
    let mut t = clique(&[0, 1, 2, 3]);
    t.extend([(3, 4), (4, 5), (5, 6)]);
    let mut e = engine(8, t);
    let start = canonicalize(e.sti());
    let batch = ChangeBatch::new(vec![EdgeChange::insert(6, 7), EdgeChange::delete(6, 7)]);
    let stats = e.ba_apply(&batch).unwrap();
    assert!(e.last_delta().is_empty());
    assert_eq!(canonicalize(e.sti()), start);
    assert!(stats.vertices_visited < 8);
    assert_scratch(&mut e);
}

#[test]
fn new_vertices_appear_through_updates() {
    let mut e = engine(2, vec![(0, 1)]);
    e.se_insert(1, 5).unwrap();
    assert_eq!(e.graph().n(), 6);
    assert_eq!(e.query_k(3).unwrap(), 0);
    e.ba_apply(&ChangeBatch::new(vec![EdgeChange::insert(6, 7), EdgeChange::insert(0, 5)])).unwrap();
    assert_eq!(e.query_k(0).unwrap(), 2);
    assert_scratch(&mut e);
}

#[test]
fn bad_batch_reports_index_and_changes_nothing() {
    let mut e = two_k4s_and_w();
    let start = canonicalize(e.sti());
    let batch = ChangeBatch::new(vec![EdgeChange::insert(0, 5), EdgeChange::delete(2, 6)]);
    let err = e.ba_apply(&batch).unwrap_err();
    assert!(matches!(err, sti_core::StiError::Batch { index: 1, .. }));
    assert!(err.is_idempotence_violation());
    assert_eq!(canonicalize(e.sti()), start);
    assert!(e.se_insert(0, 1).is_err());
    assert!(e.se_delete(0, 5).is_err());
}
