// SPDX-License-Identifier: Apache-2.0

use sti_wasm_demo::Demo;

const TWO_TRIANGLES: &str = "# two triangles and a bridge\n10 11\n11 12\n12 10\n12 20\n20 21\n21 22\n22 20\n";

#[test]
fn builds_and_reports_sizes() {
    let d = Demo::new(TWO_TRIANGLES).unwrap();
    assert_eq!(d.vertex_count(), 6);
    assert_eq!(d.edge_count(), 7);
    assert_eq!(d.coreness(10).unwrap(), 2);
}

#[test]
fn core_uses_original_ids() {
    let d = Demo::new(TWO_TRIANGLES).unwrap();
    assert_eq!(d.core(10, 2).unwrap(), "[10,11,12,20,21,22]");
    assert_eq!(d.core(10, 3).unwrap(), "null");
    assert!(d.core(99, 1).is_err());
}

#[test]
fn batch_lifts_a_clique_with_either_algorithm() {
    for algo in ["se", "ba"] {
        let mut d = Demo::new(TWO_TRIANGLES).unwrap();
        let stats = d.apply("+ 10 30\n+ 11 30\n+ 12 30\n", algo).unwrap();
        assert!(stats.contains(&format!("\"algo\":\"{algo}\"")), "{stats}");
        assert!(stats.contains("\"coreness_changed\":4"), "{stats}");
        assert_eq!(d.core(30, 3).unwrap(), "[10,11,12,30]");
        let h = d.hierarchy();
        assert!(h.contains("\"k\":3,\"parent\":"), "{h}");
    }
}

#[test]
fn rejected_batch_leaves_state_alone() {
    let mut d = Demo::new(TWO_TRIANGLES).unwrap();
    let before = d.hierarchy();
    assert!(d.apply("+ 10 40\n- 10 50\n", "ba").is_err());
    assert!(d.apply("* 1 2\n", "se").is_err());
    assert!(d.apply("+ 1 2\n", "nope").is_err());
    assert_eq!(d.hierarchy(), before);
    assert!(d.coreness(40).is_err());
}

#[test]
fn hierarchy_lists_parents_first() {
    let d = Demo::new(TWO_TRIANGLES).unwrap();
    let h = d.hierarchy();
    assert!(h.starts_with("[{\"k\":0,\"parent\":null"), "{h}");
}
