// SPDX-License-Identifier: Apache-2.0

//! Shell tree index (STI) over the k-core hierarchy of a dynamic graph.
//!
//! The index answers three queries: the coreness of a vertex, the connected
//! k-core containing a vertex, and the full core hierarchy. It is kept in
//! sync with the graph either edge by edge ([`MaintenanceEngine::se_insert`])
//! or one batch at a time ([`MaintenanceEngine::ba_apply`]), the latter via
//! a resident subcore DAG.

use std::collections::hash_map::DefaultHasher;
use std::hash::BuildHasherDefault;

/// Hash containers with a fixed-key hasher, so iteration order, tie-breaking
/// and work counters are the same on every run.
pub(crate) type HashMap<K, V> = std::collections::HashMap<K, V, BuildHasherDefault<DefaultHasher>>;
pub(crate) type HashSet<T> = std::collections::HashSet<T, BuildHasherDefault<DefaultHasher>>;

pub mod bench;
pub mod coreness;
pub mod error;
pub mod graph;
pub mod maintenance;
pub mod oracle;
pub mod shell_tree;
pub mod subcore_dag;

pub use coreness::{peel, CorenessMap, DeltaSet};
pub use error::{Result, StiError};
pub use graph::{load_edge_list, ChangeBatch, ChangeKind, EdgeChange, EdgeList, Graph, IdMap, VertexId};
pub use maintenance::{Algo, MaintenanceEngine, UpdateStats};
pub use shell_tree::{CoreQuery, NodeId, SnapshotNode, Sti};
pub use subcore_dag::{DagId, DagSignature, SubcoreDag};
