// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::graph::VertexId;

pub type Result<T> = std::result::Result<T, StiError>;

#[derive(Debug, Error)]
pub enum StiError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),

    #[error("edge {{{0}, {1}}} already present")]
    EdgeExists(VertexId, VertexId),

    #[error("edge {{{0}, {1}}} not present")]
    EdgeMissing(VertexId, VertexId),

    #[error("unknown vertex {0}")]
    UnknownVertex(u64),

    #[error("cannot merge tree nodes at levels {0} and {1}")]
    LevelMismatch(u32, u32),

    #[error("integrity check failed: {0}")]
    Integrity(String),

    #[error("batch item {index}: {source}")]
    Batch {
        index: usize,
        #[source]
        source: Box<StiError>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl StiError {
    /// True for the duplicate-insert / missing-delete class that ingest
    /// code is allowed to skip.
    pub fn is_idempotence_violation(&self) -> bool {
        match self {
            StiError::EdgeExists(..) | StiError::EdgeMissing(..) => true,
            StiError::Batch { source, .. } => source.is_idempotence_violation(),
            _ => false,
        }
    }
}
