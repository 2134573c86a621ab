//! Graph data model, analytics, partitioning, generation, exploration and
//! file-format support.

pub mod analytics;
pub mod cache;
pub mod explore;
pub mod generators;
pub mod graph;
pub mod io;
pub mod measure;
pub mod mutation;
pub mod partitions;

#[cfg(test)]
mod testing;

pub use cache::{CacheEntry, ComputeOptions, StatsCache, Values};
pub use graph::{AttrValue, Attributes, EdgeId, EdgeRecord, Graph, GraphError, NodeId, NodeRecord};
pub use measure::{EdgeMeasure, MeasureKey, NodeMeasure, Strategy, Target};
pub use mutation::{apply_batch, apply_mutation, Mutation, MutationOutcome};
pub use io::{detect_format, FormatId, IoError};
