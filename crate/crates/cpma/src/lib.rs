//! Batch-parallel ordered sets backed by a packed memory array.
//!
//! The crate provides two instantiations of the same structure: [`Pma`]
//! stores 8-byte keys in fixed-width cells, and [`Cpma`] stores each leaf as
//! an uncompressed 8-byte head followed by delta-encoded varint tails. Both
//! support point operations, sorted-batch inserts and deletes with internal
//! fork-join parallelism, and binary snapshots. A flat dynamic-graph adapter
//! ([`graph::GraphStore`]) packs undirected edges into a single compressed
//! set and runs frontier-based algorithms over it.
//!
//! Keys are `u64` values in `[1, u64::MAX]`; 0 is reserved as the empty-slot
//! sentinel throughout.

pub mod batch;
pub mod graph;
pub mod kernel;
pub mod leaf;
pub mod oracle;
pub mod set;

pub use batch::{sort_dedupe, Batch};
pub use kernel::{DensitySchedule, Layout, LayoutConfig, NodeId};
pub use leaf::{CompressedLeaf, LeafStore, UncompressedLeaf};
pub use set::{PmaSet, SetConfig, SizeStats};

/// Uncompressed packed memory array over 8-byte cells.
pub type Pma = set::PmaSet<leaf::UncompressedLeaf>;
/// Compressed packed memory array over delta-encoded byte leaves.
pub type Cpma = set::PmaSet<leaf::CompressedLeaf>;

/// Errors surfaced by the public API.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A key outside the supported domain (currently only 0).
    #[error("key 0 is reserved as the empty-slot sentinel")]
    ZeroKey,
    /// Invalid configuration (density schedule, growing factor, ...).
    #[error("invalid configuration: {0}")]
    Config(String),
    /// A byte stream that does not decode as a valid leaf.
    #[error("corrupt leaf encoding: {0}")]
    Corrupt(String),
    /// Malformed snapshot or graph input data.
    #[error("invalid input: {0}")]
    Input(String),
    /// Vertex id outside the 32-bit range supported by packed edge keys.
    #[error("vertex id {0} does not fit in 32 bits")]
    VertexRange(u64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
