//! Deterministic agglomerative clustering of weighted networks into a
//! hierarchy of overlapping clusters.
//!
//! The pipeline is parameter-free: every iteration pairs nodes that reach
//! their maximal modularity gain on each other, resolves nodes tied between
//! several such partners by splitting them into fragments when that pays off,
//! and coarsens the network until no further cluster forms. Results depend
//! only on the network, never on the order its links were read in.
//!
//! ```
//! use daoc::{cluster, parse_network};
//!
//! let net = parse_network("0 1\n1 2\n2 0\n3 4\n4 5\n5 3\n2 3\n".as_bytes(), false, true)?;
//! let hierarchy = cluster(&net);
//! let top = hierarchy.level_count() - 1;
//! assert_eq!(hierarchy.level_nodes(top), vec![vec![0, 1, 2], vec![3, 4, 5]]);
//! # Ok::<(), daoc::Error>(())
//! ```

pub mod bench;
pub mod candidates;
pub mod cli;
pub mod decomposition;
pub mod error;
pub mod evaluation;
pub mod graph;
pub mod hierarchy;
pub mod quality;

pub use error::{Error, Result};
pub use graph::{canonicalize, parse_network, serialize_shuffled, Arc, Label, Network, NodeId};
pub use hierarchy::{cluster, write_hierarchy, Hierarchy};
pub use quality::Clustering;
