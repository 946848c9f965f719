//! Optimization engines.

pub mod arborescence;
pub mod brute;
pub mod matroid;
pub mod rooted;

pub use arborescence::{min_spanning_arborescence, ArborescenceResult, WeightedArc};
pub use brute::{brute_force_min_structure, BruteForceResult, BRUTE_FORCE_EDGE_LIMIT};
pub use matroid::{weighted_matroid_intersection, FreeMatroid, Matroid, PartitionMatroid, Sense};
pub use rooted::{is_rooted_connected, min_rooted_connected_subgraph, BiSetMatroid, RootedSubgraph};
