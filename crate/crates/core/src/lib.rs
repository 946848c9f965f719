//! Minimum-cost design of sensor networks whose dynamics stay structurally
//! observable at a fusion center under up to `k` sensor failures.
//!
//! The usual flow is [`PhysicalGraph`] → [`design`] → [`DesignSolution`],
//! then [`robust_structural_observability`] to certify the result and
//! [`instantiate_random`] / [`simulate`] / [`recover_initial_state`] to
//! work with numeric dynamics over a prime field.

pub mod analysis;
pub mod cost;
pub mod error;
pub mod field;
pub mod flow;
pub mod generator;
pub mod graph;
pub mod io;
pub mod opt;
pub mod pipeline;
pub mod realization;
pub mod robustness;
pub mod structure;

pub use analysis::{
    extract_cactus_certificate, is_structurally_observable, robust_structural_observability,
    robust_structural_observability_in, validate_certificate, CactusCertificate, FailureScope, FailureSet,
    RobustCheck,
};
pub use cost::Cost;
pub use error::{Error, Result};
pub use field::{PrimeField, DEFAULT_PRIME};
pub use flow::{local_node_connectivity, max_flow, max_robustness, sensor_disjoint_paths, Digraph, FlowNetwork, Robustness};
pub use generator::{random_geometric, CostModel};
pub use graph::{DynamicGraph, NodeId, PhysicalGraph, Role};
pub use pipeline::{
    backbone_shortest_paths, build_dynamic_graph, design, evaluate_cost, shift_weights, BackboneRoutes,
    DesignSolution,
};
pub use realization::{
    instantiate_deterministic, instantiate_random, observability_rank, recover_initial_state, simulate, FieldSystem,
    Recovery,
};
pub use robustness::{failure_curve, network_fails, CurveConfig, RobustnessCurve};
pub use structure::{BoolMatrix, StructuralPair};
