//! Exhaustive reference optimizer for small instances.

use crate::analysis::{robust_structural_observability_in, FailureScope};
use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::graph::{EdgeKind, PhysicalGraph};
use crate::pipeline::{backbone_shortest_paths, BackboneRoutes};
use crate::structure::{BoolMatrix, OutputSource, StructuralPair};

/// Largest number of sensor→sensor plus sensor→backbone edges enumerated.
pub const BRUTE_FORCE_EDGE_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForceResult {
    pub cost: Cost,
    /// Chosen sensor→sensor and sensor→backbone edge ids, ascending.
    pub edges: Vec<usize>,
    pub structure: StructuralPair,
}

/// Minimum per-output cost over every subset of sensor links and sensor
/// outputs whose structure survives any `k` failures of sensors or used
/// output channels. Backbone routes are fixed to least-cost paths. Returns
/// `None` when no subset qualifies. Ties keep the subset with the smallest
/// bitmask over the enumerated edges in id order.
pub fn brute_force_min_structure(g: &PhysicalGraph, k: usize) -> Result<Option<BruteForceResult>> {
    let routes = backbone_shortest_paths(g);
    let xx: Vec<usize> = g.edges_of_kind(EdgeKind::SensorSensor).map(|e| e.id).collect();
    let xq: Vec<usize> = g.edges_of_kind(EdgeKind::SensorBackbone).map(|e| e.id).collect();
    let total = xx.len() + xq.len();
    if total > BRUTE_FORCE_EDGE_LIMIT {
        return Err(Error::EnumerationBound { size: total as u64, limit: BRUTE_FORCE_EDGE_LIMIT as u64 });
    }
    let n = g.n_sensors();
    let mut best: Option<(Cost, u64)> = None;
    for mask in 0u64..(1 << total) {
        let Some(cost) = mask_cost(g, &routes, &xx, &xq, mask) else {
            continue;
        };
        if best.is_some_and(|(b, _)| b <= cost) {
            continue;
        }
        let s = mask_structure(g, &xx, &xq, mask, n);
        if robust_structural_observability_in(&s, k, FailureScope::SensorsAndOutputs)?.is_robust() {
            best = Some((cost, mask));
        }
    }
    Ok(best.map(|(cost, mask)| {
        let mut edges: Vec<usize> =
            xx.iter().chain(&xq).enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &id)| id).collect();
        edges.sort_unstable();
        BruteForceResult { cost, edges, structure: mask_structure(g, &xx, &xq, mask, n) }
    }))
}

fn mask_cost(g: &PhysicalGraph, routes: &BackboneRoutes, xx: &[usize], xq: &[usize], mask: u64) -> Option<Cost> {
    let mut cost = Cost::ZERO;
    for (i, &id) in xx.iter().enumerate() {
        if mask >> i & 1 == 1 {
            cost += g.edge(id).cost;
        }
    }
    for (r, &id) in xq.iter().enumerate() {
        if mask >> (xx.len() + r) & 1 == 1 {
            let e = g.edge(id);
            cost += e.cost + routes.dist[e.head.index]?;
        }
    }
    Some(cost)
}

fn mask_structure(g: &PhysicalGraph, xx: &[usize], xq: &[usize], mask: u64, n: usize) -> StructuralPair {
    let mut a = BoolMatrix::identity(n);
    for (i, &id) in xx.iter().enumerate() {
        if mask >> i & 1 == 1 {
            let e = g.edge(id);
            a.set(e.head.index, e.tail.index, true);
        }
    }
    let mut c = BoolMatrix::zeros(xq.len(), n);
    let mut index = Vec::with_capacity(xq.len());
    for (r, &id) in xq.iter().enumerate() {
        let e = g.edge(id);
        if mask >> (xx.len() + r) & 1 == 1 {
            c.set(r, e.tail.index, true);
        }
        index.push(Some(OutputSource { sensor: e.tail.index, backbone: e.head.index }));
    }
    StructuralPair::new(a, c, index).expect("rows sense their own sensor")
}
