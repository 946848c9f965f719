//! Random geometric instances on the unit square.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::graph::{NodeId, PhysicalGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostModel {
    /// Squared Euclidean distance between the endpoints.
    DistanceSquared,
}

impl CostModel {
    pub fn as_str(self) -> &'static str {
        match self {
            CostModel::DistanceSquared => "distance-squared",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "distance-squared" | "distance_squared" | "DistanceSquared" => Some(CostModel::DistanceSquared),
            _ => None,
        }
    }

    fn cost(self, a: (f64, f64), b: (f64, f64)) -> Cost {
        match self {
            CostModel::DistanceSquared => Cost::from_f64(dist2(a, b)),
        }
    }
}

fn dist2(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)
}

/// Places sensors, then backbone nodes, then the fusion node uniformly on
/// the unit square and links every role-admissible ordered pair within
/// `radius`. Edges are listed sensor→sensor, sensor→backbone,
/// backbone→backbone, backbone→fusion, each in index order. Positions are
/// recorded in the graph metadata.
pub fn random_geometric(
    n_sensors: usize,
    n_backbone: usize,
    radius: f64,
    cost_model: CostModel,
    seed: u64,
) -> Result<PhysicalGraph> {
    if n_sensors == 0 {
        return Err(Error::NoSensors);
    }
    if n_backbone == 0 || !(radius > 0.0 && radius <= std::f64::consts::SQRT_2 + 1e-12) {
        return Err(Error::Format(format!(
            "generator needs at least one backbone node and a radius in (0, sqrt 2], got {n_backbone} and {radius}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point = || (rng.gen::<f64>(), rng.gen::<f64>());
    let xs: Vec<(f64, f64)> = (0..n_sensors).map(|_| point()).collect();
    let qs: Vec<(f64, f64)> = (0..n_backbone).map(|_| point()).collect();
    let z = point();
    let r2 = radius * radius;
    let near = |a, b| dist2(a, b) <= r2;

    let mut edges = Vec::new();
    for (i, &a) in xs.iter().enumerate() {
        for (j, &b) in xs.iter().enumerate() {
            if i != j && near(a, b) {
                edges.push((NodeId::sensor(i), NodeId::sensor(j), cost_model.cost(a, b)));
            }
        }
    }
    for (i, &a) in xs.iter().enumerate() {
        for (q, &b) in qs.iter().enumerate() {
            if near(a, b) {
                edges.push((NodeId::sensor(i), NodeId::backbone(q), cost_model.cost(a, b)));
            }
        }
    }
    for (p, &a) in qs.iter().enumerate() {
        for (q, &b) in qs.iter().enumerate() {
            if p != q && near(a, b) {
                edges.push((NodeId::backbone(p), NodeId::backbone(q), cost_model.cost(a, b)));
            }
        }
    }
    for (q, &a) in qs.iter().enumerate() {
        if near(a, z) {
            edges.push((NodeId::backbone(q), NodeId::fusion(), cost_model.cost(a, z)));
        }
    }

    let sensors = (1..=n_sensors).map(|i| format!("x{i}")).collect();
    let backbone = (1..=n_backbone).map(|i| format!("q{i}")).collect();
    let pos = |p: &(f64, f64)| json!([p.0, p.1]);
    let mut meta = Map::new();
    meta.insert("generator".into(), json!("random_geometric"));
    meta.insert("seed".into(), json!(seed));
    meta.insert("radius".into(), json!(radius));
    meta.insert("cost_model".into(), json!(cost_model.as_str()));
    meta.insert("fusion_placement".into(), json!("uniform"));
    meta.insert(
        "positions".into(),
        json!({
            "sensors": xs.iter().map(pos).collect::<Vec<Value>>(),
            "backbone": qs.iter().map(pos).collect::<Vec<Value>>(),
            "fusion": pos(&z),
        }),
    );
    Ok(PhysicalGraph::from_parts(sensors, backbone, "z".to_string(), edges)?.with_meta(meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EdgeKind;

    #[test]
    fn full_radius_links_everything() {
        let g = random_geometric(1, 1, std::f64::consts::SQRT_2, CostModel::DistanceSquared, 3).unwrap();
        assert_eq!(g.edges().len(), 2);
        assert_eq!(g.edges()[0].kind(), EdgeKind::SensorBackbone);
        assert_eq!(g.edges()[1].kind(), EdgeKind::BackboneFusion);
    }

    #[test]
    fn same_seed_same_graph() {
        let a = random_geometric(30, 4, 0.4, CostModel::DistanceSquared, 7).unwrap();
        let b = random_geometric(30, 4, 0.4, CostModel::DistanceSquared, 7).unwrap();
        assert_eq!(a, b);
        let c = random_geometric(30, 4, 0.4, CostModel::DistanceSquared, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn edges_respect_radius() {
        let g = random_geometric(20, 3, 0.3, CostModel::DistanceSquared, 11).unwrap();
        assert!(g.edges().iter().all(|e| e.cost.as_f64() <= 0.09 + 1e-6));
    }
}
