//! Physical and dynamic network graphs.
//!
//! A [`PhysicalGraph`] holds sensors, backbone relays and a single fusion
//! center, with directed feasible links restricted to sensor→sensor,
//! sensor→backbone, backbone→backbone and backbone→fusion. A
//! [`DynamicGraph`] replaces the backbone with one output node per
//! sensor→backbone link; it is what the optimizer works on.

use std::collections::HashMap;

use crate::cost::Cost;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Sensor,
    Backbone,
    Fusion,
    Output,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Sensor => "sensor",
            Role::Backbone => "backbone",
            Role::Fusion => "fusion",
            Role::Output => "output",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    pub role: Role,
    pub index: usize,
}

impl NodeId {
    pub fn sensor(index: usize) -> Self {
        NodeId { role: Role::Sensor, index }
    }
    pub fn backbone(index: usize) -> Self {
        NodeId { role: Role::Backbone, index }
    }
    pub fn fusion() -> Self {
        NodeId { role: Role::Fusion, index: 0 }
    }
    pub fn output(index: usize) -> Self {
        NodeId { role: Role::Output, index }
    }
}

/// Which part of the physical network an edge belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    SensorSensor,
    SensorBackbone,
    BackboneBackbone,
    BackboneFusion,
}

impl EdgeKind {
    pub fn classify(tail: Role, head: Role) -> Option<EdgeKind> {
        match (tail, head) {
            (Role::Sensor, Role::Sensor) => Some(EdgeKind::SensorSensor),
            (Role::Sensor, Role::Backbone) => Some(EdgeKind::SensorBackbone),
            (Role::Backbone, Role::Backbone) => Some(EdgeKind::BackboneBackbone),
            (Role::Backbone, Role::Fusion) => Some(EdgeKind::BackboneFusion),
            _ => None,
        }
    }

    pub fn is_backbone(self) -> bool {
        matches!(self, EdgeKind::BackboneBackbone | EdgeKind::BackboneFusion)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: usize,
    pub tail: NodeId,
    pub head: NodeId,
    pub cost: Cost,
}

impl Edge {
    pub fn kind(&self) -> EdgeKind {
        EdgeKind::classify(self.tail.role, self.head.role).expect("edges are validated at construction")
    }
}

/// The feasible-link graph of a sensor network.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalGraph {
    sensors: Vec<String>,
    backbone: Vec<String>,
    fusion: String,
    edges: Vec<Edge>,
    meta: serde_json::Map<String, serde_json::Value>,
}

impl PhysicalGraph {
    /// Builds a graph from named nodes and named edges, validating roles.
    pub fn new<S: Into<String>>(
        sensors: Vec<S>,
        backbone: Vec<S>,
        fusion: S,
        edges: Vec<(String, String, Cost)>,
    ) -> Result<Self> {
        let sensors: Vec<String> = sensors.into_iter().map(Into::into).collect();
        let backbone: Vec<String> = backbone.into_iter().map(Into::into).collect();
        let fusion: String = fusion.into();
        if fusion.is_empty() {
            return Err(Error::MissingFusion);
        }
        let mut lookup: HashMap<&str, NodeId> = HashMap::new();
        let all = sensors
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), NodeId::sensor(i)))
            .chain(backbone.iter().enumerate().map(|(i, n)| (n.as_str(), NodeId::backbone(i))))
            .chain(std::iter::once((fusion.as_str(), NodeId::fusion())));
        for (name, id) in all {
            if lookup.insert(name, id).is_some() {
                return Err(Error::DuplicateNode(name.to_string()));
            }
        }
        let mut resolved = Vec::with_capacity(edges.len());
        for (from, to, cost) in &edges {
            let tail = *lookup.get(from.as_str()).ok_or_else(|| Error::UnknownNode(from.clone()))?;
            let head = *lookup.get(to.as_str()).ok_or_else(|| Error::UnknownNode(to.clone()))?;
            resolved.push((tail, head, *cost));
        }
        Self::from_parts(sensors, backbone, fusion, resolved)
    }

    /// Builds a graph from index-addressed edges. Edge ids are assigned
    /// densely in the given order.
    pub fn from_parts(
        sensors: Vec<String>,
        backbone: Vec<String>,
        fusion: String,
        edges: Vec<(NodeId, NodeId, Cost)>,
    ) -> Result<Self> {
        if sensors.is_empty() {
            return Err(Error::NoSensors);
        }
        let graph_names = (sensors.clone(), backbone.clone(), fusion.clone());
        let name = |id: NodeId| -> String {
            match id.role {
                Role::Sensor => graph_names.0.get(id.index).cloned(),
                Role::Backbone => graph_names.1.get(id.index).cloned(),
                Role::Fusion => Some(graph_names.2.clone()),
                Role::Output => None,
            }
            .unwrap_or_else(|| format!("{}#{}", id.role.as_str(), id.index))
        };
        let mut out = Vec::with_capacity(edges.len());
        for (id, (tail, head, cost)) in edges.into_iter().enumerate() {
            let in_range = |n: NodeId| match n.role {
                Role::Sensor => n.index < sensors.len(),
                Role::Backbone => n.index < backbone.len(),
                Role::Fusion => n.index == 0,
                Role::Output => false,
            };
            if !in_range(tail) {
                return Err(Error::UnknownNode(name(tail)));
            }
            if !in_range(head) {
                return Err(Error::UnknownNode(name(head)));
            }
            if tail == head {
                return Err(Error::SelfLoop(name(tail)));
            }
            if EdgeKind::classify(tail.role, head.role).is_none() {
                return Err(Error::DisallowedEdge { from: name(tail), to: name(head) });
            }
            out.push(Edge { id, tail, head, cost });
        }
        Ok(PhysicalGraph { sensors, backbone, fusion, edges: out, meta: serde_json::Map::new() })
    }

    pub fn with_meta(mut self, meta: serde_json::Map<String, serde_json::Value>) -> Self {
        self.meta = meta;
        self
    }

    pub fn meta(&self) -> &serde_json::Map<String, serde_json::Value> {
        &self.meta
    }

    pub fn n_sensors(&self) -> usize {
        self.sensors.len()
    }

    pub fn n_backbone(&self) -> usize {
        self.backbone.len()
    }

    pub fn sensor_names(&self) -> &[String] {
        &self.sensors
    }

    pub fn backbone_names(&self) -> &[String] {
        &self.backbone
    }

    pub fn fusion_name(&self) -> &str {
        &self.fusion
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn name(&self, id: NodeId) -> &str {
        match id.role {
            Role::Sensor => &self.sensors[id.index],
            Role::Backbone => &self.backbone[id.index],
            Role::Fusion => &self.fusion,
            Role::Output => panic!("physical graphs have no output nodes"),
        }
    }

    pub fn find(&self, name: &str) -> Option<NodeId> {
        if let Some(i) = self.sensors.iter().position(|s| s == name) {
            return Some(NodeId::sensor(i));
        }
        if let Some(i) = self.backbone.iter().position(|s| s == name) {
            return Some(NodeId::backbone(i));
        }
        (self.fusion == name).then(NodeId::fusion)
    }

    pub fn edges_of_kind(&self, kind: EdgeKind) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.kind() == kind)
    }

    /// Sensor→backbone links in edge-id order; row `i` of the output
    /// matrix corresponds to the `i`-th element.
    pub fn sensor_backbone_edges(&self) -> Vec<&Edge> {
        self.edges_of_kind(EdgeKind::SensorBackbone).collect()
    }
}

/// One output node `y_(x,q)` of the dynamic graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutputNode {
    pub source_sensor: usize,
    pub via_backbone: usize,
    /// Id of the originating sensor→backbone physical edge.
    pub physical_edge: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynamicVariant {
    Base,
    Shifted,
}

/// Where a dynamic edge comes from in the physical graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeOrigin {
    /// A sensor→sensor or sensor→backbone physical edge.
    Physical(usize),
    /// The least-cost backbone route of the given output row.
    Route(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicEdge {
    pub id: usize,
    pub tail: NodeId,
    pub head: NodeId,
    pub cost: Cost,
    pub origin: EdgeOrigin,
}

/// State/output/fusion graph derived from a [`PhysicalGraph`].
///
/// Edge ids are dense: sensor→sensor edges first (physical order), then one
/// sensor→output edge per output row, then one output→fusion edge per row.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicGraph {
    pub sensor_names: Vec<String>,
    pub backbone_names: Vec<String>,
    pub fusion_name: String,
    pub outputs: Vec<OutputNode>,
    pub edges: Vec<DynamicEdge>,
    pub variant: DynamicVariant,
}

impl DynamicGraph {
    pub fn n_sensors(&self) -> usize {
        self.sensor_names.len()
    }

    pub fn n_outputs(&self) -> usize {
        self.outputs.len()
    }

    /// Total node count: sensors, outputs and the fusion center.
    pub fn node_count(&self) -> usize {
        self.n_sensors() + self.n_outputs() + 1
    }

    /// Dense index: sensors `0..N`, outputs `N..N+M`, fusion `N+M`.
    pub fn dense(&self, id: NodeId) -> usize {
        match id.role {
            Role::Sensor => id.index,
            Role::Output => self.n_sensors() + id.index,
            Role::Fusion => self.n_sensors() + self.n_outputs(),
            Role::Backbone => panic!("dynamic graphs have no backbone nodes"),
        }
    }

    pub fn fusion_dense(&self) -> usize {
        self.n_sensors() + self.n_outputs()
    }

    pub fn output_name(&self, row: usize) -> String {
        let o = &self.outputs[row];
        format!("y_({},{})", self.sensor_names[o.source_sensor], self.backbone_names[o.via_backbone])
    }

    pub fn name(&self, id: NodeId) -> String {
        match id.role {
            Role::Sensor => self.sensor_names[id.index].clone(),
            Role::Output => self.output_name(id.index),
            Role::Fusion => self.fusion_name.clone(),
            Role::Backbone => self.backbone_names[id.index].clone(),
        }
    }

    /// Arcs as dense `(tail, head)` pairs, in edge-id order.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (self.dense(e.tail), self.dense(e.head))).collect()
    }

    pub fn sensor_output_edge(&self, row: usize) -> &DynamicEdge {
        let n_xx = self.edges.len() - 2 * self.n_outputs();
        &self.edges[n_xx + row]
    }

    pub fn output_fusion_edge(&self, row: usize) -> &DynamicEdge {
        let n_xx = self.edges.len() - 2 * self.n_outputs();
        &self.edges[n_xx + self.n_outputs() + row]
    }

    pub fn total_cost(&self, edge_ids: &[usize]) -> Cost {
        edge_ids.iter().map(|&id| self.edges[id].cost).sum()
    }
}
