//! End-to-end design: backbone routing, dynamic graph construction, weight
//! shift, rooted connectivity optimization and structure extraction.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::flow::{max_robustness, weakest_sensor};
use crate::graph::{
    DynamicEdge, DynamicGraph, DynamicVariant, EdgeKind, EdgeOrigin, NodeId, OutputNode, PhysicalGraph, Role,
};
use crate::opt::rooted::min_rooted_connected_subgraph;
use crate::structure::{BoolMatrix, OutputSource, StructuralPair};

/// Least-cost backbone routes toward the fusion center.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackboneRoutes {
    /// Route cost per backbone node; `None` when it cannot reach fusion.
    pub dist: Vec<Option<Cost>>,
    /// First edge of the route per backbone node.
    pub parent: Vec<Option<usize>>,
}

impl BackboneRoutes {
    /// Edge ids along the route from backbone node `q`.
    pub fn route(&self, g: &PhysicalGraph, q: usize) -> Option<Vec<usize>> {
        self.dist[q]?;
        let mut edges = Vec::new();
        let mut cur = q;
        loop {
            let e = g.edge(self.parent[cur]?);
            edges.push(e.id);
            match e.head.role {
                Role::Fusion => return Some(edges),
                _ => cur = e.head.index,
            }
        }
    }
}

/// Dijkstra toward the fusion node over backbone links. Among equal-cost
/// choices a node keeps the lowest edge id.
pub fn backbone_shortest_paths(g: &PhysicalGraph) -> BackboneRoutes {
    let nq = g.n_backbone();
    // Index nq stands for the fusion node.
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); nq + 1];
    for e in g.edges().iter().filter(|e| e.kind().is_backbone()) {
        let head = if e.head.role == Role::Fusion { nq } else { e.head.index };
        incoming[head].push(e.id);
    }
    let mut dist: Vec<Option<Cost>> = vec![None; nq + 1];
    let mut parent: Vec<Option<usize>> = vec![None; nq + 1];
    let mut done = vec![false; nq + 1];
    let mut heap = BinaryHeap::new();
    dist[nq] = Some(Cost::ZERO);
    heap.push(Reverse((Cost::ZERO, nq)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        for &id in &incoming[v] {
            let e = g.edge(id);
            let u = e.tail.index;
            if done[u] {
                continue;
            }
            let cand = d + e.cost;
            let better = match (dist[u], parent[u]) {
                (None, _) => true,
                (Some(cur), Some(p)) => cand < cur || (cand == cur && id < p),
                (Some(cur), None) => cand < cur,
            };
            if better {
                dist[u] = Some(cand);
                parent[u] = Some(id);
                heap.push(Reverse((cand, u)));
            }
        }
    }
    dist.truncate(nq);
    parent.truncate(nq);
    BackboneRoutes { dist, parent }
}

/// Dynamic graph with one output per sensor→backbone edge. Output rows
/// follow the physical order of those edges.
pub fn build_dynamic_graph(g: &PhysicalGraph, routes: &BackboneRoutes) -> Result<DynamicGraph> {
    let mut outputs = Vec::new();
    for e in g.edges_of_kind(EdgeKind::SensorBackbone) {
        if routes.dist[e.head.index].is_none() {
            return Err(Error::UnreachableBackbone(g.name(e.head).to_string()));
        }
        outputs.push(OutputNode { source_sensor: e.tail.index, via_backbone: e.head.index, physical_edge: e.id });
    }
    let mut edges = Vec::new();
    for e in g.edges_of_kind(EdgeKind::SensorSensor) {
        edges.push(DynamicEdge { id: edges.len(), tail: e.tail, head: e.head, cost: e.cost, origin: EdgeOrigin::Physical(e.id) });
    }
    for (row, o) in outputs.iter().enumerate() {
        edges.push(DynamicEdge {
            id: edges.len(),
            tail: NodeId::sensor(o.source_sensor),
            head: NodeId::output(row),
            cost: g.edge(o.physical_edge).cost,
            origin: EdgeOrigin::Physical(o.physical_edge),
        });
    }
    for (row, o) in outputs.iter().enumerate() {
        edges.push(DynamicEdge {
            id: edges.len(),
            tail: NodeId::output(row),
            head: NodeId::fusion(),
            cost: routes.dist[o.via_backbone].expect("checked above"),
            origin: EdgeOrigin::Route(row),
        });
    }
    Ok(DynamicGraph {
        sensor_names: g.sensor_names().to_vec(),
        backbone_names: g.backbone_names().to_vec(),
        fusion_name: g.fusion_name().to_string(),
        outputs,
        edges,
        variant: DynamicVariant::Base,
    })
}

/// Moves each output's route cost onto its incoming sensor edge.
pub fn shift_weights(gd: &DynamicGraph) -> DynamicGraph {
    assert_eq!(gd.variant, DynamicVariant::Base, "weights are shifted once");
    let mut out = gd.clone();
    for row in 0..gd.n_outputs() {
        let route = gd.output_fusion_edge(row).cost;
        let into = gd.sensor_output_edge(row).id;
        let from = gd.output_fusion_edge(row).id;
        out.edges[into].cost = gd.edges[into].cost + route;
        out.edges[from].cost = Cost::ZERO;
    }
    out.variant = DynamicVariant::Shifted;
    out
}

/// A named physical edge reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeRef {
    pub id: usize,
    pub from: String,
    pub to: String,
}

/// Output row bookkeeping for a design.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputInfo {
    pub row: usize,
    pub sensor: String,
    pub backbone: String,
    pub used: bool,
}

/// Both readings of the network cost of a structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostReport {
    /// Sensor links plus the full route cost of every used output.
    pub per_output_sum: Cost,
    /// Each used physical edge counted once.
    pub deduplicated: Cost,
    /// Used physical edge ids, ascending.
    pub used_edges: Vec<usize>,
    /// Route cost `w_P(x,q) + w_spath(q,z)` per output row, when used.
    pub per_output_route_cost: Vec<Option<Cost>>,
}

/// Prices a structure on `g`. Each link of `Ã` is charged at the cheapest
/// matching sensor→sensor edge (lowest id among ties).
pub fn evaluate_cost(g: &PhysicalGraph, s: &StructuralPair) -> Result<CostReport> {
    evaluate_with_routes(g, &backbone_shortest_paths(g), s)
}

fn evaluate_with_routes(g: &PhysicalGraph, routes: &BackboneRoutes, s: &StructuralPair) -> Result<CostReport> {
    let n = g.n_sensors();
    let xq: Vec<&crate::graph::Edge> = g.edges_of_kind(EdgeKind::SensorBackbone).collect();
    if s.n_states() != n || s.n_outputs() != xq.len() {
        return Err(Error::InvalidStructure(format!(
            "structure is {}x{} with {} outputs, graph has {n} sensors and {} sensor-backbone edges",
            s.n_states(),
            s.n_states(),
            s.n_outputs(),
            xq.len()
        )));
    }
    let mut per_output_sum = Cost::ZERO;
    let mut used = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            if i == j || !s.a().get(i, j) {
                continue;
            }
            let e = g
                .edges_of_kind(EdgeKind::SensorSensor)
                .filter(|e| e.tail.index == j && e.head.index == i)
                .min_by_key(|e| (e.cost, e.id))
                .ok_or_else(|| {
                    Error::InvalidStructure(format!(
                        "link {} -> {} is not a feasible edge",
                        g.sensor_names()[j],
                        g.sensor_names()[i]
                    ))
                })?;
            per_output_sum += e.cost;
            used.insert(e.id);
        }
    }
    let mut per_output_route_cost = vec![None; xq.len()];
    for (row, e) in xq.iter().enumerate() {
        if !s.output_used(row) {
            continue;
        }
        if !s.c().get(row, e.tail.index) {
            return Err(Error::InvalidStructure(format!("output row {row} senses a sensor other than its own")));
        }
        let q = e.head.index;
        let route = routes.route(g, q).ok_or_else(|| Error::UnreachableBackbone(g.backbone_names()[q].clone()))?;
        let cost = e.cost + routes.dist[q].expect("route exists");
        per_output_route_cost[row] = Some(cost);
        per_output_sum += cost;
        used.insert(e.id);
        used.extend(route);
    }
    let deduplicated = used.iter().map(|&id| g.edge(id).cost).sum();
    Ok(CostReport { per_output_sum, deduplicated, used_edges: used.into_iter().collect(), per_output_route_cost })
}

/// The designed structure and its costs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignSolution {
    pub k: usize,
    pub sensors: Vec<String>,
    pub backbone: Vec<String>,
    pub structure: StructuralPair,
    pub outputs: Vec<OutputInfo>,
    pub per_output_route_cost: Vec<Option<Cost>>,
    pub cost_per_output_sum: Cost,
    pub cost_deduplicated: Cost,
    pub used_edges: Vec<EdgeRef>,
}

impl DesignSolution {
    pub fn used_edge_ids(&self) -> Vec<usize> {
        self.used_edges.iter().map(|e| e.id).collect()
    }

    /// True when used outputs share backbone edges, so the two cost
    /// readings differ.
    pub fn costs_disagree(&self) -> bool {
        self.cost_per_output_sum != self.cost_deduplicated
    }
}

/// Structure with self-loops on every sensor, links for the chosen
/// sensor→sensor edges and rows for the chosen sensor→output edges.
pub fn structure_from_edges(gd: &DynamicGraph, edges: &[usize]) -> StructuralPair {
    let n = gd.n_sensors();
    let mut a = BoolMatrix::identity(n);
    let mut c = BoolMatrix::zeros(gd.n_outputs(), n);
    for &id in edges {
        let e = &gd.edges[id];
        match (e.tail.role, e.head.role) {
            (Role::Sensor, Role::Sensor) => a.set(e.head.index, e.tail.index, true),
            (Role::Sensor, Role::Output) => c.set(e.head.index, e.tail.index, true),
            _ => {}
        }
    }
    let index = gd
        .outputs
        .iter()
        .map(|o| Some(OutputSource { sensor: o.source_sensor, backbone: o.via_backbone }))
        .collect();
    StructuralPair::new(a, c, index).expect("rows sense their own source sensor")
}

/// Checks that some sensor feeds an unroutable backbone node.
fn check_backbone(g: &PhysicalGraph, routes: &BackboneRoutes) -> Result<()> {
    match g.edges_of_kind(EdgeKind::SensorBackbone).find(|e| routes.dist[e.head.index].is_none()) {
        Some(e) => Err(Error::UnreachableBackbone(g.name(e.head).to_string())),
        None => Ok(()),
    }
}

/// Minimum-cost structure that stays structurally observable under any
/// `k` sensor failures.
pub fn design(g: &PhysicalGraph, k: usize) -> Result<DesignSolution> {
    let routes = backbone_shortest_paths(g);
    check_backbone(g, &routes)?;
    if !max_robustness(g).admits(k) {
        let (x, found) = weakest_sensor(g);
        return Err(Error::Infeasible { sensor: g.sensor_names()[x].clone(), found, required: k + 1 });
    }
    let base = build_dynamic_graph(g, &routes)?;
    let shifted = shift_weights(&base);
    let sub = min_rooted_connected_subgraph(&shifted, k + 1)?;
    if base.total_cost(&sub.edges) != sub.cost {
        return Err(Error::Internal("weight shift changed the cost of the optimal subgraph".into()));
    }
    let structure = structure_from_edges(&base, &sub.edges);
    let report = evaluate_with_routes(g, &routes, &structure)?;
    if report.per_output_sum != sub.cost {
        return Err(Error::Internal(format!(
            "structure costs {} but the optimizer reported {}",
            report.per_output_sum, sub.cost
        )));
    }
    Ok(assemble(g, k, structure, report))
}

pub(crate) fn assemble(g: &PhysicalGraph, k: usize, structure: StructuralPair, report: CostReport) -> DesignSolution {
    let outputs = g
        .edges_of_kind(EdgeKind::SensorBackbone)
        .enumerate()
        .map(|(row, e)| OutputInfo {
            row,
            sensor: g.name(e.tail).to_string(),
            backbone: g.name(e.head).to_string(),
            used: structure.output_used(row),
        })
        .collect();
    let used_edges = report
        .used_edges
        .iter()
        .map(|&id| {
            let e = g.edge(id);
            EdgeRef { id, from: g.name(e.tail).to_string(), to: g.name(e.head).to_string() }
        })
        .collect();
    DesignSolution {
        k,
        sensors: g.sensor_names().to_vec(),
        backbone: g.backbone_names().to_vec(),
        structure,
        outputs,
        per_output_route_cost: report.per_output_route_cost,
        cost_per_output_sum: report.per_output_sum,
        cost_deduplicated: report.deduplicated,
        used_edges,
    }
}
