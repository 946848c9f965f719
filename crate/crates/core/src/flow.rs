//! Maximum flow and local node connectivity.
//!
//! All flow computations use breadth-first augmenting paths over arcs in
//! insertion order, so both flow values and residual graphs are
//! deterministic.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{EdgeKind, PhysicalGraph, Role};

/// Capacity sentinel for unbounded arcs.
pub const INFINITE: u64 = u64::MAX;

/// Residual graph used by every flow computation in the crate.
#[derive(Debug, Clone)]
pub(crate) struct Residual {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u64>,
}

impl Residual {
    pub(crate) fn new(n: usize) -> Self {
        Residual { adj: vec![Vec::new(); n], to: Vec::new(), cap: Vec::new() }
    }

    pub(crate) fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub(crate) fn add_arc(&mut self, from: usize, to: usize, cap: u64) -> usize {
        let id = self.to.len();
        self.to.push(to);
        self.cap.push(cap);
        self.adj[from].push(id);
        self.to.push(from);
        self.cap.push(0);
        self.adj[to].push(id + 1);
        id
    }

    /// Augments from `s` to `t` until no path remains or `limit` is reached.
    pub(crate) fn max_flow(&mut self, s: usize, t: usize, limit: u64) -> u64 {
        let n = self.adj.len();
        let mut total = 0u64;
        let mut parent_arc = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        while total < limit {
            parent_arc.iter_mut().for_each(|p| *p = usize::MAX);
            queue.clear();
            queue.push_back(s);
            let mut seen = vec![false; n];
            seen[s] = true;
            'bfs: while let Some(u) = queue.pop_front() {
                for &a in &self.adj[u] {
                    let v = self.to[a];
                    if !seen[v] && self.cap[a] > 0 {
                        seen[v] = true;
                        parent_arc[v] = a;
                        if v == t {
                            break 'bfs;
                        }
                        queue.push_back(v);
                    }
                }
            }
            if !seen[t] {
                break;
            }
            let mut bottleneck = limit - total;
            let mut v = t;
            while v != s {
                let a = parent_arc[v];
                bottleneck = bottleneck.min(self.cap[a]);
                v = self.to[a ^ 1];
            }
            let mut v = t;
            while v != s {
                let a = parent_arc[v];
                if self.cap[a] != INFINITE {
                    self.cap[a] -= bottleneck;
                }
                if self.cap[a ^ 1] != INFINITE {
                    self.cap[a ^ 1] = self.cap[a ^ 1].saturating_add(bottleneck);
                }
                v = self.to[a ^ 1];
            }
            total += bottleneck;
        }
        total
    }

    /// Nodes reachable from `from` through arcs with residual capacity.
    pub(crate) fn reach(&self, from: usize, seen: &mut [bool]) {
        if seen[from] {
            return;
        }
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(u) = stack.pop() {
            for &a in &self.adj[u] {
                let v = self.to[a];
                if !seen[v] && self.cap[a] > 0 {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
    }

    /// Nodes that reach `target` through arcs with residual capacity.
    pub(crate) fn reach_into(&self, target: usize, seen: &mut [bool]) {
        if seen[target] {
            return;
        }
        let mut stack = vec![target];
        seen[target] = true;
        while let Some(v) = stack.pop() {
            for &a in &self.adj[v] {
                let w = self.to[a];
                if !seen[w] && self.cap[a ^ 1] > 0 {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowArc {
    pub tail: usize,
    pub head: usize,
    /// Capacity; [`INFINITE`] marks an unbounded arc.
    pub capacity: u64,
}

/// A capacitated network with one source and a set of sinks, which are
/// aggregated through a synthetic super-sink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowNetwork {
    pub n_nodes: usize,
    pub arcs: Vec<FlowArc>,
    pub source: usize,
    pub sinks: Vec<usize>,
}

impl FlowNetwork {
    pub fn new(n_nodes: usize, source: usize, sinks: Vec<usize>) -> Self {
        FlowNetwork { n_nodes, arcs: Vec::new(), source, sinks }
    }

    pub fn add_arc(&mut self, tail: usize, head: usize, capacity: u64) {
        self.arcs.push(FlowArc { tail, head, capacity });
    }
}

/// Maximum flow from the source into the aggregated sink set.
pub fn max_flow(net: &FlowNetwork) -> Result<u64> {
    if net.sinks.contains(&net.source) {
        return Err(Error::SourceIsSink);
    }
    let super_sink = net.n_nodes;
    let mut res = Residual::new(net.n_nodes + 1);
    for a in &net.arcs {
        res.add_arc(a.tail, a.head, a.capacity);
    }
    for &t in &net.sinks {
        res.add_arc(t, super_sink, INFINITE);
    }
    Ok(res.max_flow(net.source, super_sink, INFINITE))
}

/// A plain directed multigraph on nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Digraph {
    pub n: usize,
    pub arcs: Vec<(usize, usize)>,
}

impl Digraph {
    pub fn new(n: usize, arcs: Vec<(usize, usize)>) -> Self {
        Digraph { n, arcs }
    }
}

/// Number of internally node-disjoint `u → v` paths (Menger), computed as
/// a unit node-capacitated max flow. Parallel arcs count as distinct
/// paths; self-loops never contribute.
pub fn local_node_connectivity(g: &Digraph, u: usize, v: usize) -> Result<usize> {
    if u == v {
        return Err(Error::SameEndpoints);
    }
    Ok(node_disjoint_paths(g.n, &g.arcs, u, v, INFINITE) as usize)
}

/// Node-split max flow: every node other than `source` and `sink` has
/// capacity one, every arc capacity one. Stops early at `limit`.
pub(crate) fn node_disjoint_paths(n: usize, arcs: &[(usize, usize)], source: usize, sink: usize, limit: u64) -> u64 {
    let mut res = Residual::new(2 * n);
    for v in 0..n {
        let cap = if v == source || v == sink { INFINITE } else { 1 };
        res.add_arc(2 * v, 2 * v + 1, cap);
    }
    for &(a, b) in arcs {
        if a != b {
            res.add_arc(2 * a + 1, 2 * b, 1);
        }
    }
    res.max_flow(2 * source + 1, 2 * sink, limit)
}

/// Maximum number of internally node-disjoint paths from sensor `x` into
/// the backbone set. Non-source sensors have capacity one, every
/// sensor→sensor and sensor→backbone link has capacity one, backbone nodes
/// are unbounded.
pub fn sensor_disjoint_paths(g: &PhysicalGraph, x: usize) -> usize {
    let n = g.n_sensors();
    // Sensor v: in = 2v, out = 2v + 1. Backbone q: 2n + q.
    let backbone = |q: usize| 2 * n + q;
    let mut net = FlowNetwork::new(2 * n + g.n_backbone(), 2 * x + 1, (0..g.n_backbone()).map(backbone).collect());
    for v in 0..n {
        if v != x {
            net.add_arc(2 * v, 2 * v + 1, 1);
        }
    }
    for e in g.edges() {
        match e.kind() {
            EdgeKind::SensorSensor => net.add_arc(2 * e.tail.index + 1, 2 * e.head.index, 1),
            EdgeKind::SensorBackbone => net.add_arc(2 * e.tail.index + 1, backbone(e.head.index), 1),
            _ => {}
        }
    }
    max_flow(&net).expect("sensor source is never a backbone sink") as usize
}

/// Largest robustness level a graph admits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Robustness {
    Max(usize),
    Infeasible,
}

impl Robustness {
    pub fn admits(self, k: usize) -> bool {
        matches!(self, Robustness::Max(m) if m >= k)
    }
}

/// Backbone nodes (by index) with a directed path to the fusion center
/// over backbone links.
pub fn backbone_reaches_fusion(g: &PhysicalGraph) -> Vec<bool> {
    let nq = g.n_backbone();
    let mut reaches = vec![false; nq];
    let mut stack = Vec::new();
    for e in g.edges_of_kind(EdgeKind::BackboneFusion) {
        if !reaches[e.tail.index] {
            reaches[e.tail.index] = true;
            stack.push(e.tail.index);
        }
    }
    while let Some(q) = stack.pop() {
        for e in g.edges_of_kind(EdgeKind::BackboneBackbone) {
            if e.head.index == q && !reaches[e.tail.index] {
                reaches[e.tail.index] = true;
                stack.push(e.tail.index);
            }
        }
    }
    reaches
}

/// One less than the smallest sensor-to-backbone disjoint path count, or
/// infeasible when some sensor has no route or some backbone node fed by a
/// sensor cannot reach the fusion center.
pub fn max_robustness(g: &PhysicalGraph) -> Robustness {
    let reaches = backbone_reaches_fusion(g);
    let used_unreachable = g
        .edges_of_kind(EdgeKind::SensorBackbone)
        .any(|e| e.head.role == Role::Backbone && !reaches[e.head.index]);
    if used_unreachable {
        return Robustness::Infeasible;
    }
    let min = (0..g.n_sensors()).map(|x| sensor_disjoint_paths(g, x)).min().unwrap_or(0);
    if min == 0 {
        Robustness::Infeasible
    } else {
        Robustness::Max(min - 1)
    }
}

/// The weakest sensor: index and disjoint path count.
pub fn weakest_sensor(g: &PhysicalGraph) -> (usize, usize) {
    (0..g.n_sensors())
        .map(|x| (x, sensor_disjoint_paths(g, x)))
        .min_by_key(|&(x, f)| (f, x))
        .expect("graphs have at least one sensor")
}
