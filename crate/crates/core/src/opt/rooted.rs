//! Minimum-cost rooted c-node-connected spanning subgraphs.
//!
//! Every output node gets `c` parallel zero-cost arcs to the root, so the
//! problem becomes a minimum-cost spanning subgraph in which every node has
//! `c` internally disjoint paths to the root. Such minimal subgraphs have
//! out-degree exactly `c` everywhere, and the arc sets that extend to one
//! are the common independent sets of two matroids on the sensor arcs:
//!
//! * out-degree at most `c` at every sensor (a partition matroid);
//! * for every bi-set `X ⊆ W` of non-root nodes with `X` nonempty, at most
//!   `c(|X| - 1) + |W - X|` arcs leave `X` and enter `W` ([`BiSetMatroid`]).

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::flow::{node_disjoint_paths, Residual};
use crate::graph::{DynamicGraph, Role};
use crate::opt::matroid::{weighted_matroid_intersection, Matroid, PartitionMatroid, Sense};

/// Bi-set count matroid over arcs among nodes `0..n`; node `n` is the root
/// and never the head of a ground arc.
#[derive(Debug, Clone)]
pub struct BiSetMatroid {
    n: usize,
    arcs: Vec<(usize, usize)>,
    c: usize,
}

impl BiSetMatroid {
    pub fn new(n: usize, arcs: Vec<(usize, usize)>, c: usize) -> Self {
        assert!(arcs.iter().all(|&(t, h)| t < n && h < n && t != h), "ground arcs must join distinct non-root nodes");
        BiSetMatroid { n, arcs, c }
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn connectivity(&self) -> usize {
        self.c
    }

    fn out_degrees(&self, set: &[usize]) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &e in set {
            deg[self.arcs[e].0] += 1;
        }
        deg
    }

    /// Node-split residual graph of `set` padded with root arcs up to
    /// out-degree `c`. Node `v` is split into `2v` (in) and `2v + 1` (out),
    /// the root is `2n`. Returns the residual and the arc id of each element.
    fn padded(&self, set: &[usize], deg: &[usize], extra_nodes: usize) -> (Residual, Vec<usize>) {
        let root = 2 * self.n;
        let mut res = Residual::new(2 * self.n + 1 + extra_nodes);
        for v in 0..self.n {
            res.add_arc(2 * v, 2 * v + 1, 1);
        }
        let ids = set
            .iter()
            .map(|&e| {
                let (t, h) = self.arcs[e];
                res.add_arc(2 * t + 1, 2 * h, 1)
            })
            .collect();
        for v in 0..self.n {
            if deg[v] < self.c {
                res.add_arc(2 * v + 1, root, (self.c - deg[v]) as u64);
            }
        }
        (res, ids)
    }
}

impl Matroid for BiSetMatroid {
    fn ground_size(&self) -> usize {
        self.arcs.len()
    }

    /// With excess `e(v) = max(0, deg(v) - c)`, the set is independent iff
    /// for every node `v0` a super-source feeding `c + e(v0)` units into
    /// `v0` and `e(v)` into every other `v` can route `c + Σe` to the root.
    fn is_independent(&self, set: &[usize]) -> bool {
        let deg = self.out_degrees(set);
        let excess: Vec<u64> = deg.iter().map(|&d| d.saturating_sub(self.c) as u64).collect();
        let total: u64 = excess.iter().sum();
        let root = 2 * self.n;
        let source = root + 1;
        (0..self.n).all(|v0| {
            let (mut res, _) = self.padded(set, &deg, 1);
            for v in 0..self.n {
                let cap = if v == v0 { self.c as u64 + excess[v] } else { excess[v] };
                if cap > 0 {
                    res.add_arc(source, 2 * v + 1, cap);
                }
            }
            let need = self.c as u64 + total;
            res.max_flow(source, root, need) == need
        })
    }

    /// Flow-based circuits. With every out-degree of `indep` at most `c`,
    /// the padded graph routes exactly `c` units out of `u`; adding `u → w`
    /// keeps independence iff `w` still reaches the root in the residual
    /// graph, and otherwise the residual reach of `u` and `w` spans the
    /// tight bi-set whose arcs form the circuit.
    fn circuits(&self, indep: &[usize], candidates: &[usize]) -> Vec<Option<Vec<usize>>> {
        let deg = self.out_degrees(indep);
        if deg.iter().any(|&d| d > self.c) {
            return default_circuits(self, indep, candidates);
        }
        let root = 2 * self.n;
        let mut per_tail: Vec<Option<(Residual, Vec<bool>, Vec<bool>)>> = vec![None; self.n];
        let mut out = Vec::with_capacity(candidates.len());
        for &x in candidates {
            let (u, w) = self.arcs[x];
            let (res, to_root, from_u) = per_tail[u].get_or_insert_with(|| {
                let (mut res, _) = self.padded(indep, &deg, 0);
                let flow = res.max_flow(2 * u + 1, root, self.c as u64);
                debug_assert_eq!(flow, self.c as u64, "independent sets route c units from every node");
                let mut to_root = vec![false; res.node_count()];
                res.reach_into(root, &mut to_root);
                let mut from_u = vec![false; res.node_count()];
                res.reach(2 * u + 1, &mut from_u);
                (res, to_root, from_u)
            });
            if to_root[2 * w] {
                out.push(None);
                continue;
            }
            let mut reach = from_u.clone();
            res.reach(2 * w, &mut reach);
            let in_x = |v: usize| reach[2 * v + 1];
            let in_w = |v: usize| reach[2 * v] || reach[2 * v + 1];
            let circuit = indep
                .iter()
                .copied()
                .filter(|&e| {
                    let (t, h) = self.arcs[e];
                    in_x(t) && in_w(h)
                })
                .collect();
            out.push(Some(circuit));
        }
        out
    }
}

fn default_circuits<M: Matroid>(m: &M, indep: &[usize], candidates: &[usize]) -> Vec<Option<Vec<usize>>> {
    struct Plain<'a, M>(&'a M);
    impl<M: Matroid> Matroid for Plain<'_, M> {
        fn ground_size(&self) -> usize {
            self.0.ground_size()
        }
        fn is_independent(&self, set: &[usize]) -> bool {
            self.0.is_independent(set)
        }
    }
    Plain(m).circuits(indep, candidates)
}

/// Edge set of a minimum rooted connected subgraph of a dynamic graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedSubgraph {
    /// Dynamic edge ids, ascending. Includes one output→fusion edge for
    /// every output that is used.
    pub edges: Vec<usize>,
    pub cost: Cost,
}

/// Whether every sensor has `c` internally disjoint paths to the fusion
/// node using only `edges`.
pub fn is_rooted_connected(gd: &DynamicGraph, edges: &[usize], c: usize) -> bool {
    let all = gd.arcs();
    let arcs: Vec<(usize, usize)> = edges.iter().map(|&e| all[e]).collect();
    let root = gd.fusion_dense();
    (0..gd.n_sensors()).all(|x| node_disjoint_paths(gd.node_count(), &arcs, x, root, c as u64) >= c as u64)
}

/// Minimum-cost edge set in which every sensor has `c` internally
/// node-disjoint paths to the fusion node.
pub fn min_rooted_connected_subgraph(gd: &DynamicGraph, c: usize) -> Result<RootedSubgraph> {
    if c == 0 {
        return Err(Error::Internal("connectivity must be at least 1".into()));
    }
    let n_sensors = gd.n_sensors();
    let all_arcs = gd.arcs();
    let root = gd.fusion_dense();
    for x in 0..n_sensors {
        let found = node_disjoint_paths(gd.node_count(), &all_arcs, x, root, c as u64) as usize;
        if found < c {
            return Err(Error::Infeasible { sensor: gd.sensor_names[x].clone(), found, required: c });
        }
    }

    let ground: Vec<usize> = gd.edges.iter().filter(|e| e.tail.role == Role::Sensor).map(|e| e.id).collect();
    let arcs: Vec<(usize, usize)> = ground.iter().map(|&id| all_arcs[id]).collect();
    let m1 = PartitionMatroid::new(arcs.iter().map(|&(t, _)| t).collect(), vec![c; n_sensors]);
    let m2 = BiSetMatroid::new(root, arcs.clone(), c);
    let weights: Vec<i64> = ground.iter().map(|&id| gd.edges[id].cost.micros() as i64).collect();
    let chosen = weighted_matroid_intersection(&m1, &m2, &weights, Sense::Minimize);
    if chosen.len() != c * n_sensors {
        return Err(Error::Internal(format!(
            "matroid intersection found {} arcs, expected {}",
            chosen.len(),
            c * n_sensors
        )));
    }

    let mut edges: Vec<usize> = chosen.iter().map(|&i| ground[i]).collect();
    for row in 0..gd.n_outputs() {
        let target = gd.dense(crate::graph::NodeId::output(row));
        if chosen.iter().any(|&i| arcs[i].1 == target) {
            edges.push(gd.output_fusion_edge(row).id);
        }
    }
    edges.sort_unstable();
    if !is_rooted_connected(gd, &edges, c) {
        return Err(Error::Internal("optimizer returned a subgraph below the required connectivity".into()));
    }
    let cost = gd.total_cost(&edges);
    Ok(RootedSubgraph { edges, cost })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive bi-set count check.
    fn biset_independent(m: &BiSetMatroid, set: &[usize]) -> bool {
        let n = m.n;
        // Each node: 0 outside, 1 in W only, 2 in X (and W).
        let total = 3usize.pow(n as u32);
        (0..total).all(|mut code| {
            let mut label = vec![0u8; n];
            for l in label.iter_mut() {
                *l = (code % 3) as u8;
                code /= 3;
            }
            let x = label.iter().filter(|&&l| l == 2).count();
            if x == 0 {
                return true;
            }
            let w_minus_x = label.iter().filter(|&&l| l == 1).count();
            let count = set
                .iter()
                .filter(|&&e| {
                    let (t, h) = m.arcs[e];
                    label[t] == 2 && label[h] != 0
                })
                .count();
            count <= m.c * (x - 1) + w_minus_x
        })
    }

    fn all_arcs(n: usize) -> Vec<(usize, usize)> {
        (0..n).flat_map(|t| (0..n).filter(move |&h| h != t).map(move |h| (t, h))).collect()
    }

    #[test]
    fn flow_oracle_matches_biset_count_on_three_nodes() {
        for c in 1..=2 {
            let m = BiSetMatroid::new(3, all_arcs(3), c);
            for mask in 0u32..(1 << 6) {
                let set: Vec<usize> = (0..6).filter(|&i| mask >> i & 1 == 1).collect();
                assert_eq!(m.is_independent(&set), biset_independent(&m, &set), "c={c} set={set:?}");
            }
        }
    }

    #[test]
    fn fast_circuits_match_definition() {
        let m = BiSetMatroid::new(3, all_arcs(3), 1);
        for mask in 0u32..(1 << 6) {
            let set: Vec<usize> = (0..6).filter(|&i| mask >> i & 1 == 1).collect();
            if !m.is_independent(&set) {
                continue;
            }
            let cands: Vec<usize> = (0..6).filter(|i| !set.contains(i)).collect();
            assert_eq!(m.circuits(&set, &cands), default_circuits(&m, &set, &cands), "set={set:?}");
        }
    }

    #[test]
    fn two_cycle_is_dependent_for_one_path() {
        let m = BiSetMatroid::new(2, vec![(0, 1), (1, 0)], 1);
        assert!(m.is_independent(&[0]));
        assert!(!m.is_independent(&[0, 1]));
    }
}
