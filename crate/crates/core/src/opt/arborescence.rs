//! Minimum spanning arborescence toward a root (Chu-Liu/Edmonds).
//!
//! Arcs point toward the root: every non-root node selects exactly one
//! outgoing arc, and following selections from any node reaches the root.

use crate::cost::Cost;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightedArc {
    pub tail: usize,
    pub head: usize,
    pub cost: Cost,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArborescenceResult {
    /// Indices into the input arc list, ascending.
    pub edges: Vec<usize>,
    pub total_cost: Cost,
    pub root: usize,
}

pub fn min_spanning_arborescence(n: usize, arcs: &[WeightedArc], root: usize) -> Result<ArborescenceResult> {
    // Every node must reach the root.
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for a in arcs {
        preds[a.head].push(a.tail);
    }
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for &u in &preds[v] {
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    if let Some(v) = seen.iter().position(|&s| !s) {
        return Err(Error::RootUnreachable(v));
    }
    let work: Vec<(usize, usize, u64, usize)> =
        arcs.iter().enumerate().filter(|(_, a)| a.tail != a.head).map(|(i, a)| (a.tail, a.head, a.cost.micros(), i)).collect();
    let mut edges = solve(n, root, &work);
    edges.sort_unstable();
    let total_cost = edges.iter().map(|&i| arcs[i].cost).sum();
    Ok(ArborescenceResult { edges, total_cost, root })
}

/// One contraction level. `arcs` carry `(tail, head, reduced cost, original index)`.
fn solve(n: usize, root: usize, arcs: &[(usize, usize, u64, usize)]) -> Vec<usize> {
    // Cheapest outgoing arc per node; ties go to the lowest original index.
    let mut best: Vec<Option<usize>> = vec![None; n];
    for (pos, &(t, _, w, orig)) in arcs.iter().enumerate() {
        if t == root {
            continue;
        }
        let better = match best[t] {
            None => true,
            Some(b) => (w, orig) < (arcs[b].2, arcs[b].3),
        };
        if better {
            best[t] = Some(pos);
        }
    }

    // Find cycles among the selections.
    let mut cycle_id = vec![usize::MAX; n];
    let mut mark = vec![usize::MAX; n];
    let mut n_cycles = 0;
    for start in 0..n {
        let mut v = start;
        while v != root && mark[v] == usize::MAX && cycle_id[v] == usize::MAX {
            mark[v] = start;
            v = arcs[best[v].expect("reachability checked")].1;
        }
        if v != root && mark[v] == start && cycle_id[v] == usize::MAX {
            let mut u = v;
            loop {
                cycle_id[u] = n_cycles;
                u = arcs[best[u].unwrap()].1;
                if u == v {
                    break;
                }
            }
            n_cycles += 1;
        }
    }
    if n_cycles == 0 {
        return (0..n).filter(|&v| v != root).map(|v| arcs[best[v].unwrap()].3).collect();
    }

    // Contract: cycle c becomes node c, other nodes follow.
    let mut map = vec![0; n];
    let mut next = n_cycles;
    for v in 0..n {
        map[v] = if cycle_id[v] != usize::MAX {
            cycle_id[v]
        } else {
            next += 1;
            next - 1
        };
    }
    let mut contracted = Vec::new();
    let mut origin = Vec::new();
    for (pos, &(t, h, w, orig)) in arcs.iter().enumerate() {
        let (ct, ch) = (map[t], map[h]);
        if ct == ch {
            continue;
        }
        let reduced = if cycle_id[t] != usize::MAX { w - arcs[best[t].unwrap()].2 } else { w };
        contracted.push((ct, ch, reduced, orig));
        origin.push(pos);
    }
    let chosen = solve(next, map[root], &contracted);

    // Expand: keep cycle arcs except the one replaced by the leaving arc.
    let mut leaving_tail = vec![usize::MAX; n_cycles];
    let mut result = Vec::with_capacity(n - 1);
    let by_orig: std::collections::HashMap<usize, usize> =
        contracted.iter().zip(&origin).map(|(c, &pos)| (c.3, pos)).collect();
    for orig in chosen {
        let pos = by_orig[&orig];
        let t = arcs[pos].0;
        if cycle_id[t] != usize::MAX {
            leaving_tail[cycle_id[t]] = t;
        }
        result.push(orig);
    }
    for v in 0..n {
        if cycle_id[v] != usize::MAX && leaving_tail[cycle_id[v]] != v {
            result.push(arcs[best[v].unwrap()].3);
        }
    }
    result
}
