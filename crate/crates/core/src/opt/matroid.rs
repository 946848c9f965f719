//! Matroids over `0..n` and weighted matroid intersection.

use std::collections::VecDeque;

/// A matroid on the ground set `0..ground_size()`.
pub trait Matroid {
    fn ground_size(&self) -> usize;

    fn is_independent(&self, set: &[usize]) -> bool;

    /// For an independent `indep` and each candidate `x` outside it: `None`
    /// when `indep + x` is independent, otherwise the elements `y` of
    /// `indep` for which `indep - y + x` is independent (the circuit of
    /// `indep + x`, less `x`).
    fn circuits(&self, indep: &[usize], candidates: &[usize]) -> Vec<Option<Vec<usize>>> {
        candidates
            .iter()
            .map(|&x| {
                let mut with_x = indep.to_vec();
                with_x.push(x);
                if self.is_independent(&with_x) {
                    return None;
                }
                let swaps = (0..indep.len())
                    .filter(|&i| {
                        with_x.swap(i, indep.len());
                        let ok = self.is_independent(&with_x[..indep.len()]);
                        with_x.swap(i, indep.len());
                        ok
                    })
                    .map(|i| indep[i])
                    .collect();
                Some(swaps)
            })
            .collect()
    }
}

/// Every subset is independent.
#[derive(Debug, Clone)]
pub struct FreeMatroid(pub usize);

impl Matroid for FreeMatroid {
    fn ground_size(&self) -> usize {
        self.0
    }

    fn is_independent(&self, _set: &[usize]) -> bool {
        true
    }
}

/// Each element belongs to a block; at most `caps[block]` per block.
#[derive(Debug, Clone)]
pub struct PartitionMatroid {
    pub block: Vec<usize>,
    pub caps: Vec<usize>,
}

impl PartitionMatroid {
    pub fn new(block: Vec<usize>, caps: Vec<usize>) -> Self {
        assert!(block.iter().all(|&b| b < caps.len()));
        PartitionMatroid { block, caps }
    }
}

impl Matroid for PartitionMatroid {
    fn ground_size(&self) -> usize {
        self.block.len()
    }

    fn is_independent(&self, set: &[usize]) -> bool {
        let mut used = vec![0; self.caps.len()];
        set.iter().all(|&e| {
            let b = self.block[e];
            used[b] += 1;
            used[b] <= self.caps[b]
        })
    }

    fn circuits(&self, indep: &[usize], candidates: &[usize]) -> Vec<Option<Vec<usize>>> {
        let mut used = vec![0; self.caps.len()];
        for &e in indep {
            used[self.block[e]] += 1;
        }
        candidates
            .iter()
            .map(|&x| {
                let b = self.block[x];
                (used[b] >= self.caps[b]).then(|| indep.iter().copied().filter(|&y| self.block[y] == b).collect())
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    /// Minimum total weight among maximum-cardinality sets.
    Minimize,
    /// Maximum total weight among maximum-cardinality sets.
    Maximize,
}

/// Maximum-cardinality common independent set of optimal weight, found by
/// shortest augmenting paths in the exchange graph. Path length ties are
/// broken by fewest arcs, then by lowest element index.
pub fn weighted_matroid_intersection<M1: Matroid + ?Sized, M2: Matroid + ?Sized>(
    m1: &M1,
    m2: &M2,
    weights: &[i64],
    sense: Sense,
) -> Vec<usize> {
    let n = m1.ground_size();
    assert_eq!(n, m2.ground_size(), "matroids must share a ground set");
    assert_eq!(n, weights.len());
    let w: Vec<i64> = match sense {
        Sense::Minimize => weights.to_vec(),
        Sense::Maximize => weights.iter().map(|&x| -x).collect(),
    };
    let mut in_set = vec![false; n];
    let mut current: Vec<usize> = Vec::new();
    while let Some(path) = shortest_augmenting_path(m1, m2, &w, &current, &in_set) {
        for v in path {
            in_set[v] = !in_set[v];
        }
        current = (0..n).filter(|&e| in_set[e]).collect();
    }
    current
}

fn shortest_augmenting_path<M1: Matroid + ?Sized, M2: Matroid + ?Sized>(
    m1: &M1,
    m2: &M2,
    w: &[i64],
    current: &[usize],
    in_set: &[bool],
) -> Option<Vec<usize>> {
    let n = in_set.len();
    let outside: Vec<usize> = (0..n).filter(|&e| !in_set[e]).collect();
    if outside.is_empty() {
        return None;
    }
    let c1 = m1.circuits(current, &outside);
    let c2 = m2.circuits(current, &outside);

    // Nodes: ground elements, then hub1 (fans into M1 sources) and hub2
    // (fans out of M2 sinks).
    let hub1 = n;
    let hub2 = n + 1;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n + 2];
    let mut source = vec![false; n];
    let mut sink = vec![false; n];
    for (pos, &x) in outside.iter().enumerate() {
        match &c1[pos] {
            None => {
                source[x] = true;
                adj[hub1].push(x);
            }
            Some(ys) => ys.iter().for_each(|&y| adj[y].push(x)),
        }
        match &c2[pos] {
            None => {
                sink[x] = true;
                adj[x].push(hub2);
            }
            Some(ys) => adj[x].extend(ys.iter().copied()),
        }
    }
    if !source.iter().any(|&s| s) || !sink.iter().any(|&s| s) {
        return None;
    }
    for &y in current {
        adj[y].push(hub1);
        adj[hub2].push(y);
    }
    for list in adj.iter_mut() {
        list.sort_unstable();
        list.dedup();
    }

    let len = |v: usize| -> i64 {
        if v >= n {
            0
        } else if in_set[v] {
            -w[v]
        } else {
            w[v]
        }
    };
    let mut dist: Vec<Option<(i64, u64)>> = vec![None; n + 2];
    let mut pred = vec![usize::MAX; n + 2];
    let mut queued = vec![false; n + 2];
    let mut queue = VecDeque::new();
    for x in 0..n {
        if source[x] {
            dist[x] = Some((len(x), 0));
            queue.push_back(x);
            queued[x] = true;
        }
    }
    while let Some(u) = queue.pop_front() {
        queued[u] = false;
        let (du, hu) = dist[u].unwrap();
        for &v in &adj[u] {
            // Entering a hub costs no hop; leaving it costs one.
            let cand = (du + len(v), hu + u64::from(v < n));
            if dist[v].is_none_or(|cur| cand < cur) {
                dist[v] = Some(cand);
                pred[v] = u;
                if !queued[v] {
                    queued[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }

    let target = (0..n).filter(|&x| sink[x] && dist[x].is_some()).min_by_key(|&x| (dist[x].unwrap(), x))?;
    let mut path = Vec::new();
    let mut v = target;
    while v != usize::MAX {
        if v < n {
            path.push(v);
        }
        v = pred[v];
    }
    Some(path)
}
