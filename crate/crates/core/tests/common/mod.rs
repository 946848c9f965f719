//! Brute-force oracles and random instance families shared by the
//! integration tests. Nothing here calls the algorithm it checks.

#![allow(dead_code)]

use obsnet::cost::Cost;
use obsnet::opt::{Matroid, Sense, WeightedArc};
use obsnet::structure::{BoolMatrix, StructuralPair};
use obsnet::PhysicalGraph;
use rand::seq::SliceRandom;
use rand::Rng;

/// Largest family of internally node-disjoint simple `u → v` paths, by
/// listing every simple path and searching packings. Parallel arcs give
/// distinct paths.
pub fn menger_exhaustive(n: usize, arcs: &[(usize, usize)], u: usize, v: usize) -> usize {
    let mut paths: Vec<(Vec<usize>, Option<usize>)> = Vec::new();
    let mut stack = vec![u];
    let mut on = vec![false; n];
    on[u] = true;
    list_paths(arcs, v, &mut stack, &mut on, &mut paths);
    // Internal node sets as bitmasks; direct arcs keep their arc index.
    let masks: Vec<(u64, Option<usize>)> = paths
        .iter()
        .map(|(p, direct)| (p[1..p.len() - 1].iter().fold(0u64, |m, &x| m | 1 << x), *direct))
        .collect();
    best_packing(&masks, 0, 0, 0)
}

fn list_paths(
    arcs: &[(usize, usize)],
    target: usize,
    stack: &mut Vec<usize>,
    on: &mut [bool],
    out: &mut Vec<(Vec<usize>, Option<usize>)>,
) {
    let here = *stack.last().unwrap();
    for (i, &(a, b)) in arcs.iter().enumerate() {
        if a != here || on[b] {
            continue;
        }
        if b == target {
            let mut p = stack.clone();
            p.push(b);
            out.push((p, (stack.len() == 1).then_some(i)));
            continue;
        }
        stack.push(b);
        on[b] = true;
        list_paths(arcs, target, stack, on, out);
        on[b] = false;
        stack.pop();
    }
}

fn best_packing(masks: &[(u64, Option<usize>)], from: usize, used: u64, count: usize) -> usize {
    let mut best = count;
    for i in from..masks.len() {
        let (m, _) = masks[i];
        if m & used == 0 {
            best = best.max(best_packing(masks, i + 1, used | m, count + 1));
        }
    }
    best
}

/// Whether a spanning output cactus patch exists: some choice of one
/// successor per state (injective on targets) whose cycles can all be
/// attached, one after another, to the stems by a graph edge.
pub fn cactus_patch_exists(s: &StructuralPair) -> bool {
    let n = s.n_states();
    let m = s.n_outputs();
    // x_j -> x_i when A[i][j]; x_j -> y_r when C[r][j].
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|j| {
            (0..n).filter(|&i| s.a().get(i, j)).chain((0..m).filter(|&r| s.c().get(r, j)).map(|r| n + r)).collect()
        })
        .collect();
    let mut choice = vec![usize::MAX; n];
    let mut taken = vec![false; n + m];
    cover_search(&succ, n, 0, &mut choice, &mut taken)
}

fn cover_search(succ: &[Vec<usize>], n: usize, j: usize, choice: &mut [usize], taken: &mut [bool]) -> bool {
    if j == n {
        return cover_attaches(succ, n, choice);
    }
    for &t in &succ[j] {
        if taken[t] {
            continue;
        }
        taken[t] = true;
        choice[j] = t;
        let found = cover_search(succ, n, j + 1, choice, taken);
        taken[t] = false;
        if found {
            return true;
        }
    }
    false
}

fn cover_attaches(succ: &[Vec<usize>], n: usize, choice: &[usize]) -> bool {
    // States whose successor chain ends at an output lie on stems.
    let mut in_patch: Vec<bool> = (0..n)
        .map(|j| {
            let mut x = j;
            for _ in 0..=n {
                if x >= n {
                    return true;
                }
                x = choice[x];
            }
            false
        })
        .collect();
    let mut out_used = vec![false; succ.iter().flatten().max().map_or(0, |&t| t + 1)];
    for &t in choice {
        if t >= n {
            out_used[t] = true;
        }
    }
    // Group the remaining states into cycles.
    let mut cycle_of = vec![usize::MAX; n];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for j in 0..n {
        if in_patch[j] || cycle_of[j] != usize::MAX {
            continue;
        }
        let mut cyc = vec![j];
        cycle_of[j] = cycles.len();
        let mut x = choice[j];
        while x != j {
            cycle_of[x] = cycles.len();
            cyc.push(x);
            x = choice[x];
        }
        cycles.push(cyc);
    }
    let mut attached = vec![false; cycles.len()];
    loop {
        let mut progress = false;
        for (c, cyc) in cycles.iter().enumerate() {
            if attached[c] {
                continue;
            }
            let hit = cyc.iter().any(|&a| succ[a].iter().any(|&b| if b < n { in_patch[b] } else { out_used[b] }));
            if hit {
                attached[c] = true;
                progress = true;
                for &a in cyc {
                    in_patch[a] = true;
                }
            }
        }
        if !progress {
            return attached.iter().all(|&a| a);
        }
    }
}

/// Minimum spanning arborescence cost toward `root` by trying every
/// outgoing arc choice for every non-root node.
pub fn arborescence_exhaustive(n: usize, arcs: &[WeightedArc], root: usize) -> Option<Cost> {
    let out: Vec<Vec<&WeightedArc>> =
        (0..n).map(|v| arcs.iter().filter(|a| a.tail == v && a.tail != a.head).collect()).collect();
    let mut pick = vec![0usize; n];
    let mut best: Option<Cost> = None;
    fn rec(v: usize, n: usize, root: usize, out: &[Vec<&WeightedArc>], pick: &mut [usize], best: &mut Option<Cost>) {
        if v == n {
            let reaches = (0..n).all(|s| {
                let mut x = s;
                for _ in 0..n {
                    if x == root {
                        return true;
                    }
                    x = out[x][pick[x]].head;
                }
                x == root
            });
            if reaches {
                let total: Cost = (0..n).filter(|&x| x != root).map(|x| out[x][pick[x]].cost).sum();
                if best.is_none_or(|b| total < b) {
                    *best = Some(total);
                }
            }
            return;
        }
        if v == root {
            return rec(v + 1, n, root, out, pick, best);
        }
        for i in 0..out[v].len() {
            pick[v] = i;
            rec(v + 1, n, root, out, pick, best);
        }
    }
    if (0..n).any(|v| v != root && out[v].is_empty()) {
        return None;
    }
    rec(0, n, root, &out, &mut pick, &mut best);
    best
}

/// Largest common independent set size and its optimal weight, over
/// every subset of the ground set.
pub fn intersection_exhaustive(m1: &dyn Matroid, m2: &dyn Matroid, weights: &[i64], sense: Sense) -> (usize, i64) {
    let n = m1.ground_size();
    assert!(n <= 16);
    let mut best = (0usize, 0i64);
    for mask in 0u32..1 << n {
        let set: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        if !m1.is_independent(&set) || !m2.is_independent(&set) {
            continue;
        }
        let w: i64 = set.iter().map(|&i| weights[i]).sum();
        let better = match sense {
            Sense::Minimize => w < best.1,
            Sense::Maximize => w > best.1,
        };
        if set.len() > best.0 || (set.len() == best.0 && better) {
            best = (set.len(), w);
        }
    }
    best
}

/// Whether every sensor keeps `c` internally disjoint paths to `root`
/// using only `arcs`, checked with the exhaustive path oracle.
pub fn rooted_connected_exhaustive(n: usize, arcs: &[(usize, usize)], root: usize, sensors: usize, c: usize) -> bool {
    (0..sensors).all(|x| menger_exhaustive(n, arcs, x, root) >= c)
}

/// Shape of a random physical graph family.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_sensors: usize,
    pub max_backbone: usize,
    pub max_edges: usize,
    pub max_cost: u64,
}

/// A random physical graph: every backbone node links to the fusion
/// center, then a random subset of the remaining admissible pairs up to
/// `max_edges` in total, with integer costs.
pub fn random_graph<R: Rng>(rng: &mut R, shape: Shape) -> PhysicalGraph {
    let nx = rng.gen_range(1..=shape.max_sensors);
    let nq = rng.gen_range(1..=shape.max_backbone);
    let xs: Vec<String> = (1..=nx).map(|i| format!("x{i}")).collect();
    let qs: Vec<String> = (1..=nq).map(|i| format!("q{i}")).collect();
    let mut pool: Vec<(String, String)> = Vec::new();
    for a in &xs {
        for b in xs.iter().chain(&qs) {
            if a != b {
                pool.push((a.clone(), b.clone()));
            }
        }
    }
    for a in &qs {
        for b in &qs {
            if a != b {
                pool.push((a.clone(), b.clone()));
            }
        }
    }
    pool.shuffle(rng);
    let room = shape.max_edges.saturating_sub(nq).min(pool.len());
    let take = rng.gen_range(room.min(nx)..=room);
    let mut edges: Vec<(String, String, Cost)> =
        qs.iter().map(|q| (q.clone(), "z".to_string(), Cost::from_units(rng.gen_range(0..=shape.max_cost)))).collect();
    for (a, b) in pool.into_iter().take(take) {
        edges.push((a, b, Cost::from_units(rng.gen_range(0..=shape.max_cost))));
    }
    PhysicalGraph::new(xs, qs, "z".to_string(), edges).expect("generated graphs are well formed")
}

/// A random pattern pair: each A entry set with probability `density`,
/// each C row senses one random state or nothing.
pub fn random_pair<R: Rng>(rng: &mut R, n: usize, m: usize, density: f64) -> StructuralPair {
    let mut a = BoolMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a.set(i, j, rng.gen_bool(density));
        }
    }
    let mut c = BoolMatrix::zeros(m, n);
    for r in 0..m {
        let j = rng.gen_range(0..=n);
        if j < n {
            c.set(r, j, true);
        }
    }
    StructuralPair::from_patterns(a, c).expect("one entry per output row")
}

/// The pair with A given by the low `n*n` bits of `a_bits` (row-major)
/// and output row `r` sensing state `c_cols[r]` (none when `>= n`).
pub fn pair_from_bits(n: usize, a_bits: u32, c_cols: &[usize]) -> StructuralPair {
    let mut a = BoolMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a.set(i, j, a_bits >> (i * n + j) & 1 == 1);
        }
    }
    let mut c = BoolMatrix::zeros(c_cols.len(), n);
    for (r, &j) in c_cols.iter().enumerate() {
        if j < n {
            c.set(r, j, true);
        }
    }
    StructuralPair::from_patterns(a, c).expect("one entry per output row")
}

/// Least-squares isotonic (non-decreasing) fit by pool-adjacent-violators.
pub fn isotonic(values: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, usize)> = Vec::new();
    for &v in values {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (b, nb) = blocks[blocks.len() - 1];
            let (a, na) = blocks[blocks.len() - 2];
            if a <= b {
                break;
            }
            blocks.pop();
            blocks.pop();
            blocks.push(((a * na as f64 + b * nb as f64) / (na + nb) as f64, na + nb));
        }
    }
    blocks.into_iter().flat_map(|(v, n)| std::iter::repeat_n(v, n)).collect()
}
