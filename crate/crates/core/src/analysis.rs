//! Structural observability of a structural pair.
//!
//! A pair is structurally observable iff its system graph is spanned by an
//! output cactus patch. The decision procedure uses the equivalent pair of
//! conditions: every state reaches an output, and the column-to-row
//! bipartite graph of `[Ã; C̃]` has a matching saturating all columns.

use crate::error::{Error, Result};
use crate::structure::StructuralPair;

/// Upper bound on the number of failure sets a robustness check enumerates.
pub const ROBUST_ENUMERATION_LIMIT: u64 = 1_000_000;

/// A node of the structural system graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SystemNode {
    State(usize),
    Output(usize),
}

/// Directed graph `D(Ã, C̃)`: `x_j → x_i` iff `Ã[i][j]`, `x_j → y_r` iff
/// `C̃[r][j]`. Output nodes are the nonzero rows of `C̃`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralSystemGraph {
    pub n_states: usize,
    pub outputs: Vec<usize>,
    /// Successors of each state: states ascending, then outputs ascending.
    pub succ: Vec<Vec<SystemNode>>,
}

impl StructuralSystemGraph {
    pub fn build(s: &StructuralPair) -> Self {
        let n = s.n_states();
        let outputs: Vec<usize> = (0..s.n_outputs()).filter(|&r| s.output_used(r)).collect();
        let mut succ = vec![Vec::new(); n];
        for (j, list) in succ.iter_mut().enumerate() {
            for i in 0..n {
                if s.a().get(i, j) {
                    list.push(SystemNode::State(i));
                }
            }
            for &r in &outputs {
                if s.c().get(r, j) {
                    list.push(SystemNode::Output(r));
                }
            }
        }
        StructuralSystemGraph { n_states: n, outputs, succ }
    }

    pub fn has_edge(&self, from: usize, to: SystemNode) -> bool {
        self.succ[from].contains(&to)
    }
}

/// States that have a directed path to some output.
fn output_reachable(s: &StructuralPair, removed_states: &[bool], removed_rows: &[bool]) -> Vec<bool> {
    let n = s.n_states();
    let mut reach = vec![false; n];
    let mut stack = Vec::new();
    for r in 0..s.n_outputs() {
        if removed_rows[r] {
            continue;
        }
        for j in 0..n {
            if !removed_states[j] && s.c().get(r, j) && !reach[j] {
                reach[j] = true;
                stack.push(j);
            }
        }
    }
    while let Some(i) = stack.pop() {
        // Predecessors j of i: Ã[i][j] = 1.
        for j in 0..n {
            if !removed_states[j] && !reach[j] && s.a().get(i, j) {
                reach[j] = true;
                stack.push(j);
            }
        }
    }
    reach
}

/// Kuhn matching of state columns onto rows of `[Ã; C̃]`. Returns the row
/// matched to each column (`n + r` for output row `r`). Columns try their
/// own row first.
fn column_matching(s: &StructuralPair, removed_states: &[bool], removed_rows: &[bool]) -> Vec<Option<usize>> {
    let n = s.n_states();
    let m = s.n_outputs();
    let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); n];
    for j in 0..n {
        if removed_states[j] {
            continue;
        }
        if s.a().get(j, j) {
            col_rows[j].push(j);
        }
        for i in 0..n {
            if i != j && !removed_states[i] && s.a().get(i, j) {
                col_rows[j].push(i);
            }
        }
        for r in 0..m {
            if !removed_rows[r] && s.c().get(r, j) {
                col_rows[j].push(n + r);
            }
        }
    }
    let mut row_match: Vec<Option<usize>> = vec![None; n + m];
    let mut col_match: Vec<Option<usize>> = vec![None; n];

    fn augment(
        j: usize,
        col_rows: &[Vec<usize>],
        row_match: &mut [Option<usize>],
        col_match: &mut [Option<usize>],
        visited: &mut [bool],
    ) -> bool {
        for &row in &col_rows[j] {
            if visited[row] {
                continue;
            }
            visited[row] = true;
            let free = match row_match[row] {
                None => true,
                Some(other) => augment(other, col_rows, row_match, col_match, visited),
            };
            if free {
                row_match[row] = Some(j);
                col_match[j] = Some(row);
                return true;
            }
        }
        false
    }

    let mut visited = vec![false; n + m];
    for j in 0..n {
        if removed_states[j] {
            continue;
        }
        visited.iter_mut().for_each(|v| *v = false);
        augment(j, &col_rows, &mut row_match, &mut col_match, &mut visited);
    }
    col_match
}

fn observable_masked(s: &StructuralPair, removed_states: &[bool], removed_rows: &[bool]) -> bool {
    let reach = output_reachable(s, removed_states, removed_rows);
    if (0..s.n_states()).any(|j| !removed_states[j] && !reach[j]) {
        return false;
    }
    let matching = column_matching(s, removed_states, removed_rows);
    (0..s.n_states()).all(|j| removed_states[j] || matching[j].is_some())
}

/// Whether `D(Ã, C̃)` is spanned by an output cactus patch.
pub fn is_structurally_observable(s: &StructuralPair) -> bool {
    observable_masked(s, &vec![false; s.n_states()], &vec![false; s.n_outputs()])
}

/// Which nodes a failure set may contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureScope {
    /// Only sensors fail; their output rows go silent with them.
    Sensors,
    /// Sensors and individual output channels (rows of `C̃` in use) fail.
    SensorsAndOutputs,
}

/// A failure set: removed states and removed output rows.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FailureSet {
    pub states: Vec<usize>,
    pub outputs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RobustCheck {
    Robust,
    /// The smallest failing set: fewest elements first, then lexicographic
    /// over element order (states before outputs).
    Counterexample(FailureSet),
}

impl RobustCheck {
    pub fn is_robust(&self) -> bool {
        matches!(self, RobustCheck::Robust)
    }
}

fn binomial_sum(n: u64, k: u64) -> u64 {
    let mut total: u64 = 0;
    let mut term: u64 = 1;
    for j in 0..=k.min(n) {
        if j > 0 {
            term = term.saturating_mul(n - j + 1) / j;
        }
        total = total.saturating_add(term);
    }
    total
}

/// Structural observability after every removal of at most `k` sensors.
pub fn robust_structural_observability(s: &StructuralPair, k: usize) -> Result<RobustCheck> {
    robust_structural_observability_in(s, k, FailureScope::Sensors)
}

/// Like [`robust_structural_observability`] with a configurable failure scope.
pub fn robust_structural_observability_in(s: &StructuralPair, k: usize, scope: FailureScope) -> Result<RobustCheck> {
    let n = s.n_states();
    let used_rows: Vec<usize> = match scope {
        FailureScope::Sensors => Vec::new(),
        FailureScope::SensorsAndOutputs => (0..s.n_outputs()).filter(|&r| s.output_used(r)).collect(),
    };
    let items = n + used_rows.len();
    let count = binomial_sum(items as u64, k as u64);
    if count > ROBUST_ENUMERATION_LIMIT {
        return Err(Error::EnumerationBound { size: count, limit: ROBUST_ENUMERATION_LIMIT });
    }
    let mut removed_states = vec![false; n];
    let mut removed_rows = vec![false; s.n_outputs()];
    let mut combo: Vec<usize> = Vec::with_capacity(k);
    for size in 0..=k.min(items) {
        combo.clear();
        combo.extend(0..size);
        loop {
            removed_states.iter_mut().for_each(|b| *b = false);
            removed_rows.iter_mut().for_each(|b| *b = false);
            for &item in &combo {
                if item < n {
                    removed_states[item] = true;
                } else {
                    removed_rows[used_rows[item - n]] = true;
                }
            }
            if !observable_masked(s, &removed_states, &removed_rows) {
                let states = combo.iter().copied().filter(|&i| i < n).collect();
                let outputs = combo.iter().filter(|&&i| i >= n).map(|&i| used_rows[i - n]).collect();
                return Ok(RobustCheck::Counterexample(FailureSet { states, outputs }));
            }
            if !next_combination(&mut combo, items) {
                break;
            }
        }
    }
    Ok(RobustCheck::Robust)
}

/// Advances `combo` to the next k-subset of `0..n` in lexicographic order.
pub(crate) fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// An elementary path of states ending at an output node. `states` runs
/// from the top of the stem down to the state adjacent to `output`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stem {
    pub states: Vec<usize>,
    pub output: usize,
}

/// A directed cycle of states (`states[i] → states[i+1]`, last back to
/// first) attached to the cactus by the link `attach_from → attach_to`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttachedCycle {
    pub states: Vec<usize>,
    pub attach_from: usize,
    pub attach_to: SystemNode,
}

/// Output cactus patch witness. Cycles are listed in a valid attachment
/// order. `uncovered` is empty iff the patch spans every state.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CactusCertificate {
    pub stems: Vec<Stem>,
    pub cycles: Vec<AttachedCycle>,
    pub uncovered: Vec<usize>,
}

impl CactusCertificate {
    pub fn is_spanning(&self) -> bool {
        self.uncovered.is_empty()
    }
}

/// Builds an output cactus patch from a column matching. Cycles with a
/// link into the current patch are attached; when none can be, a cycle
/// with a link to an unused output is opened into a new stem. Finally
/// stems are grown upward through single-state cycles.
pub fn extract_cactus_certificate(s: &StructuralPair) -> CactusCertificate {
    let n = s.n_states();
    let graph = StructuralSystemGraph::build(s);
    let none_s = vec![false; n];
    let none_r = vec![false; s.n_outputs()];
    let matching = column_matching(s, &none_s, &none_r);

    // successor of state j in the cover
    let succ: Vec<Option<SystemNode>> = matching
        .iter()
        .map(|m| m.map(|row| if row < n { SystemNode::State(row) } else { SystemNode::Output(row - n) }))
        .collect();
    let mut has_pred = vec![false; n];
    for t in succ.iter().flatten() {
        if let SystemNode::State(i) = *t {
            has_pred[i] = true;
        }
    }

    let mut stems: Vec<Stem> = Vec::new();
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut uncovered: Vec<usize> = Vec::new();
    let mut placed = vec![false; n];

    // Chains starting at states without a predecessor.
    for start in 0..n {
        if has_pred[start] || placed[start] {
            continue;
        }
        let mut chain = vec![start];
        let mut cur = start;
        let end = loop {
            match succ[cur] {
                Some(SystemNode::State(i)) => {
                    chain.push(i);
                    cur = i;
                }
                other => break other,
            }
        };
        for &v in &chain {
            placed[v] = true;
        }
        match end {
            Some(SystemNode::Output(r)) => stems.push(Stem { states: chain, output: r }),
            _ => uncovered.extend(chain),
        }
    }
    // Whatever remains lies on cycles.
    for start in 0..n {
        if placed[start] {
            continue;
        }
        let mut cycle = vec![start];
        placed[start] = true;
        let mut cur = start;
        while let Some(SystemNode::State(i)) = succ[cur] {
            if i == start {
                break;
            }
            cycle.push(i);
            placed[i] = true;
            cur = i;
        }
        cycles.push(cycle);
    }

    let mut in_patch = vec![false; n];
    let mut used_output = vec![false; s.n_outputs()];
    for stem in &stems {
        for &v in &stem.states {
            in_patch[v] = true;
        }
        used_output[stem.output] = true;
    }
    let mut attached: Vec<AttachedCycle> = Vec::new();
    let mut pending: Vec<Vec<usize>> = cycles;
    loop {
        let mut progressed = false;
        let mut i = 0;
        while i < pending.len() {
            let link = pending[i].iter().find_map(|&v| {
                graph.succ[v]
                    .iter()
                    .find(|t| match **t {
                        SystemNode::State(w) => in_patch[w],
                        SystemNode::Output(r) => used_output[r],
                    })
                    .map(|&t| (v, t))
            });
            if let Some((from, to)) = link {
                let cycle = pending.remove(i);
                for &v in &cycle {
                    in_patch[v] = true;
                }
                attached.push(AttachedCycle { states: cycle, attach_from: from, attach_to: to });
                progressed = true;
            } else {
                i += 1;
            }
        }
        if progressed {
            continue;
        }
        // Open a cycle into a stem through an unused output.
        let opening = pending.iter().enumerate().find_map(|(ci, cycle)| {
            cycle.iter().enumerate().find_map(|(pos, &v)| {
                graph.succ[v]
                    .iter()
                    .find_map(|t| match *t {
                        SystemNode::Output(r) if !used_output[r] => Some(r),
                        _ => None,
                    })
                    .map(|r| (ci, pos, r))
            })
        });
        match opening {
            Some((ci, pos, r)) => {
                let cycle = pending.remove(ci);
                let len = cycle.len();
                let states: Vec<usize> = (1..=len).map(|off| cycle[(pos + off) % len]).collect();
                for &v in &states {
                    in_patch[v] = true;
                }
                used_output[r] = true;
                stems.push(Stem { states, output: r });
            }
            None => break,
        }
    }
    for cycle in pending {
        uncovered.extend(cycle);
    }

    // Grow stems upward through self-loop cycles.
    for stem in stems.iter_mut() {
        loop {
            let top = stem.states[0];
            let candidate = attached
                .iter()
                .position(|c| c.states.len() == 1 && graph.has_edge(c.states[0], SystemNode::State(top)));
            match candidate {
                Some(pos) => {
                    let c = attached.remove(pos);
                    stem.states.insert(0, c.states[0]);
                }
                None => break,
            }
        }
    }
    let attached = order_attachments(&graph, s.n_outputs(), &stems, attached);
    uncovered.sort_unstable();
    CactusCertificate { stems, cycles: attached, uncovered }
}

/// Re-derives a valid attachment order (and attachment links) after stems
/// have changed.
fn order_attachments(
    graph: &StructuralSystemGraph,
    n_outputs: usize,
    stems: &[Stem],
    cycles: Vec<AttachedCycle>,
) -> Vec<AttachedCycle> {
    let mut in_patch = vec![false; graph.n_states];
    let mut used_output = vec![false; n_outputs];
    for stem in stems {
        for &v in &stem.states {
            in_patch[v] = true;
        }
        used_output[stem.output] = true;
    }
    let mut pending = cycles;
    let mut ordered = Vec::with_capacity(pending.len());
    loop {
        let mut progressed = false;
        let mut i = 0;
        while i < pending.len() {
            let link = pending[i].states.iter().find_map(|&v| {
                graph.succ[v]
                    .iter()
                    .find(|t| match **t {
                        SystemNode::State(w) => in_patch[w],
                        SystemNode::Output(r) => used_output[r],
                    })
                    .map(|&t| (v, t))
            });
            if let Some((from, to)) = link {
                let mut c = pending.remove(i);
                c.attach_from = from;
                c.attach_to = to;
                for &v in &c.states {
                    in_patch[v] = true;
                }
                ordered.push(c);
                progressed = true;
            } else {
                i += 1;
            }
        }
        if !progressed {
            break;
        }
    }
    // Stem growth never disconnects a cycle: every cycle kept its nodes.
    debug_assert!(pending.is_empty());
    ordered.extend(pending);
    ordered
}

/// Checks a certificate against the recursive cactus definition.
pub fn validate_certificate(s: &StructuralPair, cert: &CactusCertificate) -> std::result::Result<(), String> {
    let n = s.n_states();
    let graph = StructuralSystemGraph::build(s);
    let mut owner = vec![false; n];
    let mut claim = |v: usize| -> std::result::Result<(), String> {
        if v >= n {
            return Err(format!("state {v} out of range"));
        }
        if owner[v] {
            return Err(format!("state {v} appears twice"));
        }
        owner[v] = true;
        Ok(())
    };
    let mut in_patch = vec![false; n];
    let mut outputs_used = std::collections::BTreeSet::new();
    for stem in &cert.stems {
        if stem.states.is_empty() {
            return Err("empty stem".into());
        }
        if !outputs_used.insert(stem.output) {
            return Err(format!("output {} roots two stems", stem.output));
        }
        for &v in &stem.states {
            claim(v)?;
            in_patch[v] = true;
        }
        for w in stem.states.windows(2) {
            if !graph.has_edge(w[0], SystemNode::State(w[1])) {
                return Err(format!("stem link {} -> {} missing", w[0], w[1]));
            }
        }
        let last = *stem.states.last().unwrap();
        if !graph.has_edge(last, SystemNode::Output(stem.output)) {
            return Err(format!("stem link {last} -> output {} missing", stem.output));
        }
    }
    for cycle in &cert.cycles {
        if cycle.states.is_empty() {
            return Err("empty cycle".into());
        }
        for &v in &cycle.states {
            claim(v)?;
        }
        let len = cycle.states.len();
        for i in 0..len {
            let (a, b) = (cycle.states[i], cycle.states[(i + 1) % len]);
            if !graph.has_edge(a, SystemNode::State(b)) {
                return Err(format!("cycle link {a} -> {b} missing"));
            }
        }
        if !cycle.states.contains(&cycle.attach_from) {
            return Err(format!("attachment tail {} not on its cycle", cycle.attach_from));
        }
        if !graph.has_edge(cycle.attach_from, cycle.attach_to) {
            return Err("attachment link missing".into());
        }
        let target_ok = match cycle.attach_to {
            SystemNode::State(w) => in_patch[w],
            SystemNode::Output(r) => outputs_used.contains(&r),
        };
        if !target_ok {
            return Err(format!("cycle through {} attaches outside the patch", cycle.states[0]));
        }
        for &v in &cycle.states {
            in_patch[v] = true;
        }
    }
    for &v in &cert.uncovered {
        claim(v)?;
    }
    if owner.iter().any(|&o| !o) {
        return Err("some state is neither covered nor listed as uncovered".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::BoolMatrix;

    fn pair(a: &[Vec<u8>], c: &[Vec<u8>]) -> StructuralPair {
        let n = a.len();
        StructuralPair::from_patterns(BoolMatrix::from_rows(a, n).unwrap(), BoolMatrix::from_rows(c, n).unwrap()).unwrap()
    }

    #[test]
    fn self_loop_with_output() {
        assert!(is_structurally_observable(&pair(&[vec![1]], &[vec![1]])));
    }

    #[test]
    fn two_state_stem() {
        // x1 -> x2 (A[1][0] = 1), output on x2.
        let s = pair(&[vec![0, 0], vec![1, 0]], &[vec![0, 1]]);
        assert!(is_structurally_observable(&s));
        let cert = extract_cactus_certificate(&s);
        validate_certificate(&s, &cert).unwrap();
        assert_eq!(cert.stems, vec![Stem { states: vec![0, 1], output: 0 }]);
    }

    #[test]
    fn unreachable_state() {
        let s = pair(&[vec![0, 0], vec![1, 0]], &[vec![1, 0]]);
        assert!(!is_structurally_observable(&s));
        let cert = extract_cactus_certificate(&s);
        validate_certificate(&s, &cert).unwrap();
        assert!(!cert.is_spanning());
    }

    #[test]
    fn rank_deficient_but_reachable() {
        // x1 -> x3, x2 -> x3, output on x3: column x1 and x2 compete for row x3.
        let s = pair(&[vec![0, 0, 0], vec![0, 0, 0], vec![1, 1, 0]], &[vec![0, 0, 1]]);
        assert!(!is_structurally_observable(&s));
    }

    #[test]
    fn isolated_state_is_uncovered() {
        let s = pair(&[vec![1, 0], vec![0, 0]], &[vec![1, 0]]);
        let cert = extract_cactus_certificate(&s);
        assert_eq!(cert.uncovered, vec![1]);
        validate_certificate(&s, &cert).unwrap();
    }

    #[test]
    fn branching_with_loops_grows_stem() {
        // x2 -> x1 -> y, both with self-loops.
        let s = pair(&[vec![1, 1], vec![0, 1]], &[vec![1, 0]]);
        let cert = extract_cactus_certificate(&s);
        validate_certificate(&s, &cert).unwrap();
        assert_eq!(cert.stems, vec![Stem { states: vec![1, 0], output: 0 }]);
        assert!(cert.cycles.is_empty());
        assert!(cert.is_spanning());
    }

    #[test]
    fn cycle_attaches_through_link() {
        // 2-cycle {x1, x2} with a link x1 -> x3 and stem x3 -> y.
        let s = pair(&[vec![0, 1, 0], vec![1, 0, 0], vec![1, 0, 0]], &[vec![0, 0, 1]]);
        assert!(is_structurally_observable(&s));
        let cert = extract_cactus_certificate(&s);
        validate_certificate(&s, &cert).unwrap();
        assert!(cert.is_spanning());
    }

    #[test]
    fn robust_check_counterexample_is_smallest() {
        // x2 -> x1 -> y with loops: removing x1 strands x2.
        let s = pair(&[vec![1, 1], vec![0, 1]], &[vec![1, 0]]);
        assert!(robust_structural_observability(&s, 0).unwrap().is_robust());
        assert_eq!(
            robust_structural_observability(&s, 1).unwrap(),
            RobustCheck::Counterexample(FailureSet { states: vec![0], outputs: vec![] })
        );
    }

    #[test]
    fn output_failures_are_stronger() {
        // One sensor, two outputs: sensor-only failures never hurt.
        let s = pair(&[vec![1]], &[vec![1], vec![0]]);
        assert!(robust_structural_observability(&s, 1).unwrap().is_robust());
        let r = robust_structural_observability_in(&s, 1, FailureScope::SensorsAndOutputs).unwrap();
        assert_eq!(r, RobustCheck::Counterexample(FailureSet { states: vec![], outputs: vec![0] }));
    }

    #[test]
    fn enumeration_bound() {
        let n = 200;
        let s = StructuralPair::from_patterns(BoolMatrix::identity(n), BoolMatrix::zeros(0, n)).unwrap();
        assert!(matches!(robust_structural_observability(&s, 4), Err(Error::EnumerationBound { .. })));
    }

    #[test]
    fn combinations_in_order() {
        let mut c = vec![0, 1];
        let mut seen = vec![c.clone()];
        while next_combination(&mut c, 4) {
            seen.push(c.clone());
        }
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
    }
}
