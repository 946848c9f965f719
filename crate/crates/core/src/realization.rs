//! Numeric realizations of a structural pair over a prime field.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::is_structurally_observable;
use crate::error::{Error, Result};
use crate::field::{solve, FieldMatrix, PrimeField, Solution};
use crate::structure::StructuralPair;

pub const DEFAULT_RETRIES: usize = 16;

/// Numeric `(A, C)` over GF(p) respecting a structural pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSystem {
    field: PrimeField,
    a: FieldMatrix,
    c: FieldMatrix,
    structure: Option<StructuralPair>,
}

impl FieldSystem {
    /// Builds a system from raw matrices. When a structure is given, every
    /// nonzero entry must be allowed by it.
    pub fn new(field: PrimeField, a: FieldMatrix, c: FieldMatrix, structure: Option<StructuralPair>) -> Result<Self> {
        if a.rows() != a.cols() {
            return Err(Error::DimensionMismatch(format!("A is {}x{}", a.rows(), a.cols())));
        }
        if c.cols() != a.cols() {
            return Err(Error::DimensionMismatch(format!("C has {} columns, A has {}", c.cols(), a.cols())));
        }
        let p = field.p();
        fn entries(m: &FieldMatrix) -> impl Iterator<Item = (usize, usize)> {
            let cols = m.cols();
            (0..m.rows()).flat_map(move |i| (0..cols).map(move |j| (i, j)))
        }
        if entries(&a).any(|(i, j)| a.get(i, j) >= p) || entries(&c).any(|(i, j)| c.get(i, j) >= p) {
            return Err(Error::DimensionMismatch(format!("entries must lie in [0, {p})")));
        }
        if let Some(s) = &structure {
            if s.n_states() != a.rows() || s.n_outputs() != c.rows() {
                return Err(Error::DimensionMismatch("system and structure sizes differ".into()));
            }
            if let Some((i, j)) = entries(&a).find(|&(i, j)| a.get(i, j) != 0 && !s.a().get(i, j)) {
                return Err(Error::InvalidStructure(format!("A[{i}][{j}] is nonzero outside the pattern")));
            }
            if let Some((i, j)) = entries(&c).find(|&(i, j)| c.get(i, j) != 0 && !s.c().get(i, j)) {
                return Err(Error::InvalidStructure(format!("C[{i}][{j}] is nonzero outside the pattern")));
            }
        }
        Ok(FieldSystem { field, a, c, structure })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn a(&self) -> &FieldMatrix {
        &self.a
    }

    pub fn c(&self) -> &FieldMatrix {
        &self.c
    }

    pub fn structure(&self) -> Option<&StructuralPair> {
        self.structure.as_ref()
    }

    pub fn n_states(&self) -> usize {
        self.a.rows()
    }

    pub fn n_outputs(&self) -> usize {
        self.c.rows()
    }
}

/// Stacked `[C; CA; ...; CA^(T-1)]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservabilityMatrix {
    pub horizon: usize,
    pub matrix: FieldMatrix,
}

pub fn observability_matrix(sys: &FieldSystem, horizon: usize) -> ObservabilityMatrix {
    let (m, n) = (sys.n_outputs(), sys.n_states());
    let mut out = FieldMatrix::zeros(m * horizon, n);
    let mut block = sys.c.clone();
    for t in 0..horizon {
        for i in 0..m {
            for j in 0..n {
                out.set(t * m + i, j, block.get(i, j));
            }
        }
        if t + 1 < horizon {
            block = block.mul(&sys.a, sys.field);
        }
    }
    ObservabilityMatrix { horizon, matrix: out }
}

pub fn observability_rank(sys: &FieldSystem, horizon: usize) -> usize {
    observability_matrix(sys, horizon).matrix.rank(sys.field)
}

pub fn is_observable(sys: &FieldSystem) -> bool {
    observability_rank(sys, sys.n_states().max(1)) == sys.n_states()
}

/// Checks that the pair is a branching toward the outputs with a self-loop
/// on every state: each state has exactly one successor among other states
/// and used outputs, and successor chains end at an output.
pub fn check_branching(s: &StructuralPair) -> Result<()> {
    let n = s.n_states();
    let mut next: Vec<Option<usize>> = vec![None; n];
    for j in 0..n {
        if !s.a().get(j, j) {
            return Err(Error::NotBranching(format!("state {j} has no self-loop")));
        }
        let links: Vec<usize> = (0..n).filter(|&i| i != j && s.a().get(i, j)).collect();
        let outs = (0..s.n_outputs()).filter(|&r| s.c().get(r, j)).count();
        match (links.as_slice(), outs) {
            ([i], 0) => next[j] = Some(*i),
            ([], 1) => {}
            _ => {
                return Err(Error::NotBranching(format!(
                    "state {j} has {} links and {outs} outputs, expected exactly one in total",
                    links.len()
                )))
            }
        }
    }
    for start in 0..n {
        let mut cur = start;
        let mut steps = 0;
        while let Some(i) = next[cur] {
            cur = i;
            steps += 1;
            if steps > n {
                return Err(Error::NotBranching(format!("state {start} lies on a cycle")));
            }
        }
    }
    Ok(())
}

/// Self-loop `j` gets `(j + 1) mod p`, every other structural nonzero gets 1.
pub fn instantiate_deterministic(s: &StructuralPair, field: PrimeField) -> Result<FieldSystem> {
    let n = s.n_states();
    if (field.p() as usize) < n {
        return Err(Error::FieldTooSmall { p: field.p(), n });
    }
    check_branching(s)?;
    let mut a = FieldMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if s.a().get(i, j) {
                a.set(i, j, if i == j { (j as u64 + 1) % field.p() } else { 1 });
            }
        }
    }
    let c = pattern_ones(s);
    FieldSystem::new(field, a, c, Some(s.clone()))
}

fn pattern_ones(s: &StructuralPair) -> FieldMatrix {
    let mut c = FieldMatrix::zeros(s.n_outputs(), s.n_states());
    for r in 0..s.n_outputs() {
        for j in 0..s.n_states() {
            if s.c().get(r, j) {
                c.set(r, j, 1);
            }
        }
    }
    c
}

/// Outcome of a successful random instantiation.
#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub system: FieldSystem,
    /// 1-based index of the accepted draw.
    pub trials: usize,
}

/// Draws each structural nonzero uniformly from `1..p` (A row-major, then C
/// row-major) until the observability matrix has full rank.
pub fn instantiate_random(s: &StructuralPair, field: PrimeField, seed: u64, max_retries: usize) -> Result<RandomInstance> {
    if !is_structurally_observable(s) {
        return Err(Error::NotStructurallyObservable);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 1..=max_retries.max(1) {
        let system = draw(s, field, &mut rng)?;
        if is_observable(&system) {
            return Ok(RandomInstance { system, trials: trial });
        }
    }
    Err(Error::RetriesExhausted { trials: max_retries.max(1) })
}

/// One uniform draw over the pattern, with no observability check.
pub fn draw<R: Rng>(s: &StructuralPair, field: PrimeField, rng: &mut R) -> Result<FieldSystem> {
    let n = s.n_states();
    let p = field.p();
    if p < 2 {
        return Err(Error::NotPrime(p));
    }
    let mut a = FieldMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if s.a().get(i, j) {
                a.set(i, j, rng.gen_range(1..p));
            }
        }
    }
    let mut c = FieldMatrix::zeros(s.n_outputs(), n);
    for r in 0..s.n_outputs() {
        for j in 0..n {
            if s.c().get(r, j) {
                c.set(r, j, rng.gen_range(1..p));
            }
        }
    }
    FieldSystem::new(field, a, c, Some(s.clone()))
}

/// Output trace `y(0..steps)` with `y(n) = C A^n x0`.
pub fn simulate(sys: &FieldSystem, x0: &[u64], steps: usize) -> Result<Vec<Vec<u64>>> {
    if x0.len() != sys.n_states() {
        return Err(Error::DimensionMismatch(format!("x0 has {} entries, system has {} states", x0.len(), sys.n_states())));
    }
    let f = sys.field;
    let mut x: Vec<u64> = x0.iter().map(|&v| v % f.p()).collect();
    let mut trace = Vec::with_capacity(steps);
    for _ in 0..steps {
        trace.push(sys.c.mul_vec(&x, f));
        x = sys.a.mul_vec(&x, f);
    }
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Recovery {
    State(Vec<u64>),
    Unobservable,
}

/// Solves `y = O x(0)` over the trace horizon.
pub fn recover_initial_state(sys: &FieldSystem, trace: &[Vec<u64>]) -> Result<Recovery> {
    if let Some(row) = trace.iter().find(|r| r.len() != sys.n_outputs()) {
        return Err(Error::DimensionMismatch(format!(
            "trace row has {} entries, system has {} outputs",
            row.len(),
            sys.n_outputs()
        )));
    }
    let o = observability_matrix(sys, trace.len());
    if o.matrix.rank(sys.field) < sys.n_states() {
        return Ok(Recovery::Unobservable);
    }
    let b: Vec<u64> = trace.iter().flatten().copied().collect();
    match solve(&o.matrix, &b, sys.field)? {
        Solution::Unique(x) => Ok(Recovery::State(x)),
        Solution::Inconsistent => Err(Error::InconsistentTrace),
        Solution::Underdetermined => Ok(Recovery::Unobservable),
    }
}
