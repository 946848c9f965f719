use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed document: {0}")]
    Format(String),

    #[error("negative cost `{0}`")]
    NegativeCost(String),

    #[error("disallowed edge role pair: {from} -> {to}")]
    DisallowedEdge { from: String, to: String },

    #[error("graph has no sensor nodes")]
    NoSensors,

    #[error("missing fusion node")]
    MissingFusion,

    #[error("duplicate node name `{0}`")]
    DuplicateNode(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("explicit self-loop on `{0}` (sensor self-loops are implicit)")]
    SelfLoop(String),

    #[error("backbone node `{0}` has no directed path to the fusion center")]
    UnreachableBackbone(String),

    #[error("sensor `{sensor}` has {found} internally node-disjoint paths, {required} required")]
    Infeasible { sensor: String, found: usize, required: usize },

    #[error("node {0} cannot reach the root")]
    RootUnreachable(usize),

    #[error("flow source is also a sink")]
    SourceIsSink,

    #[error("node connectivity is undefined for identical endpoints")]
    SameEndpoints,

    #[error("enumeration bound exceeded: {size} > {limit}")]
    EnumerationBound { size: u64, limit: u64 },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("field order {p} is smaller than the state dimension {n}")]
    FieldTooSmall { p: u64, n: usize },

    #[error("structure is not a branching with self-loops: {0}")]
    NotBranching(String),

    #[error("structural pair is not structurally observable")]
    NotStructurallyObservable,

    #[error("no observable instantiation after {trials} trials")]
    RetriesExhausted { trials: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("inconsistent trace: no initial state reproduces it")]
    InconsistentTrace,

    #[error("invalid structural pair: {0}")]
    InvalidStructure(String),

    #[error("no feasible graph generated after {attempts} attempts")]
    RedrawBudget { attempts: usize },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
