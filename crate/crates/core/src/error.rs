use thiserror::Error;

/// Errors raised by the protocol layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("fragment count must be at least 1")]
    InvalidFragmentCount,
    #[error("share vector is empty")]
    EmptyShareVector,
    #[error("value {value} is outside the ring [0, {modulus})")]
    OutOfRange { value: u64, modulus: u64 },
    #[error("modulus {0} is not a supported prime")]
    InvalidModulus(u64),
    #[error("nonce {0} already used on this channel")]
    NonceReuse(u64),
    #[error("message failed authentication")]
    AuthFailure,
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("duplicate fragment {fragment} from party {party} for task {task}")]
    DuplicateFragment { task: u64, party: usize, fragment: usize },
    #[error("missing fragments (party, fragment): {0:?}")]
    MissingFragments(Vec<(usize, usize)>),
    #[error("need {needed} available agents, only {available} available")]
    InsufficientAgents { needed: usize, available: usize },
    #[error("no agent results to tally")]
    EmptyTally,
    #[error("domain error: {0}")]
    Domain(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("{name} must be at least 1")]
    ZeroParameter { name: &'static str },
    #[error("agents_selected_k = {k} exceeds agent_count_p = {p}")]
    SelectionExceedsPool { k: usize, p: usize },
    #[error("expected {expected} weights (one per party), got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("expected {expected} inputs (one per party), got {got}")]
    InputCount { expected: usize, got: usize },
    #[error("SUM requires all weights equal to 1")]
    SumWeights,
    #[error("fixed threshold {t} must lie in 1..={k}")]
    FixedThreshold { t: usize, k: usize },
    #[error("agent id {id} is outside 0..{p}")]
    UnknownAgent { id: usize, p: usize },
    #[error("agent {0} is listed more than once")]
    DuplicateAgent(usize),
    #[error("{what} value {value} is outside the ring [0, {modulus})")]
    OutOfRing { what: &'static str, value: u64, modulus: u64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
