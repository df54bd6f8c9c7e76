use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("tree text: {msg} at byte {pos}")]
    TreeSyntax { pos: usize, msg: String },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("unknown node id {0}")]
    UnknownNode(usize),

    #[error("{what} exceeded budget of {limit}")]
    BudgetExceeded { what: &'static str, limit: usize },

    #[error("sentence syntax: {msg} at byte {pos}")]
    SentenceSyntax { pos: usize, msg: String },

    #[error("free variable `{0}`")]
    FreeVariable(String),

    #[error("nested parent term at byte {pos}; parent takes variables or R only")]
    NestedParentTerm { pos: usize },

    #[error("state space limit exceeded: {0}")]
    LimitExceeded(String),

    #[error("tree does not match any representative")]
    Unclassifiable,

    #[error("operation needs a compiled state system")]
    NotCompiled,

    #[error("sentence has quantifier depth {depth}, system was compiled for k = {k}")]
    DepthExceedsK { depth: usize, k: usize },

    #[error("system file line {line}: {msg}")]
    SystemSyntax { line: usize, msg: String },

    #[error("system file has no default rule")]
    MissingDefault,

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("psi is estimated by Monte Carlo for this system; exact psi required")]
    McFallbackActive,

    #[error("no fixed-point run converged")]
    AllRunsDiverged,

    #[error("grid needs at least {needed} points, got {got}")]
    GridTooShort { needed: usize, got: usize },

    #[error("grid is not uniform with step {0}")]
    NonUniformGrid(f64),

    #[error("breakpoint {0} is not an interior grid point")]
    BreakpointNotOnGrid(f64),
}

impl Error {
    /// Stable machine-readable category, used by the CLI on stderr.
    pub fn category(&self) -> &'static str {
        match self {
            Error::TreeSyntax { .. } | Error::InvalidTree(_) => "tree-syntax",
            Error::UnknownNode(_) => "unknown-node",
            Error::BudgetExceeded { .. } => "budget-exceeded",
            Error::SentenceSyntax { .. } => "sentence-syntax",
            Error::FreeVariable(_) => "free-variable",
            Error::NestedParentTerm { .. } => "nested-parent-term",
            Error::LimitExceeded(_) => "limit-exceeded",
            Error::Unclassifiable => "unclassifiable",
            Error::NotCompiled => "not-compiled",
            Error::DepthExceedsK { .. } => "depth-exceeds-k",
            Error::SystemSyntax { .. } => "system-syntax",
            Error::MissingDefault => "missing-default",
            Error::UnknownState(_) => "unknown-state",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::InvalidDistribution(_) => "invalid-distribution",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::McFallbackActive => "mc-fallback-active",
            Error::AllRunsDiverged => "all-runs-diverged",
            Error::GridTooShort { .. } => "grid-too-short",
            Error::NonUniformGrid(_) => "non-uniform-grid",
            Error::BreakpointNotOnGrid(_) => "breakpoint-not-on-grid",
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. } | Error::LimitExceeded(_))
    }
}
