use thiserror::Error;

pub type Result<T> = std::result::Result<T, ConesError>;

#[derive(Debug, Error)]
pub enum ConesError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("set is empty")]
    EmptySet,

    #[error("intersection with halfspace is empty")]
    EmptyIntersection,

    #[error("sublevel set is empty at level {level}")]
    EmptyLevelSet { level: f64 },

    #[error("{what} did not converge within {iterations} iterations")]
    IterationLimit { what: &'static str, iterations: usize },

    #[error("bisection failure: {0}")]
    BisectionFailure(String),

    #[error("invalid parameters: {0}")]
    ParameterError(String),

    #[error("no grid point lies inside the feasible set at t = {t}")]
    InfeasibleGrid { t: usize },

    #[error("policy {policy} played an infeasible action at t = {t} (violation {violation:.3e})")]
    InfeasibleAction {
        policy: String,
        t: usize,
        violation: f64,
    },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("unknown family `{0}`; expected one of: sc_lb, convex_lb, directional, frozen, sharp_adv, sc_adv, random_1d")]
    UnknownFamily(String),

    #[error("unknown policy `{0}`; expected one of: greedy, frugal, lsp, gap_frugal, ab")]
    UnknownPolicy(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
