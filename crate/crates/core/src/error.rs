use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An instance failed validation; the message names the offending indices.
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A closed-form function was evaluated outside its domain.
    #[error("domain violation: {0}")]
    Domain(String),

    #[error("unknown policy `{0}` (expected one of ls, mls, rls, grd, rsrv, pd)")]
    UnknownPolicy(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("instance has no layered scheduling structure")]
    NotLayered,

    #[error("offline oracle `{oracle}` does not apply to this instance: {reason}")]
    OracleMismatch { oracle: &'static str, reason: String },

    #[error("MLS requires u <= c/{d}, violated by type {type_id} on resource {resource} (u = {utilization}, c = {capacity})")]
    MlsPrecondition { d: u32, type_id: usize, resource: usize, utilization: f64, capacity: f64 },

    /// A policy produced an assignment that breaks feasibility.
    #[error("infeasible decision: {0}")]
    InvalidDecision(String),

    /// Solver stalls, non-bracketing searches and similar numerical failures.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("policy {policy}, replicate {replicate}: {source}")]
    Cell {
        policy: String,
        replicate: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of numerical machinery as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Numerical(_) => true,
            Error::Cell { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
