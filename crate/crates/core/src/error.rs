use thiserror::Error;

use crate::series::Side;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty window [{lo}, {hi}]")]
    EmptyWindow { lo: i64, hi: i64 },

    #[error("no finite coefficient among the input points")]
    NoFiniteCoefficient,

    #[error("point indices must be strictly increasing (index {0} out of order)")]
    UnsortedPoints(i64),

    #[error("invalid coefficient at index {index}: {reason}")]
    InvalidCoefficient { index: i64, reason: &'static str },

    #[error("root value {0} is not positive")]
    NonPositiveRoot(f64),

    #[error("key roots need c > 0 and 0 < delta <= (1+2c)^-2, got delta = {delta}, c = {c}")]
    KeyRootsDomain { delta: f64, c: f64 },

    #[error("filter evaluated on its pole (z = r)")]
    FilterPole,

    #[error("invalid filter query: {0}")]
    InvalidQuery(&'static str),

    #[error("{what}: {n} points exceed the cap of {cap}")]
    TooManyPoints { what: &'static str, n: usize, cap: usize },

    #[error("winding count did not converge on the circle of log-radius {radius_log} after {nodes} nodes")]
    WindingNonConvergence { radius_log: f64, nodes: usize },

    #[error("found {found} refined roots but the winding count is {expected}")]
    RootCountMismatch { found: usize, expected: i64 },

    #[error("termination test undecidable on the {0} side")]
    Undecidable(Side),

    #[error("lowering a boundary vertex at index {0} on an open side is not supported")]
    OpenBoundaryLowering(i64),

    #[error("series is not meromorphic at zero (lowest index is unbounded)")]
    NotMeromorphic,

    #[error("matrix coefficients must be square and share one size ({0})")]
    MatrixShape(String),

    #[error("invalid spec: {0}")]
    Spec(String),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
