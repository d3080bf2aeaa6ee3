use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("vertex {0} has degree 0; rotation maps require every degree >= 1")]
    ZeroDegreeVertex(usize),

    #[error("label {label} out of range 1..={degree} at vertex {vertex}")]
    LabelOutOfRange { vertex: usize, label: u64, degree: u64 },

    #[error("rotation table is not an involution at vertex {vertex}, label {label}")]
    NotInvolutive { vertex: usize, label: u64 },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not positive semidefinite (eigenvalue {0:e} below tolerance)")]
    NotPsd(f64),

    #[error("graphs have mismatched vertex counts ({0} vs {1})")]
    VertexCountMismatch(usize, usize),

    #[error(
        "vertex degrees are not proportional with an integer ratio (vertex {vertex}: {d0} vs {d1})"
    )]
    DegreeMismatch { vertex: usize, d0: u64, d1: u64 },

    #[error("expander family has no member of size {0}")]
    FamilySize(u64),

    #[error("verified-random expander generation exhausted {retries} retries at size {size} (target lambda {target})")]
    RetriesExhausted { size: u64, target: f64, retries: u32 },

    #[error("explicit expander family cannot reach lambda {target} under the degree cap {cap} (would need degree {needed})")]
    DegreeCap { target: f64, cap: u64, needed: u128 },

    #[error("slot budget exceeded: graph has {slots} slots, budget {budget}")]
    BudgetExceeded { slots: u128, budget: u64 },

    #[error("degree arithmetic overflow while composing rotation-map graphs")]
    DegreeOverflow,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
