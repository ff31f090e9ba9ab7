use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid step size {h}: must be positive and at most {max}")]
    InvalidStep { h: f64, max: f64 },

    #[error("point budget exceeded: {points} points requested, cap is {cap} (set CUBEREC_MAX_POINTS to raise)")]
    ResourceExhausted { points: u128, cap: u128 },

    #[error("no sample stored at point {point:?}")]
    MissingSample { point: Vec<f64> },

    #[error("factorial of multi-index with order {order} exceeds the representable range")]
    FactorialOverflow { order: u64 },

    #[error("schedule step underflowed to {value:e}")]
    Underflow { value: f64 },

    #[error("non-finite sample value {value}")]
    NonFinite { value: f64 },

    #[error("epsilon {epsilon} is outside the certificate domain (must satisfy 0 < epsilon < {threshold})")]
    EpsilonOutOfRange { epsilon: f64, threshold: f64 },

    #[error("unknown battery function id {id:?}")]
    UnknownBattery { id: String },

    #[error("hypothesis violated at {point:?}: |f| = {value:e} exceeds {bound:e}")]
    HypothesisViolated {
        point: Vec<f64>,
        value: f64,
        bound: f64,
    },

    #[error("sweep tuple (d={d}, r={r}, m={m}) failed: {source}")]
    SweepTuple {
        d: usize,
        r: u32,
        m: u32,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
