use thiserror::Error;

/// Errors raised by the exact and float backends.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid simple algebra {family}{rank}: {reason}")]
    InvalidAlgebra {
        family: String,
        rank: usize,
        reason: String,
    },

    #[error("dimension mismatch: expected {expected} labels, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("weight {0:?} is not dominant")]
    NotDominant(Vec<i64>),

    #[error("division by zero in Q(zeta_{0})")]
    DivisionByZero(u32),

    #[error("{ell} is not a Galois element at order {order}")]
    NotGaloisElement { ell: i64, order: u32 },

    #[error("cannot promote order {from} to order {to}: not a multiple")]
    BadPromotion { from: u32, to: u32 },

    #[error("non-integral exponent {value} for {what} at order {order}")]
    NonIntegralExponent {
        what: String,
        value: String,
        order: u32,
    },

    #[error("exact backend bound exceeded: |W| = {weyl_order} > {limit}")]
    ExactBound { weyl_order: u64, limit: u64 },

    #[error("float backend bound exceeded: |W| = {weyl_order} > {limit}")]
    FloatBound { weyl_order: u64, limit: u64 },

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("weight list rejected: {0}")]
    BadWeightList(String),

    #[error("weight {0:?} is not in P_+^k")]
    UnknownWeight(Vec<i64>),

    #[error("cache file rejected: {0}")]
    Cache(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(
        "Galois relation S failed for ell={ell} at lambda={lambda:?}, mu={mu:?}: {detail}"
    )]
    GaloisTripwire {
        ell: i64,
        lambda: Vec<i64>,
        mu: Vec<i64>,
        detail: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
