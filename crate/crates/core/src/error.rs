//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),

    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    #[error("field order {p}^{n} exceeds the limit {limit}")]
    FieldTooLarge { p: u32, n: u32, limit: u64 },

    #[error("extension degree must be at least 1")]
    ZeroDegree,

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("ambient dimension mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid construction parameters: {0}")]
    InvalidParams(String),

    #[error("degenerate instance: {0}")]
    Degenerate(String),

    #[error("instance too large: estimated {what} = {estimate} exceeds cap {cap} (formula subpacketization F = {predicted_f})")]
    CapExceeded {
        what: &'static str,
        estimate: String,
        cap: u64,
        predicted_f: String,
    },

    #[error("unknown vertex (user {user}, subfile {subfile})")]
    UnknownVertex { user: usize, subfile: usize },

    #[error("invalid demand vector: {0}")]
    InvalidDemands(String),

    #[error("missing packet for user {user}, subfile {subfile}")]
    MissingPacket { user: usize, subfile: usize },

    #[error("undecodable: user {user} lacks side information for subfile {subfile} of file {file}")]
    Undecodable {
        user: usize,
        file: usize,
        subfile: usize,
    },

    #[error("invalid system triple: {0}")]
    InvalidTriple(String),

    #[error("bound not applicable: {0}")]
    NotApplicable(String),

    #[error("invalid ordering: {0}")]
    InvalidOrdering(String),

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
