use thiserror::Error;

/// Errors produced while building partitions, bases and fits.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid interval: need a < b, got a = {a}, b = {b}")]
    InvalidInterval { a: f64, b: f64 },

    #[error("partition needs at least 2 segments, got {0}")]
    TooFewSegments(usize),

    #[error("nodes must be strictly increasing: x[{index}] = {value} does not exceed the previous node {prev_value}")]
    NonMonotoneNodes {
        index: usize,
        value: f64,
        prev_value: f64,
    },

    #[error("explicit nodes must start at a = {a} and end at b = {b}, got [{first}, ..., {last}]")]
    EndpointMismatch {
        a: f64,
        b: f64,
        first: f64,
        last: f64,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("|s| must be < 1: s[{index}] = {value}")]
    InvalidScale { index: usize, value: f64 },

    #[error("{what}: expected length {expected}, found {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("x = {x} lies outside [{a}, {b}]")]
    OutOfDomain { x: f64, a: f64, b: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("address sampling at depth {depth} would produce {requested} points, above the cap of {cap}")]
    PointCapExceeded {
        depth: usize,
        requested: u128,
        cap: usize,
    },

    #[error("target `{label}` failed at x = {x}: {reason}")]
    TargetEvaluation {
        label: String,
        x: f64,
        reason: String,
    },

    #[error("segment {segment}: {source}")]
    InSegment {
        segment: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("matrix is singular to tolerance: smallest pivot {min_pivot:e} at index {index} (threshold {threshold:e})")]
    Singular {
        min_pivot: f64,
        index: usize,
        threshold: f64,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
