use thiserror::Error;

/// Errors reported by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected ground set of size {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("ground set of size {n} exceeds the exact-enumeration cap of {max}")]
    GroundSetTooLarge { n: usize, max: usize },

    #[error(
        "table is not submodular: f(A) + f(B) < f(A|B) + f(A&B) for A={a:#b}, B={b:#b} \
         (violation {violation:e})"
    )]
    NotSubmodular { a: u64, b: u64, violation: f64 },

    #[error("table entry for subset {mask:#b} is negative ({value})")]
    NegativeValue { mask: u64, value: f64 },

    #[error("weight for element {element} is negative ({value})")]
    NegativeWeight { element: usize, value: f64 },

    #[error("element index {element} out of range for ground set of size {n}")]
    ElementOutOfRange { element: usize, n: usize },

    #[error("function is not of the target class: M = {m} is not positive")]
    NonTargetFunction { m: f64 },

    #[error("independence system is not a matroid: {reason}")]
    NotAMatroid { reason: String },

    #[error("invalid partition: {reason}")]
    InvalidPartition { reason: String },

    #[error("cardinality bound {k} invalid for ground set of size {n}")]
    InvalidK { k: usize, n: usize },

    #[error("epsilon {epsilon} outside {range}")]
    InvalidEpsilon { epsilon: f64, range: &'static str },

    #[error(
        "epsilon {epsilon} outside the sampling-greedy window ({threshold}, {e_inv}) for k={k}; \
         use the cardinality dispatcher"
    )]
    EpsilonOutOfWindow {
        epsilon: f64,
        threshold: f64,
        e_inv: f64,
        k: usize,
    },

    #[error("sampling fraction {p} outside (0, 1]")]
    InvalidSamplingFraction { p: f64 },

    #[error("rank window {window} below 1 for pool size {sample_size}; increase the fraction")]
    InvalidRankWindow { window: f64, sample_size: usize },

    #[error("coordinate {index} of fractional point is {value}, outside [0, 1]")]
    CoordinateOutOfRange { index: usize, value: f64 },

    #[error("point is not in the matroid polytope (tolerance {tol})")]
    NotInPolytope { tol: f64 },

    #[error("rounding supports uniform and partition matroids only")]
    UnsupportedMatroidKind,
}

pub type Result<T> = std::result::Result<T, Error>;
