use thiserror::Error;

/// Errors raised by the graded-algebra layers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradedError {
    #[error("cannot parse rational `{0}` (expected `p` or `p/q`)")]
    BadScalar(String),
    #[error("permutation of length {perm} does not match {degrees} degrees")]
    LengthMismatch { perm: usize, degrees: usize },
    #[error("not a bijection on 0..{0}")]
    NotBijective(usize),
    #[error("ragged matrix: row {row} has {got} entries, expected {want}")]
    RaggedRows { row: usize, got: usize, want: usize },
    #[error("duplicate degree {0} in graded space")]
    DuplicateDegree(i64),
    #[error("duplicate basis label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown basis label `{0}`")]
    UnknownLabel(String),
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("charts do not match")]
    ChartMismatch,
    #[error("degree rule deg(l_k)=2-k violated: l_{arity} on ({inputs}) hits `{output}` of degree {got}, expected {want}")]
    DegreeRule {
        arity: usize,
        inputs: String,
        output: String,
        got: i64,
        want: i64,
    },
    #[error("arguments repeated in even degree force the value zero; got nonzero for ({0})")]
    ForcedZero(String),
    #[error("structure is not {0}-term")]
    WrongTermCount(usize),
    #[error("{0}")]
    Other(String),
}
