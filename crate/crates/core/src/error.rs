use thiserror::Error;

use crate::automaton::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {op} of {left:?} and {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("index ({row}, {col}) out of bounds for {rows}x{cols} matrix")]
    IndexOutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("singular matrix: zero pivot in column {column}")]
    Singular { column: usize },

    #[error("invalid automaton: {}", format_violations(.0))]
    InvalidAutomaton(Vec<Violation>),

    #[error("automaton is not Markov: row sum of state {state} is {sum}")]
    NotMarkov { state: String, sum: String },

    #[error("zero row sum at state {state}; cannot normalize")]
    ZeroRowSum { state: String },

    #[error("interface mismatch: right interface {left} does not match left interface {right}")]
    InterfaceMismatch { left: String, right: String },

    #[error("symbol `{symbol}` not in alphabet {alphabet}")]
    UnknownSymbol { symbol: String, alphabet: String },

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("state index {index} out of range for {count} states")]
    StateOutOfRange { index: usize, count: usize },

    #[error("words have different lengths ({left} vs {right})")]
    WordLengthMismatch { left: usize, right: usize },

    #[error("vector length {got} does not match {expected} states")]
    VectorLength { expected: usize, got: usize },

    #[error("negative entry {value} in initial vector at position {index}")]
    NegativeVectorEntry { index: usize, value: String },

    #[error("invalid relation: {0}")]
    InvalidRelation(String),

    #[error("constant `{0}` requires a second alphabet")]
    MissingAlphabet(&'static str),

    #[error("mapping is not a bijection: {0}")]
    NonBijective(String),

    #[error("power would have {symbols} interface symbols (limit {limit})")]
    PowerTooLarge { symbols: usize, limit: usize },

    #[error("closed system required: interfaces have {left} and {right} symbols")]
    ClosedSystemRequired { left: usize, right: usize },

    #[error("no absorbing (deadlock) state")]
    NoAbsorbingState,

    #[error("absorption diverges: some transient state never reaches a deadlock")]
    Divergence,

    #[error("{0}")]
    Invalid(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}
