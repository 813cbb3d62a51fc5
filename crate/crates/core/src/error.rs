//! Crate-wide error type.

use thiserror::Error;

/// A single out-of-range cell found while validating a raw table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellDiagnostic {
    /// 1-based row number (header not counted).
    pub row: usize,
    /// Column name as in the CSV header (`x3`, `y`, ...).
    pub column: String,
    /// Offending value.
    pub value: i64,
    /// Human-readable bound it violated, e.g. `0..=2`.
    pub bound: String,
}

impl std::fmt::Display for CellDiagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "row {}, column {}: value {} outside {}",
            self.row, self.column, self.value, self.bound
        )
    }
}

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid fold count K={k} for N={n}: require 1 < K <= N")]
    InvalidPartition { n: usize, k: usize },

    #[error("empty fold or empty training set")]
    EmptyFold,

    #[error("invalid factor subset: {0}")]
    InvalidSubset(String),

    #[error("dataset validation failed with {} offending cell(s):\n{}",
            .diagnostics.len(),
            .diagnostics.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n"))]
    DatasetValidation { diagnostics: Vec<CellDiagnostic> },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("probability law is invalid: {0}")]
    InvalidLaw(String),

    #[error("operand spaces do not match: {0}")]
    SpaceMismatch(String),

    #[error("response value {y} has zero probability mass but is required")]
    ZeroMarginal { y: i32 },

    #[error("invalid generator specification: {0}")]
    InvalidSpec(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cell table too large: {cells} cells exceed the supported {max}")]
    CellTableTooLarge { cells: u128, max: usize },

    #[error("prefix length m_N={m_n} out of range 1..={q}")]
    InvalidPrefix { m_n: usize, q: usize },

    #[error("K={k} must divide N={n} for the truncated-column statistic")]
    FoldsDoNotDivide { n: usize, k: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed input file: {0}")]
    Parse(String),
}

/// Convenience alias.
pub type Result<T> = std::result::Result<T, Error>;
