use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("response matrix has {y_rows} rows but design matrix has {x_rows}")]
    RowMismatch { y_rows: usize, x_rows: usize },

    #[error("matrix `{name}` contains a non-finite entry at row {row}, column {col} (1-based)")]
    NonFinite {
        name: &'static str,
        row: usize,
        col: usize,
    },

    #[error("matrix `{name}` has zero rows or columns")]
    EmptyMatrix { name: &'static str },

    #[error("dimension regime violated: need n - k > p, got n = {n}, k = {k}, p = {p}")]
    DimensionRegime { n: usize, k: usize, p: usize },

    #[error("design matrix is rank deficient: smallest X'X Cholesky pivot {pivot:.3e} is not above tolerance {tol:.3e}")]
    RankDeficient { pivot: f64, tol: f64 },

    #[error("{dim}x{dim} matrix is not positive definite (Cholesky pivot <= 0)")]
    NotPositiveDefinite { dim: usize },

    #[error("variable index {index} out of range 1..={k}")]
    IndexOutOfRange { index: usize, k: usize },

    #[error("duplicate variable index {index}")]
    DuplicateIndex { index: usize },

    #[error("exhaustive search over k = {k} predictors exceeds the guard of {guard} (2^k - 1 evaluations); set the override to search anyway")]
    TooManyPredictors { k: usize, guard: usize },

    #[error("operation requires a {expected} profile, got {got}")]
    WrongFlavor { expected: &'static str, got: String },

    #[error("spread of the {stat} statistics is zero; SD/MAD thresholds are undefined (k too small or constant statistics)")]
    DegenerateSpread { stat: String },

    #[error("threshold rule parameter must be strictly positive, got {value}")]
    InvalidThreshold { value: f64 },

    #[error("(alpha, c) = ({alpha}, {c}) outside the domain {{alpha >= 0, 0 < c < 1, alpha + c < 1}}")]
    Domain { alpha: f64, c: f64 },

    #[error("invalid simulation config: {reason}")]
    InvalidConfig { reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
