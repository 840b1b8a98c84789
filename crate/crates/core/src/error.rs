use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown gate `{0}`")]
    UnknownGate(String),

    #[error("gate `{label}` is not unitary (max |U†U - I| = {deviation:.3e})")]
    NonUnitary { label: String, deviation: f64 },

    #[error("target qubit {target} out of range for a {n_qubits}-qubit circuit")]
    TargetOutOfRange { target: usize, n_qubits: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension cap exceeded: {0}")]
    DimensionCap(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("projection is not real symmetric tridiagonal (residual {residual:.3e})")]
    NotTridiagonal { residual: f64 },

    #[error("inverse iteration did not converge for eigenvalue {eigenvalue} (residual {residual:.3e})")]
    NoConvergence { eigenvalue: f64, residual: f64 },

    #[error("bisection bracket failure: {0}")]
    Bracket(String),

    #[error("no interior gap minimum in [{lo}, {hi}]")]
    NoInteriorMinimum { lo: f64, hi: f64 },

    #[error("gap underflow at L = {l}: {gap:e} (restrict L or use the secular route)")]
    GapUnderflow { l: usize, gap: f64 },

    #[error("step violates stability guard: dt * |H| = {product:.3} > 0.5")]
    StepTooLarge { product: f64 },

    #[error("Chebyshev series did not converge within {terms} terms")]
    Truncation { terms: usize },

    #[error("grid too coarse: ground energy moved by {shift:.3e} under refinement")]
    GridTooCoarse { shift: f64 },

    #[error("time {t} outside [0, {total}]")]
    TimeOutOfRange { t: f64, total: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by bad input rather than a numerical breakdown.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::UnknownGate(_)
                | Error::NonUnitary { .. }
                | Error::TargetOutOfRange { .. }
                | Error::InvalidParameter(_)
                | Error::DimensionCap(_)
                | Error::DimensionMismatch { .. }
                | Error::StepTooLarge { .. }
                | Error::TimeOutOfRange { .. }
                | Error::Io(_)
        )
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::UnknownGate(_) => "unknown_gate",
            Error::NonUnitary { .. } => "non_unitary",
            Error::TargetOutOfRange { .. } => "target_out_of_range",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::DimensionCap(_) => "dimension_cap",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NotTridiagonal { .. } => "not_tridiagonal",
            Error::NoConvergence { .. } => "no_convergence",
            Error::Bracket(_) => "bracket",
            Error::NoInteriorMinimum { .. } => "no_interior_minimum",
            Error::GapUnderflow { .. } => "gap_underflow",
            Error::StepTooLarge { .. } => "step_too_large",
            Error::Truncation { .. } => "truncation",
            Error::GridTooCoarse { .. } => "grid_too_coarse",
            Error::TimeOutOfRange { .. } => "time_out_of_range",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}
