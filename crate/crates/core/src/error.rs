use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VarError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate regressors: rank {rank} of {cols} columns")]
    DegenerateRegressors { rank: usize, cols: usize },
    #[error("matrix not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },
    #[error("eigenvalue iteration did not converge: {0}")]
    NonConvergence(String),
    #[error("deterministic generator eigenvalue with modulus {modulus} is off the unit circle")]
    OffUnitCircle { modulus: f64 },
    #[error("deterministic terms are linearly dependent: rank {rank} < dimension {dim}")]
    RankCondition { rank: usize, dim: usize },
    #[error("insufficient data: need {needed} observations, have {available}")]
    InsufficientData { needed: usize, available: usize },
    #[error("singular variance estimate at lag {lag}")]
    SingularVariance { lag: usize },
    #[error("fits are not comparable: {0}")]
    MismatchedFits(String),
    #[error("degenerate test: {0}")]
    DegenerateTest(String),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("simulated path became non-finite at t = {t}")]
    Overflow { t: i64 },
    #[error("{failed} of {n_reps} replications failed (first: {first})")]
    ExcessiveFailures {
        failed: usize,
        n_reps: usize,
        first: String,
    },
}

/// Coarse classification used to map errors onto process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Numerical,
}

impl VarError {
    pub fn class(&self) -> ErrorClass {
        use VarError::*;
        match self {
            InvalidArgument(_) | Configuration(_) | OffUnitCircle { .. } | RankCondition { .. } => {
                ErrorClass::Usage
            }
            DimensionMismatch(_) | NonFinite(_) | InsufficientData { .. } | MismatchedFits(_) => {
                ErrorClass::Data
            }
            DegenerateRegressors { .. }
            | NotPositiveDefinite { .. }
            | NonConvergence(_)
            | SingularVariance { .. }
            | DegenerateTest(_)
            | Overflow { .. }
            | ExcessiveFailures { .. } => ErrorClass::Numerical,
        }
    }

    /// Short stable identifier for machine-readable diagnostics.
    pub fn kind(&self) -> &'static str {
        use VarError::*;
        match self {
            DimensionMismatch(_) => "dimension_mismatch",
            NonFinite(_) => "non_finite",
            InvalidArgument(_) => "invalid_argument",
            DegenerateRegressors { .. } => "degenerate_regressors",
            NotPositiveDefinite { .. } => "not_positive_definite",
            NonConvergence(_) => "non_convergence",
            OffUnitCircle { .. } => "off_unit_circle",
            RankCondition { .. } => "rank_condition",
            InsufficientData { .. } => "insufficient_data",
            SingularVariance { .. } => "singular_variance",
            MismatchedFits(_) => "mismatched_fits",
            DegenerateTest(_) => "degenerate_test",
            Configuration(_) => "configuration",
            Overflow { .. } => "overflow",
            ExcessiveFailures { .. } => "excessive_failures",
        }
    }
}
