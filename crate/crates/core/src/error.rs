use crate::forms::BiForm;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("zero form")]
    ZeroForm,
    #[error("no bidegree-(2,2) component")]
    NoComponent,
    #[error("ambiguous bidegree-(2,2) component ({} candidates)", .0.len())]
    Ambiguous(Vec<BiForm>),
    #[error("singular curve (S^3 - 27T^2 = 0)")]
    SingularCurve,
    #[error("degenerate choice: {0}")]
    DegenerateChoice(&'static str),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("randomness exhausted after {0} attempts")]
    RandomnessExhausted(u32),
    #[error("retries exhausted after {0} attempts")]
    RetriesExhausted(u32),
    #[error("rank deficient: found {found} vanishing quadrics, expected {expected}")]
    RankDeficient { found: usize, expected: usize },
    #[error("no usable specialization point")]
    SpecializationFailed,
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Stable machine-readable token, used by the CLI.
    pub fn token(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "DIVISION_BY_ZERO",
            Error::ModulusMismatch(..) => "MODULUS_MISMATCH",
            Error::DimensionMismatch(_) => "DIMENSION_MISMATCH",
            Error::SingularMatrix => "SINGULAR_MATRIX",
            Error::ZeroPolynomial => "ZERO_POLYNOMIAL",
            Error::ZeroForm => "ZERO_FORM",
            Error::NoComponent => "NO_COMPONENT",
            Error::Ambiguous(_) => "AMBIGUOUS",
            Error::SingularCurve => "SINGULAR_CURVE",
            Error::DegenerateChoice(_) => "DEGENERATE_CHOICE",
            Error::InvalidParameters(_) => "INVALID_PARAMETERS",
            Error::RandomnessExhausted(_) => "RANDOMNESS_EXHAUSTED",
            Error::RetriesExhausted(_) => "RETRIES_EXHAUSTED",
            Error::RankDeficient { .. } => "RANK_DEFICIENT",
            Error::SpecializationFailed => "SPECIALIZATION_FAILED",
            Error::Malformed(_) => "MALFORMED",
            Error::Invariant(_) => "INVARIANT_VIOLATION",
        }
    }

    /// Errors caused by an unlucky (but valid) random choice somewhere in
    /// the exchange rather than by bad input or a bug.
    pub fn is_degeneracy(&self) -> bool {
        matches!(
            self,
            Error::ZeroForm
                | Error::NoComponent
                | Error::Ambiguous(_)
                | Error::SingularCurve
                | Error::DegenerateChoice(_)
                | Error::RandomnessExhausted(_)
                | Error::RetriesExhausted(_)
                | Error::RankDeficient { .. }
                | Error::SpecializationFailed
        )
    }
}
