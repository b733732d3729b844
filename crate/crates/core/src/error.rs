use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("denominator of {value} is divisible by p = {p}")]
    DenominatorDivisibleByP { value: String, p: u64 },

    #[error("denominator divisible by p = {p} in the coefficient of monomial {monomial:?}")]
    MonomialDenominatorDivisibleByP { monomial: Vec<u32>, p: u64 },

    #[error("variable mismatch: {0}")]
    VariableMismatch(String),

    #[error("curve is reducible: gcd(N, A_0, ..., A_r) = {0}")]
    NotIrreducible(u64),

    #[error("characteristic {p} divides N = {n}")]
    CharDividesN { p: u64, n: u64 },

    #[error("branch points {0} and {1} coincide")]
    DuplicateBranchPoint(usize, usize),

    #[error("point at infinity has no local data in Case 3")]
    InfinityUndefinedInCase3,

    #[error("curve is not normalized (requires lambda_0 = 0 and lambda_1 = 1)")]
    NotNormalized,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{0} and {1} are not coprime")]
    NotCoprime(u64, u64),

    #[error("Pochhammer symbol in the denominator vanishes: ({c}; {n}) = 0")]
    PochhammerZeroDenominator { c: String, n: u64 },

    #[error("d' = {0} is negative")]
    NegativeDPrime(i64),

    #[error("image of basis form {0:?} is not in the span of the target basis")]
    BasisReexpressionFailed((u64, usize)),

    #[error("nonzero entry outside the prescribed blocks at row {row:?}, column {col:?}")]
    BlockViolation {
        row: (u64, usize),
        col: (u64, usize),
    },

    #[error("invalid specialization: {0}")]
    InvalidSpecialization(String),

    #[error("operation requires positive characteristic")]
    RequiresPositiveCharacteristic,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable machine-readable tag, used by the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DenominatorDivisibleByP { .. } => "DenominatorDivisibleByP",
            Error::MonomialDenominatorDivisibleByP { .. } => "DenominatorDivisibleByP",
            Error::VariableMismatch(_) => "VariableMismatch",
            Error::NotIrreducible(_) => "NotIrreducible",
            Error::CharDividesN { .. } => "CharDividesN",
            Error::DuplicateBranchPoint(..) => "DuplicateBranchPoint",
            Error::InfinityUndefinedInCase3 => "InfinityUndefinedInCase3",
            Error::NotNormalized => "NotNormalized",
            Error::NotPrime(_) => "NotPrime",
            Error::NotCoprime(..) => "NotCoprime",
            Error::PochhammerZeroDenominator { .. } => "PochhammerZeroDenominator",
            Error::NegativeDPrime(_) => "NegativeDPrime",
            Error::BasisReexpressionFailed(_) => "BasisReexpressionFailed",
            Error::BlockViolation { .. } => "BlockViolation",
            Error::InvalidSpecialization(_) => "InvalidSpecialization",
            Error::RequiresPositiveCharacteristic => "RequiresPositiveCharacteristic",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
