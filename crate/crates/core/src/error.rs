use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("defining polynomial is reducible or degenerate: {0}")]
    IrreduciblePolyFailure(String),
    #[error("fundamental unit of Q(sqrt({d})) has norm +1")]
    NormMinusOneUnitAbsent { d: i64 },
    #[error("d = {d} is not 1 mod 4, the discriminant would be even")]
    EvenDiscriminant { d: i64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("sign unresolved after refining embeddings to {bits} bits")]
    PrecisionExhausted { bits: u32 },
    #[error("search bound exceeded: {0}")]
    SearchBoundExceeded(String),
    #[error("element is not totally positive")]
    NotTotallyPositive,
    #[error("sign vectors of the unit generators do not span the sign space")]
    SignSystemSingular,
    #[error("no generator found for ideal of norm {norm}")]
    GeneratorNotFound { norm: u64 },
    #[error("modulus is even")]
    EvenModulus,
    #[error("entry is even")]
    EvenEntry,
    #[error("entries are not coprime")]
    NotCoprime,
    #[error("ideal is even")]
    EvenIdeal,
    #[error("cost guard: {what} = {size} exceeds budget {budget}")]
    CostGuard { what: String, size: u64, budget: u64 },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// Stable identifier used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::IrreduciblePolyFailure(_) => "IrreduciblePolyFailure",
            Error::NormMinusOneUnitAbsent { .. } => "NormMinusOneUnitAbsent",
            Error::EvenDiscriminant { .. } => "EvenDiscriminant",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::PrecisionExhausted { .. } => "PrecisionExhausted",
            Error::SearchBoundExceeded(_) => "SearchBoundExceeded",
            Error::NotTotallyPositive => "NotTotallyPositive",
            Error::SignSystemSingular => "SignSystemSingular",
            Error::GeneratorNotFound { .. } => "GeneratorNotFound",
            Error::EvenModulus => "EvenModulus",
            Error::EvenEntry => "EvenEntry",
            Error::NotCoprime => "NotCoprime",
            Error::EvenIdeal => "EvenIdeal",
            Error::CostGuard { .. } => "CostGuard",
            Error::HypothesisViolated(_) => "HypothesisViolated",
            Error::Unsupported(_) => "Unsupported",
        }
    }
}
