use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("size bound exceeded: {0}")]
    TooLarge(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("zero is not a unit")]
    ZeroElement,
    #[error("zero polynomial cannot be factored")]
    ZeroPolynomial,
    #[error("singular matrix")]
    SingularMatrix,
    #[error("character exponent {a} mod {modulus} is not regular")]
    NonRegular { a: u64, modulus: u64 },
    #[error("facets are not comparable in the Bruhat order")]
    IncomparableFacets,
    #[error("character table selection matched {found} candidates instead of one")]
    OracleSelection { found: usize },
    #[error("virtual character unsupported for this input: {0}")]
    UnsupportedVirtual(String),
    #[error("insufficient precision to decide: {0}")]
    InsufficientPrecision(String),
    #[error("fixed-point set appears unbounded; pass a radius hint")]
    UnboundedFixedSet,
    #[error("element must have unit determinant up to an even-valuation scalar")]
    OddDeterminantValuation,
}

pub type Result<T> = std::result::Result<T, Error>;
