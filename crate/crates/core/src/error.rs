use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("generator index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("supplied inverse does not invert the map at x{generator}")]
    InvalidInverse { generator: usize },
    #[error("automorphism has no inverse data")]
    MissingInverse,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("filtration weight exceeds the degree cap {cap}")]
    WeightExceedsCap { cap: usize },
    #[error("not a Lie element: {0}")]
    NotLieElement(String),
    #[error("invalid degree {degree}: {reason}")]
    InvalidDegree { degree: usize, reason: &'static str },
    #[error("elements live over different basis contexts")]
    ContextMismatch,
    #[error("operation needs a symplectic basis context")]
    NoSymplecticStructure,
    #[error("not in IA_n({required}): filtration weight is {actual}")]
    NotInFiltration { required: usize, actual: usize },
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not congruent to the identity mod {p}")]
    NotLevel { p: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("bad presentation: {0}")]
    Presentation(String),
}
