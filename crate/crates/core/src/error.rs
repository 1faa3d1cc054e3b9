use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("prime parameter {0} is not an odd prime in the supported range 3..=13")]
    UnsupportedPrime(u64),
    #[error("the given element set is not closed under multiplication and inverse")]
    NotASubgroup,
    #[error("unknown subgroup label `{0}`")]
    UnknownLabel(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("columns do not lie in the span of the lattice basis")]
    NotInSpan,
    #[error("modulus {0} is not prime")]
    NonPrimeModulus(u64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("the subgroup does not sit inside the lattice's acting group")]
    NotSubgroup,
    #[error("the subgroup is not normal in the acting group")]
    NotNormal,
    #[error("action matrices do not define a group homomorphism")]
    NotAnAction,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CochainError {
    #[error("cochain space dimension {dim} exceeds the budget cap {cap}")]
    BudgetExceeded { dim: usize, cap: usize },
    #[error("the given cochain is not a cocycle")]
    NotACocycle,
    #[error("the subgroup is not cyclic")]
    NotCyclic,
    #[error("the subgroup is not normal")]
    NotNormal,
    #[error("internal lift check failed: boundary of the lift left the norm line")]
    LiftInconsistent,
    #[error("the 3-cocycle class is not in the span of the two reference classes")]
    NotInSpan,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error("direct and reduction engines disagree at row {row}: direct={direct}, reduction={reduction}")]
    EngineMismatch {
        row: String,
        direct: String,
        reduction: String,
    },
    #[error(transparent)]
    Cochain(#[from] CochainError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdjudicatorError {
    #[error("unknown decomposition-group label `{0}`")]
    UnknownLabel(String),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}
