use thiserror::Error;

/// Group-axiom names reported by [`Error::NotAGroup`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    Closure,
    Identity,
    Inverse,
    Associativity,
}

impl std::fmt::Display for Axiom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Axiom::Closure => "closure",
            Axiom::Identity => "identity",
            Axiom::Inverse => "inverse",
            Axiom::Associativity => "associativity",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("budget exceeded while {what}: limit {limit}, needed at least {reached}")]
    BudgetExceeded {
        what: String,
        limit: u64,
        reached: u64,
    },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("not a group ({axiom}): witness {witness:?}")]
    NotAGroup { axiom: Axiom, witness: Vec<usize> },

    #[error("subset not closed under conjugation: {element} conjugated by {conjugator} leaves it")]
    NotClosedUnderConjugation { element: String, conjugator: String },

    #[error("not an action: {0}")]
    NotAnAction(String),

    #[error("index {index} out of range (tuple length {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("rack has no group origin")]
    NotGroupOrigin,

    #[error("K does not normalize c: {conjugator} maps {element} outside c")]
    KDoesNotNormalize { element: String, conjugator: String },

    #[error("c is not a single conjugacy class generating G: {0}")]
    NotSingleClass(String),

    #[error("c is not closed under powering by {q}: {element}^{q} = {image}")]
    NotClosedUnderPowering { q: u64, element: String, image: String },

    #[error("gcd(q, {modulus}) != 1 for q = {q}")]
    GcdViolation { q: u64, modulus: u64 },

    #[error("tuple {0} is not in the catalog")]
    TupleLeftCatalog(String),

    #[error("subgroup is not normal: {element} conjugated by {conjugator} leaves it")]
    NotNormal { element: String, conjugator: String },

    #[error("generation check failed: {0}")]
    NotGenerator(String),

    #[error("class map not independent of lifts: {0}")]
    NotWellDefined(String),

    #[error("empty subset")]
    EmptySubset,

    #[error("counting invariant validation failed: {0}")]
    ValidationFailure(String),

    #[error("internal mismatch: {0}")]
    InternalMismatch(String),

    #[error("not an admissible Gamma-group: {0}")]
    NotAdmissible(String),

    #[error("c1 has {c1} classes but c2 has {c2}")]
    ClassCountMismatch { c1: usize, c2: usize },

    #[error("orbit invariant violated: {0}")]
    InvariantViolation(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable variant name for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::InvalidPermutation(_) => "InvalidPermutation",
            Error::NotAGroup { .. } => "NotAGroup",
            Error::NotClosedUnderConjugation { .. } => "NotClosedUnderConjugation",
            Error::NotAnAction(_) => "NotAnAction",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::NotGroupOrigin => "NotGroupOrigin",
            Error::KDoesNotNormalize { .. } => "KDoesNotNormalize",
            Error::NotSingleClass(_) => "NotSingleClass",
            Error::NotClosedUnderPowering { .. } => "NotClosedUnderPowering",
            Error::GcdViolation { .. } => "GcdViolation",
            Error::TupleLeftCatalog(_) => "TupleLeftCatalog",
            Error::NotNormal { .. } => "NotNormal",
            Error::NotGenerator(_) => "NotGenerator",
            Error::NotWellDefined(_) => "NotWellDefined",
            Error::EmptySubset => "EmptySubset",
            Error::ValidationFailure(_) => "ValidationFailure",
            Error::InternalMismatch(_) => "InternalMismatch",
            Error::NotAdmissible(_) => "NotAdmissible",
            Error::ClassCountMismatch { .. } => "ClassCountMismatch",
            Error::InvariantViolation(_) => "InvariantViolation",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    pub(crate) fn budget(what: impl Into<String>, limit: usize, reached: u64) -> Self {
        Error::BudgetExceeded {
            what: what.into(),
            limit: limit as u64,
            reached,
        }
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
