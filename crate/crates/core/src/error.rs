use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (relative asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("negative power of a singular matrix requires an explicit support policy")]
    SingularNegativePower,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("invalid matrix data: {0}")]
    InvalidMatrix(String),

    #[error("density matrix is not faithful (min eigenvalue {0:.3e} below floor)")]
    FaithfulnessViolated(f64),

    #[error("inverse temperature must be positive and finite, got {0}")]
    BadBeta(f64),

    #[error("sample list is empty")]
    EmptySample,

    #[error("exponent p = {0} is not admissible here")]
    BadExponent(f64),

    #[error("exponent budget violated: sum = {sum}, allowed {allowed}")]
    BudgetViolation { sum: f64, allowed: f64 },

    #[error("p = {0} must be even")]
    OddP(u32),

    #[error("exponents do not match: 1/p + 1/p' = {lhs}, 1/r = {rhs}")]
    ExponentMismatch { lhs: f64, rhs: f64 },

    #[error("insertion z_{0} has zero real part; no even exponent satisfies the rule")]
    ZeroRealPart(usize),

    #[error("insertion tuple outside the admissible region: {0}")]
    InvalidInsertion(String),

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("state is singular; a faithful state is required")]
    SingularState,

    #[error("rank-deficient vector needs an explicit support constraint for p < 2")]
    SupportRequired,

    #[error("system size {0} exceeds the supported maximum")]
    SizeTooLarge(usize),

    #[error("re_floor * n = {need} does not fit the budget {alpha}")]
    InfeasibleFloor { need: f64, alpha: f64 },

    #[error("{what} has imaginary residue {im:.3e} at magnitude {mag:.3e}")]
    ImaginaryResidue { what: &'static str, im: f64, mag: f64 },

    #[error("two evaluation routes disagree: {a} vs {b}")]
    RouteDisagreement { a: String, b: String },

    #[error("postcondition failed: {0}")]
    Postcondition(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
