use thiserror::Error;

/// Every failure mode raised by the computational modules.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("Galois index {j} is not coprime to order {m}")]
    InvalidGaloisIndex { j: i64, m: u64 },
    #[error("arity mismatch: {left} vs {right} variables")]
    ArityMismatch { left: usize, right: usize },
    #[error("no twist factor: {0}")]
    NoTwistFactor(String),
    #[error("generator did not stabilize: {0}")]
    NotStabilized(String),
    #[error("degenerate endomorphism: id - sigma vanishes")]
    DegenerateEndo,
    #[error("elements belong to different derivation contexts")]
    ContextMismatch,
    #[error("inadmissible spec: d-vector {0:?} is nonzero")]
    InadmissibleSpec(Vec<i64>),
    #[error("singular root of unity: zeta^2 = 1")]
    SingularZeta,
    #[error("divisor is not a unit: {0}")]
    NonUnitDivisor(String),
    #[error("chi(gamma) must be a positive integer, got {0}")]
    NonIntegralChi(i64),
    #[error("infinite product did not stabilize within {0} factors")]
    ProductNotStabilized(usize),
    #[error("commutation P*phi(G) = G*gamma(P) fails: {0}")]
    CommutationFailure(String),
    #[error("precision exhausted: {0}")]
    PrecisionLoss(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
