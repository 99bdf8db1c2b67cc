use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("order n = {n} is out of range: {reason}")]
    InvalidOrder { n: u32, reason: &'static str },

    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("polynomial is not squarefree (gcd with derivative: {gcd})")]
    NotSquarefree { gcd: String },

    #[error("endpoint {point} remains a root after {attempts} outward nudges")]
    EndpointRoot { point: String, attempts: u32 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("polynomial has no positive real roots")]
    NoPositiveRoots,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate denominator: E[qv^n] is zero (integrand vanishes almost surely)")]
    DegenerateDenominator,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("order mismatch: bounds computed for n = {bounds}, estimates for n = {requested}")]
    OrderMismatch { bounds: u32, requested: u32 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
