//! Exact machinery for intersective polynomials in prime variables.
//!
//! The crate provides, at desk scale:
//!
//! * sparse multivariate polynomial arithmetic over arbitrary-precision
//!   integers ([`poly`]);
//! * prime tables and Chebyshev-type counts over arithmetic progressions
//!   ([`primes`]);
//! * root finding modulo prime powers, multivariable Hensel lifting, and
//!   certification of intersective / P-intersective polynomials ([`padic`]);
//! * the auxiliary-polynomial calculus r_d, λ(d), h_d and its inheritance
//!   identity ([`aux`]);
//! * smoothness / Deligne classification over small finite fields and
//!   extension degrees ([`deligne`]);
//! * the gradient sieve γ_d(p), j_d(p), w_d and the ν_d weights ([`sieve`]);
//! * complete and local exponential sums, S(α), arc classification, and
//!   additive energy ([`expsum`]);
//! * the extremal quantity D(X,N), Fourier-side identities, and the
//!   density-increment step ([`extremal`]).
//!
//! Everything numeric that must be exact is exact (BigInt / BigRational);
//! floats appear only where the quantity is intrinsically real (logs,
//! exponential-sum values, integrals).

pub mod acceptance;
pub mod aux;
pub mod config;
pub mod deligne;
pub mod expsum;
pub mod extremal;
pub mod padic;
pub mod poly;
pub mod primes;
pub mod sieve;

pub use config::RunConfig;
pub use poly::MultiPoly;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: polynomial has {expected} variables, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coefficient {coefficient} is not divisible by {divisor}")]
    NotDivisible {
        coefficient: String,
        divisor: String,
    },
    #[error("search cap exceeded: {0}")]
    SearchCapExceeded(String),
    #[error(
        "Hensel hypothesis failed: every gradient coordinate vanishes mod p^{gamma} at the root"
    )]
    HypothesisFailed { gamma: u32 },
    #[error("root for p={p} stored at precision {have}, need {need}")]
    InsufficientPrecision { p: u64, have: u32, need: u32 },
    #[error("multiplicity of the chosen root at p={p} is unknown")]
    UnknownMultiplicity { p: u64 },
    #[error("gradient level cap exceeded at p={p}: gamma > {cap}")]
    GammaCapExceeded { p: u64, cap: u32 },
    #[error("no certified root stored for p={p}")]
    MissingRoot { p: u64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
