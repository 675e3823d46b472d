//! Exact arithmetic for the dynamics of power maps `x -> x^L` on matrix
//! algebras `M_n(q)` and the classical groups `GL_n(q)`, `Sp_2n(q)`, `U_n(q)`.
//!
//! The crate is organized bottom-up:
//!
//! - [`ff`]: finite fields `F_{p^d}` with a deterministic modulus choice,
//!   elements as dense residue vectors.
//! - [`poly`]: dense univariate polynomials over a field, irreducibility,
//!   enumeration, the reciprocal and conjugate transforms, and root-power
//!   tests evaluated as congruences in the quotient ring.
//! - [`counting`]: closed-form counts of irreducible polynomials whose roots
//!   are periodic under `x -> x^L`, together with brute-force enumeration
//!   oracles that adjudicate every closed form.
//! - [`matdyn`]: matrix dynamics -- exact powering, orbit iteration, minimal
//!   polynomials, and the structural periodicity test.
//! - [`groups`]: orders, membership tests, and exhaustive enumeration of the
//!   classical groups, plus brute-force periodic-point counts.
//! - [`classcount`]: conjugacy-class bookkeeping (partitions, class types,
//!   centralizer orders), exact class-based periodic-point counts, and the
//!   exact-rational large-`q` limit evaluators.
//!
//! All counts are exact: integers are arbitrary precision and proportions are
//! exact rationals. Nothing in the crate rounds.

pub mod classcount;
pub mod counting;
pub mod ff;
pub mod groups;
pub mod matdyn;
pub mod poly;


/// Arbitrary-precision nonnegative integer used for every count and order.
pub type ExactInt = num_bigint::BigUint;

/// Arbitrary-precision rational used for proportions, limits, and the
/// verbatim variants of formulas that do not evaluate to integers.
pub type ExactRational = num_rational::BigRational;

/// Errors surfaced by the library.
///
/// The split matters to callers: `Invalid` and `Hypothesis` mean the request
/// itself is malformed or outside a formula's hypotheses, `Guard` means an
/// enumeration would exceed its configured budget, and `Internal` means a
/// self-check failed loudly rather than returning a wrong answer.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("enumeration guard exceeded: {0}")]
    Guard(String),
    #[error("internal check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

pub(crate) fn hypothesis(msg: impl Into<String>) -> Error {
    Error::Hypothesis(msg.into())
}

pub(crate) fn guard(msg: impl Into<String>) -> Error {
    Error::Guard(msg.into())
}

pub(crate) fn internal(msg: impl Into<String>) -> Error {
    Error::Internal(msg.into())
}
