use thiserror::Error;

/// Errors surfaced by the p-adic engine.
///
/// Mismatched precisions or rings on binary operations are programming
/// errors and panic instead; everything data-dependent comes through here.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unit required: residue {0} is divisible by p = {1}")]
    UnitRequired(u64, u64),

    #[error("argument {residue} is not congruent to 1 modulo q = {q}")]
    NotOneModQ { residue: u64, q: u64 },

    #[error("angle component lies outside 1 + p^{e} Z_p (support violation)")]
    Support { e: u32 },

    #[error("element is not invertible modulo p (singular in the quotient ring)")]
    SingularElement,

    #[error("insufficient precision: {0}")]
    Precision(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("pole at s = 1: the p-adic L-function of the trivial character has a pole there")]
    PoleAtOne,

    #[error("characters of order divisible by p are not supported")]
    UnsupportedCharacter,

    #[error("no admissible auxiliary prime found below ceiling {0}")]
    NoAdmissiblePrime(u64),

    #[error("configured bound exceeded: {0}")]
    BoundExceeded(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit-code class used by the command-line driver:
    /// 1 parse/config, 2 hypothesis or pole, 3 precision, 4 resource bound.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invalid(_) => 1,
            Error::UnitRequired(..)
            | Error::NotOneModQ { .. }
            | Error::Support { .. }
            | Error::SingularElement
            | Error::Hypothesis(_)
            | Error::PoleAtOne
            | Error::UnsupportedCharacter => 2,
            Error::Precision(_) => 3,
            Error::NoAdmissiblePrime(_) | Error::BoundExceeded(_) | Error::Internal(_) => 4,
        }
    }
}
