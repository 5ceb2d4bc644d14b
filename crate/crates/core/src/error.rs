use thiserror::Error;

/// Errors reported by the computational core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is undefined at zero")]
    ZeroArgument(&'static str),

    #[error("kronecker symbol (0/0) is undefined")]
    KroneckerZeroZero,

    #[error("least prime at or above {0} does not fit in 64 bits")]
    Overflow(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("modulus {n} exceeds the brute-force bound {bound}")]
    ModulusTooLarge { n: u64, bound: u64 },

    #[error("{0} is not an odd prime")]
    NotOddPrime(i64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("character is not induced by the given primitive character: {0}")]
    NotInduced(String),

    #[error("the prime window {lo}..={hi} is empty")]
    EmptyPrimeWindow { lo: u64, hi: u64 },

    #[error("no conductor in {lo}..={hi} lies in the special set S")]
    EmptySpecialWindow { lo: u64, hi: u64 },

    #[error("weight mass is zero on the selected family")]
    ZeroDenominator,

    #[error("the Poisson identity path requires a smooth weight")]
    SharpWeight,

    #[error("family {0} has characters with vanishing Gauss sum")]
    VanishingGaussSum(&'static str),

    #[error("non-finite value at {context}")]
    NonFinite { context: String },
}

pub type Result<T> = std::result::Result<T, Error>;
