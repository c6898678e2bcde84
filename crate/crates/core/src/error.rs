use thiserror::Error;

/// Errors raised by the library. Every variant is a hard failure: nothing in
/// this crate truncates or wraps silently.
#[derive(Debug, Error)]
pub enum Error {
    #[error("zero input: {0}")]
    ZeroInput(&'static str),

    #[error("Gaussian integer overflow in {0}")]
    Overflow(&'static str),

    #[error("precision exhausted: need at least {needed} bits, working precision is {have} bits")]
    PrecisionExhausted { needed: u32, have: u32 },

    #[error("region needs primes up to norm {needed}, table covers norm {have}")]
    Coverage { needed: f64, have: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("enumeration budget exceeded: {work} > {budget}")]
    Budget { work: f64, budget: f64 },

    #[error("factorization overflow: norm {0} exceeds the trial-division limit")]
    Factorization(u128),

    #[error("invalid complex constant {0:?}")]
    Parse(String),

    #[error("cache file: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

