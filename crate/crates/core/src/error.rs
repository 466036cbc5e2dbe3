use thiserror::Error;

use crate::cipher::Collision;

/// Errors produced by the simulation and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("malformed cipher table: {0}")]
    MalformedTable(String),

    #[error("cipher table is not decryptable: {} collision(s), first: {}", .0.len(), .0[0])]
    NotDecryptable(Vec<Collision>),

    #[error("enumeration budget exceeded at n={n}: |X|^n*|K|*r^n = {x_count}^{n}*{key_count}*{r_max}^{n} > {budget}")]
    BudgetExceeded {
        n: usize,
        x_count: usize,
        key_count: usize,
        r_max: usize,
        budget: u64,
    },

    #[error("Shannon limit violated at n={n}: H(X|Y)={h_x_given_y} > H(K)={h_k}")]
    ShannonLimitViolated { n: usize, h_x_given_y: f64, h_k: f64 },

    #[error("LFSR seed must be nonzero")]
    ZeroSeed,

    #[error("length mismatch: {left} data symbols vs {right} keystream symbols")]
    LengthMismatch { left: usize, right: usize },

    #[error("keystream symbol {z} out of range for M={m}")]
    SymbolOutOfRange { z: usize, m: usize },

    #[error("phase is undefined for a heterodyne outcome at the origin")]
    UndefinedPhase,

    #[error("Fock cutoff budget exceeded: energy {energy} > {limit}")]
    CutoffBudget { energy: f64, limit: f64 },

    #[error("Fock truncation not converged: cutoff {cutoff} gives {value}, cutoff {wider} gives {wider_value}")]
    NotConverged {
        cutoff: usize,
        value: f64,
        wider: usize,
        wider_value: f64,
    },

    #[error("too few trials: {0}")]
    InsufficientTrials(String),

    #[error("prior is not dyadic at block length {l}; smallest valid block length is {suggested:?}")]
    NonDyadicPrior { l: u32, suggested: Option<u32> },

    #[error("block {block} is not a valid {l}-bit block")]
    InvalidBlock { block: u64, l: u32 },

    #[error("failed to parse document: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
