//! Exact information-theoretic analysis of small table ciphers.

mod entropy;
mod table;

pub use entropy::{
    entropy_profile, entropy_profile_scheduled, shannon_limit_check, EntropyOptions,
    EntropyProfile, EntropyRow, FixedKey, KeySchedule, SequencePrior, StreamSchedule,
    DEFAULT_BUDGET, ZERO_TOLERANCE,
};
pub use table::{
    example_table, identity_table, xor_table, CipherTable, Collision, RandomizationCounts,
    TableDocument, TableEntry,
};
