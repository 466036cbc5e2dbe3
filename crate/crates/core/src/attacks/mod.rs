//! Attacks on αη: individual-qumode Helstrom discrimination, the half-circle
//! ciphertext, keystream candidates, empirical Γ/Λ, LFSR seed search and
//! the wedge-quantization reduction.

mod candidates;
mod halfcircle;
mod individual;
mod kpa;
mod nishioka;

pub use candidates::{
    candidate_keystreams, empirical_gamma_lambda, phase_std_wedges, wedge_distance,
    wedge_offset_mass, wedge_outcome_table, CandidateSet, EmpiricalRandomization,
};
pub use halfcircle::{eve_halfcircle_error, halfcircle_reference};
pub use individual::{
    bit_density, individual_attack_error, mixture_error, trace_norm, CONVERGENCE_TOLERANCE,
};
pub use kpa::{kpa_lfsr_search, kpa_self_test, SearchReport, SelfTestConfig, SelfTestReport};
pub use nishioka::{
    decode_bit, find_counterexample, half_circle_bit, nishioka_reduction_demo,
    residual_bit, residual_depends_on_key, residual_depends_on_wedge, Counterexample,
    NishiokaReport,
};
