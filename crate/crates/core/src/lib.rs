//! Simulation and cryptanalysis of the αη quantum-noise randomized cipher.
//!
//! The crate covers exact entropy analysis of small table ciphers
//! ([`cipher`]), LFSR keystreams ([`keystream`]), the phase mapper
//! ([`signal`]), heterodyne and phase measurements ([`measurement`]),
//! attacks ([`attacks`]), closed-form bounds ([`bounds`]) and a homophonic
//! codec ([`homophonic`]).

pub mod attacks;
pub mod bounds;
pub mod cipher;
pub mod error;
pub mod gf2;
pub mod homophonic;
pub mod keystream;
pub mod measurement;
pub mod rng;
pub mod signal;
pub mod special;

pub use error::{Error, Result};
