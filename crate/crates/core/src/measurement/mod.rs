//! Heterodyne and canonical-phase measurement of coherent states, wedge
//! quantization and the legitimate receiver's decision.

mod bob;
mod heterodyne;
mod phase;
mod wedge;

pub use bob::{
    bob_decide, bob_decide_point, bob_error_reference, helstrom_error, simulate_bob, BobModel,
    ErrorEstimate,
};
pub use heterodyne::{heterodyne_sample, heterodyne_sample_at, HeterodynePoint, QUADRATURE_STD};
pub use phase::{
    coherent_amplitudes, fock_cutoff, lorentzian_width, phase_sample, sample_phase_at, PhaseDensity, PhaseModel,
    EXACT_ENERGY_LIMIT, MIN_GRID,
};
pub use wedge::{wedge_of_phase, wedge_quantize, Outcome};
