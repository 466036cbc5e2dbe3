use std::f64::consts::PI;

use super::HeterodynePoint;
use crate::error::{invalid, Result};

/// A measurement result that carries a phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Point(HeterodynePoint),
    Phase(f64),
}

impl Outcome {
    pub fn phase(&self) -> Result<f64> {
        match self {
            Outcome::Point(p) => p.phase(),
            Outcome::Phase(t) => Ok(crate::special::wrap_angle(*t)),
        }
    }
}

// Keeps a phase that lands exactly on a wedge boundary in the upper wedge
// despite rounding in φ·M/π.
const BOUNDARY_SLACK: f64 = 1e-9;

/// Index `j` of the wedge `[θ_j − π/2M, θ_j + π/2M)` containing `phi`,
/// where `θ_j = jπ/M`.
pub fn wedge_of_phase(phi: f64, m_bases: usize) -> usize {
    let n = 2 * m_bases;
    let t = (phi * m_bases as f64 / PI + 0.5 + BOUNDARY_SLACK).floor();
    (t as i64).rem_euclid(n as i64) as usize
}

pub fn wedge_quantize(outcome: &Outcome, m_bases: usize) -> Result<usize> {
    if m_bases == 0 || !m_bases.is_power_of_two() {
        return Err(invalid("M", "must be a power of two"));
    }
    Ok(wedge_of_phase(outcome.phase()?, m_bases))
}
