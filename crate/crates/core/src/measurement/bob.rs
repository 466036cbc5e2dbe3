use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{heterodyne_sample_at, HeterodynePoint};
use crate::error::{invalid, Result};
use crate::rng::{blocks, substream};
use crate::signal::{mapper, mapper_steps, steps_to_radians};
use crate::special::{angle_diff, q_function};

/// How the legitimate receiver is modeled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BobModel {
    /// Heterodyne detection followed by a projection onto the basis axis.
    Heterodyne,
    /// Optimal two-state discrimination, simulated as a Bernoulli error.
    Helstrom,
}

/// Bit of basis `z` whose mapper phase is angularly nearer `phase`. Exact
/// ties go to bit 0.
pub fn bob_decide(phase: f64, z: usize, m_bases: usize) -> Result<u8> {
    let d = angle_diff(phase, mapper(0, z, m_bases)?).abs();
    Ok((d > FRAC_PI_2) as u8)
}

/// The same decision taken from the sign of the projection of a
/// heterodyne point onto the basis axis.
pub fn bob_decide_point(point: &HeterodynePoint, z: usize, m_bases: usize) -> Result<u8> {
    let t = mapper(0, z, m_bases)?;
    Ok((point.q1 * t.cos() + point.q2 * t.sin() < 0.0) as u8)
}

/// Minimum error for two equiprobable coherent states `|±α⟩` with `|α|² = energy`.
pub fn helstrom_error(energy: f64) -> f64 {
    // ½(1 − √(1 − u)) rewritten to avoid cancellation when u is tiny
    let u = (-4.0 * energy).exp();
    0.5 * u / (1.0 + (1.0 - u).sqrt())
}

/// Closed-form bit error of each receiver model at received energy `energy`.
pub fn bob_error_reference(energy: f64, model: BobModel) -> f64 {
    match model {
        BobModel::Heterodyne => q_function(2.0 * energy.sqrt()),
        BobModel::Helstrom => helstrom_error(energy),
    }
}

/// A Monte Carlo error count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorEstimate {
    pub errors: u64,
    pub trials: u64,
}

impl ErrorEstimate {
    pub fn rate(&self) -> f64 {
        self.errors as f64 / self.trials as f64
    }

    /// Binomial standard deviation of the rate if the true value is `p`.
    pub fn sigma_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Whether the estimate lies within `k` binomial standard deviations of `p`.
    pub fn agrees_with(&self, p: f64, k: f64) -> bool {
        (self.rate() - p).abs() <= k * self.sigma_at(p)
    }
}

const BLOCK: u64 = 1 << 16;

/// Simulates Bob's bit errors over uniformly random data bits and bases.
pub fn simulate_bob(
    energy: f64,
    m_bases: usize,
    trials: u64,
    model: BobModel,
    seed: u64,
) -> Result<ErrorEstimate> {
    if !(energy.is_finite() && energy >= 0.0) {
        return Err(invalid("energy", "must be finite and nonnegative"));
    }
    mapper_steps(0, 0, m_bases)?;
    let p_helstrom = helstrom_error(energy);
    let counts: Vec<u64> = blocks(trials, BLOCK)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(b, count)| {
            let mut rng = substream(seed, "bob", b);
            let mut errors = 0;
            for _ in 0..count {
                let x: u8 = rng.random_range(0..2);
                let z = rng.random_range(0..m_bases);
                let decided = match model {
                    BobModel::Heterodyne => {
                        let s = mapper_steps(x, z, m_bases).expect("checked");
                        let p = heterodyne_sample_at(energy, steps_to_radians(s, m_bases), &mut rng);
                        bob_decide_point(&p, z, m_bases).expect("checked")
                    }
                    BobModel::Helstrom => x ^ rng.random_bool(p_helstrom) as u8,
                };
                errors += (decided != x) as u64;
            }
            errors
        })
        .collect();
    Ok(ErrorEstimate {
        errors: counts.iter().sum(),
        trials,
    })
}
