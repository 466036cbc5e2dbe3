use std::f64::consts::{PI, TAU};

use log::debug;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};
use crate::signal::QumodeRecord;
use crate::special::wrap_angle;

/// Largest energy for which the exact phase density is computed.
pub const EXACT_ENERGY_LIMIT: f64 = 400.0;
/// Smallest grid used for the exact phase density.
pub const MIN_GRID: usize = 1 << 14;
const MAX_GRID: usize = 1 << 20;
const CDF_TOLERANCE: f64 = 1e-6;

/// Canonical-phase outcome models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseModel {
    /// The canonical phase density of the truncated Fock expansion.
    Exact,
    /// A wrapped Cauchy law of width [`lorentzian_width`].
    Lorentzian,
}

/// Fock cutoff used for a coherent state of mean photon number `energy`.
pub fn fock_cutoff(energy: f64) -> usize {
    (energy + 10.0 * energy.sqrt() + 20.0).ceil() as usize
}

/// `|⟨n|α⟩|` for `n = 0..=cutoff` with `|α|² = energy`, evaluated in logs.
pub fn coherent_amplitudes(energy: f64, cutoff: usize) -> Vec<f64> {
    if energy == 0.0 {
        let mut v = vec![0.0; cutoff + 1];
        v[0] = 1.0;
        return v;
    }
    let ln_e = energy.ln();
    (0..=cutoff)
        .map(|n| {
            let n = n as f64;
            (-energy / 2.0 + n / 2.0 * ln_e - 0.5 * ln_gamma(n + 1.0)).exp()
        })
        .collect()
}

/// Canonical phase density of a coherent state, tabulated on a uniform grid
/// for the state at phase 0.
#[derive(Debug, Clone)]
pub struct PhaseDensity {
    energy: f64,
    cutoff: usize,
    // density at θ_k = 2πk/N
    density: Vec<f64>,
    // cdf[k] = mass of [0, θ_k), cdf[N] = 1
    cdf: Vec<f64>,
    normalization: f64,
    resultant: f64,
}

fn density_on_grid(amps: &[f64], n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let step = Complex64::from_polar(1.0, TAU * k as f64 / n as f64);
            let mut rot = Complex64::new(1.0, 0.0);
            let mut sum = Complex64::new(0.0, 0.0);
            for &c in amps {
                sum += rot * c;
                rot *= step;
            }
            sum.norm_sqr() / TAU
        })
        .collect()
}

fn trapezoid_cdf(density: &[f64]) -> Vec<f64> {
    let n = density.len();
    let h = TAU / n as f64;
    let mut cdf = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    cdf.push(0.0);
    for k in 0..n {
        acc += 0.5 * (density[k] + density[(k + 1) % n]) * h;
        cdf.push(acc);
    }
    cdf
}

impl PhaseDensity {
    pub fn new(energy: f64) -> Result<Self> {
        if !(energy.is_finite() && energy >= 0.0) {
            return Err(invalid("energy", "must be finite and nonnegative"));
        }
        if energy > EXACT_ENERGY_LIMIT {
            return Err(Error::CutoffBudget {
                energy,
                limit: EXACT_ENERGY_LIMIT,
            });
        }
        let cutoff = fock_cutoff(energy);
        let amps = coherent_amplitudes(energy, cutoff);
        let resultant = amps.windows(2).map(|w| w[0] * w[1]).sum::<f64>();

        let mut n = MIN_GRID;
        let mut density = density_on_grid(&amps, n);
        let mut cdf = trapezoid_cdf(&density);
        while n < MAX_GRID {
            let finer = density_on_grid(&amps, 2 * n);
            let finer_cdf = trapezoid_cdf(&finer);
            let change = (0..=n)
                .map(|k| (cdf[k] - finer_cdf[2 * k]).abs())
                .fold(0.0, f64::max);
            n *= 2;
            density = finer;
            cdf = finer_cdf;
            if change < CDF_TOLERANCE {
                break;
            }
        }
        let normalization = cdf[n];
        debug!("phase density at E={energy}: grid {n}, cutoff {cutoff}, mass {normalization}");
        for v in &mut cdf {
            *v /= normalization;
        }
        for v in &mut density {
            *v /= normalization;
        }
        Ok(Self {
            energy,
            cutoff,
            density,
            cdf,
            normalization,
            resultant,
        })
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn grid_len(&self) -> usize {
        self.density.len()
    }

    /// Density at grid point `k`, i.e. at phase `2πk/N` from the signal.
    pub fn density_at(&self, k: usize) -> f64 {
        self.density[k]
    }

    /// Grid integral of the density before renormalization.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// `|E[e^{iθ}]|`, computed exactly from the Fock amplitudes.
    pub fn mean_resultant_length(&self) -> f64 {
        self.resultant
    }

    /// Circular standard deviation `√(−2 ln R)`.
    pub fn circular_std(&self) -> f64 {
        (-2.0 * self.resultant.ln()).sqrt()
    }

    /// Draws a phase for the state at phase `center`.
    pub fn sample<R: Rng + ?Sized>(&self, center: f64, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        // last k with cdf[k] <= u
        let k = self.cdf.partition_point(|&c| c <= u).saturating_sub(1);
        let k = k.min(self.density.len() - 1);
        let h = TAU / self.density.len() as f64;
        let span = self.cdf[k + 1] - self.cdf[k];
        let frac = if span > 0.0 { (u - self.cdf[k]) / span } else { 0.5 };
        wrap_angle(center + (k as f64 + frac) * h)
    }
}

/// Width of the wrapped Cauchy phase model at energy `energy`.
pub fn lorentzian_width(energy: f64) -> f64 {
    1.0 / (4.0 * energy.sqrt())
}

/// Draws a canonical-phase outcome for a state of the given energy and phase.
///
/// The exact model builds a [`PhaseDensity`] on every call; reuse one via
/// [`PhaseDensity::sample`] when drawing many outcomes at a fixed energy.
pub fn sample_phase_at<R: Rng + ?Sized>(
    energy: f64,
    theta: f64,
    model: PhaseModel,
    rng: &mut R,
) -> Result<f64> {
    match model {
        PhaseModel::Exact => Ok(PhaseDensity::new(energy)?.sample(theta, rng)),
        PhaseModel::Lorentzian => {
            if energy <= 0.0 {
                return Ok(rng.random::<f64>() * TAU);
            }
            let u: f64 = rng.random();
            Ok(wrap_angle(theta + lorentzian_width(energy) * (PI * (u - 0.5)).tan()))
        }
    }
}

pub fn phase_sample<R: Rng + ?Sized>(record: &QumodeRecord, model: PhaseModel, rng: &mut R) -> Result<f64> {
    sample_phase_at(record.energy, record.theta(), model, rng)
}
