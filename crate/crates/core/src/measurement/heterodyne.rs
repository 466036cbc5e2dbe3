use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::signal::QumodeRecord;

/// Noise standard deviation of each heterodyne quadrature, in units of √photon.
pub const QUADRATURE_STD: f64 = 0.5;

/// A heterodyne outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeterodynePoint {
    pub q1: f64,
    pub q2: f64,
}

impl HeterodynePoint {
    /// Phase of the point in `[0, 2π)`.
    pub fn phase(&self) -> Result<f64> {
        if self.q1 == 0.0 && self.q2 == 0.0 {
            return Err(Error::UndefinedPhase);
        }
        Ok(crate::special::wrap_angle(self.q2.atan2(self.q1)))
    }
}

/// Heterodyne outcome for a coherent state of energy `energy` and phase `theta`.
pub fn heterodyne_sample_at<R: Rng + ?Sized>(energy: f64, theta: f64, rng: &mut R) -> HeterodynePoint {
    let noise = Normal::new(0.0, QUADRATURE_STD).expect("finite std");
    let amp = energy.max(0.0).sqrt();
    HeterodynePoint {
        q1: amp * theta.cos() + noise.sample(rng),
        q2: amp * theta.sin() + noise.sample(rng),
    }
}

pub fn heterodyne_sample<R: Rng + ?Sized>(record: &QumodeRecord, rng: &mut R) -> HeterodynePoint {
    heterodyne_sample_at(record.energy, record.theta(), rng)
}
