//! Eve's error on the half-circle ciphertext bit.
//!
//! Eve reads each qumode by heterodyne and keeps only which half of the
//! circle, `[0, π)` or `[π, 2π)`, the outcome falls in. States are taken
//! uniform on the circle, which is the large-M limit of the 2M signal points.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::measurement::{heterodyne_sample_at, ErrorEstimate};
use crate::rng::{blocks, substream};

const BLOCK: u64 = 1 << 16;

/// Estimated errors must reach this count for a 3σ relative resolution.
const MIN_EXPECTED_ERRORS: f64 = 9.0;

/// The approximate rate `2/(π√S)`.
pub fn halfcircle_reference(s: f64) -> f64 {
    2.0 / (PI * s.sqrt())
}

pub fn eve_halfcircle_error(s: f64, trials: u64, seed: u64) -> Result<ErrorEstimate> {
    if !(s.is_finite() && s > 0.0) {
        return Err(invalid("S", "must be positive"));
    }
    let expected = halfcircle_reference(s).min(0.5) * trials as f64;
    if expected < MIN_EXPECTED_ERRORS {
        return Err(Error::InsufficientTrials(format!(
            "{trials} trials give about {expected:.1} errors at S={s}; need {MIN_EXPECTED_ERRORS}"
        )));
    }
    let counts: Vec<u64> = blocks(trials, BLOCK)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(b, count)| {
            let mut rng = substream(seed, "eve-halfcircle", b);
            let mut errors = 0;
            for _ in 0..count {
                let phi = rng.random::<f64>() * TAU;
                let p = heterodyne_sample_at(s, phi, &mut rng);
                // an outcome at the origin has no phase; read it as the lower half
                let read = p.phase().map(|t| t >= PI).unwrap_or(false);
                errors += (read != (phi >= PI)) as u64;
            }
            errors
        })
        .collect();
    Ok(ErrorEstimate {
        errors: counts.iter().sum(),
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_shrinks_with_energy() {
        let rates: Vec<f64> = [1e2, 1e3, 1e4]
            .iter()
            .map(|&s| eve_halfcircle_error(s, 2_000_000, 1).unwrap().rate())
            .collect();
        assert!(rates[0] > rates[1] && rates[1] > rates[2], "{rates:?}");
    }

    #[test]
    fn matches_boundary_crossing_probability() {
        // With Gaussian phase noise of std σ = 1/(2√S) and two boundaries
        // on the circle, the error is 2·E|N(0,σ)|/(2π) = σ/(π·√(π/2)).
        let s = 400.0;
        let est = eve_halfcircle_error(s, 4_000_000, 2).unwrap();
        let sigma = 0.5 / s.sqrt();
        let predicted = sigma * (2.0 / PI).sqrt() / PI;
        assert!(est.agrees_with(predicted, 4.0), "{} vs {predicted}", est.rate());
    }

    #[test]
    fn too_few_trials() {
        assert!(matches!(
            eve_halfcircle_error(4e4, 100, 0),
            Err(Error::InsufficientTrials(_))
        ));
    }
}
