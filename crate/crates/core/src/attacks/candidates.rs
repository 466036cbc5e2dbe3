//! Keystream candidates from observed wedges and the empirical Γ and Λ of
//! the wedge ciphertext.

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::bounds::wedge_counts;
use crate::cipher::CipherTable;
use crate::error::{invalid, Error, Result};
use crate::measurement::{heterodyne_sample_at, wedge_of_phase, QUADRATURE_STD};
use crate::rng::substream;
use crate::signal::{mapper_steps, steps_to_radians};

/// Keystream values consistent with one observed wedge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateSet {
    pub window: usize,
    /// `(z, weight)` in increasing `z`; weights sum to one.
    pub candidates: Vec<(usize, f64)>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn contains(&self, z: usize) -> bool {
        self.candidates.iter().any(|&(c, _)| c == z)
    }
}

/// Heterodyne phase noise in units of wedges, `(1/(2√E))·M/π`.
pub fn phase_std_wedges(energy: f64, m_bases: usize) -> f64 {
    QUADRATURE_STD / energy.sqrt() * m_bases as f64 / std::f64::consts::PI
}

/// Circular distance between two wedge indices.
pub fn wedge_distance(a: usize, b: usize, m_bases: usize) -> usize {
    let n = 2 * m_bases;
    let d = (a + n - b) % n;
    d.min(n - d)
}

/// Probability that Gaussian phase noise of `sigma` wedges moves an outcome
/// `d` wedges away from its signal.
pub fn wedge_offset_mass(d: usize, sigma: f64) -> f64 {
    if sigma <= 0.0 {
        return (d == 0) as u8 as f64;
    }
    let n = Normal::standard();
    let d = d as f64;
    n.cdf((d + 0.5) / sigma) - n.cdf((d - 0.5) / sigma)
}

/// All `z` whose signal for bit `x` lies within `w` wedges of `j`, weighted
/// by the Gaussian noise mass at energy `energy` (pass `f64::INFINITY` for
/// noiseless weights).
pub fn candidate_keystreams(x: u8, j: usize, m_bases: usize, w: usize, energy: f64) -> Result<CandidateSet> {
    if j >= 2 * m_bases {
        return Err(invalid("j", format!("wedge {j} is outside 0..{}", 2 * m_bases)));
    }
    if !(energy > 0.0) {
        return Err(invalid("energy", "must be positive"));
    }
    let sigma = phase_std_wedges(energy, m_bases);
    let mut candidates = Vec::new();
    for z in 0..m_bases {
        let d = wedge_distance(mapper_steps(x, z, m_bases)?, j, m_bases);
        if d <= w {
            candidates.push((z, wedge_offset_mass(d, sigma)));
        }
    }
    let total: f64 = candidates.iter().map(|c| c.1).sum();
    let n = candidates.len() as f64;
    for c in &mut candidates {
        c.1 = if total > 0.0 { c.1 / total } else { 1.0 / n };
    }
    Ok(CandidateSet { window: w, candidates })
}

/// Result of [`empirical_gamma_lambda`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalRandomization {
    pub s: f64,
    pub m_bases: usize,
    pub trials_per_cell: u64,
    pub epsilon: f64,
    pub gamma: usize,
    pub lambda: usize,
    /// Largest wedge offset kept in any cell's ε-support.
    pub support_halfwidth: usize,
    pub sigma_wedges: f64,
    /// Closed forms at the same parameters.
    pub gamma_het: f64,
    pub gamma_het_strict: f64,
    /// `(Λ + 1) − 2(Γ + 1)`.
    pub relation_gap: i64,
}

impl EmpiricalRandomization {
    pub fn relation_holds(&self) -> bool {
        self.relation_gap.abs() <= 1
    }
}

/// The ε-support of heterodyne wedge outcomes as a cipher table over
/// `x ∈ {0,1}`, `z ∈ 0..M` and `j ∈ 0..2M`.
///
/// Every list runs over the same signed offsets `−R..=R` from the signal
/// wedge, where `R` is the widest support seen; offsets outside a cell's own
/// support get weight zero. Position `r` in a list therefore always means
/// offset `r − R`.
pub fn wedge_outcome_table(
    s: f64,
    m_bases: usize,
    trials_per_cell: u64,
    epsilon: f64,
    seed: u64,
) -> Result<(CipherTable, usize)> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid("epsilon", "must lie in (0, 1)"));
    }
    if (trials_per_cell as f64) * epsilon < 10.0 {
        return Err(Error::InsufficientTrials(format!(
            "{trials_per_cell} trials per cell resolve probabilities down to {:.2e}, not ε = {epsilon}",
            10.0 / trials_per_cell as f64
        )));
    }
    mapper_steps(0, 0, m_bases)?;
    let n = 2 * m_bases;
    // per cell: (signed offset, probability) over the ε-support
    let supports: Vec<Vec<(i64, f64)>> = (0..2 * m_bases)
        .into_par_iter()
        .map(|cell| {
            let (x, z) = ((cell / m_bases) as u8, cell % m_bases);
            let s_step = mapper_steps(x, z, m_bases).expect("checked");
            let theta = steps_to_radians(s_step, m_bases);
            let mut rng = substream(seed, "wedge-cell", cell as u64);
            let mut counts = vec![0u64; n];
            for _ in 0..trials_per_cell {
                let p = heterodyne_sample_at(s, theta, &mut rng);
                if let Ok(phi) = p.phase() {
                    counts[(wedge_of_phase(phi, m_bases) + n - s_step) % n] += 1;
                }
            }
            let mut support: Vec<(i64, f64)> = counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c as f64 >= epsilon * trials_per_cell as f64)
                .map(|(off, &c)| {
                    let off = off as i64;
                    let signed = if off > m_bases as i64 { off - n as i64 } else { off };
                    (signed, c as f64)
                })
                .collect();
            let total: f64 = support.iter().map(|v| v.1).sum();
            for v in &mut support {
                v.1 /= total;
            }
            support.sort_by_key(|v| v.0);
            support
        })
        .collect();

    let radius = supports
        .iter()
        .flatten()
        .map(|v| v.0.unsigned_abs() as usize)
        .max()
        .unwrap_or(0);
    let table = CipherTable::from_fn(2, m_bases, n, |x, z| {
        let cell = &supports[x * m_bases + z];
        let s_step = mapper_steps(x as u8, z, m_bases).expect("checked") as i64;
        (-(radius as i64)..=radius as i64)
            .map(|off| {
                let y = (s_step + off).rem_euclid(n as i64) as usize;
                let w = cell.iter().find(|v| v.0 == off).map_or(0.0, |v| v.1);
                (y, w)
            })
            .collect()
    })?;
    Ok((table, radius))
}

/// Γ and Λ of the heterodyne wedge ciphertext, counting outcomes of
/// probability at least `epsilon` as reachable.
pub fn empirical_gamma_lambda(
    s: f64,
    m_bases: usize,
    trials_per_cell: u64,
    epsilon: f64,
    seed: u64,
) -> Result<EmpiricalRandomization> {
    let (table, radius) = wedge_outcome_table(s, m_bases, trials_per_cell, epsilon, seed)?;
    let counts = table.gamma_lambda()?;
    let closed = wedge_counts(s, m_bases)?;
    Ok(EmpiricalRandomization {
        s,
        m_bases,
        trials_per_cell,
        epsilon,
        gamma: counts.gamma,
        lambda: counts.lambda,
        support_halfwidth: radius,
        sigma_wedges: phase_std_wedges(s, m_bases),
        gamma_het: closed.gamma_het,
        gamma_het_strict: closed.gamma_het_strict,
        relation_gap: (counts.lambda as i64 + 1) - 2 * (counts.gamma as i64 + 1),
    })
}
