//! Assisted brute-force seed recovery for an LFSR-keyed αη link under a
//! known-plaintext attack.
//!
//! Each observed wedge narrows its keystream symbol to a small candidate
//! set. Picking one candidate for each of a few pivot symbols whose linear
//! forms span the seed space fixes the seed through one GF(2) solve; the
//! remaining symbols then confirm or reject it.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::candidate_keystreams;
use crate::error::{invalid, Result};
use crate::gf2::{rank, BitVector, PreparedSystem};
use crate::keystream::{bit_forms, chop_symbols, lfsr_stream, LfsrConfig};
use crate::measurement::{heterodyne_sample_at, wedge_of_phase};
use crate::rng::substream;
use crate::signal::{mapper_steps, steps_to_radians};

/// Outcome of one search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchReport {
    pub recovered_seeds_hex: Vec<String>,
    #[serde(skip)]
    pub recovered_seeds: Vec<BitVector>,
    /// Linear-system solves performed.
    pub work: u64,
    pub success: bool,
    /// Symbol indices (from 0) used as pivots.
    pub pivots: Vec<usize>,
    pub candidate_counts: Vec<usize>,
    /// Mean candidate count over all symbols, the empirical `Γ + 1`.
    pub mean_candidates: f64,
    /// `(Γ + 1)^{pivots}` with the empirical `Γ + 1`.
    pub predicted_complexity: f64,
}

/// Picks, in order, the symbols whose forms raise the rank until the seed
/// is determined.
fn choose_pivots(forms: &[Vec<BitVector>], key_bits: usize) -> Option<Vec<usize>> {
    let mut rows = Vec::new();
    let mut pivots = Vec::new();
    let mut r = 0;
    for (i, f) in forms.iter().enumerate() {
        let mut trial = rows.clone();
        trial.extend(f.iter().cloned());
        let nr = rank(&trial);
        if nr > r {
            rows = trial;
            r = nr;
            pivots.push(i);
            if r == key_bits {
                return Some(pivots);
            }
        }
    }
    None
}

fn symbol_value(forms: &[BitVector], seed: &BitVector) -> usize {
    forms.iter().fold(0, |acc, f| acc << 1 | f.dot(seed) as usize)
}

/// Searches for all seeds consistent with the known data `x`, the observed
/// wedges `j` and a window of `w` wedges around each observation.
pub fn kpa_lfsr_search(
    x: &[u8],
    j: &[usize],
    key_bits: usize,
    taps: &[usize],
    m_bases: usize,
    w: usize,
    energy: f64,
) -> Result<SearchReport> {
    if x.len() != j.len() {
        return Err(crate::error::Error::LengthMismatch {
            left: x.len(),
            right: j.len(),
        });
    }
    if m_bases < 2 || !m_bases.is_power_of_two() {
        return Err(invalid("M", "must be a power of two, at least 2"));
    }
    let m = m_bases.trailing_zeros() as usize;
    let n = x.len();
    if n * m < key_bits {
        return Err(invalid("x", format!("{n} symbols of {m} bits cannot fix {key_bits} seed bits")));
    }
    let flat = bit_forms(key_bits, taps, n * m);
    let forms: Vec<Vec<BitVector>> = flat.chunks(m).map(|c| c.to_vec()).collect();
    let pivots = choose_pivots(&forms, key_bits)
        .ok_or_else(|| invalid("x", "keystream forms of the observed symbols do not span the seed"))?;

    let sets = x
        .iter()
        .zip(j)
        .map(|(&xi, &ji)| candidate_keystreams(xi, ji, m_bases, w, energy))
        .collect::<Result<Vec<_>>>()?;
    let candidate_counts: Vec<usize> = sets.iter().map(|s| s.len()).collect();
    let allowed: Vec<Vec<bool>> = sets
        .iter()
        .map(|s| {
            let mut a = vec![false; m_bases];
            for &(z, _) in &s.candidates {
                a[z] = true;
            }
            a
        })
        .collect();

    let rows: Vec<BitVector> = pivots.iter().flat_map(|&p| forms[p].iter().cloned()).collect();
    let system = PreparedSystem::new(&rows, key_bits);
    let radices: Vec<usize> = pivots.iter().map(|&p| candidate_counts[p]).collect();
    let total: u64 = radices.iter().map(|&r| r as u64).product();
    let others: Vec<usize> = (0..n).filter(|i| !pivots.contains(i)).collect();

    let recovered: Vec<BitVector> = (0..total)
        .into_par_iter()
        .filter_map(|mut idx| {
            let mut rhs = BitVector::zeros(rows.len());
            let mut bit = 0;
            for (&p, &radix) in pivots.iter().zip(&radices) {
                let z = sets[p].candidates[(idx % radix as u64) as usize].0;
                idx /= radix as u64;
                for b in (0..m).rev() {
                    rhs.set(bit, (z >> b) & 1 == 1);
                    bit += 1;
                }
            }
            let seed = system.solve(&rhs)?;
            if seed.is_zero() {
                return None;
            }
            others
                .iter()
                .all(|&i| allowed[i][symbol_value(&forms[i], &seed)])
                .then_some(seed)
        })
        .collect();

    let mean_candidates = candidate_counts.iter().sum::<usize>() as f64 / n as f64;
    Ok(SearchReport {
        recovered_seeds_hex: recovered.iter().map(BitVector::to_hex).collect(),
        success: !recovered.is_empty(),
        recovered_seeds: recovered,
        work: total,
        predicted_complexity: mean_candidates.powi(pivots.len() as i32),
        pivots,
        candidate_counts,
        mean_candidates,
    })
}

/// Settings of a planted-seed self test.
#[derive(Debug, Clone, Serialize)]
pub struct SelfTestConfig {
    pub key_bits: usize,
    pub taps: Vec<usize>,
    pub m_bases: usize,
    pub energy: f64,
    pub window: usize,
    pub symbols: usize,
    pub trials: u64,
    /// Recall below this flags the window as too small.
    pub recall_threshold: f64,
}

/// Aggregate of a planted-seed self test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfTestReport {
    pub trials: u64,
    pub recovered: u64,
    pub recall: f64,
    pub mean_work: f64,
    pub max_work: u64,
    pub mean_candidates: f64,
    pub mean_predicted: f64,
    /// Trials where every true symbol was in its window but the seed was
    /// not returned. Always zero for a correct search.
    pub recall_violations: u64,
    pub window_too_small: bool,
}

struct TrialOutcome {
    found: bool,
    in_window: bool,
    work: u64,
    mean_candidates: f64,
    predicted: f64,
}

/// Plants random seeds, simulates heterodyne wedges at `energy` and runs the
/// search on each trial.
pub fn kpa_self_test(config: &SelfTestConfig, seed: u64) -> Result<SelfTestReport> {
    let m = config.m_bases.trailing_zeros() as usize;
    // validate once up front so per-trial failures cannot be config errors
    LfsrConfig::new(config.key_bits, &config.taps, BitVector::unit(config.key_bits, 0))?;
    let outcomes = (0..config.trials)
        .into_par_iter()
        .map(|t| -> Result<TrialOutcome> {
            let mut rng = substream(seed, "kpa-trial", t);
            let planted = loop {
                let bits: Vec<bool> = (0..config.key_bits).map(|_| rng.random()).collect();
                let v = BitVector::from_bits(&bits);
                if !v.is_zero() {
                    break v;
                }
            };
            let lfsr = LfsrConfig::new(config.key_bits, &config.taps, planted.clone())?;
            let z = chop_symbols(&lfsr_stream(&lfsr, config.symbols * m), m)?;
            let x: Vec<u8> = (0..config.symbols).map(|_| rng.random_range(0..2)).collect();
            let mut j = Vec::with_capacity(config.symbols);
            for (&xi, &zi) in x.iter().zip(&z) {
                let s = mapper_steps(xi, zi, config.m_bases)?;
                let p = heterodyne_sample_at(config.energy, steps_to_radians(s, config.m_bases), &mut rng);
                j.push(p.phase().map_or(s, |phi| wedge_of_phase(phi, config.m_bases)));
            }
            let report = kpa_lfsr_search(
                &x,
                &j,
                config.key_bits,
                &config.taps,
                config.m_bases,
                config.window,
                config.energy,
            )?;
            let in_window = x.iter().zip(&j).zip(&z).all(|((&xi, &ji), &zi)| {
                let s = mapper_steps(xi, zi, config.m_bases).expect("checked");
                super::wedge_distance(s, ji, config.m_bases) <= config.window
            });
            Ok(TrialOutcome {
                found: report.recovered_seeds.contains(&planted),
                in_window,
                work: report.work,
                mean_candidates: report.mean_candidates,
                predicted: report.predicted_complexity,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let n = outcomes.len().max(1) as f64;
    let recovered = outcomes.iter().filter(|o| o.found).count() as u64;
    let recall = recovered as f64 / n;
    Ok(SelfTestReport {
        trials: config.trials,
        recovered,
        recall,
        mean_work: outcomes.iter().map(|o| o.work as f64).sum::<f64>() / n,
        max_work: outcomes.iter().map(|o| o.work).max().unwrap_or(0),
        mean_candidates: outcomes.iter().map(|o| o.mean_candidates).sum::<f64>() / n,
        mean_predicted: outcomes.iter().map(|o| o.predicted).sum::<f64>() / n,
        recall_violations: outcomes.iter().filter(|o| o.in_window && !o.found).count() as u64,
        window_too_small: recall < config.recall_threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keystream::maximal_taps;

    fn noiseless_run(key_bits: usize, m_bases: usize, seed_value: u64) -> (SearchReport, BitVector) {
        let m = m_bases.trailing_zeros() as usize;
        let taps = maximal_taps(key_bits).unwrap();
        let planted = BitVector::from_u64(key_bits, seed_value);
        let lfsr = LfsrConfig::new(key_bits, taps, planted.clone()).unwrap();
        let n = key_bits.div_ceil(m) + 4;
        let z = chop_symbols(&lfsr_stream(&lfsr, n * m), m).unwrap();
        let x: Vec<u8> = (0..n).map(|i| (i * 7 % 3 == 0) as u8).collect();
        let j: Vec<usize> = x
            .iter()
            .zip(&z)
            .map(|(&xi, &zi)| mapper_steps(xi, zi, m_bases).unwrap())
            .collect();
        (kpa_lfsr_search(&x, &j, key_bits, taps, m_bases, 0, 1e4).unwrap(), planted)
    }

    #[test]
    fn noiseless_wedges_give_the_seed_in_one_solve() {
        let (r, planted) = noiseless_run(16, 16, 0xace1);
        assert_eq!(r.work, 1);
        assert_eq!(r.recovered_seeds, vec![planted]);
        assert_eq!(r.pivots, vec![0, 1, 2, 3]);
    }

    #[test]
    fn partial_last_pivot() {
        // 6 seed bits from 4-bit symbols: the second pivot is overdetermined
        let (r, planted) = noiseless_run(6, 16, 0b101101);
        assert_eq!(r.pivots.len(), 2);
        assert!(r.recovered_seeds.contains(&planted));
    }

    #[test]
    fn planted_seed_is_recalled() {
        let config = SelfTestConfig {
            key_bits: 12,
            taps: maximal_taps(12).unwrap().to_vec(),
            m_bases: 16,
            energy: 25.0,
            window: 2,
            symbols: 8,
            trials: 30,
            recall_threshold: 0.9,
        };
        let r = kpa_self_test(&config, 5).unwrap();
        assert_eq!(r.recall_violations, 0);
        assert!(r.recall >= 0.9, "{r:?}");
        assert!(!r.window_too_small);
        assert!(r.mean_work <= 2.0 * r.mean_predicted, "{r:?}");
    }

    #[test]
    fn too_few_symbols() {
        let taps = maximal_taps(16).unwrap();
        assert!(kpa_lfsr_search(&[0, 1], &[0, 1], 16, taps, 16, 1, 25.0).is_err());
    }
}
