//! Exact conditional entropies of a table cipher by full enumeration.
//!
//! The joint law of `(K, X_n, Y_n)` is `p(k) p(x_n) prod_i p(y_i | x_i, z_i(k))`
//! where `z_i(k)` is the table key used at position `i` under key `k`. For a
//! plain table `z_i(k) = k`; a keystream schedule makes the cipher
//! time-varying. All sums run in a canonical order (keys ascending,
//! sequences ascending) so results are bitwise reproducible.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::CipherTable;
use crate::error::{invalid, Error, Result};

/// Conditional entropies below this many bits count as zero.
pub const ZERO_TOLERANCE: f64 = 1e-9;

/// Default cap on `|X|^n * |K| * r_max^n`.
pub const DEFAULT_BUDGET: u64 = 1 << 26;

/// Maps a key to the table key used at each position.
pub trait KeySchedule: Sync {
    fn key_count(&self) -> usize;
    fn table_key(&self, key: usize, position: usize) -> usize;
}

/// The same table key at every position.
#[derive(Debug, Clone, Copy)]
pub struct FixedKey {
    pub keys: usize,
}

impl KeySchedule for FixedKey {
    fn key_count(&self) -> usize {
        self.keys
    }

    fn table_key(&self, key: usize, _position: usize) -> usize {
        key
    }
}

/// Explicit per-key streams of table keys, e.g. expanded LFSR keystreams.
#[derive(Debug, Clone)]
pub struct StreamSchedule {
    pub streams: Vec<Vec<usize>>,
}

impl KeySchedule for StreamSchedule {
    fn key_count(&self) -> usize {
        self.streams.len()
    }

    fn table_key(&self, key: usize, position: usize) -> usize {
        self.streams[key][position]
    }
}

/// Prior over plaintext sequences.
#[derive(Debug, Clone, PartialEq)]
pub enum SequencePrior {
    Uniform,
    /// Independent symbols with the given marginal.
    Iid(Vec<f64>),
    /// Explicit probability of every sequence, per length. Sequences are
    /// indexed with the first symbol most significant.
    Explicit(BTreeMap<usize, Vec<f64>>),
}

impl SequencePrior {
    fn check(&self, nx: usize) -> Result<()> {
        let check_dist = |p: &[f64]| -> Result<()> {
            if p.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(invalid("prior", "probabilities must be nonnegative"));
            }
            let s: f64 = p.iter().sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(invalid("prior", format!("probabilities sum to {s}")));
            }
            Ok(())
        };
        match self {
            SequencePrior::Uniform => Ok(()),
            SequencePrior::Iid(m) => {
                if m.len() != nx {
                    return Err(invalid("prior", "marginal length differs from |X|"));
                }
                check_dist(m)
            }
            SequencePrior::Explicit(tables) => {
                for (n, p) in tables {
                    if p.len() != nx.pow(*n as u32) {
                        return Err(invalid("prior", format!("table for n={n} has wrong size")));
                    }
                    check_dist(p)?;
                }
                Ok(())
            }
        }
    }

    fn probabilities(&self, nx: usize, n: usize) -> Result<Vec<f64>> {
        let count = nx.pow(n as u32);
        match self {
            SequencePrior::Uniform => Ok(vec![1.0 / count as f64; count]),
            SequencePrior::Iid(m) => Ok((0..count)
                .map(|idx| digits(idx, nx, n).map(|x| m[x]).product())
                .collect()),
            SequencePrior::Explicit(tables) => tables
                .get(&n)
                .cloned()
                .ok_or_else(|| invalid("prior", format!("no explicit table for n={n}"))),
        }
    }
}

/// Enumeration controls.
#[derive(Debug, Clone, Copy)]
pub struct EntropyOptions {
    pub budget: u64,
    pub zero_tolerance: f64,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            zero_tolerance: ZERO_TOLERANCE,
        }
    }
}

/// Entropies (bits) at one sequence length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyRow {
    pub n: usize,
    pub h_k_given_y: f64,
    pub h_k_given_xy: f64,
    pub h_x_given_y: f64,
    pub h_y_given_x: f64,
    pub h_k: f64,
    /// `H(X | K Y)`, zero for a decryptable cipher.
    pub h_x_given_ky: f64,
    /// Smallest `H(K | Y, X = x)` over plaintext sequences with `p(x) > 0`.
    pub min_h_k_given_y_at_x: f64,
}

/// Exact entropies for `n = 1..=n_max` and the distances derived from them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyProfile {
    pub n_max: usize,
    pub rows: Vec<EntropyRow>,
    /// Smallest n with `H(K|Y) = 0`.
    pub n0: Option<usize>,
    /// Smallest n with `H(K|XY) = 0`.
    pub n1: Option<usize>,
    /// Smallest n with `H(Y|X) = H(K)`.
    pub n_d: Option<usize>,
    /// Smallest n with `H(K|Y, X = x) = 0` for some `x`.
    pub n1_bar: Option<usize>,
}

fn digits(mut idx: usize, base: usize, n: usize) -> impl Iterator<Item = usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = idx % base;
        idx /= base;
    }
    out.into_iter()
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

fn entropy_of<'a>(probs: impl IntoIterator<Item = &'a f64>) -> f64 {
    -probs.into_iter().map(|&p| plogp(p)).sum::<f64>()
}

/// Distribution of `y_n` (encoded with the first symbol most significant)
/// for one plaintext sequence under one key, sorted by code.
fn output_distribution(
    table: &CipherTable,
    schedule: &dyn KeySchedule,
    key: usize,
    xs: &[usize],
) -> Vec<(u64, f64)> {
    let ny = table.ciphertexts().len() as u64;
    let mut dist: Vec<(u64, f64)> = vec![(0, 1.0)];
    for (i, &x) in xs.iter().enumerate() {
        let outs = table.outputs(x, schedule.table_key(key, i));
        let mut next = Vec::with_capacity(dist.len() * outs.len());
        for &(code, p) in &dist {
            for &(y, w) in outs {
                if w > 0.0 {
                    next.push((code * ny + y as u64, p * w));
                }
            }
        }
        dist = next;
    }
    dist.sort_by_key(|(c, _)| *c);
    dist.dedup_by(|b, a| {
        if a.0 == b.0 {
            a.1 += b.1;
            true
        } else {
            false
        }
    });
    dist
}

fn check_budget(
    n: usize,
    x_count: usize,
    key_count: usize,
    r_max: usize,
    budget: u64,
) -> Result<()> {
    let pow = |b: usize| (b as u64).checked_pow(n as u32);
    let product = pow(x_count)
        .and_then(|a| a.checked_mul(key_count as u64))
        .and_then(|a| pow(r_max).and_then(|b| a.checked_mul(b)));
    match product {
        Some(p) if p <= budget => Ok(()),
        _ => Err(Error::BudgetExceeded {
            n,
            x_count,
            key_count,
            r_max,
            budget,
        }),
    }
}

struct PlaintextTerms {
    p_x: f64,
    sum_kxy: f64,
    sum_xy: f64,
    h_k_given_y_at_x: f64,
}

/// Computes one row of the profile.
fn entropy_row(
    table: &CipherTable,
    schedule: &dyn KeySchedule,
    p_x: &[f64],
    key_prior: &[f64],
    n: usize,
) -> EntropyRow {
    let nx = table.plaintexts().len();
    let nk = schedule.key_count();
    let xs_of = |idx: usize| digits(idx, nx, n).collect::<Vec<_>>();

    // Plaintext-outer pass: H(KXY), H(XY) and per-x H(K|Y, X=x).
    let terms: Vec<PlaintextTerms> = (0..p_x.len())
        .into_par_iter()
        .map(|xi| {
            let px = p_x[xi];
            let xs = xs_of(xi);
            let mut mix: BTreeMap<u64, f64> = BTreeMap::new();
            let mut sum_kxy = 0.0;
            let mut sum_ky_at_x = 0.0;
            for k in 0..nk {
                let pk = key_prior[k];
                if pk == 0.0 {
                    continue;
                }
                for (code, p) in output_distribution(table, schedule, k, &xs) {
                    sum_kxy += plogp(px * pk * p);
                    sum_ky_at_x += plogp(pk * p);
                    *mix.entry(code).or_insert(0.0) += pk * p;
                }
            }
            let sum_xy = mix.values().map(|&q| plogp(px * q)).sum();
            let h_y_at_x = entropy_of(mix.values());
            PlaintextTerms {
                p_x: px,
                sum_kxy,
                sum_xy,
                h_k_given_y_at_x: -sum_ky_at_x - h_y_at_x,
            }
        })
        .collect();

    let h_kxy = -terms.iter().map(|t| t.sum_kxy).sum::<f64>();
    let h_xy = -terms.iter().map(|t| t.sum_xy).sum::<f64>();
    let min_at_x = terms
        .iter()
        .filter(|t| t.p_x > 0.0)
        .map(|t| t.h_k_given_y_at_x.max(0.0))
        .fold(f64::INFINITY, f64::min);

    // Key-outer pass: H(KY) and the ciphertext marginal H(Y). Keys are
    // processed in chunks to bound memory; merging follows key order.
    let chunk = rayon::current_num_threads().max(1) * 2;
    let mut p_y: BTreeMap<u64, f64> = BTreeMap::new();
    let mut h_ky = 0.0;
    let keys: Vec<usize> = (0..nk).collect();
    for group in keys.chunks(chunk) {
        let per_key: Vec<(f64, BTreeMap<u64, f64>)> = group
            .par_iter()
            .map(|&k| {
                let pk = key_prior[k];
                let mut given_k: BTreeMap<u64, f64> = BTreeMap::new();
                if pk > 0.0 {
                    for (xi, &px) in p_x.iter().enumerate() {
                        if px == 0.0 {
                            continue;
                        }
                        for (code, p) in output_distribution(table, schedule, k, &xs_of(xi)) {
                            *given_k.entry(code).or_insert(0.0) += px * p;
                        }
                    }
                }
                let sum = given_k.values().map(|&q| plogp(pk * q)).sum::<f64>();
                (sum, given_k)
            })
            .collect();
        for (&k, (sum, given_k)) in group.iter().zip(per_key) {
            h_ky -= sum;
            let pk = key_prior[k];
            for (code, q) in given_k {
                *p_y.entry(code).or_insert(0.0) += pk * q;
            }
        }
    }
    let h_y = entropy_of(p_y.values());
    let h_x = entropy_of(p_x.iter());
    let h_k = entropy_of(key_prior.iter());

    EntropyRow {
        n,
        h_k_given_y: (h_ky - h_y).max(0.0),
        h_k_given_xy: (h_kxy - h_xy).max(0.0),
        h_x_given_y: (h_xy - h_y).max(0.0),
        h_y_given_x: (h_xy - h_x).max(0.0),
        h_k,
        h_x_given_ky: (h_kxy - h_ky).max(0.0),
        min_h_k_given_y_at_x: min_at_x,
    }
}

/// Exact entropy profile of `table` under `schedule` for `n = 1..=n_max`.
///
/// `key_prior` defaults to uniform when `None`.
pub fn entropy_profile_scheduled(
    table: &CipherTable,
    schedule: &dyn KeySchedule,
    prior: &SequencePrior,
    key_prior: Option<&[f64]>,
    n_max: usize,
    options: EntropyOptions,
) -> Result<EntropyProfile> {
    table.validate()?;
    let nx = table.plaintexts().len();
    let nk = schedule.key_count();
    prior.check(nx)?;
    if n_max == 0 {
        return Err(invalid("n_max", "must be at least 1"));
    }
    let key_prior: Vec<f64> = match key_prior {
        Some(p) => {
            if p.len() != nk {
                return Err(invalid("key_prior", "length differs from key count"));
            }
            SequencePrior::Iid(p.to_vec()).check(nk)?;
            p.to_vec()
        }
        None => vec![1.0 / nk as f64; nk],
    };
    for n in 1..=n_max {
        check_budget(n, nx, nk, table.max_randomizer(), options.budget)?;
    }

    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let p_x = prior.probabilities(nx, n)?;
        rows.push(entropy_row(table, schedule, &p_x, &key_prior, n));
    }

    let tol = options.zero_tolerance;
    let first = |pred: &dyn Fn(&EntropyRow) -> bool| rows.iter().find(|r| pred(r)).map(|r| r.n);
    Ok(EntropyProfile {
        n_max,
        n0: first(&|r| r.h_k_given_y < tol),
        n1: first(&|r| r.h_k_given_xy < tol),
        n_d: first(&|r| (r.h_y_given_x - r.h_k).abs() < tol),
        n1_bar: first(&|r| r.min_h_k_given_y_at_x < tol),
        rows,
    })
}

/// Exact entropy profile of a plain table (the key is fixed across symbols).
pub fn entropy_profile(
    table: &CipherTable,
    prior: &SequencePrior,
    key_prior: Option<&[f64]>,
    n_max: usize,
    options: EntropyOptions,
) -> Result<EntropyProfile> {
    let schedule = FixedKey {
        keys: table.keys().len(),
    };
    entropy_profile_scheduled(table, &schedule, prior, key_prior, n_max, options)
}

/// Checks `H(X_n|Y_n) <= H(K)` at every n and returns the smallest slack.
pub fn shannon_limit_check(profile: &EntropyProfile) -> Result<f64> {
    let mut slack = f64::INFINITY;
    for row in &profile.rows {
        let s = row.h_k - row.h_x_given_y;
        if s < -ZERO_TOLERANCE {
            return Err(Error::ShannonLimitViolated {
                n: row.n,
                h_x_given_y: row.h_x_given_y,
                h_k: row.h_k,
            });
        }
        slack = slack.min(s);
    }
    Ok(slack)
}
