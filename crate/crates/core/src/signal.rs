//! The αη mapper, sequence encryption and line attenuation.
//!
//! Phases are kept as integer steps `s` in `[0, 2M)`, meaning `θ = s·π/M`,
//! and only turned into radians when a measurement needs them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Physical parameters of one αη link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaEtaParams {
    /// Mean photon number at the transmitter, `|α|²`.
    pub s: f64,
    /// Number of bases (a power of two, at least 2).
    pub m_bases: usize,
    /// Line transmittance.
    pub eta: f64,
}

impl AlphaEtaParams {
    pub fn new(s: f64, m_bases: usize, eta: f64) -> Result<Self> {
        let p = Self { s, m_bases, eta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s.is_finite() && self.s > 0.0) {
            return Err(invalid("S", "must be positive and finite"));
        }
        if self.m_bases < 2 || !self.m_bases.is_power_of_two() {
            return Err(invalid("M", "must be a power of two, at least 2"));
        }
        check_eta(self.eta)
    }

    /// Bits per keystream symbol, `log2 M`.
    pub fn symbol_bits(&self) -> usize {
        self.m_bases.trailing_zeros() as usize
    }

    /// Energy at the receiver, `ηS`.
    pub fn received_energy(&self) -> f64 {
        self.eta * self.s
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta <= 1.0 {
        Ok(())
    } else {
        Err(invalid("eta", format!("{eta} is outside (0, 1]")))
    }
}

/// Transmittance of a line with the given loss.
pub fn transmittance_from_db(db_per_km: f64, km: f64) -> f64 {
    10f64.powf(-db_per_km * km / 10.0)
}

/// One transmitted symbol with its ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QumodeRecord {
    pub index: usize,
    pub x: u8,
    pub z: usize,
    /// `θ / (π/M)`, in `[0, 2M)`.
    pub theta_steps: usize,
    pub m_bases: usize,
    /// Mean photon number of the state.
    pub energy: f64,
}

impl QumodeRecord {
    pub fn theta(&self) -> f64 {
        steps_to_radians(self.theta_steps, self.m_bases)
    }
}

pub fn steps_to_radians(steps: usize, m_bases: usize) -> f64 {
    steps as f64 * PI / m_bases as f64
}

fn check_symbol(x: u8, z: usize, m_bases: usize) -> Result<()> {
    if m_bases == 0 || !m_bases.is_power_of_two() {
        return Err(invalid("M", "must be a power of two"));
    }
    if x > 1 {
        return Err(invalid("x", format!("data bit {x} is not 0 or 1")));
    }
    if z >= m_bases {
        return Err(Error::SymbolOutOfRange { z, m: m_bases });
    }
    Ok(())
}

/// Assignment of a circle position to each (bit, basis) pair.
pub trait PhaseAssignment: Sync {
    /// Phase step in `[0, 2M)` of bit `x` in basis `z`.
    fn steps(&self, x: u8, z: usize, m_bases: usize) -> Result<usize>;
}

/// `θ(x, z) = [z/M + (x ⊕ Pol(z))]·π` with `Pol(z) = z mod 2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct StandardMapper;

impl PhaseAssignment for StandardMapper {
    fn steps(&self, x: u8, z: usize, m_bases: usize) -> Result<usize> {
        mapper_steps(x, z, m_bases)
    }
}

/// Mapper output in steps of `π/M`. `M = 1` is accepted and gives the
/// plain antipodal pair.
pub fn mapper_steps(x: u8, z: usize, m_bases: usize) -> Result<usize> {
    check_symbol(x, z, m_bases)?;
    let pol = (z & 1) as u8;
    Ok(z + m_bases * (x ^ pol) as usize)
}

/// Mapper output in radians.
pub fn mapper(x: u8, z: usize, m_bases: usize) -> Result<f64> {
    Ok(steps_to_radians(mapper_steps(x, z, m_bases)?, m_bases))
}

/// Inverse of the mapper: the bit and basis carried by step `s`.
pub fn step_owner(s: usize, m_bases: usize) -> (u8, usize) {
    let z = s % m_bases;
    let x = ((s / m_bases) as u8 & 1) ^ (z & 1) as u8;
    (x, z)
}

/// Encrypts `x` under keystream `z` with the standard mapper.
pub fn encrypt_sequence(x: &[u8], z: &[usize], params: &AlphaEtaParams) -> Result<Vec<QumodeRecord>> {
    encrypt_with(&StandardMapper, x, z, params)
}

/// Encrypts with an arbitrary phase assignment.
pub fn encrypt_with(
    assignment: &dyn PhaseAssignment,
    x: &[u8],
    z: &[usize],
    params: &AlphaEtaParams,
) -> Result<Vec<QumodeRecord>> {
    params.validate()?;
    if x.len() != z.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: z.len(),
        });
    }
    x.iter()
        .zip(z)
        .enumerate()
        .map(|(index, (&xi, &zi))| {
            Ok(QumodeRecord {
                index,
                x: xi,
                z: zi,
                theta_steps: assignment.steps(xi, zi, params.m_bases)?,
                m_bases: params.m_bases,
                energy: params.s,
            })
        })
        .collect()
}

/// Attenuates a record by the line transmittance; the phase is untouched.
pub fn apply_channel(record: &QumodeRecord, eta: f64) -> Result<QumodeRecord> {
    check_eta(eta)?;
    Ok(QumodeRecord {
        energy: record.energy * eta,
        ..*record
    })
}
