//! Closed-form estimates: wedge counts, unicity distances, search
//! complexity and error probabilities.

use std::f64::consts::{E, PI};

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::measurement::helstrom_error;

/// The standard acceptable bit error rate floor.
pub const BER_FLOOR: f64 = 1e-9;

/// Noise-covered wedge counts for heterodyne and phase measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WedgeCounts {
    /// `M/(π√S)`: same-bit signal points within one noise width.
    pub n_het: f64,
    pub n_phase: f64,
    /// Γ for heterodyne in the approximate form `Γ_het ≅ M/(π√S)`.
    pub gamma_het: f64,
    /// `max(N_het − 1, 0)`.
    pub gamma_het_strict: f64,
    pub gamma_phase: f64,
    /// Set when `N_het < 1`: noise covers no other basis.
    pub no_randomization: bool,
}

impl WedgeCounts {
    /// Γ_het rounded to the nearest integer, the value used in the bounds.
    pub fn gamma_rounded(&self) -> f64 {
        self.gamma_het.round()
    }
}

pub fn wedge_counts(s: f64, m_bases: usize) -> Result<WedgeCounts> {
    if !(s.is_finite() && s > 0.0) {
        return Err(invalid("S", "must be positive"));
    }
    if m_bases < 2 {
        return Err(invalid("M", "must be at least 2"));
    }
    let n_het = m_bases as f64 / (PI * s.sqrt());
    let no_randomization = n_het < 1.0;
    let gamma_het = if no_randomization { 0.0 } else { n_het };
    Ok(WedgeCounts {
        n_het,
        n_phase: n_het / 2.0,
        gamma_het,
        gamma_het_strict: (n_het - 1.0).max(0.0),
        gamma_phase: gamma_het / 2.0,
        no_randomization,
    })
}

/// A lower bound on a sequence length, possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LengthBound {
    /// Unrounded value, `f64::INFINITY` when unbounded.
    pub value: f64,
    /// Smallest integer not below `value`, or `None` when infinite.
    pub rounded: Option<u64>,
}

impl LengthBound {
    fn from_ratio(num: f64, den: f64) -> Self {
        if den <= 0.0 {
            return Self {
                value: f64::INFINITY,
                rounded: None,
            };
        }
        let value = num / den;
        Self {
            value,
            rounded: Some(value.ceil() as u64),
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.rounded.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnicityBounds {
    /// Ciphertext-only attack.
    pub n0: LengthBound,
    /// Known-plaintext attack.
    pub n1: LengthBound,
}

/// `n0 ≥ |K|/log2(M/(Λ+1))` and `n1 ≥ |K|/log2(M/(Γ+1))`.
pub fn unicity_bounds(key_bits: f64, m_bases: usize, gamma: f64, lambda: f64) -> Result<UnicityBounds> {
    if gamma < 0.0 || lambda < 0.0 {
        return Err(invalid("gamma/lambda", "must be nonnegative"));
    }
    let m = m_bases as f64;
    Ok(UnicityBounds {
        n0: LengthBound::from_ratio(key_bits, (m / (lambda + 1.0)).log2()),
        n1: LengthBound::from_ratio(key_bits, (m / (gamma + 1.0)).log2()),
    })
}

/// `n ≥ |K|/C` from the converse of the coding theorem.
pub fn capacity_unicity(key_bits: f64, capacity: f64) -> LengthBound {
    LengthBound::from_ratio(key_bits, capacity)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Complexity {
    /// `log2 𝒞 = (|K|/m)·log2 Γ`.
    pub log2: f64,
    /// Set when `Γ < 1`, where the search is trivial.
    pub trivial: bool,
}

pub fn search_complexity(gamma: f64, key_bits: f64, m: usize) -> Result<Complexity> {
    if m == 0 {
        return Err(invalid("m", "must be positive"));
    }
    if gamma < 1.0 {
        return Ok(Complexity {
            log2: 0.0,
            trivial: true,
        });
    }
    Ok(Complexity {
        log2: key_bits / m as f64 * gamma.log2(),
        trivial: false,
    })
}

/// Error probabilities, each also given as a base-10 logarithm so values
/// far below `f64` range stay usable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorFormulas {
    pub p_e_bob_helstrom: f64,
    pub p_e_bob_approx: f64,
    pub log10_p_e_bob_approx: f64,
    pub lambda_het: f64,
    pub log10_lambda_het: f64,
    pub lambda_phase: f64,
    pub log10_lambda_phase: f64,
    /// `2/(π√S)`, capped at ½.
    pub p_b_eve: f64,
    /// Whether Bob's approximate error is below [`BER_FLOOR`].
    pub bob_below_floor: bool,
}

/// Error formulas at transmitted energy `s` and received energy `received`.
pub fn error_formulas(s: f64, received: f64) -> Result<ErrorFormulas> {
    if !(s >= 0.0 && received >= 0.0) {
        return Err(invalid("energy", "must be nonnegative"));
    }
    let log10_e = E.log10();
    let log10_p_e_bob_approx = 0.25f64.log10() - 4.0 * received * log10_e;
    Ok(ErrorFormulas {
        p_e_bob_helstrom: helstrom_error(received),
        p_e_bob_approx: 0.25 * (-4.0 * received).exp(),
        log10_p_e_bob_approx,
        lambda_het: 0.5 * (-s).exp(),
        log10_lambda_het: 0.5f64.log10() - s * log10_e,
        lambda_phase: 0.5 * (-2.0 * s).exp(),
        log10_lambda_phase: 0.5f64.log10() - 2.0 * s * log10_e,
        p_b_eve: (2.0 / (PI * s.sqrt())).min(0.5),
        bob_below_floor: log10_p_e_bob_approx < BER_FLOOR.log10(),
    })
}

/// All closed forms for one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub key_bits: f64,
    pub m_bases: usize,
    pub s: f64,
    pub eta: f64,
    pub wedges: WedgeCounts,
    /// Γ and Λ fed to the bounds.
    pub gamma: f64,
    pub lambda: f64,
    pub unicity: UnicityBounds,
    pub complexity: Complexity,
    pub errors: ErrorFormulas,
    /// `|K|/C` with `C = log2(M/(Γ+1))`.
    pub capacity_bound: LengthBound,
}

/// Evaluates every closed form, using Γ = round(Γ_het) and Λ = 2Γ+1 unless
/// overridden.
pub fn bounds_report(
    key_bits: f64,
    m_bases: usize,
    s: f64,
    eta: f64,
    gamma_override: Option<f64>,
    lambda_override: Option<f64>,
) -> Result<BoundsReport> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(invalid("eta", "must lie in (0, 1]"));
    }
    if !m_bases.is_power_of_two() {
        return Err(invalid("M", "must be a power of two"));
    }
    let wedges = wedge_counts(s, m_bases)?;
    let gamma = gamma_override.unwrap_or_else(|| wedges.gamma_rounded());
    let lambda = lambda_override.unwrap_or(2.0 * gamma + 1.0);
    let m = m_bases.trailing_zeros() as usize;
    Ok(BoundsReport {
        key_bits,
        m_bases,
        s,
        eta,
        wedges,
        gamma,
        lambda,
        unicity: unicity_bounds(key_bits, m_bases, gamma, lambda)?,
        complexity: search_complexity(gamma, key_bits, m)?,
        errors: error_formulas(s, eta * s)?,
        capacity_bound: capacity_unicity(key_bits, (m_bases as f64 / (gamma + 1.0)).log2()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wedge_count_examples() {
        let w = wedge_counts(4e4, 2048).unwrap();
        assert!((w.gamma_het - 3.2595).abs() < 1e-3, "{}", w.gamma_het);
        assert_eq!(w.gamma_rounded(), 3.0);
        assert!((w.gamma_het_strict - 2.2595).abs() < 1e-3);
        assert_eq!(w.gamma_het, 2.0 * w.gamma_phase);
        let w = wedge_counts(100.0, 200).unwrap();
        assert!((w.n_het - 6.3662).abs() < 1e-4);
        let w = wedge_counts(1e6, 16).unwrap();
        assert!(w.no_randomization);
        assert_eq!(w.gamma_het, 0.0);
    }

    #[test]
    fn unicity_examples() {
        let u = unicity_bounds(4400.0, 2048, 3.0, 7.0).unwrap();
        assert_eq!(u.n0.rounded, Some(550));
        assert_eq!(u.n1.rounded, Some(489));
        let u = unicity_bounds(4400.0, 2048, 0.0, 0.0).unwrap();
        assert_eq!(u.n0.value, 400.0);
        assert_eq!(u.n1.value, 400.0);
        let u = unicity_bounds(4400.0, 2048, 2047.0, 7.0).unwrap();
        assert!(u.n1.is_infinite());
    }

    #[test]
    fn complexity_examples() {
        let c = search_complexity(3.0, 4400.0, 11).unwrap();
        assert!((c.log2 - 633.985).abs() < 1e-3);
        assert_eq!(search_complexity(1.0, 4400.0, 11).unwrap().log2, 0.0);
        assert_eq!(search_complexity(2.0, 16.0, 4).unwrap().log2, 4.0);
        assert!(search_complexity(0.5, 16.0, 4).unwrap().trivial);
    }

    #[test]
    fn error_examples() {
        let e = error_formulas(4e4, 1e3).unwrap();
        assert_eq!(e.p_e_bob_approx, 0.0);
        assert!(e.bob_below_floor);
        assert!((e.log10_p_e_bob_approx + 1737.78).abs() < 0.01);
        let e = error_formulas(100.0, 100.0).unwrap();
        assert!((e.lambda_het / 1.860e-44 - 1.0).abs() < 1e-3, "{}", e.lambda_het);
        assert_eq!(error_formulas(1.0, 0.0).unwrap().p_e_bob_helstrom, 0.5);
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(capacity_unicity(4400.0, 9.0).rounded, Some(489));
        assert_eq!(capacity_unicity(4400.0, 11.0).value, 400.0);
        assert!(capacity_unicity(4400.0, 0.0).is_infinite());
    }

    #[test]
    fn full_report() {
        let r = bounds_report(4400.0, 2048, 4e4, 1.0, None, None).unwrap();
        assert_eq!((r.gamma, r.lambda), (3.0, 7.0));
        assert_eq!(r.unicity.n0.rounded, Some(550));
        assert_eq!(r.capacity_bound.rounded, r.unicity.n1.rounded);
    }

    proptest! {
        #[test]
        fn kpa_bound_is_tighter(gamma in 1u32..100, log_m in 9u32..16, key in 10.0f64..1e5) {
            let m = 1usize << log_m;
            let g = gamma as f64;
            prop_assume!(2.0 * g + 2.0 < m as f64);
            let u = unicity_bounds(key, m, g, 2.0 * g + 1.0).unwrap();
            prop_assert!(u.n0.value > u.n1.value);
        }

        #[test]
        fn errors_decrease_with_energy(s in 0.0f64..50.0, ds in 0.001f64..10.0) {
            let a = error_formulas(s, s).unwrap();
            let b = error_formulas(s + ds, s + ds).unwrap();
            prop_assert!(b.p_e_bob_helstrom <= a.p_e_bob_helstrom);
            prop_assert!(b.p_e_bob_approx <= a.p_e_bob_approx);
            prop_assert!(b.lambda_het <= a.lambda_het);
            prop_assert!(b.lambda_phase <= a.lambda_phase);
            prop_assert!(b.p_b_eve <= a.p_b_eve);
        }

        #[test]
        fn complexity_is_additive_in_key_length(g in 1.0f64..100.0, a in 1.0f64..1e4, b in 1.0f64..1e4) {
            let c = |k| search_complexity(g, k, 11).unwrap().log2;
            prop_assert!((c(a + b) - c(a) - c(b)).abs() < 1e-9 * c(a + b).max(1.0));
        }
    }
}
