//! Helstrom error of an individual attack on one qumode.
//!
//! Without the key, bit `b` is the uniform mixture over all bases of the
//! coherent states the mapper assigns to `b`. The states are expanded in a
//! truncated number basis and the trace distance is obtained from the
//! eigenvalues of `ρ⁰ − ρ¹`.

use log::debug;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::measurement::fock_cutoff;
use crate::signal::{mapper_steps, steps_to_radians};

/// Largest allowed change of the error when the cutoff grows by half.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-4;

fn coherent_ket(amps: &[f64], theta: f64) -> Vec<Complex64> {
    amps.iter()
        .enumerate()
        .map(|(n, &a)| Complex64::from_polar(a, n as f64 * theta))
        .collect()
}

/// Density operator of bit `bit`: the uniform mixture over the `M` bases,
/// each state rotated by `rotation`.
pub fn bit_density(s: f64, m_bases: usize, bit: u8, cutoff: usize, rotation: f64) -> Result<DMatrix<Complex64>> {
    let amps = crate::measurement::coherent_amplitudes(s, cutoff);
    let dim = cutoff + 1;
    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    for z in 0..m_bases {
        let theta = steps_to_radians(mapper_steps(bit, z, m_bases)?, m_bases) + rotation;
        let ket = coherent_ket(&amps, theta);
        for r in 0..dim {
            for c in 0..dim {
                rho[(r, c)] += ket[r] * ket[c].conj();
            }
        }
    }
    let trace: f64 = (0..dim).map(|i| rho[(i, i)].re).sum();
    debug!("truncation at cutoff {cutoff} keeps mass {}", trace / m_bases as f64);
    Ok(rho / Complex64::new(trace, 0.0))
}

/// `‖A‖₁` for a Hermitian matrix.
pub fn trace_norm(a: DMatrix<Complex64>) -> f64 {
    SymmetricEigen::new(a).eigenvalues.iter().map(|v| v.abs()).sum()
}

/// Helstrom error for the two bit mixtures at a fixed cutoff.
pub fn mixture_error(s: f64, m_bases: usize, cutoff: usize, rotation: f64) -> Result<f64> {
    let rho0 = bit_density(s, m_bases, 0, cutoff, rotation)?;
    let rho1 = bit_density(s, m_bases, 1, cutoff, rotation)?;
    Ok((0.5 - 0.25 * trace_norm(rho0 - rho1)).clamp(0.0, 0.5))
}

/// Eve's minimum error probability for one bit without the key.
///
/// `cutoff` must be at least `S + 10√S + 20`; the result is rejected when
/// a cutoff 1.5 times larger moves it by more than
/// [`CONVERGENCE_TOLERANCE`].
pub fn individual_attack_error(s: f64, m_bases: usize, cutoff: usize) -> Result<f64> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(invalid("S", "must be finite and nonnegative"));
    }
    let needed = fock_cutoff(s);
    if cutoff < needed {
        return Err(invalid("n_cutoff", format!("{cutoff} is below S + 10√S + 20 = {needed}")));
    }
    let value = mixture_error(s, m_bases, cutoff, 0.0)?;
    let wider = (cutoff * 3).div_ceil(2);
    let wider_value = mixture_error(s, m_bases, wider, 0.0)?;
    if (value - wider_value).abs() > CONVERGENCE_TOLERANCE {
        return Err(Error::NotConverged {
            cutoff,
            value,
            wider,
            wider_value,
        });
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::helstrom_error;

    #[test]
    fn single_basis_is_two_state_helstrom() {
        for s in [0.1, 0.5, 1.0, 2.0] {
            let p = individual_attack_error(s, 1, fock_cutoff(s)).unwrap();
            assert!((p - helstrom_error(s)).abs() < 1e-9, "S={s}: {p}");
        }
    }

    #[test]
    fn pure_state_trace_distance_matches_overlap() {
        let s = 0.7;
        let cutoff = fock_cutoff(s);
        let a = bit_density(s, 1, 0, cutoff, 0.0).unwrap();
        let b = bit_density(s, 1, 1, cutoff, 0.0).unwrap();
        let half_norm = 0.5 * trace_norm(a - b);
        // |⟨α|β⟩|² = exp(−2S(1 − cos Δθ)) with Δθ = π
        let overlap_sq = (-4.0f64 * s).exp();
        assert!((half_norm - (1.0 - overlap_sq).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn vacuum_is_indistinguishable() {
        assert!((individual_attack_error(0.0, 4, 20).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn cutoff_must_cover_the_state() {
        assert!(individual_attack_error(4.0, 4, 10).is_err());
    }

    #[test]
    fn invariant_under_global_rotation() {
        let cutoff = fock_cutoff(2.0);
        let a = mixture_error(2.0, 4, cutoff, 0.0).unwrap();
        let b = mixture_error(2.0, 4, cutoff, 0.731).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn more_bases_hide_the_bit() {
        let s = 4.0;
        let cutoff = fock_cutoff(s);
        let mut last = 0.0;
        for m in [2, 4, 8, 16, 32, 64] {
            let p = individual_attack_error(s, m, cutoff).unwrap();
            assert!(p + 1e-12 >= last, "M={m}: {p} < {last}");
            last = p;
        }
        assert!(last >= 0.45, "{last}");
    }
}
