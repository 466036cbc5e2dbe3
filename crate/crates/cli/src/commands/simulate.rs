use alphaeta::attacks::{eve_halfcircle_error, halfcircle_reference};
use alphaeta::measurement::{
    bob_error_reference, heterodyne_sample, phase_sample, simulate_bob, wedge_of_phase, BobModel, PhaseModel,
    EXACT_ENERGY_LIMIT,
};
use alphaeta::rng::substream;
use alphaeta::signal::{apply_channel, encrypt_sequence, AlphaEtaParams};
use anyhow::Result;
use log::warn;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::SimulateConfig;
use crate::output::OutputDir;
use crate::task_seed;

#[derive(Debug, Serialize)]
struct SweepRow {
    s: f64,
    m_bases: usize,
    eta: f64,
    received_energy: f64,
    bob_model: BobModel,
    trials: u64,
    bob_errors: u64,
    bob_ber: f64,
    bob_reference: f64,
    bob_sigma: f64,
    eve_trials: Option<u64>,
    eve_errors: Option<u64>,
    eve_ber: Option<f64>,
    eve_reference: Option<f64>,
}

#[derive(Debug, Serialize)]
struct QumodeRow {
    i: usize,
    x: u8,
    z: usize,
    theta_steps: usize,
    energy: f64,
}

#[derive(Debug, Serialize)]
struct MeasurementRow {
    i: usize,
    model: &'static str,
    q1: Option<f64>,
    q2: Option<f64>,
    theta_meas: f64,
    wedge_j: usize,
}

pub(super) fn run(config: &SimulateConfig, seed: u64, out: &mut OutputDir) -> Result<()> {
    let mut grid = Vec::new();
    for &s in &config.s {
        for &m in &config.m_bases {
            for &eta in &config.eta {
                grid.push((s, m, eta));
            }
        }
    }
    let rows = grid
        .par_iter()
        .enumerate()
        .map(|(i, &(s, m, eta))| sweep_point(config, seed, i as u64, s, m, eta))
        .collect::<Result<Vec<_>>>()?;
    out.write_csv("simulate.csv", &rows)?;

    if config.dump_symbols > 0 {
        let (s, m, eta) = grid[0];
        dump(config.dump_symbols, seed, s, m, eta, out)?;
    }
    Ok(())
}

fn sweep_point(config: &SimulateConfig, seed: u64, index: u64, s: f64, m: usize, eta: f64) -> Result<SweepRow> {
    let params = AlphaEtaParams::new(s, m, eta)?;
    let received = params.received_energy();
    let bob = simulate_bob(
        received,
        m,
        config.trials,
        config.bob_model,
        task_seed(seed, "simulate-bob", index),
    )?;
    let reference = bob_error_reference(received, config.bob_model);
    let mut row = SweepRow {
        s,
        m_bases: m,
        eta,
        received_energy: received,
        bob_model: config.bob_model,
        trials: config.trials,
        bob_errors: bob.errors,
        bob_ber: bob.rate(),
        bob_reference: reference,
        bob_sigma: bob.sigma_at(reference),
        eve_trials: None,
        eve_errors: None,
        eve_ber: None,
        eve_reference: None,
    };
    if config.eve {
        match eve_halfcircle_error(s, config.eve_trials, task_seed(seed, "simulate-eve", index)) {
            Ok(eve) => {
                row.eve_trials = Some(eve.trials);
                row.eve_errors = Some(eve.errors);
                row.eve_ber = Some(eve.rate());
                row.eve_reference = Some(halfcircle_reference(s).min(0.5));
            }
            Err(e) => warn!("skipping Eve at S={s}: {e}"),
        }
    }
    Ok(row)
}

fn dump(n: usize, seed: u64, s: f64, m: usize, eta: f64, out: &mut OutputDir) -> Result<()> {
    let params = AlphaEtaParams::new(s, m, eta)?;
    let mut rng = substream(seed, "dump-symbols", 0);
    let x: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
    let z: Vec<usize> = (0..n).map(|_| rng.random_range(0..m)).collect();
    let records = encrypt_sequence(&x, &z, &params)?
        .iter()
        .map(|r| apply_channel(r, eta))
        .collect::<alphaeta::Result<Vec<_>>>()?;
    let qumodes: Vec<QumodeRow> = records
        .iter()
        .map(|r| QumodeRow {
            i: r.index,
            x: r.x,
            z: r.z,
            theta_steps: r.theta_steps,
            energy: r.energy,
        })
        .collect();
    out.write_csv("qumodes.csv", &qumodes)?;

    let phase_model = if params.received_energy() <= EXACT_ENERGY_LIMIT {
        PhaseModel::Exact
    } else {
        PhaseModel::Lorentzian
    };
    let density = match phase_model {
        PhaseModel::Exact => Some(alphaeta::measurement::PhaseDensity::new(params.received_energy())?),
        PhaseModel::Lorentzian => None,
    };
    let mut het_rng = substream(seed, "dump-heterodyne", 0);
    let mut phase_rng = substream(seed, "dump-phase", 0);
    let mut rows = Vec::with_capacity(2 * n);
    for r in &records {
        let p = heterodyne_sample(r, &mut het_rng);
        // a point at the origin has no phase; report it as phase 0
        let theta = p.phase().unwrap_or(0.0);
        rows.push(MeasurementRow {
            i: r.index,
            model: "heterodyne",
            q1: Some(p.q1),
            q2: Some(p.q2),
            theta_meas: theta,
            wedge_j: wedge_of_phase(theta, m),
        });
        let phi = match &density {
            Some(d) => d.sample(r.theta(), &mut phase_rng),
            None => phase_sample(r, phase_model, &mut phase_rng)?,
        };
        rows.push(MeasurementRow {
            i: r.index,
            model: match phase_model {
                PhaseModel::Exact => "phase-exact",
                PhaseModel::Lorentzian => "phase-lorentzian",
            },
            q1: None,
            q2: None,
            theta_meas: phi,
            wedge_j: wedge_of_phase(phi, m),
        });
    }
    out.write_csv("measurements.csv", &rows)
}
