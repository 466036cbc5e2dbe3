use alphaeta::attacks::{
    empirical_gamma_lambda, eve_halfcircle_error, halfcircle_reference, individual_attack_error, kpa_self_test,
    EmpiricalRandomization, SelfTestConfig, SelfTestReport,
};
use alphaeta::measurement::fock_cutoff;
use anyhow::Result;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{AttackConfig, AttackKind};
use crate::output::OutputDir;
use crate::task_seed;

#[derive(Debug, Serialize)]
struct HalfcircleRow {
    s: f64,
    trials: u64,
    errors: u64,
    rate: f64,
    reference: f64,
    sigma: f64,
    relative_deviation: f64,
}

#[derive(Debug, Serialize)]
struct IndividualRow {
    s: f64,
    m_bases: usize,
    cutoff: usize,
    error: f64,
}

#[derive(Debug, Default, Serialize)]
struct AttackReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    kpa: Option<KpaSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    halfcircle: Option<Vec<HalfcircleRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    individual: Option<Vec<IndividualRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    randomization: Option<EmpiricalRandomization>,
}

#[derive(Debug, Serialize)]
struct KpaSection {
    settings: SelfTestConfig,
    report: SelfTestReport,
}

pub(super) fn run(config: &AttackConfig, seed: u64, out: &mut OutputDir) -> Result<()> {
    let mut report = AttackReport::default();
    for kind in &config.run {
        match kind {
            AttackKind::Kpa => {
                let k = &config.kpa;
                let settings = SelfTestConfig {
                    key_bits: k.key_bits,
                    taps: k.resolved_taps(),
                    m_bases: k.m_bases,
                    energy: k.energy,
                    window: k.window,
                    symbols: k.resolved_symbols(),
                    trials: k.trials,
                    recall_threshold: k.recall_threshold,
                };
                let r = kpa_self_test(&settings, task_seed(seed, "attack-kpa", 0))?;
                println!(
                    "kpa: recovered {}/{} seeds, mean work {:.1} solves",
                    r.recovered, r.trials, r.mean_work
                );
                report.kpa = Some(KpaSection { settings, report: r });
            }
            AttackKind::Halfcircle => {
                let h = &config.halfcircle;
                let rows = h
                    .s
                    .iter()
                    .enumerate()
                    .map(|(i, &s)| {
                        let e = eve_halfcircle_error(s, h.trials, task_seed(seed, "attack-halfcircle", i as u64))?;
                        let reference = halfcircle_reference(s);
                        Ok(HalfcircleRow {
                            s,
                            trials: e.trials,
                            errors: e.errors,
                            rate: e.rate(),
                            reference,
                            sigma: e.sigma_at(e.rate()),
                            relative_deviation: e.rate() / reference - 1.0,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                out.write_csv("halfcircle.csv", &rows)?;
                report.halfcircle = Some(rows);
            }
            AttackKind::Individual => {
                let c = &config.individual;
                let cutoff = c.cutoff.unwrap_or_else(|| fock_cutoff(c.s));
                let rows = c
                    .m_bases
                    .par_iter()
                    .map(|&m| {
                        Ok(IndividualRow {
                            s: c.s,
                            m_bases: m,
                            cutoff,
                            error: individual_attack_error(c.s, m, cutoff)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                out.write_csv("individual.csv", &rows)?;
                report.individual = Some(rows);
            }
            AttackKind::Randomization => {
                let r = &config.randomization;
                let e = empirical_gamma_lambda(
                    r.s,
                    r.m_bases,
                    r.trials_per_cell,
                    r.epsilon,
                    task_seed(seed, "attack-randomization", 0),
                )?;
                println!("randomization: Γ = {}, Λ = {}", e.gamma, e.lambda);
                report.randomization = Some(e);
            }
        }
    }
    out.write_json("attack.json", &report)
}
