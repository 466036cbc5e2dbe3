use alphaeta::attacks::nishioka_reduction_demo;
use anyhow::Result;

use crate::config::NishiokaConfig;
use crate::output::OutputDir;
use crate::task_seed;

pub(super) fn run(config: &NishiokaConfig, seed: u64, out: &mut OutputDir) -> Result<()> {
    let report = nishioka_reduction_demo(
        config.s,
        config.m_bases,
        config.trials,
        task_seed(seed, "nishioka", 0),
    )?;
    println!(
        "key-assisted decoding: {} failures in {} trials (rate {:.3e}, ½e^(−S) = {:.3e})",
        report.failures, report.trials, report.failure_rate, report.analytic
    );
    match &report.counterexample {
        Some(c) => println!(
            "non-reduction witness at M = {}: wedges {} and {} share the half-circle bit {} under z = {} but decode to {} and {}",
            config.m_bases, c.j, c.j_prime, c.l, c.z, c.f_j, c.f_j_prime
        ),
        None => println!("no non-reduction witness at M = {}", config.m_bases),
    }
    out.write_json("nishioka.json", &report)
}
