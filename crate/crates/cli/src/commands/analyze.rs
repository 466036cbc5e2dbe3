use alphaeta::cipher::{entropy_profile, shannon_limit_check, CipherTable, EntropyOptions, SequencePrior};
use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::AnalyzeConfig;
use crate::output::OutputDir;
use crate::EXAMPLE_TABLE;

#[derive(Debug, Serialize)]
struct ProfileRow {
    n: usize,
    #[serde(rename = "H_K_given_Y")]
    h_k_given_y: f64,
    #[serde(rename = "H_K_given_XY")]
    h_k_given_xy: f64,
    #[serde(rename = "H_X_given_Y")]
    h_x_given_y: f64,
    #[serde(rename = "H_Y_given_X")]
    h_y_given_x: f64,
}

#[derive(Debug, Serialize)]
struct Analysis {
    table: String,
    gamma: usize,
    lambda: usize,
    nonrandom: bool,
    collisions: usize,
    n0: Option<usize>,
    n1: Option<usize>,
    n_d: Option<usize>,
    n1_bar: Option<usize>,
    shannon_slack: f64,
}

pub(super) fn run(config: &AnalyzeConfig, out: &mut OutputDir) -> Result<()> {
    let (name, text) = match &config.table {
        Some(path) => (
            path.display().to_string(),
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        ),
        None => ("<bundled example>".to_string(), EXAMPLE_TABLE.to_string()),
    };
    let table = CipherTable::from_toml(&text).with_context(|| format!("loading table {name}"))?;
    let counts = table.gamma_lambda()?;

    let prior = match &config.prior {
        Some(p) => SequencePrior::Iid(p.clone()),
        None => SequencePrior::Uniform,
    };
    let mut options = EntropyOptions::default();
    if let Some(b) = config.budget {
        options.budget = b;
    }
    let profile = entropy_profile(&table, &prior, config.key_prior.as_deref(), config.n_max, options)?;
    let slack = shannon_limit_check(&profile)?;

    let rows: Vec<ProfileRow> = profile
        .rows
        .iter()
        .map(|r| ProfileRow {
            n: r.n,
            h_k_given_y: r.h_k_given_y,
            h_k_given_xy: r.h_k_given_xy,
            h_x_given_y: r.h_x_given_y,
            h_y_given_x: r.h_y_given_x,
        })
        .collect();
    out.write_csv("entropy_profile.csv", &rows)?;

    let analysis = Analysis {
        table: name,
        gamma: counts.gamma,
        lambda: counts.lambda,
        nonrandom: table.is_nonrandom(),
        collisions: table.collisions().len(),
        n0: profile.n0,
        n1: profile.n1,
        n_d: profile.n_d,
        n1_bar: profile.n1_bar,
        shannon_slack: slack,
    };
    println!("Γ = {}, Λ = {}", analysis.gamma, analysis.lambda);
    out.write_json("analysis.json", &analysis)
}
