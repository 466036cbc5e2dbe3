use std::path::Path;

use alphaeta::homophonic::{build_code, chi_square_uniform, decode, encode, ChiSquareResult, HomophonicCode};
use alphaeta::rng::substream;
use alphaeta::Error;
use anyhow::{bail, Context as _, Result};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::Serialize;

use crate::config::{ConfigError, HomophonicConfig};
use crate::output::OutputDir;
use crate::{Context, HomophonicArgs};

#[derive(Debug, Serialize)]
struct CodeReport {
    block_bits: u32,
    source_entropy: f64,
    expansion_factor: f64,
    exactly_uniform: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    roundtrip: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    chi_square: Option<ChiSquareResult>,
}

fn resolve_code(config: &HomophonicConfig) -> Result<HomophonicCode> {
    let prior: Vec<(String, f64)> = config.prior.iter().map(|e| (e.name.clone(), e.p)).collect();
    let l = match config.l {
        Some(l) => l,
        None => match build_code(&prior, 1) {
            Ok(code) => return Ok(code),
            Err(Error::NonDyadicPrior { suggested: Some(l), .. }) => l,
            Err(e) => return Err(prior_error(e)),
        },
    };
    build_code(&prior, l).map_err(prior_error)
}

fn prior_error(e: Error) -> anyhow::Error {
    ConfigError {
        path: "homophonic.prior".into(),
        message: e.to_string(),
    }
    .into()
}

fn block_bytes(code: &HomophonicCode) -> usize {
    (code.block_bits as usize).div_ceil(8)
}

pub(super) fn run(config: &HomophonicConfig, args: &HomophonicArgs, ctx: &Context, out: &mut OutputDir) -> Result<()> {
    let code = resolve_code(config)?;
    out.write_text("code.toml", &code.to_toml())?;

    let mut report = CodeReport {
        block_bits: code.block_bits,
        source_entropy: code.source_entropy(),
        expansion_factor: code.expansion_factor(),
        exactly_uniform: code.is_exactly_uniform(),
        samples: None,
        roundtrip: None,
        chi_square: None,
    };
    if config.samples > 0 {
        let seed = ctx.require_seed()?;
        let weights: Vec<f64> = code.symbols.iter().map(|s| s.probability).collect();
        let source = WeightedIndex::new(&weights)?;
        let mut rng = substream(seed, "homophonic-source", 0);
        let symbols: Vec<usize> = (0..config.samples).map(|_| source.sample(&mut rng)).collect();
        let blocks = encode(&symbols, &code, &mut substream(seed, "homophonic-encode", 0))?;
        report.roundtrip = Some(decode(&blocks, &code)? == symbols);
        report.chi_square = Some(chi_square_uniform(&blocks, &code)?);
        report.samples = Some(config.samples);
    }
    println!(
        "l = {}, expansion factor {:.4}, exactly uniform: {}",
        report.block_bits, report.expansion_factor, report.exactly_uniform
    );
    out.write_json("homophonic.json", &report)?;

    if let Some(paths) = &args.encode {
        let seed = ctx.require_seed()?;
        encode_file(&code, &paths[0], &paths[1], seed, out)?;
    }
    if let Some(paths) = &args.decode {
        decode_file(&code, &paths[0], &paths[1], out)?;
    }
    Ok(())
}

/// Each input byte is a symbol index; each block is written big-endian in
/// `⌈l/8⌉` bytes.
fn encode_file(code: &HomophonicCode, input: &Path, output: &Path, seed: u64, out: &mut OutputDir) -> Result<()> {
    let bytes = std::fs::read(input).with_context(|| format!("reading {}", input.display()))?;
    let symbols: Vec<usize> = bytes.iter().map(|&b| b as usize).collect();
    let blocks = encode(&symbols, code, &mut substream(seed, "homophonic-filter", 0))?;
    let width = block_bytes(code);
    let mut buf = Vec::with_capacity(blocks.len() * width);
    for b in blocks {
        buf.extend_from_slice(&b.to_be_bytes()[8 - width..]);
    }
    out.write_bytes(output, &buf)
}

fn decode_file(code: &HomophonicCode, input: &Path, output: &Path, out: &mut OutputDir) -> Result<()> {
    if code.symbols.len() > 256 {
        bail!("alphabet of {} symbols does not fit in bytes", code.symbols.len());
    }
    let bytes = std::fs::read(input).with_context(|| format!("reading {}", input.display()))?;
    let width = block_bytes(code);
    if bytes.len() % width != 0 {
        bail!(
            "{} bytes is not a whole number of {width}-byte blocks",
            bytes.len()
        );
    }
    let blocks: Vec<u64> = bytes
        .chunks(width)
        .map(|c| c.iter().fold(0u64, |acc, &b| acc << 8 | b as u64))
        .collect();
    let symbols = decode(&blocks, code)?;
    let buf: Vec<u8> = symbols.iter().map(|&s| s as u8).collect();
    out.write_bytes(output, &buf)
}
