//! Fixed-length homophonic substitution for dyadic sources.
//!
//! Each source symbol of probability `c/2^l` owns `c` of the `2^l` blocks of
//! `l` bits and is encoded as one of them chosen uniformly. An i.i.d. source
//! then yields i.i.d. uniform blocks.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{invalid, Error, Result};

/// Largest supported block length.
pub const MAX_BLOCK_BITS: u32 = 32;

/// A homophonic code with blocks allocated lexicographically in symbol order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomophonicCode {
    pub block_bits: u32,
    pub symbols: Vec<SymbolBlocks>,
}

/// The contiguous block range `[start, start + count)` of one symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolBlocks {
    pub name: String,
    pub probability: f64,
    pub start: u64,
    pub count: u64,
}

fn numerator(p: f64, l: u32) -> Option<u64> {
    let scaled = p * (1u64 << l) as f64;
    let r = scaled.round();
    ((scaled - r).abs() < 1e-9 && r >= 0.0).then_some(r as u64)
}

fn smallest_block_bits(prior: &[(String, f64)]) -> Option<u32> {
    (1..=MAX_BLOCK_BITS).find(|&l| prior.iter().all(|(_, p)| numerator(*p, l).is_some()))
}

/// Builds the code for a dyadic prior at block length `l`.
pub fn build_code(prior: &[(String, f64)], l: u32) -> Result<HomophonicCode> {
    if l == 0 || l > MAX_BLOCK_BITS {
        return Err(invalid("l", format!("block length must be in 1..={MAX_BLOCK_BITS}")));
    }
    if prior.is_empty() {
        return Err(invalid("prior", "empty alphabet"));
    }
    let total: f64 = prior.iter().map(|(_, p)| p).sum();
    if prior.iter().any(|(_, p)| !(*p > 0.0)) || (total - 1.0).abs() > 1e-9 {
        return Err(invalid("prior", "probabilities must be positive and sum to 1"));
    }
    let mut symbols = Vec::with_capacity(prior.len());
    let mut start = 0u64;
    for (name, p) in prior {
        let count = numerator(*p, l).ok_or(Error::NonDyadicPrior {
            l,
            suggested: smallest_block_bits(prior),
        })?;
        symbols.push(SymbolBlocks {
            name: name.clone(),
            probability: *p,
            start,
            count,
        });
        start += count;
    }
    debug_assert_eq!(start, 1u64 << l);
    Ok(HomophonicCode { block_bits: l, symbols })
}

impl HomophonicCode {
    pub fn block_count(&self) -> u64 {
        1u64 << self.block_bits
    }

    pub fn blocks_of(&self, symbol: usize) -> std::ops::Range<u64> {
        let s = &self.symbols[symbol];
        s.start..s.start + s.count
    }

    /// Source entropy in bits per symbol.
    pub fn source_entropy(&self) -> f64 {
        -self
            .symbols
            .iter()
            .map(|s| s.probability * s.probability.log2())
            .sum::<f64>()
    }

    /// Output bits per bit of source entropy.
    pub fn expansion_factor(&self) -> f64 {
        self.block_bits as f64 / self.source_entropy()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("code serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let code: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let prior: Vec<(String, f64)> = code
            .symbols
            .iter()
            .map(|s| (s.name.clone(), s.probability))
            .collect();
        let rebuilt = build_code(&prior, code.block_bits)?;
        if rebuilt != code {
            return Err(Error::Parse("block allocation is not the canonical one".into()));
        }
        Ok(code)
    }

    /// Exact check that every block has probability `2^{-l}`: the ranges
    /// tile `0..2^l`, and each symbol owns `p·2^l` blocks so each of its
    /// blocks carries `p / (p·2^l)`.
    pub fn is_exactly_uniform(&self) -> bool {
        let mut next = 0u64;
        for s in &self.symbols {
            if s.start != next || numerator(s.probability, self.block_bits) != Some(s.count) {
                return false;
            }
            next += s.count;
        }
        next == self.block_count()
    }
}

/// Encodes symbol indices, drawing each block uniformly from its symbol's set.
pub fn encode<R: Rng + ?Sized>(symbols: &[usize], code: &HomophonicCode, rng: &mut R) -> Result<Vec<u64>> {
    symbols
        .iter()
        .map(|&s| {
            if s >= code.symbols.len() {
                return Err(invalid("symbol", format!("index {s} outside the alphabet")));
            }
            Ok(rng.random_range(code.blocks_of(s)))
        })
        .collect()
}

pub fn decode(blocks: &[u64], code: &HomophonicCode) -> Result<Vec<usize>> {
    blocks
        .iter()
        .map(|&b| {
            if b >= code.block_count() {
                return Err(Error::InvalidBlock {
                    block: b,
                    l: code.block_bits,
                });
            }
            // ranges are sorted and contiguous
            Ok(code.symbols.partition_point(|s| s.start + s.count <= b))
        })
        .collect()
}

/// Pearson chi-square test of block counts against the uniform law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub degrees_of_freedom: u64,
    pub p_value: f64,
}

pub fn chi_square_uniform(blocks: &[u64], code: &HomophonicCode) -> Result<ChiSquareResult> {
    let k = code.block_count();
    if k < 2 || blocks.is_empty() {
        return Err(invalid("blocks", "need at least two cells and one sample"));
    }
    let mut counts = vec![0u64; k as usize];
    for &b in blocks {
        if b >= k {
            return Err(Error::InvalidBlock {
                block: b,
                l: code.block_bits,
            });
        }
        counts[b as usize] += 1;
    }
    let expected = blocks.len() as f64 / k as f64;
    let statistic = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let dist = ChiSquared::new((k - 1) as f64).map_err(|e| invalid("dof", e.to_string()))?;
    Ok(ChiSquareResult {
        statistic,
        degrees_of_freedom: k - 1,
        p_value: dist.sf(statistic),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use proptest::prelude::*;
    use rand::Rng;

    fn abc() -> Vec<(String, f64)> {
        vec![("A".into(), 0.5), ("B".into(), 0.25), ("C".into(), 0.25)]
    }

    #[test]
    fn three_symbol_code() {
        let code = build_code(&abc(), 2).unwrap();
        assert_eq!(code.blocks_of(0), 0..2);
        assert_eq!(code.blocks_of(1), 2..3);
        assert_eq!(code.blocks_of(2), 3..4);
        assert!(code.is_exactly_uniform());
        assert!((code.expansion_factor() - 2.0 / 1.5).abs() < 1e-12);
    }

    #[test]
    fn binary_uniform_is_identity() {
        let code = build_code(&[("0".into(), 0.5), ("1".into(), 0.5)], 1).unwrap();
        let mut rng = substream(0, "h", 0);
        assert_eq!(encode(&[0, 1, 1, 0], &code, &mut rng).unwrap(), vec![0, 1, 1, 0]);
    }

    #[test]
    fn rejections() {
        let third = vec![("A".into(), 1.0 / 3.0), ("B".into(), 2.0 / 3.0)];
        assert!(matches!(
            build_code(&third, 4),
            Err(Error::NonDyadicPrior { l: 4, suggested: None })
        ));
        assert!(matches!(
            build_code(&abc(), 1),
            Err(Error::NonDyadicPrior { l: 1, suggested: Some(2) })
        ));
        assert!(build_code(&[("A".into(), 1.0)], 0).is_err());
        let code = build_code(&abc(), 2).unwrap();
        assert!(matches!(decode(&[4], &code), Err(Error::InvalidBlock { block: 4, l: 2 })));
    }

    #[test]
    fn toml_round_trip() {
        let code = build_code(&abc(), 3).unwrap();
        assert_eq!(HomophonicCode::from_toml(&code.to_toml()).unwrap(), code);
    }

    #[test]
    fn blocks_are_uniform_in_practice() {
        let code = build_code(&abc(), 2).unwrap();
        let mut rng = substream(3, "homophonic-test", 0);
        let src: Vec<usize> = (0..200_000)
            .map(|_| match rng.random_range(0..4) {
                0 | 1 => 0,
                2 => 1,
                _ => 2,
            })
            .collect();
        let blocks = encode(&src, &code, &mut rng).unwrap();
        let chi = chi_square_uniform(&blocks, &code).unwrap();
        assert!(chi.p_value > 1e-4, "{chi:?}");
    }

    proptest! {
        #[test]
        fn decode_inverts_encode(src in proptest::collection::vec(0usize..3, 0..2000), seed in any::<u64>()) {
            let code = build_code(&abc(), 4).unwrap();
            let mut rng = substream(seed, "roundtrip", 0);
            let blocks = encode(&src, &code, &mut rng).unwrap();
            prop_assert_eq!(decode(&blocks, &code).unwrap(), src);
        }
    }
}
