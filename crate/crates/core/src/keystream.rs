//! Seed-key expansion: LFSR keystreams, m-bit basis symbols and their GF(2)
//! linear forms over the seed.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gf2::BitVector;

/// Anything that expands a seed into a bit stream.
pub trait KeystreamSource {
    fn bits(&self, nbits: usize) -> Vec<bool>;
}

/// A Fibonacci LFSR of `length` bits.
///
/// The sequence obeys `a[n + L] = XOR over taps t of a[n + L - t]`, its first
/// `L` terms are the seed bits (seed bit `i` is `a[i]`), and the output is
/// `a[0], a[1], ...`, i.e. the bit leaving the register at each step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LfsrConfig {
    length: usize,
    taps: Vec<usize>,
    seed: BitVector,
}

/// Serialized LFSR settings as they appear in experiment configs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LfsrDocument {
    pub length: usize,
    pub taps: Vec<usize>,
    pub seed_hex: String,
}

/// Known maximal-length tap sets, keyed by register length.
pub fn maximal_taps(length: usize) -> Option<&'static [usize]> {
    Some(match length {
        4 => &[4, 3],
        6 => &[6, 5],
        8 => &[8, 6, 5, 4],
        12 => &[12, 6, 4, 1],
        16 => &[16, 15, 13, 4],
        20 => &[20, 17],
        _ => return None,
    })
}

impl LfsrConfig {
    pub fn new(length: usize, taps: &[usize], seed: BitVector) -> Result<Self> {
        if length == 0 {
            return Err(invalid("length", "must be positive"));
        }
        let mut taps = taps.to_vec();
        taps.sort_unstable();
        taps.dedup();
        if taps.iter().any(|&t| t == 0 || t > length) {
            return Err(invalid("taps", format!("positions must lie in 1..={length}")));
        }
        if taps.last() != Some(&length) {
            return Err(invalid("taps", format!("tap {length} must be present")));
        }
        if seed.len() != length {
            return Err(invalid("seed", format!("expected {length} bits, got {}", seed.len())));
        }
        if seed.is_zero() {
            return Err(Error::ZeroSeed);
        }
        Ok(Self { length, taps, seed })
    }

    pub fn from_document(doc: &LfsrDocument) -> Result<Self> {
        let seed = BitVector::from_hex(doc.length, &doc.seed_hex)
            .ok_or_else(|| invalid("seed_hex", format!("`{}` is not a {}-bit hex value", doc.seed_hex, doc.length)))?;
        Self::new(doc.length, &doc.taps, seed)
    }

    pub fn to_document(&self) -> LfsrDocument {
        LfsrDocument {
            length: self.length,
            taps: self.taps.clone(),
            seed_hex: self.seed.to_hex(),
        }
    }

    /// Same taps, different seed.
    pub fn with_seed(&self, seed: BitVector) -> Result<Self> {
        Self::new(self.length, &self.taps, seed)
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn taps(&self) -> &[usize] {
        &self.taps
    }

    pub fn seed(&self) -> &BitVector {
        &self.seed
    }

    /// Number of steps until the register state repeats (registers up to 64 bits).
    pub fn period(&self) -> Result<u64> {
        if self.length > 64 {
            return Err(invalid("length", "period search supports at most 64 bits"));
        }
        let l = self.length;
        let mask = if l == 64 { u64::MAX } else { (1u64 << l) - 1 };
        // bit i of the state is a[n + i]
        let tap_mask = self
            .taps
            .iter()
            .fold(0u64, |acc, &t| acc | 1u64 << (l - t));
        let start = self.seed.to_u64();
        let mut state = start;
        let mut steps = 0u64;
        loop {
            let fb = (state & tap_mask).count_ones() as u64 & 1;
            state = (state >> 1 | fb << (l - 1)) & mask;
            steps += 1;
            if state == start {
                return Ok(steps);
            }
        }
    }
}

impl KeystreamSource for LfsrConfig {
    fn bits(&self, nbits: usize) -> Vec<bool> {
        lfsr_stream(self, nbits)
    }
}

/// The first `nbits` output bits of the register.
pub fn lfsr_stream(config: &LfsrConfig, nbits: usize) -> Vec<bool> {
    let l = config.length;
    let mut a: Vec<bool> = config.seed.bits().take(nbits.max(l)).collect();
    for n in l..nbits {
        a.push(config.taps.iter().fold(false, |acc, &t| acc ^ a[n - t]));
    }
    a.truncate(nbits);
    a
}

/// Groups bits into `m`-bit symbols, first bit most significant.
///
/// A trailing partial symbol is dropped with a warning.
pub fn chop_symbols(bits: &[bool], m: usize) -> Result<Vec<usize>> {
    if m == 0 || m >= usize::BITS as usize {
        return Err(invalid("m", "symbol width must be in 1..64"));
    }
    let rem = bits.len() % m;
    if rem != 0 {
        warn!("dropping {rem} trailing keystream bit(s) that do not fill an {m}-bit symbol");
    }
    Ok(bits
        .chunks_exact(m)
        .map(|c| c.iter().fold(0usize, |acc, &b| acc << 1 | b as usize))
        .collect())
}

/// `n` keystream symbols of `m` bits from any source.
pub fn keystream_symbols(source: &dyn KeystreamSource, n: usize, m: usize) -> Result<Vec<usize>> {
    chop_symbols(&source.bits(n * m), m)
}

/// The `m` maps `f_1..f_m` used to expand each keystream symbol into `m` symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionSpec {
    m: usize,
    tables: Vec<Vec<usize>>,
}

impl ExpansionSpec {
    pub fn new(m: usize, tables: Vec<Vec<usize>>) -> Result<Self> {
        if m == 0 || m > 24 {
            return Err(invalid("m", "symbol width must be in 1..=24"));
        }
        if tables.len() != m {
            return Err(invalid("tables", format!("need {m} maps, got {}", tables.len())));
        }
        let size = 1usize << m;
        for (j, t) in tables.iter().enumerate() {
            if t.len() != size || t.iter().any(|&v| v >= size) {
                return Err(invalid("tables", format!("map {} is not a function on 0..{size}", j + 1)));
            }
        }
        Ok(Self { m, tables })
    }

    pub fn identity(m: usize) -> Result<Self> {
        Self::new(m, vec![(0..1usize << m).collect(); m])
    }

    pub fn m(&self) -> usize {
        self.m
    }
}

/// `Z' = (f_1(Z_1), ..., f_m(Z_1), f_1(Z_2), ...)`.
pub fn expand_keystream(z: &[usize], spec: &ExpansionSpec) -> Result<Vec<usize>> {
    let size = 1usize << spec.m;
    let mut out = Vec::with_capacity(z.len() * spec.m);
    for &zi in z {
        if zi >= size {
            return Err(Error::SymbolOutOfRange { z: zi, m: size });
        }
        out.extend(spec.tables.iter().map(|f| f[zi]));
    }
    Ok(out)
}

/// Linear forms over the seed for the first `nbits` output bits of an LFSR
/// with the given taps.
pub fn bit_forms(length: usize, taps: &[usize], nbits: usize) -> Vec<BitVector> {
    let mut forms: Vec<BitVector> = (0..length.min(nbits))
        .map(|i| BitVector::unit(length, i))
        .collect();
    for n in length..nbits {
        let mut f = BitVector::zeros(length);
        for &t in taps {
            f ^= &forms[n - t];
        }
        forms.push(f);
    }
    forms
}

/// The `m` forms (most significant bit first) of keystream symbol `i`,
/// counting from 1.
pub fn keystream_linear_forms(config: &LfsrConfig, i: usize, m: usize) -> Result<Vec<BitVector>> {
    if i == 0 {
        return Err(invalid("i", "symbol positions start at 1"));
    }
    if m == 0 {
        return Err(invalid("m", "symbol width must be positive"));
    }
    let forms = bit_forms(config.length, &config.taps, i * m);
    Ok(forms[(i - 1) * m..].to_vec())
}
