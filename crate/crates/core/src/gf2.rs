//! Vectors and linear systems over GF(2).

use std::ops::{BitXor, BitXorAssign};

/// A packed bit vector of fixed dimension.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Bit `i` of the result is bit `i` of `value` (least significant first).
    pub fn from_u64(len: usize, value: u64) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len.min(64) {
            v.set(i, (value >> i) & 1 == 1);
        }
        v
    }

    /// Inverse of [`from_u64`](Self::from_u64); panics above 64 bits.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= 64);
        self.words.first().copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVector) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    /// Hex string, least significant nibble last (bit 0 is the low bit).
    pub fn to_hex(&self) -> String {
        let nibbles = self.len.div_ceil(4).max(1);
        let mut s = String::with_capacity(nibbles);
        for n in (0..nibbles).rev() {
            let mut v = 0u8;
            for b in 0..4 {
                let i = 4 * n + b;
                if i < self.len && self.get(i) {
                    v |= 1 << b;
                }
            }
            s.push(char::from_digit(v as u32, 16).unwrap());
        }
        s
    }

    /// Parses [`to_hex`](Self::to_hex) output for a vector of `len` bits.
    pub fn from_hex(len: usize, hex: &str) -> Option<Self> {
        let hex = hex.trim_start_matches("0x");
        let mut v = Self::zeros(len);
        for (n, c) in hex.chars().rev().enumerate() {
            let d = c.to_digit(16)?;
            for b in 0..4 {
                let i = 4 * n + b;
                if (d >> b) & 1 == 1 {
                    if i >= len {
                        return None;
                    }
                    v.set(i, true);
                }
            }
        }
        Some(v)
    }
}

impl BitXorAssign<&BitVector> for BitVector {
    fn bitxor_assign(&mut self, rhs: &BitVector) {
        debug_assert_eq!(self.len, rhs.len);
        for (a, b) in self.words.iter_mut().zip(&rhs.words) {
            *a ^= b;
        }
    }
}

impl BitXor<&BitVector> for &BitVector {
    type Output = BitVector;

    fn bitxor(self, rhs: &BitVector) -> BitVector {
        let mut out = self.clone();
        out ^= rhs;
        out
    }
}

/// Rank of a set of vectors.
pub fn rank(rows: &[BitVector]) -> usize {
    let mut basis: Vec<(usize, BitVector)> = Vec::new();
    for row in rows {
        let mut v = row.clone();
        for (pivot, b) in &basis {
            if v.get(*pivot) {
                v ^= b;
            }
        }
        if let Some(p) = (0..v.len()).find(|&i| v.get(i)) {
            basis.push((p, v));
        }
    }
    basis.len()
}

/// A linear system `A s = b` prepared once for many right-hand sides.
///
/// Elimination is recorded as a combination of original equations per
/// reduced row, so each new right-hand side costs only dot products.
#[derive(Clone, Debug)]
pub struct PreparedSystem {
    unknowns: usize,
    // pivot column of each fully reduced row, with the combination of
    // original equations that produced the row
    pivots: Vec<(usize, BitVector)>,
    // combinations of original equations that reduce to 0 = ...
    dependencies: Vec<BitVector>,
}

impl PreparedSystem {
    pub fn new(rows: &[BitVector], unknowns: usize) -> Self {
        let m = rows.len();
        let mut work: Vec<(BitVector, BitVector)> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.clone(), BitVector::unit(m, i)))
            .collect();
        let mut pivot_rows = Vec::new();
        let mut used = vec![false; m];
        for col in 0..unknowns {
            let Some(p) = (0..m).find(|&i| !used[i] && work[i].0.get(col)) else {
                continue;
            };
            used[p] = true;
            let (prow, pcomb) = work[p].clone();
            for (i, (row, comb)) in work.iter_mut().enumerate() {
                if i != p && row.get(col) {
                    *row ^= &prow;
                    *comb ^= &pcomb;
                }
            }
            pivot_rows.push((col, p));
        }
        let pivots = pivot_rows
            .into_iter()
            .map(|(col, p)| (col, work[p].1.clone()))
            .collect();
        let dependencies = work
            .into_iter()
            .zip(used)
            .filter(|((row, _), u)| !u && row.is_zero())
            .map(|((_, comb), _)| comb)
            .collect();
        Self {
            unknowns,
            pivots,
            dependencies,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.pivots.len() == self.unknowns
    }

    /// Solves for `rhs` (one bit per original equation). Returns `None` when
    /// the system is inconsistent; free variables are set to zero.
    pub fn solve(&self, rhs: &BitVector) -> Option<BitVector> {
        if self.dependencies.iter().any(|d| d.dot(rhs)) {
            return None;
        }
        // rows are fully reduced, so each pivot variable is its row's
        // right-hand side once free variables are zero
        let mut s = BitVector::zeros(self.unknowns);
        for (col, comb) in &self.pivots {
            s.set(*col, comb.dot(rhs));
        }
        Some(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hex_round_trip() {
        let v = BitVector::from_u64(13, 0x1a2b);
        assert_eq!(v.to_hex(), "1a2b");
        assert_eq!(BitVector::from_hex(13, "1a2b").unwrap(), v);
        assert!(BitVector::from_hex(4, "1f").is_none());
    }

    #[test]
    fn inconsistent_system() {
        // s0 = 0 and s0 = 1
        let rows = vec![BitVector::unit(2, 0), BitVector::unit(2, 0)];
        let sys = PreparedSystem::new(&rows, 2);
        assert_eq!(sys.rank(), 1);
        assert!(!sys.is_full_rank());
        assert!(sys.solve(&BitVector::from_bits(&[false, true])).is_none());
        assert!(sys.solve(&BitVector::from_bits(&[true, true])).is_some());
    }

    proptest! {
        #[test]
        fn solution_satisfies_system(
            seed_bits in proptest::collection::vec(any::<bool>(), 1..100),
            coeffs in proptest::collection::vec(any::<u64>(), 1..40),
        ) {
            let n = seed_bits.len();
            let s = BitVector::from_bits(&seed_bits);
            let rows: Vec<BitVector> = coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let mut r = BitVector::zeros(n);
                    for j in 0..n {
                        let bit = (c.rotate_left((j as u32 * 7 + i as u32) % 64) >> (j % 64)) & 1;
                        r.set(j, bit == 1);
                    }
                    r
                })
                .collect();
            let rhs = BitVector::from_bits(&rows.iter().map(|r| r.dot(&s)).collect::<Vec<_>>());
            let sys = PreparedSystem::new(&rows, n);
            let sol = sys.solve(&rhs).expect("consistent by construction");
            for (r, b) in rows.iter().zip(rhs.bits()) {
                prop_assert_eq!(r.dot(&sol), b);
            }
            prop_assert_eq!(sys.rank(), rank(&rows));
            if sys.is_full_rank() {
                prop_assert_eq!(sol, s);
            }
        }
    }
}
