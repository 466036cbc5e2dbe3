use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probability weights per (x,k) must sum to one within this tolerance.
const WEIGHT_TOLERANCE: f64 = 1e-9;

/// A finite random cipher given as an explicit table.
///
/// For each plaintext symbol `x` and key `k` the table holds an ordered,
/// nonempty list of ciphertext symbols. The list position is the value of the
/// private randomizer; each position carries a probability weight.
#[derive(Debug, Clone, PartialEq)]
pub struct CipherTable {
    plaintexts: Vec<String>,
    keys: Vec<String>,
    ciphertexts: Vec<String>,
    // entries[x][k] = [(y, weight)] in randomizer order
    entries: Vec<Vec<Vec<(usize, f64)>>>,
}

/// Two plaintexts that can produce the same ciphertext under one key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collision {
    pub key: String,
    pub x: String,
    pub x_other: String,
    pub y: String,
}

impl fmt::Display for Collision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "key {} maps both {} and {} to {}",
            self.key, self.x, self.x_other, self.y
        )
    }
}

/// The two per-symbol randomization measures of a cipher table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RandomizationCounts {
    /// Minimum number of extra keys connecting a plaintext/ciphertext pair.
    pub gamma: usize,
    /// Minimum number of extra ciphertexts reachable from a plaintext/key pair.
    pub lambda: usize,
}

/// One line of a cipher table document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub x: String,
    pub k: String,
    pub ys: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

/// Serialized form of a [`CipherTable`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableDocument {
    pub plaintexts: Vec<String>,
    pub keys: Vec<String>,
    pub ciphertexts: Vec<String>,
    pub entries: Vec<TableEntry>,
}

fn index_of(alphabet: &[String], symbol: &str, what: &str) -> Result<usize> {
    alphabet
        .iter()
        .position(|s| s == symbol)
        .ok_or_else(|| Error::MalformedTable(format!("{what} symbol `{symbol}` not in alphabet")))
}

fn check_alphabet(alphabet: &[String], what: &str) -> Result<()> {
    if alphabet.is_empty() {
        return Err(Error::MalformedTable(format!("empty {what} alphabet")));
    }
    let distinct: BTreeSet<_> = alphabet.iter().collect();
    if distinct.len() != alphabet.len() {
        return Err(Error::MalformedTable(format!("duplicate {what} symbol")));
    }
    Ok(())
}

impl CipherTable {
    /// Builds a table from named alphabets and entries.
    ///
    /// Every (x, k) pair must appear exactly once. Missing weights default to
    /// uniform over the listed ciphertexts.
    pub fn new(
        plaintexts: Vec<String>,
        keys: Vec<String>,
        ciphertexts: Vec<String>,
        entries: Vec<TableEntry>,
    ) -> Result<Self> {
        check_alphabet(&plaintexts, "plaintext")?;
        check_alphabet(&keys, "key")?;
        check_alphabet(&ciphertexts, "ciphertext")?;
        let mut grid: Vec<Vec<Option<Vec<(usize, f64)>>>> =
            vec![vec![None; keys.len()]; plaintexts.len()];
        for entry in entries {
            let x = index_of(&plaintexts, &entry.x, "plaintext")?;
            let k = index_of(&keys, &entry.k, "key")?;
            let ys = entry
                .ys
                .iter()
                .map(|y| index_of(&ciphertexts, y, "ciphertext"))
                .collect::<Result<Vec<_>>>()?;
            let list = attach_weights(ys, entry.weights, &entry.x, &entry.k)?;
            if grid[x][k].replace(list).is_some() {
                return Err(Error::MalformedTable(format!(
                    "duplicate entry for x={}, k={}",
                    entry.x, entry.k
                )));
            }
        }
        let mut rows = Vec::with_capacity(plaintexts.len());
        for (x, row) in grid.into_iter().enumerate() {
            let mut cells = Vec::with_capacity(keys.len());
            for (k, cell) in row.into_iter().enumerate() {
                cells.push(cell.ok_or_else(|| {
                    Error::MalformedTable(format!(
                        "missing entry for x={}, k={}",
                        plaintexts[x], keys[k]
                    ))
                })?);
            }
            rows.push(cells);
        }
        Ok(Self {
            plaintexts,
            keys,
            ciphertexts,
            entries: rows,
        })
    }

    /// Builds a table over index alphabets `0..nx`, `0..nk`, `0..ny` from a
    /// closure returning the weighted ciphertext list of each (x, k).
    pub fn from_fn<F>(nx: usize, nk: usize, ny: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Vec<(usize, f64)>,
    {
        let names = |n: usize| (0..n).map(|i| i.to_string()).collect::<Vec<_>>();
        let mut entries = Vec::with_capacity(nx * nk);
        for x in 0..nx {
            for k in 0..nk {
                let list = f(x, k);
                entries.push(TableEntry {
                    x: x.to_string(),
                    k: k.to_string(),
                    ys: list.iter().map(|(y, _)| y.to_string()).collect(),
                    weights: Some(list.iter().map(|(_, w)| *w).collect()),
                });
            }
        }
        Self::new(names(nx), names(nk), names(ny), entries)
    }

    pub fn from_document(doc: TableDocument) -> Result<Self> {
        Self::new(doc.plaintexts, doc.keys, doc.ciphertexts, doc.entries)
    }

    /// Parses the TOML table document format.
    pub fn from_toml(text: &str) -> Result<Self> {
        let doc: TableDocument = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_document(doc)
    }

    pub fn to_document(&self) -> TableDocument {
        let mut entries = Vec::new();
        for (x, row) in self.entries.iter().enumerate() {
            for (k, list) in row.iter().enumerate() {
                entries.push(TableEntry {
                    x: self.plaintexts[x].clone(),
                    k: self.keys[k].clone(),
                    ys: list.iter().map(|(y, _)| self.ciphertexts[*y].clone()).collect(),
                    weights: Some(list.iter().map(|(_, w)| *w).collect()),
                });
            }
        }
        TableDocument {
            plaintexts: self.plaintexts.clone(),
            keys: self.keys.clone(),
            ciphertexts: self.ciphertexts.clone(),
            entries,
        }
    }

    pub fn plaintexts(&self) -> &[String] {
        &self.plaintexts
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn ciphertexts(&self) -> &[String] {
        &self.ciphertexts
    }

    /// Weighted ciphertext list for `(x, k)` in randomizer order.
    pub fn outputs(&self, x: usize, k: usize) -> &[(usize, f64)] {
        &self.entries[x][k]
    }

    /// Longest randomizer list in the table.
    pub fn max_randomizer(&self) -> usize {
        self.entries
            .iter()
            .flat_map(|row| row.iter().map(Vec::len))
            .max()
            .unwrap_or(0)
    }

    /// Whether every list holds a single ciphertext (a nonrandom cipher).
    pub fn is_nonrandom(&self) -> bool {
        self.max_randomizer() == 1
    }

    fn reachable(&self, x: usize, k: usize) -> BTreeSet<usize> {
        self.entries[x][k]
            .iter()
            .filter(|(_, w)| *w > 0.0)
            .map(|(y, _)| *y)
            .collect()
    }

    /// Lists every (key, x, x', y) where two plaintexts share a ciphertext
    /// under one key.
    pub fn collisions(&self) -> Vec<Collision> {
        let mut found = Vec::new();
        for k in 0..self.keys.len() {
            let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
            for x in 0..self.plaintexts.len() {
                for y in self.reachable(x, k) {
                    match owner.get(&y) {
                        Some(&first) => found.push(Collision {
                            key: self.keys[k].clone(),
                            x: self.plaintexts[first].clone(),
                            x_other: self.plaintexts[x].clone(),
                            y: self.ciphertexts[y].clone(),
                        }),
                        None => {
                            owner.insert(y, x);
                        }
                    }
                }
            }
        }
        found
    }

    /// Checks that every key decrypts uniquely.
    pub fn validate(&self) -> Result<()> {
        let collisions = self.collisions();
        if collisions.is_empty() {
            Ok(())
        } else {
            Err(Error::NotDecryptable(collisions))
        }
    }

    /// Computes Γ and Λ exactly by counting.
    ///
    /// Γ is the minimum over plaintexts `x`, reachable ciphertexts `y` and
    /// randomizer values `r` of the number of keys connecting `x` to `y` minus
    /// the number of keys with `E(x, k, r) = y`. Λ is the minimum over
    /// `(x, k, r)` of the number of distinct ciphertexts reachable from
    /// `(x, k)` minus one.
    pub fn gamma_lambda(&self) -> Result<RandomizationCounts> {
        self.validate()?;
        let nx = self.plaintexts.len();
        let nk = self.keys.len();
        let r_max = self.max_randomizer();

        let mut gamma = usize::MAX;
        for x in 0..nx {
            // y -> (number of keys reaching y, per-r key counts)
            let mut per_y: BTreeMap<usize, (usize, Vec<usize>)> = BTreeMap::new();
            for k in 0..nk {
                for y in self.reachable(x, k) {
                    per_y.entry(y).or_insert_with(|| (0, vec![0; r_max])).0 += 1;
                }
                for (r, &(y, w)) in self.entries[x][k].iter().enumerate() {
                    if w > 0.0 {
                        if let Some(cell) = per_y.get_mut(&y) {
                            cell.1[r] += 1;
                        }
                    }
                }
            }
            for (all, fixed) in per_y.values() {
                for &f in fixed {
                    gamma = gamma.min(all - f);
                }
            }
        }

        let mut lambda = usize::MAX;
        for x in 0..nx {
            for k in 0..nk {
                // the fixed-r set is a singleton for a table
                lambda = lambda.min(self.reachable(x, k).len() - 1);
            }
        }
        Ok(RandomizationCounts { gamma, lambda })
    }
}

fn attach_weights(
    ys: Vec<usize>,
    weights: Option<Vec<f64>>,
    x: &str,
    k: &str,
) -> Result<Vec<(usize, f64)>> {
    if ys.is_empty() {
        return Err(Error::MalformedTable(format!(
            "empty ciphertext list for x={x}, k={k}"
        )));
    }
    let weights = match weights {
        Some(w) => w,
        None => vec![1.0 / ys.len() as f64; ys.len()],
    };
    if weights.len() != ys.len() {
        return Err(Error::MalformedTable(format!(
            "x={x}, k={k}: {} weights for {} ciphertexts",
            weights.len(),
            ys.len()
        )));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::MalformedTable(format!(
            "x={x}, k={k}: weights must be finite and nonnegative"
        )));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_TOLERANCE {
        return Err(Error::MalformedTable(format!(
            "x={x}, k={k}: weights sum to {total}"
        )));
    }
    Ok(ys.into_iter().zip(weights).collect())
}

/// The five-key random cipher over a five-letter ciphertext alphabet used as
/// the standard small example of Γ = Λ = 1.
pub fn example_table() -> CipherTable {
    const ROWS: [(&str, &str, &[&str]); 10] = [
        ("0", "k0", &["a", "b"]),
        ("1", "k0", &["c", "d", "e"]),
        ("0", "k1", &["c", "d"]),
        ("1", "k1", &["e", "a", "b"]),
        ("0", "k2", &["e", "a"]),
        ("1", "k2", &["b", "c", "d"]),
        ("0", "k3", &["b", "c"]),
        ("1", "k3", &["d", "e", "a"]),
        ("0", "k4", &["d", "e"]),
        ("1", "k4", &["a", "b", "c"]),
    ];
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let entries = ROWS
        .iter()
        .map(|(x, k, ys)| TableEntry {
            x: x.to_string(),
            k: k.to_string(),
            ys: s(ys),
            weights: None,
        })
        .collect();
    CipherTable::new(
        s(&["0", "1"]),
        s(&["k0", "k1", "k2", "k3", "k4"]),
        s(&["a", "b", "c", "d", "e"]),
        entries,
    )
    .expect("example table is well formed")
}

/// `y = x XOR k` with a one-bit key.
pub fn xor_table() -> CipherTable {
    CipherTable::from_fn(2, 2, 2, |x, k| vec![(x ^ k, 1.0)]).expect("xor table")
}

/// `y = x` for every one of `nk` keys.
pub fn identity_table(nk: usize) -> CipherTable {
    CipherTable::from_fn(2, nk, 2, |x, _| vec![(x, 1.0)]).expect("identity table")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_table_is_valid() {
        example_table().validate().unwrap();
        assert_eq!(example_table().max_randomizer(), 3);
    }

    #[test]
    fn xor_is_valid() {
        xor_table().validate().unwrap();
        assert!(xor_table().is_nonrandom());
    }

    #[test]
    fn shared_ciphertext_is_a_collision() {
        let t = CipherTable::from_fn(2, 1, 1, |_, _| vec![(0, 1.0)]).unwrap();
        match t.validate() {
            Err(Error::NotDecryptable(c)) => {
                assert_eq!(c.len(), 1);
                assert_eq!(c[0].key, "0");
                assert_eq!((c[0].x.as_str(), c[0].x_other.as_str()), ("0", "1"));
            }
            other => panic!("expected collision, got {other:?}"),
        }
    }

    #[test]
    fn example_gamma_lambda() {
        let c = example_table().gamma_lambda().unwrap();
        assert_eq!(c, RandomizationCounts { gamma: 1, lambda: 1 });
    }

    #[test]
    fn xor_gamma_lambda_zero() {
        let c = xor_table().gamma_lambda().unwrap();
        assert_eq!(c, RandomizationCounts { gamma: 0, lambda: 0 });
    }

    // brute-force Γ straight from the definition, independent of gamma_lambda
    fn brute_gamma(t: &CipherTable) -> usize {
        let (nx, nk, ny) = (t.plaintexts().len(), t.keys().len(), t.ciphertexts().len());
        let mut gamma = usize::MAX;
        for x in 0..nx {
            for y in 0..ny {
                let keys = (0..nk)
                    .filter(|&k| t.outputs(x, k).iter().any(|(yy, _)| *yy == y))
                    .count();
                if keys == 0 {
                    continue;
                }
                for r in 0..t.max_randomizer() {
                    let fixed = (0..nk)
                        .filter(|&k| t.outputs(x, k).get(r).is_some_and(|(yy, _)| *yy == y))
                        .count();
                    gamma = gamma.min(keys - fixed);
                }
            }
        }
        gamma
    }

    #[test]
    fn example_matches_brute_force() {
        assert_eq!(brute_gamma(&example_table()), 1);
    }

    #[test]
    fn six_key_table_has_gamma_two() {
        // every ordered pair of distinct symbols from a 3-symbol window per x:
        // each (x, y) is reached by 4 keys, at most 2 of them at one position
        const PAIRS: [(usize, usize); 6] = [(0, 1), (1, 2), (2, 0), (1, 0), (2, 1), (0, 2)];
        let t = CipherTable::from_fn(2, 6, 6, |x, k| {
            let (a, b) = PAIRS[k];
            vec![(3 * x + a, 0.5), (3 * x + b, 0.5)]
        })
        .unwrap();
        let c = t.gamma_lambda().unwrap();
        assert_eq!(brute_gamma(&t), 2);
        assert_eq!(c, RandomizationCounts { gamma: 2, lambda: 1 });
    }

    #[test]
    fn shifted_window_table() {
        let t = CipherTable::from_fn(2, 3, 6, |x, k| {
            vec![(3 * x + k, 0.5), (3 * x + (k + 1) % 3, 0.5)]
        })
        .unwrap();
        assert_eq!(brute_gamma(&t), 1);
        assert_eq!(t.gamma_lambda().unwrap(), RandomizationCounts { gamma: 1, lambda: 1 });
    }

    #[test]
    fn toml_round_trip() {
        let t = example_table();
        let text = toml::to_string(&t.to_document()).unwrap();
        assert_eq!(CipherTable::from_toml(&text).unwrap(), t);
    }

    #[test]
    fn malformed_tables_are_rejected() {
        let bad_weights = TableEntry {
            x: "0".into(),
            k: "0".into(),
            ys: vec!["0".into()],
            weights: Some(vec![0.7]),
        };
        let r = CipherTable::new(vec!["0".into()], vec!["0".into()], vec!["0".into()], vec![bad_weights]);
        assert!(matches!(r, Err(Error::MalformedTable(_))));

        let r = CipherTable::new(vec!["0".into()], vec!["0".into()], vec!["0".into()], vec![]);
        assert!(matches!(r, Err(Error::MalformedTable(_))));
    }
}
