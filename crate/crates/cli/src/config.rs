//! Experiment configuration: one optional table per subcommand.

use std::fmt;
use std::path::{Path, PathBuf};

use alphaeta::measurement::BobModel;
use serde::{Deserialize, Serialize};

/// A configuration problem located by its dotted field path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(path: &str, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError {
        path: path.to_string(),
        message: message.into(),
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Master seed; the `--seed` flag takes precedence.
    pub seed: Option<u64>,
    pub simulate: SimulateConfig,
    pub attack: AttackConfig,
    pub analyze: AnalyzeConfig,
    pub bounds: BoundsConfig,
    pub homophonic: HomophonicConfig,
    pub nishioka: NishiokaConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    /// Transmitted mean photon numbers.
    pub s: Vec<f64>,
    pub m_bases: Vec<usize>,
    pub eta: Vec<f64>,
    pub trials: u64,
    pub bob_model: BobModel,
    /// Also estimate Eve's half-circle error at the transmitted energy.
    pub eve: bool,
    pub eve_trials: u64,
    /// Ground-truth records and raw measurements dumped for the first grid point.
    pub dump_symbols: usize,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            s: vec![0.25, 1.0],
            m_bases: vec![2048],
            eta: vec![1.0],
            trials: 100_000,
            bob_model: BobModel::Heterodyne,
            eve: false,
            eve_trials: 100_000,
            dump_symbols: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackKind {
    Kpa,
    Halfcircle,
    Individual,
    Randomization,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AttackConfig {
    pub run: Vec<AttackKind>,
    pub kpa: KpaConfig,
    pub halfcircle: HalfcircleConfig,
    pub individual: IndividualConfig,
    pub randomization: RandomizationConfig,
}

impl Default for AttackConfig {
    fn default() -> Self {
        Self {
            run: vec![AttackKind::Kpa, AttackKind::Halfcircle, AttackKind::Individual],
            kpa: KpaConfig::default(),
            halfcircle: HalfcircleConfig::default(),
            individual: IndividualConfig::default(),
            randomization: RandomizationConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KpaConfig {
    pub key_bits: usize,
    /// Feedback taps; a maximal-length set is used when omitted.
    pub taps: Option<Vec<usize>>,
    pub m_bases: usize,
    pub energy: f64,
    pub window: usize,
    /// Known symbols per trial; `⌈|K|/m⌉ + 4` when omitted.
    pub symbols: Option<usize>,
    pub trials: u64,
    pub recall_threshold: f64,
}

impl Default for KpaConfig {
    fn default() -> Self {
        Self {
            key_bits: 16,
            taps: None,
            m_bases: 16,
            energy: 25.0,
            window: 2,
            symbols: None,
            trials: 100,
            recall_threshold: 0.99,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HalfcircleConfig {
    pub s: Vec<f64>,
    pub trials: u64,
}

impl Default for HalfcircleConfig {
    fn default() -> Self {
        Self {
            s: vec![100.0, 400.0],
            trials: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IndividualConfig {
    pub s: f64,
    pub m_bases: Vec<usize>,
    /// Fock cutoff; `S + 10√S + 20` when omitted.
    pub cutoff: Option<usize>,
}

impl Default for IndividualConfig {
    fn default() -> Self {
        Self {
            s: 4.0,
            m_bases: vec![2, 4, 8, 16],
            cutoff: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RandomizationConfig {
    pub s: f64,
    pub m_bases: usize,
    pub trials_per_cell: u64,
    pub epsilon: f64,
}

impl Default for RandomizationConfig {
    fn default() -> Self {
        Self {
            s: 4e4,
            m_bases: 2048,
            trials_per_cell: 20_000,
            epsilon: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeConfig {
    /// Cipher table document; the bundled example table when omitted.
    pub table: Option<PathBuf>,
    pub n_max: usize,
    /// Independent plaintext marginal; uniform when omitted.
    pub prior: Option<Vec<f64>>,
    pub key_prior: Option<Vec<f64>>,
    pub budget: Option<u64>,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        Self {
            table: None,
            n_max: 4,
            prior: None,
            key_prior: None,
            budget: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsConfig {
    pub key_bits: f64,
    pub m_bases: usize,
    pub s: f64,
    pub eta: f64,
    pub gamma: Option<f64>,
    pub lambda: Option<f64>,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            key_bits: 4400.0,
            m_bases: 2048,
            s: 4e4,
            eta: 1.0,
            gamma: None,
            lambda: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorEntry {
    pub name: String,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HomophonicConfig {
    pub prior: Vec<PriorEntry>,
    /// Block length; the smallest valid one when omitted.
    pub l: Option<u32>,
    /// Symbols drawn from the prior for the chi-square check; 0 skips it.
    pub samples: u64,
}

impl Default for HomophonicConfig {
    fn default() -> Self {
        let entry = |name: &str, p| PriorEntry {
            name: name.to_string(),
            p,
        };
        Self {
            prior: vec![entry("A", 0.5), entry("B", 0.25), entry("C", 0.25)],
            l: None,
            samples: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NishiokaConfig {
    pub s: f64,
    pub m_bases: usize,
    pub trials: u64,
}

impl Default for NishiokaConfig {
    fn default() -> Self {
        Self {
            s: 4.0,
            m_bases: 8,
            trials: 1_000_000,
        }
    }
}

/// Parses a configuration document, reporting type errors by field path.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let de = toml::Deserializer::parse(text).map_err(|e| ConfigError {
        path: "<document>".into(),
        message: e.to_string().trim().to_string(),
    })?;
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ConfigError {
            path: if path == "." { "<document>".into() } else { path },
            message: e.into_inner().message().trim().to_string(),
        }
    })
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        path: "--config".into(),
        message: format!("{}: {e}", path.display()),
    })?;
    parse_config(&text)
}

fn positive(path: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        err(path, format!("{v} is not a positive number"))
    }
}

fn power_of_two(path: &str, m: usize) -> Result<(), ConfigError> {
    if m >= 2 && m.is_power_of_two() {
        Ok(())
    } else {
        err(path, format!("{m} is not a power of two >= 2"))
    }
}

fn nonempty<T>(path: &str, v: &[T]) -> Result<(), ConfigError> {
    if v.is_empty() {
        err(path, "grid is empty")
    } else {
        Ok(())
    }
}

fn at_least_one(path: &str, n: u64) -> Result<(), ConfigError> {
    if n == 0 {
        err(path, "must be at least 1")
    } else {
        Ok(())
    }
}

fn transmittance(path: &str, eta: f64) -> Result<(), ConfigError> {
    if eta > 0.0 && eta <= 1.0 {
        Ok(())
    } else {
        err(path, format!("{eta} is outside (0, 1]"))
    }
}

impl SimulateConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        nonempty("simulate.s", &self.s)?;
        nonempty("simulate.m_bases", &self.m_bases)?;
        nonempty("simulate.eta", &self.eta)?;
        for (i, &s) in self.s.iter().enumerate() {
            positive(&format!("simulate.s[{i}]"), s)?;
        }
        for (i, &m) in self.m_bases.iter().enumerate() {
            power_of_two(&format!("simulate.m_bases[{i}]"), m)?;
        }
        for (i, &e) in self.eta.iter().enumerate() {
            transmittance(&format!("simulate.eta[{i}]"), e)?;
        }
        at_least_one("simulate.trials", self.trials)?;
        if self.eve {
            at_least_one("simulate.eve_trials", self.eve_trials)?;
        }
        Ok(())
    }
}

impl AttackConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        nonempty("attack.run", &self.run)?;
        for kind in &self.run {
            match kind {
                AttackKind::Kpa => self.kpa.validate()?,
                AttackKind::Halfcircle => {
                    let h = &self.halfcircle;
                    nonempty("attack.halfcircle.s", &h.s)?;
                    for (i, &s) in h.s.iter().enumerate() {
                        positive(&format!("attack.halfcircle.s[{i}]"), s)?;
                    }
                    at_least_one("attack.halfcircle.trials", h.trials)?;
                }
                AttackKind::Individual => {
                    let c = &self.individual;
                    positive("attack.individual.s", c.s)?;
                    nonempty("attack.individual.m_bases", &c.m_bases)?;
                    for (i, &m) in c.m_bases.iter().enumerate() {
                        power_of_two(&format!("attack.individual.m_bases[{i}]"), m)?;
                    }
                }
                AttackKind::Randomization => {
                    let r = &self.randomization;
                    positive("attack.randomization.s", r.s)?;
                    power_of_two("attack.randomization.m_bases", r.m_bases)?;
                    at_least_one("attack.randomization.trials_per_cell", r.trials_per_cell)?;
                    if !(r.epsilon > 0.0 && r.epsilon < 1.0) {
                        return err("attack.randomization.epsilon", "must lie in (0, 1)");
                    }
                }
            }
        }
        Ok(())
    }
}

impl KpaConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(2..=64).contains(&self.key_bits) {
            return err("attack.kpa.key_bits", "must lie in 2..=64");
        }
        if self.taps.is_none() && alphaeta::keystream::maximal_taps(self.key_bits).is_none() {
            return err(
                "attack.kpa.taps",
                format!("no built-in maximal taps for key_bits = {}; list them", self.key_bits),
            );
        }
        if let Some(taps) = &self.taps {
            if let Some(i) = taps.iter().position(|&t| t == 0 || t > self.key_bits) {
                return err(&format!("attack.kpa.taps[{i}]"), "tap outside 1..=key_bits");
            }
        }
        power_of_two("attack.kpa.m_bases", self.m_bases)?;
        positive("attack.kpa.energy", self.energy)?;
        if self.window >= self.m_bases {
            return err("attack.kpa.window", "must be smaller than m_bases");
        }
        if self.symbols == Some(0) {
            return err("attack.kpa.symbols", "must be at least 1");
        }
        at_least_one("attack.kpa.trials", self.trials)?;
        if !(0.0..=1.0).contains(&self.recall_threshold) {
            return err("attack.kpa.recall_threshold", "must lie in [0, 1]");
        }
        Ok(())
    }

    pub fn resolved_taps(&self) -> Vec<usize> {
        self.taps.clone().unwrap_or_else(|| {
            alphaeta::keystream::maximal_taps(self.key_bits)
                .expect("validated")
                .to_vec()
        })
    }

    pub fn resolved_symbols(&self) -> usize {
        let m = self.m_bases.trailing_zeros() as usize;
        self.symbols.unwrap_or(self.key_bits.div_ceil(m) + 4)
    }
}

impl AnalyzeConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some(path) = &self.table {
            if !path.is_file() {
                return err("analyze.table", format!("{} does not exist", path.display()));
            }
        }
        if self.n_max == 0 {
            return err("analyze.n_max", "must be at least 1");
        }
        for (name, p) in [("analyze.prior", &self.prior), ("analyze.key_prior", &self.key_prior)] {
            if let Some(p) = p {
                if let Some(i) = p.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
                    return err(&format!("{name}[{i}]"), "must be a nonnegative probability");
                }
                let total: f64 = p.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return err(name, format!("probabilities sum to {total}"));
                }
            }
        }
        Ok(())
    }
}

impl BoundsConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        positive("bounds.key_bits", self.key_bits)?;
        power_of_two("bounds.m_bases", self.m_bases)?;
        positive("bounds.s", self.s)?;
        transmittance("bounds.eta", self.eta)?;
        if let Some(g) = self.gamma {
            if !(g.is_finite() && g >= 0.0) {
                return err("bounds.gamma", "must be nonnegative");
            }
        }
        if let Some(l) = self.lambda {
            if !(l.is_finite() && l >= 0.0) {
                return err("bounds.lambda", "must be nonnegative");
            }
        }
        Ok(())
    }
}

impl HomophonicConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        nonempty("homophonic.prior", &self.prior)?;
        for (i, e) in self.prior.iter().enumerate() {
            positive(&format!("homophonic.prior[{i}].p"), e.p)?;
        }
        if let Some(l) = self.l {
            if !(1..=alphaeta::homophonic::MAX_BLOCK_BITS).contains(&l) {
                return err(
                    "homophonic.l",
                    format!("must lie in 1..={}", alphaeta::homophonic::MAX_BLOCK_BITS),
                );
            }
        }
        Ok(())
    }
}

impl NishiokaConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.s.is_finite() && self.s >= 0.0) {
            return err("nishioka.s", "must be finite and nonnegative");
        }
        power_of_two("nishioka.m_bases", self.m_bases)?;
        at_least_one("nishioka.trials", self.trials)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        assert_eq!(parse_config("").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn type_errors_carry_the_field_path() {
        let e = parse_config("[simulate]\ntrials = \"many\"\n").unwrap_err();
        assert_eq!(e.path, "simulate.trials");
        let e = parse_config("[attack.kpa]\nwindow = -1\n").unwrap_err();
        assert_eq!(e.path, "attack.kpa.window");
        let e = parse_config("[bounds]\nkeybits = 3\n").unwrap_err();
        assert!(e.path.starts_with("bounds"), "{e}");
    }

    #[test]
    fn semantic_errors_carry_the_field_path() {
        let c = parse_config("[simulate]\nm_bases = [8, 12]\n").unwrap();
        assert_eq!(c.simulate.validate().unwrap_err().path, "simulate.m_bases[1]");
        let c = parse_config("[simulate]\neta = []\n").unwrap();
        assert_eq!(c.simulate.validate().unwrap_err().path, "simulate.eta");
        let c = parse_config("[analyze]\ntable = \"/nonexistent/t.toml\"\n").unwrap();
        assert_eq!(c.analyze.validate().unwrap_err().path, "analyze.table");
    }

    #[test]
    fn default_sections_validate() {
        let c = ExperimentConfig::default();
        c.simulate.validate().unwrap();
        c.attack.validate().unwrap();
        c.analyze.validate().unwrap();
        c.bounds.validate().unwrap();
        c.homophonic.validate().unwrap();
        c.nishioka.validate().unwrap();
        assert_eq!(c.attack.kpa.resolved_symbols(), 8);
    }
}
