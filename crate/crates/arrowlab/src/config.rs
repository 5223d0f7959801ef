//! Experiment configuration: a `key = value` text format, defaults and range
//! checks.
//!
//! | key | default | meaning |
//! |-----|---------|---------|
//! | `schema_version` | 1 | must be 1 |
//! | `experiment` | subcommand | must match the subcommand when given |
//! | `seed` | 0 | root seed; trial `i` uses `split(i)` |
//! | `trials` | 100 | random instances per run |
//! | `dims` | `2x2` | `d_S x d_R`, joint dimension at most 16 |
//! | `epsilon` | 0.1 | near-product mixing weight, in `[0, 1]` |
//! | `beta` | 1.0 | inverse temperature, `> 0` |
//! | `theta` | π/4 | partial-swap angle |
//! | `restarts` | 4 | optimizer restarts |
//! | `max_iterations` | 3000 | simplex iterations per restart |
//! | `collisions` | 8 | reservoir size, at most 11 |
//! | `system_population` | 0.0 | ground population of the initial system qubit |
//! | `ancilla_population` | 0.8 | ground population of each ancilla |
//! | `couplings` | `0,0.05,0.1` | sweep coupling strengths |
//! | `epsilons` | `0,0.1,0.3` | sweep correlation strengths |
//! | `times` | `0.5,1,2` | sweep evolution times |
//! | `omega_s`, `omega_r` | 1.0 | sweep local fields `ω Z / 2` |
//! | `format` | `json` | `json` or `csv` |
//! | `out` | stdout | output path |
//! | `tol_*` | see [`Tolerances`] | invariant tolerances |
//!
//! Lines starting with `#` are comments. Duplicate and unknown keys are
//! rejected.

use core::f64::consts::FRAC_PI_4;
use std::path::PathBuf;

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;
pub const JOINT_DIM_CAP: usize = 16;
pub const MAX_COLLISIONS: usize = 11;
pub const MAX_TRIALS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown key `{key}`")]
    UnknownKey { key: String },
    #[error("duplicate key `{key}`")]
    DuplicateKey { key: String },
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

impl ConfigError {
    fn invalid(key: &str, reason: impl Into<String>) -> Self {
        Self::Invalid { key: key.to_string(), reason: reason.into() }
    }

    /// The offending key, when the error concerns one.
    pub fn key(&self) -> Option<&str> {
        match self {
            Self::Syntax { .. } => None,
            Self::UnknownKey { key } | Self::DuplicateKey { key } | Self::Invalid { key, .. } => Some(key),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    /// `|ΔS_S + ΔS_R − I'|` and the second-law floor.
    pub balance: f64,
    /// Final mutual information after decorrelation.
    pub mutual_information: f64,
    /// Analytic entropy sums and feasible points.
    pub construction: f64,
    /// Relative tolerance on Crooks ratios and the Jarzynski equality;
    /// absolute on the KL identity.
    pub fluctuation: f64,
    pub symmetry: f64,
    pub rate: f64,
    pub reversal: f64,
    /// Minimum distance a shuffled reversal must miss by.
    pub shuffle: f64,
    /// Fraction of random searches that must find a decrease.
    pub search_success: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            balance: 1e-9,
            mutual_information: 1e-10,
            construction: 1e-9,
            fluctuation: 1e-9,
            symmetry: 1e-12,
            rate: 1e-6,
            reversal: 1e-9,
            shuffle: 0.01,
            search_success: 0.95,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub experiment: Option<String>,
    pub seed: u64,
    pub trials: usize,
    pub dims: (usize, usize),
    pub epsilon: f64,
    pub beta: f64,
    pub theta: f64,
    pub restarts: usize,
    pub max_iterations: usize,
    pub collisions: usize,
    pub system_population: f64,
    pub ancilla_population: f64,
    pub couplings: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub times: Vec<f64>,
    pub omega_s: f64,
    pub omega_r: f64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub tolerances: Tolerances,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            experiment: None,
            seed: 0,
            trials: 100,
            dims: (2, 2),
            epsilon: 0.1,
            beta: 1.0,
            theta: FRAC_PI_4,
            restarts: 4,
            max_iterations: 3000,
            collisions: 8,
            system_population: 0.0,
            ancilla_population: 0.8,
            couplings: vec![0.0, 0.05, 0.1],
            epsilons: vec![0.0, 0.1, 0.3],
            times: vec![0.5, 1.0, 2.0],
            omega_s: 1.0,
            omega_r: 1.0,
            format: OutputFormat::Json,
            out: None,
            tolerances: Tolerances::default(),
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    let x: f64 = value.parse().map_err(|_| ConfigError::invalid(key, format!("`{value}` is not a number")))?;
    if !x.is_finite() {
        return Err(ConfigError::invalid(key, "must be finite"));
    }
    Ok(x)
}

fn parse_usize(key: &str, value: &str) -> Result<usize, ConfigError> {
    value.parse().map_err(|_| ConfigError::invalid(key, format!("`{value}` is not a non-negative integer")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    let items: Vec<f64> = value.split(',').map(|v| parse_f64(key, v.trim())).collect::<Result<_, _>>()?;
    Ok(items)
}

fn parse_dims(value: &str) -> Result<(usize, usize), ConfigError> {
    let (a, b) = value
        .split_once(['x', 'X'])
        .ok_or_else(|| ConfigError::invalid("dims", format!("`{value}` is not of the form <d_S>x<d_R>")))?;
    Ok((parse_usize("dims", a.trim())?, parse_usize("dims", b.trim())?))
}

impl ExperimentConfig {
    /// Sets one key from its text value. Range checks happen in
    /// [`ExperimentConfig::validate`].
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        let t = &mut self.tolerances;
        match key {
            "schema_version" => {
                let v = parse_usize(key, value)?;
                if v != SCHEMA_VERSION as usize {
                    return Err(ConfigError::invalid(key, format!("unsupported version {v}, expected {SCHEMA_VERSION}")));
                }
            }
            "experiment" => self.experiment = Some(value.to_string()),
            "seed" => self.seed = value.parse().map_err(|_| ConfigError::invalid(key, format!("`{value}` is not a u64")))?,
            "trials" => self.trials = parse_usize(key, value)?,
            "dims" => self.dims = parse_dims(value)?,
            "epsilon" => self.epsilon = parse_f64(key, value)?,
            "beta" => self.beta = parse_f64(key, value)?,
            "theta" => self.theta = parse_f64(key, value)?,
            "restarts" => self.restarts = parse_usize(key, value)?,
            "max_iterations" => self.max_iterations = parse_usize(key, value)?,
            "collisions" => self.collisions = parse_usize(key, value)?,
            "system_population" => self.system_population = parse_f64(key, value)?,
            "ancilla_population" => self.ancilla_population = parse_f64(key, value)?,
            "couplings" => self.couplings = parse_list(key, value)?,
            "epsilons" => self.epsilons = parse_list(key, value)?,
            "times" => self.times = parse_list(key, value)?,
            "omega_s" => self.omega_s = parse_f64(key, value)?,
            "omega_r" => self.omega_r = parse_f64(key, value)?,
            "format" => {
                self.format = match value {
                    "json" => OutputFormat::Json,
                    "csv" => OutputFormat::Csv,
                    _ => return Err(ConfigError::invalid(key, format!("`{value}` is not csv or json"))),
                }
            }
            "out" => self.out = Some(PathBuf::from(value)),
            "tol_balance" => t.balance = parse_f64(key, value)?,
            "tol_mutual_information" => t.mutual_information = parse_f64(key, value)?,
            "tol_construction" => t.construction = parse_f64(key, value)?,
            "tol_fluctuation" => t.fluctuation = parse_f64(key, value)?,
            "tol_symmetry" => t.symmetry = parse_f64(key, value)?,
            "tol_rate" => t.rate = parse_f64(key, value)?,
            "tol_reversal" => t.reversal = parse_f64(key, value)?,
            "tol_shuffle" => t.shuffle = parse_f64(key, value)?,
            "tol_search_success" => t.search_success = parse_f64(key, value)?,
            _ => return Err(ConfigError::UnknownKey { key: key.to_string() }),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let unit = |key: &str, x: f64| {
            if (0.0..=1.0).contains(&x) {
                Ok(())
            } else {
                Err(ConfigError::invalid(key, format!("{x} is outside [0, 1]")))
            }
        };
        unit("epsilon", self.epsilon)?;
        unit("system_population", self.system_population)?;
        unit("ancilla_population", self.ancilla_population)?;
        for &e in &self.epsilons {
            unit("epsilons", e)?;
        }
        if self.beta <= 0.0 {
            return Err(ConfigError::invalid("beta", format!("{} must be positive", self.beta)));
        }
        let (ds, dr) = self.dims;
        if ds < 2 || dr < 2 {
            return Err(ConfigError::invalid("dims", "each factor must be at least 2"));
        }
        if ds.saturating_mul(dr) > JOINT_DIM_CAP {
            return Err(ConfigError::invalid("dims", format!("joint dimension {} exceeds cap {JOINT_DIM_CAP}", ds * dr)));
        }
        if self.trials == 0 || self.trials > MAX_TRIALS {
            return Err(ConfigError::invalid("trials", format!("must be in 1..={MAX_TRIALS}")));
        }
        if self.restarts == 0 {
            return Err(ConfigError::invalid("restarts", "must be at least 1"));
        }
        if self.max_iterations == 0 {
            return Err(ConfigError::invalid("max_iterations", "must be at least 1"));
        }
        if !(2..=MAX_COLLISIONS).contains(&self.collisions) {
            return Err(ConfigError::invalid("collisions", format!("must be in 2..={MAX_COLLISIONS}")));
        }
        for (key, list) in [("couplings", &self.couplings), ("epsilons", &self.epsilons), ("times", &self.times)] {
            if list.is_empty() {
                return Err(ConfigError::invalid(key, "must not be empty"));
            }
        }
        let t = &self.tolerances;
        for (key, x) in [
            ("tol_balance", t.balance),
            ("tol_mutual_information", t.mutual_information),
            ("tol_construction", t.construction),
            ("tol_fluctuation", t.fluctuation),
            ("tol_symmetry", t.symmetry),
            ("tol_rate", t.rate),
            ("tol_reversal", t.reversal),
            ("tol_shuffle", t.shuffle),
        ] {
            if x < 0.0 {
                return Err(ConfigError::invalid(key, "must be non-negative"));
            }
        }
        unit("tol_search_success", t.search_success)?;
        Ok(())
    }

    /// Cells in the weak-coupling sweep grid.
    pub fn planned_cells(&self) -> usize {
        self.couplings.len() * self.epsilons.len() * self.times.len()
    }
}

/// `(key, value)` pairs in file order.
pub fn parse_key_values(raw: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(ConfigError::Syntax { line: i + 1 });
        }
        if pairs.iter().any(|(k, _)| k == key) {
            return Err(ConfigError::DuplicateKey { key: key.to_string() });
        }
        pairs.push((key.to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

/// Parses, defaults and range-checks a config file.
pub fn validate_config(raw: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut config = ExperimentConfig::default();
    for (key, value) in parse_key_values(raw)? {
        config.apply(&key, &value)?;
    }
    config.validate()?;
    Ok(config)
}
