//! Experiment configurations read from JSON files.
//!
//! Every field has a default, so an empty object `{}` is a valid config.
//! Unknown fields are rejected. `workers` never enters the config hash
//! because results do not depend on it.

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use ftinterface::css::{load_family_dir, CodeFamily};
use ftinterface::interface::GammaKnobs;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Fields shared by every command.
pub trait Common {
    fn seed_mut(&mut self) -> &mut u64;
    fn workers(&self) -> Option<usize>;
    /// Rejects empty grids and out-of-range parameters.
    fn check(&self) -> Result<()>;
}

macro_rules! common {
    ($t:ty, $check:expr) => {
        impl Common for $t {
            fn seed_mut(&mut self) -> &mut u64 {
                &mut self.seed
            }
            fn workers(&self) -> Option<usize> {
                self.workers
            }
            fn check(&self) -> Result<()> {
                #[allow(clippy::redundant_closure_call)]
                ($check)(self)
            }
        }
    };
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateConfig {
    /// Built-in family name or a family directory.
    pub family: String,
    pub seed: u64,
    #[serde(skip_serializing)]
    pub workers: Option<usize>,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self { family: "toy".into(), seed: 0, workers: None }
    }
}

common!(ValidateConfig, |_: &ValidateConfig| Ok(()));

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub family: String,
    pub r: usize,
    pub r_prime: usize,
    pub deltas: Vec<f64>,
    pub trials: u64,
    pub mu: f64,
    pub pauli_twirl: bool,
    pub knobs: GammaKnobs,
    pub seed: u64,
    #[serde(skip_serializing)]
    pub workers: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            family: "toy".into(),
            r: 2,
            r_prime: 1,
            deltas: vec![0.02, 0.01, 0.005],
            trials: 10_000,
            mu: 0.5,
            pauli_twirl: true,
            knobs: GammaKnobs::default(),
            seed: 0,
            workers: None,
        }
    }
}

common!(SweepConfig, |c: &SweepConfig| {
    ensure!(!c.deltas.is_empty(), "deltas must be non-empty");
    ensure!(c.deltas.iter().all(|d| (0.0..1.0).contains(d)), "deltas must lie in [0, 1)");
    ensure!(c.trials > 0, "trials must be at least 1");
    ensure!(c.mu > 0.0 && c.mu < 1.0, "mu must lie in (0, 1)");
    Ok(())
});

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AuditConfig {
    pub family: String,
    /// Source levels; empty means every level from 2 up.
    pub r_values: Vec<usize>,
    pub r_prime: usize,
    pub h_values: Vec<usize>,
    pub theta: f64,
    pub knobs: GammaKnobs,
    pub seed: u64,
    #[serde(skip_serializing)]
    pub workers: Option<usize>,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            family: "toy".into(),
            r_values: Vec::new(),
            r_prime: 1,
            h_values: (0..=10).map(|k| 1 << k).collect(),
            theta: 1.0,
            knobs: GammaKnobs::default(),
            seed: 0,
            workers: None,
        }
    }
}

common!(AuditConfig, |c: &AuditConfig| {
    ensure!(!c.h_values.is_empty(), "h_values must be non-empty");
    ensure!(c.h_values.iter().all(|&h| h > 0), "h_values must be positive");
    ensure!(c.theta.is_finite() && c.theta > 0.0, "theta must be positive");
    Ok(())
});

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TreeConfig {
    pub z_values: Vec<usize>,
    pub delta_bars: Vec<f64>,
    pub max_set_size: usize,
    /// Restrict to sets of leaves; otherwise every antichain is checked.
    pub leaves_only: bool,
    /// Monte Carlo cross-check trials per `(z, δ̄)`; zero skips sampling.
    pub mc_trials: u64,
    pub seed: u64,
    #[serde(skip_serializing)]
    pub workers: Option<usize>,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self {
            z_values: vec![2, 3, 4],
            delta_bars: vec![0.3, 0.1, 0.03],
            max_set_size: 3,
            leaves_only: true,
            mc_trials: 100_000,
            seed: 0,
            workers: None,
        }
    }
}

common!(TreeConfig, |c: &TreeConfig| {
    ensure!(!c.z_values.is_empty() && !c.delta_bars.is_empty(), "z_values and delta_bars must be non-empty");
    ensure!(c.z_values.iter().all(|&z| (1..=ftinterface::blocktree::MAX_DEPTH).contains(&z)), "z must lie in 1..={}", ftinterface::blocktree::MAX_DEPTH);
    ensure!(c.delta_bars.iter().all(|d| *d > 0.0 && *d < 1.0), "delta_bars must lie in (0, 1)");
    ensure!(c.max_set_size > 0, "max_set_size must be at least 1");
    Ok(())
});

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct E2eCliConfig {
    pub family: String,
    pub r: usize,
    pub r_prime: usize,
    pub h: usize,
    pub delta: f64,
    pub input_delta: f64,
    pub trials: u64,
    pub theta: f64,
    pub pauli_twirl: bool,
    pub knobs: GammaKnobs,
    /// Also run exhaustive single-qubit input injections at zero noise.
    pub injections: bool,
    pub seed: u64,
    #[serde(skip_serializing)]
    pub workers: Option<usize>,
}

impl Default for E2eCliConfig {
    fn default() -> Self {
        Self {
            family: "toy".into(),
            r: 3,
            r_prime: 2,
            h: 2,
            delta: 0.0,
            input_delta: 0.0,
            trials: 1_000,
            theta: 1.0,
            pauli_twirl: true,
            knobs: GammaKnobs::default(),
            injections: true,
            seed: 0,
            workers: None,
        }
    }
}

common!(E2eCliConfig, |c: &E2eCliConfig| {
    ensure!(c.h > 0, "h must be at least 1");
    ensure!(c.trials > 0, "trials must be at least 1");
    ensure!((0.0..1.0).contains(&c.delta) && (0.0..1.0).contains(&c.input_delta), "noise strengths must lie in [0, 1)");
    ensure!(c.theta.is_finite() && c.theta > 0.0, "theta must be positive");
    Ok(())
});

/// Reads a config file, or the defaults when `path` is `None`.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

/// Where a family comes from.
pub enum FamilySource {
    Builtin(String),
    Dir(PathBuf),
}

impl FamilySource {
    /// Resolves a name to a built-in family or an existing directory.
    pub fn resolve(name: &str, base: Option<&Path>) -> Result<Self> {
        if CodeFamily::builtin(name).is_some() {
            return Ok(Self::Builtin(name.into()));
        }
        let mut path = PathBuf::from(name);
        if path.is_relative() {
            if let Some(dir) = base.and_then(Path::parent) {
                if dir.join(&path).is_dir() {
                    path = dir.join(path);
                }
            }
        }
        if !path.is_dir() {
            bail!("family {name:?} is neither a built-in family nor a directory");
        }
        Ok(Self::Dir(path))
    }

    pub fn load(&self) -> Result<CodeFamily> {
        match self {
            Self::Builtin(name) => Ok(CodeFamily::builtin(name).expect("resolved as builtin")),
            Self::Dir(path) => load_family_dir(path).with_context(|| format!("loading family from {}", path.display())),
        }
    }
}
