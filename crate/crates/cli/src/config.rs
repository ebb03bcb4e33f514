//! JSON experiment configuration.
//!
//! ```json
//! {
//!   "system": { "M": 500, "K": 20, "rho_db": 10, "tau2": 0.0 },
//!   "profile": {
//!     "amp_tx":   { "mean": 0, "variance": 0.5, "low": -1,  "high": 1 },
//!     "amp_rx":   { "mean": 0, "variance": 0.5, "low": -1,  "high": 1 },
//!     "phase_tx": { "mean": 0, "variance": 0.5, "low": -20, "high": 20 },
//!     "phase_rx": { "mean": 0, "variance": 0.5, "low": -20, "high": 20 },
//!     "amplitude_domain": "db", "phase_variance_unit": "rad2"
//!   },
//!   "sweep": { "variable": "rho_db", "values": [0, 10, 20] },
//!   "schemes": ["mrt", "zf"], "trials": 2000, "master_seed": 1,
//!   "normalization": "analytic", "output": "sweep.csv"
//! }
//! ```
//!
//! Unknown keys are rejected at every level. Every error carries the line
//! and column of the offending value.

use std::fmt;
use std::path::{Path, PathBuf};

use mimo_recip_core::montecarlo::{SweepSpec, SweepVariable};
use mimo_recip_core::precoding::{Normalization, Scheme};
use mimo_recip_core::rf::{AmplitudeDomain, ErrorComponent, PhaseVarianceUnit, RfErrorProfile, Side, SystemConfig};
use serde::Deserialize;

pub const DEFAULT_TRIALS: usize = 2000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub source: String,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: {}", self.source, self.line, self.column, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "K")]
    k: usize,
    rho_db: f64,
    #[serde(default)]
    tau2: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    mean: f64,
    variance: f64,
    low: f64,
    high: f64,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawDomain {
    #[default]
    Db,
    Linear,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawPhaseUnit {
    #[default]
    Rad2,
    Deg2,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    amp_tx: RawComponent,
    amp_rx: RawComponent,
    phase_tx: RawComponent,
    phase_rx: RawComponent,
    #[serde(default)]
    amplitude_domain: RawDomain,
    #[serde(default)]
    phase_variance_unit: RawPhaseUnit,
}

#[derive(Debug, Clone, Copy, Deserialize)]
enum RawVariable {
    #[serde(rename = "amp_variance")]
    AmpVariance,
    #[serde(rename = "phase_variance")]
    PhaseVariance,
    #[serde(rename = "both_variances")]
    BothVariances,
    M,
    #[serde(rename = "rho_db")]
    RhoDb,
    #[serde(rename = "tau2")]
    Tau2,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    variable: RawVariable,
    values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawScheme {
    Mrt,
    Zf,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawNormalization {
    #[default]
    Analytic,
    Empirical,
}

fn default_schemes() -> Vec<RawScheme> {
    vec![RawScheme::Mrt, RawScheme::Zf]
}

fn default_trials() -> usize {
    DEFAULT_TRIALS
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    system: RawSystem,
    profile: RawProfile,
    sweep: RawSweep,
    #[serde(default = "default_schemes")]
    schemes: Vec<RawScheme>,
    #[serde(default = "default_trials")]
    trials: usize,
    #[serde(default = "default_seed")]
    master_seed: u64,
    #[serde(default)]
    normalization: RawNormalization,
    #[serde(default)]
    output: Option<PathBuf>,
}

/// Validated experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub system: SystemConfig,
    pub profile: RfErrorProfile,
    pub sweep: SweepSpec,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            source: name.clone(),
            line: 0,
            column: 0,
            message: format!("cannot read config: {e}"),
        })?;
        Self::parse(&text, &name)
    }

    /// Parses and validates `text`; `source` only labels error messages.
    pub fn parse(text: &str, source: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| ConfigError {
            source: source.to_string(),
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        })?;
        let fail = |path: &[&str], msg: String| {
            let (line, column) = locate(text, path);
            ConfigError {
                source: source.to_string(),
                line,
                column,
                message: format!("{}: {msg}", path.join(".")),
            }
        };

        let s = &raw.system;
        let system = SystemConfig::from_db(s.m, s.k, s.rho_db, s.tau2).map_err(|e| fail(&["system"], e.to_string()))?;

        let comp = |c: RawComponent| ErrorComponent::new(c.mean, c.variance, c.low, c.high);
        let p = &raw.profile;
        let profile = RfErrorProfile {
            amp_tx: comp(p.amp_tx),
            amp_rx: comp(p.amp_rx),
            phase_tx: comp(p.phase_tx),
            phase_rx: comp(p.phase_rx),
            amplitude_domain: match p.amplitude_domain {
                RawDomain::Db => AmplitudeDomain::Db,
                RawDomain::Linear => AmplitudeDomain::Linear,
            },
            phase_variance_unit: match p.phase_variance_unit {
                RawPhaseUnit::Rad2 => PhaseVarianceUnit::Rad2,
                RawPhaseUnit::Deg2 => PhaseVarianceUnit::Deg2,
            },
        };
        for (key, side) in [("amp_tx", Side::Tx), ("amp_rx", Side::Rx)] {
            profile
                .amplitude_law(side)
                .map_err(|e| fail(&["profile", key], e.to_string()))?;
        }
        for (key, side) in [("phase_tx", Side::Tx), ("phase_rx", Side::Rx)] {
            profile.phase_law(side).map_err(|e| fail(&["profile", key], e.to_string()))?;
        }

        let variable = match raw.sweep.variable {
            RawVariable::AmpVariance => SweepVariable::AmpVariance,
            RawVariable::PhaseVariance => SweepVariable::PhaseVariance,
            RawVariable::BothVariances => SweepVariable::BothVariances,
            RawVariable::M => SweepVariable::M,
            RawVariable::RhoDb => SweepVariable::RhoDb,
            RawVariable::Tau2 => SweepVariable::Tau2,
        };
        if raw.sweep.values.is_empty() {
            return Err(fail(&["sweep", "values"], "at least one value is required".into()));
        }
        for &v in &raw.sweep.values {
            variable
                .apply(&system, &profile, v)
                .map_err(|e| fail(&["sweep", "values"], format!("value {v}: {e}")))?;
        }

        if raw.schemes.is_empty() {
            return Err(fail(&["schemes"], "at least one scheme is required".into()));
        }
        let mut schemes = Vec::new();
        for s in &raw.schemes {
            let s = match s {
                RawScheme::Mrt => Scheme::Mrt,
                RawScheme::Zf => Scheme::Zf,
            };
            if schemes.contains(&s) {
                return Err(fail(&["schemes"], format!("duplicate scheme {}", s.name())));
            }
            schemes.push(s);
        }
        if raw.trials < 2 {
            return Err(fail(&["trials"], "at least 2 trials are required".into()));
        }

        Ok(ExperimentConfig {
            system,
            profile,
            sweep: SweepSpec {
                variable,
                values: raw.sweep.values,
                schemes,
                trials: raw.trials,
                master_seed: raw.master_seed,
                normalization: match raw.normalization {
                    RawNormalization::Analytic => Normalization::Analytic,
                    RawNormalization::Empirical => Normalization::Empirical,
                },
            },
            output: raw.output,
        })
    }
}

/// Drops serde_json's trailing " at line L column C"; the position is reported separately.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

/// Line and column (1-based) of the value at `path`, found by scanning for
/// each quoted key in turn. Falls back to the start of the document.
fn locate(text: &str, path: &[&str]) -> (usize, usize) {
    let mut offset = 0;
    for key in path {
        let needle = format!("\"{key}\"");
        match text[offset..].find(&needle) {
            Some(i) => offset += i,
            None => break,
        }
    }
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = offset - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}
