//! Run configuration: a JSON document describing the physical parameters,
//! the schemes to evaluate, the distance grid, and where results go.
//! Every field has a default, so an empty object `{}` is a valid config
//! and equals the built-in benchmark setup.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use decoy_pdc::{
    APolicy, MuPolicy, SchemeKind, SchemeSpec, SearchSettings, SystemParams, YieldConvention,
};

/// Inclusive distance grid in km.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DistanceGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for DistanceGrid {
    fn default() -> Self {
        Self {
            start: 0.0,
            stop: 160.0,
            step: 1.0,
        }
    }
}

impl DistanceGrid {
    pub fn expand(&self) -> Vec<f64> {
        // small forward slack so stop lands on the grid despite rounding
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }

    fn validate(&self) -> Result<(), String> {
        let ok = self.start >= 0.0
            && self.stop >= self.start
            && self.step > 0.0
            && [self.start, self.stop, self.step].iter().all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err("distance_grid: need 0 <= start <= stop and step > 0".to_string())
        }
    }
}

/// One scheme to run. Without an explicit `mu_policy` the scheme gets its
/// usual intensity rule: fixed mu = 0.1 for `previous_fixed_mu`, the
/// configured coupling for everything else.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeEntry {
    pub kind: SchemeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_policy: Option<MuPolicy>,
}

impl SchemeEntry {
    pub fn resolve(&self, a_policy: APolicy) -> SchemeSpec {
        match self.mu_policy {
            Some(mu_policy) => SchemeSpec {
                kind: self.kind,
                mu_policy,
            },
            None => SchemeSpec::for_kind(self.kind, a_policy),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub format: OutputFormat,
    /// Output file; stdout when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            format: OutputFormat::Csv,
            path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub params: SystemParams,
    pub schemes: Vec<SchemeEntry>,
    pub distance_grid: DistanceGrid,
    pub a_policy: APolicy,
    pub nontriggered_yield_convention: YieldConvention,
    pub search: SearchSettings,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        let schemes = [
            SchemeKind::Ideal,
            SchemeKind::NewBoth,
            SchemeKind::PreviousFixedMu,
        ]
        .into_iter()
        .map(|kind| SchemeEntry {
            kind,
            mu_policy: None,
        })
        .collect();
        Self {
            params: SystemParams::gys(),
            schemes,
            distance_grid: DistanceGrid::default(),
            a_policy: APolicy::Strict,
            nontriggered_yield_convention: YieldConvention::Consistent,
            search: SearchSettings::default(),
            output: OutputConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        self.params.validate().map_err(|e| e.to_string())?;
        if self.schemes.is_empty() {
            return Err("schemes: need at least one scheme".to_string());
        }
        self.distance_grid.validate()?;
        self.search.validate().map_err(|e| e.to_string())?;
        Ok(())
    }

    /// Scheme specs with the config's coupling policy filled in where the
    /// entry leaves the intensity rule open.
    pub fn resolved_schemes(&self) -> Vec<SchemeSpec> {
        self.schemes.iter().map(|s| s.resolve(self.a_policy)).collect()
    }

    /// Spec for one kind as this config would run it: an explicit
    /// per-scheme `mu_policy` wins over the kind's default rule.
    pub fn spec_for(&self, kind: SchemeKind) -> SchemeSpec {
        self.schemes
            .iter()
            .find(|s| s.kind == kind)
            .map(|s| s.resolve(self.a_policy))
            .unwrap_or_else(|| SchemeSpec::for_kind(kind, self.a_policy))
    }
}

#[derive(Debug)]
pub enum ConfigError {
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    Invalid(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io { path, source } => {
                write!(f, "cannot read config {}: {source}", path.display())
            }
            ConfigError::Parse { path, source } => {
                write!(f, "cannot parse config {}: {source}", path.display())
            }
            ConfigError::Invalid(msg) => write!(f, "invalid config: {msg}"),
        }
    }
}

impl std::error::Error for ConfigError {}

pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let config: RunConfig = serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    config.validate().map_err(ConfigError::Invalid)?;
    Ok(config)
}
