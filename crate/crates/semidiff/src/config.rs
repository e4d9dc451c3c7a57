//! Run configuration: built-in defaults, then a flat TOML file, then
//! command-line flags. The resolved result is written next to the outputs.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use semidiff_core::attack::{AttackConfig, FeatureBounds, ProbeMode, StepMode};
use serde::{Deserialize, Serialize};

use crate::data::Normalization;
use crate::scenario::{TargetSpec, DEFAULT_C, DEFAULT_N, DEFAULT_SEED};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("reading config {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("config {path}: {source}")]
    Parse {
        path: String,
        source: toml::de::Error,
    },
    #[error("invalid setting `{key}`: {message}")]
    Invalid { key: &'static str, message: String },
}

fn invalid(key: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key,
        message: message.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum StepModeArg {
    Backtracking,
    /// `η = −DG / curvature_bound`
    Fixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeArg {
    Coordinate,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Units {
    Raw,
    Normalized,
}

/// Every overridable setting. Used both as the config-file schema and as
/// the command-line flags; absent values fall through to the next layer.
#[derive(Clone, Debug, Default, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Feature CSV (`lateral_velocity,space_headway,label`); synthetic data when absent
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Seed for synthetic data and random directions
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Synthetic sample size
    #[arg(long)]
    pub n: Option<usize>,
    /// SVM slack penalty C
    #[arg(long)]
    pub penalty: Option<f64>,
    /// Ridge on the bias and slack variables
    #[arg(long)]
    pub ridge: Option<f64>,
    /// `equal-weights`, `pristine` or `w1,w2`
    #[arg(long)]
    pub target: Option<String>,
    /// Perturbation budget, in normalized feature units
    #[arg(long)]
    pub delta: Option<f64>,
    /// `v_lo,v_hi,h_lo,h_hi`
    #[arg(long, allow_hyphen_values = true)]
    pub bounds: Option<String>,
    /// Units of `bounds`
    #[arg(long, value_enum)]
    pub bounds_units: Option<Units>,
    #[arg(long, value_enum)]
    pub step_mode: Option<StepModeArg>,
    /// Curvature estimate for fixed steps
    #[arg(long)]
    pub curvature_bound: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Stop when one iteration lowers G by less than this
    #[arg(long)]
    pub tol_improve: Option<f64>,
    /// First trial step of backtracking
    #[arg(long)]
    pub max_step: Option<f64>,
    /// Random candidate directions per point
    #[arg(long)]
    pub random_dirs: Option<usize>,
    #[arg(long, value_enum)]
    pub probe: Option<ProbeArg>,
    /// Sensitivity-check trials
    #[arg(long)]
    pub trials: Option<usize>,
    /// Force a LICQ failure every k-th sensitivity trial (0 = never)
    #[arg(long)]
    pub licq_failure_every: Option<usize>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($f:ident),*) => {
        Settings { $($f: $top.$f.or($base.$f)),* }
    };
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        toml::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.display().to_string(),
            source,
        })
    }

    /// `top` wins wherever it is set.
    pub fn overlay(self, top: Settings) -> Settings {
        overlay!(
            self, top, data, seed, out, n, penalty, ridge, target, delta, bounds, bounds_units,
            step_mode, curvature_bound, max_iters, tol_improve, max_step, random_dirs, probe,
            trials, licq_failure_every
        )
    }
}

/// Fully resolved settings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    pub seed: u64,
    pub out: PathBuf,
    pub n: usize,
    pub penalty: f64,
    pub ridge: f64,
    pub target: String,
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<[f64; 4]>,
    pub bounds_units: Units,
    pub step_mode: StepModeArg,
    pub curvature_bound: f64,
    pub max_iters: usize,
    pub tol_improve: f64,
    pub max_step: f64,
    pub random_dirs: usize,
    pub probe: ProbeArg,
    pub trials: usize,
    pub licq_failure_every: usize,
}

pub const DEFAULT_DELTA: f64 = 2.0;
/// Raw-unit box: lateral velocity in m/s, headway in m.
pub const DEFAULT_BOUNDS: [f64; 4] = [-3.0, 3.0, 0.0, 120.0];

fn parse_bounds(s: &str) -> Result<[f64; 4], ConfigError> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| invalid("bounds", format!("`{s}`: {e}")))?;
    let b: [f64; 4] = vals
        .try_into()
        .map_err(|_| invalid("bounds", format!("`{s}`: expected v_lo,v_hi,h_lo,h_hi")))?;
    if !(b[0] <= b[1] && b[2] <= b[3]) {
        return Err(invalid("bounds", format!("`{s}`: lower bound above upper bound")));
    }
    Ok(b)
}

impl RunConfig {
    pub fn resolve(file: Option<&Path>, cli: Settings) -> Result<Self, ConfigError> {
        let base = match file {
            Some(p) => Settings::from_file(p)?,
            None => Settings::default(),
        };
        let s = base.overlay(cli);
        let bounds = match s.bounds.as_deref() {
            None => Some(DEFAULT_BOUNDS),
            Some("none") => None,
            Some(b) => Some(parse_bounds(b)?),
        };
        let cfg = RunConfig {
            data: s.data,
            seed: s.seed.unwrap_or(DEFAULT_SEED),
            out: s.out.unwrap_or_else(|| PathBuf::from("semidiff-out")),
            n: s.n.unwrap_or(DEFAULT_N),
            penalty: s.penalty.unwrap_or(DEFAULT_C),
            ridge: s.ridge.unwrap_or(semidiff_core::SvmModel::DEFAULT_RIDGE),
            target: s.target.unwrap_or_else(|| "equal-weights".into()),
            delta: s.delta.unwrap_or(DEFAULT_DELTA),
            bounds,
            bounds_units: s.bounds_units.unwrap_or(Units::Raw),
            step_mode: s.step_mode.unwrap_or(StepModeArg::Backtracking),
            curvature_bound: s.curvature_bound.unwrap_or(1.0),
            max_iters: s.max_iters.unwrap_or(200),
            tol_improve: s.tol_improve.unwrap_or(1e-12),
            max_step: s.max_step.unwrap_or(0.5),
            random_dirs: s.random_dirs.unwrap_or(8),
            probe: s.probe.unwrap_or(ProbeArg::Coordinate),
            trials: s.trials.unwrap_or(200),
            licq_failure_every: s.licq_failure_every.unwrap_or(0),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if !(self.delta >= 0.0) {
            return Err(invalid("delta", "must be nonnegative"));
        }
        if !(self.penalty > 0.0) {
            return Err(invalid("penalty", "must be positive"));
        }
        if !(self.ridge >= 0.0) {
            return Err(invalid("ridge", "must be nonnegative"));
        }
        if !(self.curvature_bound > 0.0) {
            return Err(invalid("curvature_bound", "must be positive"));
        }
        if !(self.max_step > 0.0) {
            return Err(invalid("max_step", "must be positive"));
        }
        if !(self.tol_improve >= 0.0) {
            return Err(invalid("tol_improve", "must be nonnegative"));
        }
        self.target_spec()?;
        Ok(())
    }

    pub fn target_spec(&self) -> Result<TargetSpec, ConfigError> {
        self.target.parse().map_err(|e| invalid("target", e))
    }

    /// Attack settings in normalized feature space.
    pub fn attack_config(&self, stats: &Normalization) -> AttackConfig {
        let bounds = self.bounds.map(|b| {
            let (lo, hi) = match self.bounds_units {
                Units::Raw => stats.map_bounds(&[b[0], b[2]], &[b[1], b[3]]),
                Units::Normalized => ([b[0], b[2]], [b[1], b[3]]),
            };
            FeatureBounds {
                lo: lo.to_vec(),
                hi: hi.to_vec(),
            }
        });
        AttackConfig {
            delta: self.delta,
            bounds,
            curvature_bound: self.curvature_bound,
            step_mode: match self.step_mode {
                StepModeArg::Backtracking => StepMode::Backtracking,
                StepModeArg::Fixed => StepMode::FixedCurvature,
            },
            max_step: self.max_step,
            num_random_dirs: self.random_dirs,
            probe: match self.probe {
                ProbeArg::Coordinate => ProbeMode::CoordinateBest,
                ProbeArg::Random => ProbeMode::Random,
            },
            tol_improve: self.tol_improve,
            max_iters: self.max_iters,
            seed: self.seed,
            ..AttackConfig::default()
        }
    }

    pub fn write_resolved(&self, dir: &Path) -> anyhow::Result<PathBuf> {
        let path = dir.join("config.resolved.toml");
        std::fs::write(&path, toml::to_string(self)?)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "delta = 0.5\nseed = 3\nbounds = \"-2,2,5,90\"\n").unwrap();
        let cli = Settings {
            seed: Some(9),
            ..Settings::default()
        };
        let cfg = RunConfig::resolve(Some(&path), cli).unwrap();
        assert_eq!(cfg.delta, 0.5);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.bounds, Some([-2.0, 2.0, 5.0, 90.0]));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "delta = 0.5\nlearning_rate = 3\n").unwrap();
        assert!(matches!(
            RunConfig::resolve(Some(&path), Settings::default()),
            Err(ConfigError::Parse { .. })
        ));
    }

    #[test]
    fn malformed_bounds_are_rejected() {
        for b in ["1,2,3", "2,1,0,5", "a,b,c,d"] {
            let cli = Settings {
                bounds: Some(b.into()),
                ..Settings::default()
            };
            assert!(matches!(RunConfig::resolve(None, cli), Err(ConfigError::Invalid { key: "bounds", .. })));
        }
    }

    #[test]
    fn resolved_config_round_trips_through_the_file_schema() {
        let cfg = RunConfig::resolve(None, Settings::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = cfg.write_resolved(dir.path()).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        // bounds serialize as an array, which the flat schema takes as a string
        let text = text.replace("bounds = [-3.0, 3.0, 0.0, 120.0]", "bounds = \"-3,3,0,120\"");
        std::fs::write(&path, text).unwrap();
        let again = RunConfig::resolve(Some(&path), Settings::default()).unwrap();
        assert_eq!(cfg, again);
    }
}
