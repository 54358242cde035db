//! Numeric thresholds and run settings.
//!
//! Every threshold the numeric layers use lives in [`Tolerances`], so a report
//! can always be traced back to the exact settings that produced it.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::real::Precision;

/// Environment variable naming a TOML file with default [`RunConfig`] values.
pub const CONFIG_ENV: &str = "TWOBRIDGE_CONFIG";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("unknown tolerance `{0}`")]
    UnknownName(String),
    #[error("tolerance `{name}` needs a positive value, got `{value}`")]
    BadValue { name: String, value: String },
    #[error("expected NAME=VALUE, got `{0}`")]
    Syntax(String),
    #[error("trials must be at least 1")]
    ZeroTrials,
    #[error("reading config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parsing config {path}: {message}")]
    Parse { path: String, message: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Character residual bound, relative to the fiber polynomial's largest
    /// coefficient.
    pub character_residual: f64,
    /// Lower bound on |w11|, |v11 φ_v|, |∂φ_w/∂u|, |∂φ_w/∂m| at a character.
    pub degeneracy: f64,
    /// Minimum pairwise distance between fiber roots.
    pub root_gap: f64,
    /// Minimum |constant term| of the fiber polynomial.
    pub constant_term: f64,
    /// Minimum |c ∓ 2| for a trace value.
    pub trace_exclusion: f64,
    /// Leading coefficient below this (relative to the largest) is a degree drop.
    pub leading_coefficient: f64,
    /// Root finder backward error bound.
    pub root_backward_error: f64,
    /// Singular values below this times the largest count as zero.
    pub rank_relative: f64,
    /// Transition determinants below this (Hadamard-normalized) are singular.
    pub singular_transition: f64,
    /// Pass threshold for |Σ 1/T| / Σ |1/T| on hyperbolic knots.
    pub vanishing: f64,
    /// Pass threshold for |Σ 1/T + 2q| / |2q| on torus knots.
    pub torus_sum: f64,
    /// Pass threshold for ||oracle| / |formula| - 1|.
    pub oracle_agreement: f64,
    /// Inner radius of the sampling annulus for `d`.
    pub annulus_inner: f64,
    /// Outer radius of the sampling annulus for `d`.
    pub annulus_outer: f64,
    /// Rejection bound on |d^2 - 1| while sampling.
    pub unit_exclusion: f64,
    /// Redraw budget for one generic sample.
    pub max_resamples: usize,
    /// Redraw budget per trial when a sampled fiber later proves degenerate.
    pub trial_retries: usize,
    /// Iteration budget of the simultaneous root iteration.
    pub max_root_iterations: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            character_residual: 1e-10,
            degeneracy: 1e-8,
            root_gap: 1e-6,
            constant_term: 1e-10,
            trace_exclusion: 1e-8,
            leading_coefficient: 1e-12,
            root_backward_error: 1e-10,
            rank_relative: 1e-8,
            singular_transition: 1e-12,
            vanishing: 1e-7,
            torus_sum: 1e-8,
            oracle_agreement: 1e-8,
            annulus_inner: 1.2,
            annulus_outer: 4.0,
            unit_exclusion: 1e-3,
            max_resamples: 100,
            trial_retries: 10,
            max_root_iterations: 500,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 18] = [
        "character_residual",
        "degeneracy",
        "root_gap",
        "constant_term",
        "trace_exclusion",
        "leading_coefficient",
        "root_backward_error",
        "rank_relative",
        "singular_transition",
        "vanishing",
        "torus_sum",
        "oracle_agreement",
        "annulus_inner",
        "annulus_outer",
        "unit_exclusion",
        "max_resamples",
        "trial_retries",
        "max_root_iterations",
    ];

    /// Sets one value by name. Counts must be positive integers; every other
    /// value must be a positive finite real.
    pub fn set(&mut self, name: &str, value: &str) -> Result<(), ConfigError> {
        let bad = || ConfigError::BadValue {
            name: name.to_string(),
            value: value.to_string(),
        };
        let real = || -> Result<f64, ConfigError> {
            match value.trim().parse::<f64>() {
                Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
                _ => Err(bad()),
            }
        };
        let count = || -> Result<usize, ConfigError> {
            match value.trim().parse::<usize>() {
                Ok(n) if n > 0 => Ok(n),
                _ => Err(bad()),
            }
        };
        match name {
            "character_residual" => self.character_residual = real()?,
            "degeneracy" => self.degeneracy = real()?,
            "root_gap" => self.root_gap = real()?,
            "constant_term" => self.constant_term = real()?,
            "trace_exclusion" => self.trace_exclusion = real()?,
            "leading_coefficient" => self.leading_coefficient = real()?,
            "root_backward_error" => self.root_backward_error = real()?,
            "rank_relative" => self.rank_relative = real()?,
            "singular_transition" => self.singular_transition = real()?,
            "vanishing" => self.vanishing = real()?,
            "torus_sum" => self.torus_sum = real()?,
            "oracle_agreement" => self.oracle_agreement = real()?,
            "annulus_inner" => self.annulus_inner = real()?,
            "annulus_outer" => self.annulus_outer = real()?,
            "unit_exclusion" => self.unit_exclusion = real()?,
            "max_resamples" => self.max_resamples = count()?,
            "trial_retries" => self.trial_retries = count()?,
            "max_root_iterations" => self.max_root_iterations = count()?,
            other => return Err(ConfigError::UnknownName(other.to_string())),
        }
        Ok(())
    }

    /// Applies a `NAME=VALUE` override.
    pub fn apply_override(&mut self, arg: &str) -> Result<(), ConfigError> {
        let (name, value) = arg
            .split_once('=')
            .ok_or_else(|| ConfigError::Syntax(arg.to_string()))?;
        self.set(name.trim(), value)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let reals = [
            ("character_residual", self.character_residual),
            ("degeneracy", self.degeneracy),
            ("root_gap", self.root_gap),
            ("constant_term", self.constant_term),
            ("trace_exclusion", self.trace_exclusion),
            ("leading_coefficient", self.leading_coefficient),
            ("root_backward_error", self.root_backward_error),
            ("rank_relative", self.rank_relative),
            ("singular_transition", self.singular_transition),
            ("vanishing", self.vanishing),
            ("torus_sum", self.torus_sum),
            ("oracle_agreement", self.oracle_agreement),
            ("annulus_inner", self.annulus_inner),
            ("annulus_outer", self.annulus_outer),
            ("unit_exclusion", self.unit_exclusion),
        ];
        for (name, value) in reals {
            if !(value.is_finite() && value > 0.0) {
                return Err(ConfigError::BadValue {
                    name: name.to_string(),
                    value: value.to_string(),
                });
            }
        }
        if self.annulus_outer <= self.annulus_inner {
            return Err(ConfigError::BadValue {
                name: "annulus_outer".to_string(),
                value: self.annulus_outer.to_string(),
            });
        }
        for (name, value) in [
            ("max_resamples", self.max_resamples),
            ("trial_retries", self.trial_retries),
            ("max_root_iterations", self.max_root_iterations),
        ] {
            if value == 0 {
                return Err(ConfigError::BadValue {
                    name: name.to_string(),
                    value: "0".to_string(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Text,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "text" => Ok(OutputFormat::Text),
            other => Err(format!("unknown format `{other}` (expected json|csv|text)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub tolerances: Tolerances,
    pub seed: u64,
    pub trials: usize,
    pub precision: Precision,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tolerances: Tolerances::default(),
            seed: 1,
            trials: 20,
            precision: Precision::Standard,
            format: OutputFormat::Json,
        }
    }
}

impl RunConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let config: RunConfig = toml::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Defaults, or the file named by [`CONFIG_ENV`] when it is set.
    pub fn from_env() -> Result<Self, ConfigError> {
        match std::env::var_os(CONFIG_ENV) {
            Some(path) if !path.is_empty() => RunConfig::from_toml_file(Path::new(&path)),
            _ => Ok(RunConfig::default()),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.trials == 0 {
            return Err(ConfigError::ZeroTrials);
        }
        self.tolerances.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_by_name() {
        let mut tol = Tolerances::default();
        tol.apply_override("root_gap=1e-5").unwrap();
        assert_eq!(tol.root_gap, 1e-5);
        tol.apply_override("max_resamples=7").unwrap();
        assert_eq!(tol.max_resamples, 7);
        assert!(matches!(tol.apply_override("nope=1"), Err(ConfigError::UnknownName(_))));
        assert!(matches!(tol.apply_override("root_gap=-1"), Err(ConfigError::BadValue { .. })));
        assert!(matches!(tol.apply_override("root_gap=0"), Err(ConfigError::BadValue { .. })));
        assert!(matches!(tol.apply_override("root_gap"), Err(ConfigError::Syntax(_))));
    }

    #[test]
    fn every_name_is_settable() {
        for name in Tolerances::NAMES {
            let mut tol = Tolerances::default();
            tol.set(name, "3").unwrap();
        }
    }

    #[test]
    fn toml_file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.toml");
        std::fs::write(&path, "seed = 9\ntrials = 3\nprecision = \"extended\"\n[tolerances]\nroot_gap = 1e-7\n").unwrap();
        let cfg = RunConfig::from_toml_file(&path).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.trials, 3);
        assert_eq!(cfg.precision, Precision::Extended);
        assert_eq!(cfg.tolerances.root_gap, 1e-7);
        assert_eq!(cfg.tolerances.degeneracy, 1e-8);

        std::fs::write(&path, "trials = 0\n").unwrap();
        assert!(matches!(RunConfig::from_toml_file(&path), Err(ConfigError::ZeroTrials)));
    }
}
