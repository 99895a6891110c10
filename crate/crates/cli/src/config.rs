//! Run configuration as a single JSON document.

use std::path::{Path, PathBuf};

use ratfit_core::{BasisSet, Builtin, RationalModel, TargetFunction};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetSpec {
    /// A named closed-form target such as `sqrt_abs_shift(0.25)`.
    Builtin(String),
    /// A `t,f` CSV file; relative paths resolve against the config file.
    Csv(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Rational,
    Hinge,
}

/// Fixed coefficients of `a₀ + a₁t + a₂·max{0, t − θ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HingeSpec {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub target: TargetSpec,
    pub interval: (f64, f64),
    #[serde(default = "defaults::grid_size")]
    pub grid_size: usize,
    /// Basis specs such as `"t^2"` or `"hinge(theta1)"`.
    #[serde(default)]
    pub numerator: Vec<String>,
    #[serde(default)]
    pub denominator: Vec<String>,
    /// Knot table referenced as `theta1`, `theta2`, … in the basis specs.
    #[serde(default)]
    pub knots: Vec<f64>,
    #[serde(default = "defaults::epsilon")]
    pub epsilon: f64,
    #[serde(default = "defaults::delta")]
    pub delta: f64,
    #[serde(default = "defaults::rho")]
    pub rho: f64,
    /// Bisection step limit.
    #[serde(default = "defaults::max_iterations")]
    pub max_iterations: usize,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hinge: Option<HingeSpec>,
    /// Output directory, overridden by `--out`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

mod defaults {
    pub fn grid_size() -> usize {
        ratfit_core::model::DEFAULT_GRID_SIZE
    }
    pub fn epsilon() -> f64 {
        1e-5
    }
    pub fn delta() -> f64 {
        ratfit_core::feasibility::DEFAULT_DELTA
    }
    pub fn max_iterations() -> usize {
        200
    }
    pub fn rho() -> f64 {
        ratfit_core::analysis::DEFAULT_RHO
    }
}

/// What a config describes once validated.
#[derive(Debug, Clone)]
pub enum Problem {
    Rational(RationalModel),
    Hinge(HingeSpec),
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    /// Reads a config file and resolves a relative CSV path against its directory.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, CliError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config = Self::from_json(&text)?;
        if let TargetSpec::Csv(csv) = &mut config.target {
            if csv.is_relative() {
                if let Some(dir) = path.parent() {
                    *csv = dir.join(&*csv);
                }
            }
        }
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks scalar settings and builds the model, without touching the target data.
    pub fn validate(&self) -> Result<Problem, CliError> {
        let (c, d) = self.interval;
        if !(c.is_finite() && d.is_finite() && c < d) {
            return Err(CliError::Config(format!("interval must satisfy c < d, got [{c}, {d}]")));
        }
        if self.grid_size < 2 {
            return Err(CliError::Config(format!(
                "grid_size must be at least 2, got {}",
                self.grid_size
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(CliError::Config(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(CliError::Config(format!("delta must be positive, got {}", self.delta)));
        }
        if self.max_iterations == 0 {
            return Err(CliError::Config("max_iterations must be positive".into()));
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(CliError::Config(format!("rho must lie in (0, 1], got {}", self.rho)));
        }
        if let Some(k) = self.knots.iter().find(|k| !k.is_finite()) {
            return Err(CliError::Config(format!("knots must be finite, got {k}")));
        }
        if let TargetSpec::Builtin(name) = &self.target {
            name.parse::<Builtin>()?;
        }
        match self.mode {
            Mode::Rational => {
                if self.hinge.is_some() {
                    return Err(CliError::Config(
                        "hinge coefficients are only used with mode \"hinge\"".into(),
                    ));
                }
                if self.numerator.is_empty() {
                    return Err(CliError::Config("numerator basis is empty".into()));
                }
                let numerator = BasisSet::parse(&self.numerator, &self.knots)?;
                let model = if self.denominator.is_empty() {
                    RationalModel::linear(numerator)
                } else {
                    RationalModel::new(numerator, BasisSet::parse(&self.denominator, &self.knots)?)?
                };
                Ok(Problem::Rational(model))
            }
            Mode::Hinge => {
                if !self.numerator.is_empty() || !self.denominator.is_empty() {
                    return Err(CliError::Config("mode \"hinge\" takes no basis lists".into()));
                }
                let h = self
                    .hinge
                    .ok_or_else(|| CliError::Config("mode \"hinge\" needs hinge coefficients a0, a1, a2".into()))?;
                if !(h.a0.is_finite() && h.a1.is_finite() && h.a2.is_finite()) || h.a2 == 0.0 {
                    return Err(CliError::Config("hinge coefficients must be finite with a2 ≠ 0".into()));
                }
                Ok(Problem::Hinge(h))
            }
        }
    }

    pub fn target(&self) -> Result<TargetFunction, CliError> {
        Ok(match &self.target {
            TargetSpec::Builtin(name) => TargetFunction::Builtin(name.parse()?),
            TargetSpec::Csv(path) => TargetFunction::from_csv(path)?,
        })
    }
}
