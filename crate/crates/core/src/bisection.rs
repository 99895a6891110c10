//! Bisection on the deviation level.
//!
//! The smallest attainable deviation is bracketed by `[lower, upper]`, where
//! `upper` is always a level some model attains and `lower` is either the
//! initial bound or a level shown unattainable. Each step tests the midpoint
//! and halves the bracket until it is narrower than `epsilon`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::feasibility::{FeasibilityOutcome, HingeOracle, HingeProblem, HingeWitness, RationalOracle, DEFAULT_DELTA};
use crate::model::{Coefficients, Grid, RationalModel};

/// Decides level feasibility for one model family. Must be monotone: a
/// feasible level stays feasible when raised.
pub trait LevelOracle {
    type Witness: Clone;

    fn check(&mut self, level: f64) -> Result<FeasibilityOutcome<Self::Witness>>;

    /// Bracket used when the configuration leaves the upper bound on auto.
    fn default_bounds(&self) -> (f64, f64);

    /// Grid deviation achieved by a witness.
    fn deviation(&self, witness: &Self::Witness) -> Result<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectionConfig {
    /// Stop once `upper − lower < epsilon`.
    pub epsilon: f64,
    /// Denominator floor for rational models.
    pub delta: f64,
    pub max_iterations: usize,
    pub initial_lower: f64,
    /// `None` takes the oracle's default bound.
    pub initial_upper: Option<f64>,
}

impl Default for BisectionConfig {
    fn default() -> Self {
        BisectionConfig {
            epsilon: 1e-5,
            delta: DEFAULT_DELTA,
            max_iterations: 200,
            initial_lower: 0.0,
            initial_upper: None,
        }
    }
}

impl BisectionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be positive".into()));
        }
        if !(self.initial_lower >= 0.0) || !self.initial_lower.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "initial lower bound must be finite and nonnegative, got {}",
                self.initial_lower
            )));
        }
        if let Some(upper) = self.initial_upper {
            if !upper.is_finite() || !(self.initial_lower < upper) {
                return Err(Error::InvalidConfig(format!(
                    "initial bounds must satisfy lower < upper, got [{}, {upper}]",
                    self.initial_lower
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelRecord {
    pub z: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult<W> {
    /// Witness of the last feasible level, which is `upper`.
    pub witness: W,
    pub lower: f64,
    pub upper: f64,
    pub levels_tried: Vec<LevelRecord>,
    pub grid_max_deviation: f64,
    pub iterations: usize,
}

/// `(0, max f − min f)`: the best constant already attains half the range.
pub fn init_bounds(grid: &Grid) -> (f64, f64) {
    let (lo, hi) = grid.value_range();
    (0.0, hi - lo)
}

/// Runs the level bisection with `oracle`.
pub fn bisect<O: LevelOracle>(oracle: &mut O, config: &BisectionConfig) -> Result<FitResult<O::Witness>> {
    config.validate()?;
    let lower0 = config.initial_lower;
    let upper0 = match config.initial_upper {
        Some(u) => u,
        None => oracle.default_bounds().1.max(lower0),
    };

    let mut levels_tried = Vec::new();
    let first = oracle.check(upper0)?;
    levels_tried.push(LevelRecord {
        z: upper0,
        feasible: first.feasible,
    });
    let mut witness = match first {
        FeasibilityOutcome {
            feasible: true,
            witness: Some(w),
            ..
        } => w,
        _ => return Err(Error::NoFeasibleLevel { upper: upper0 }),
    };

    let (mut lower, mut upper) = (lower0, upper0);
    let mut iterations = 0;
    while upper - lower >= config.epsilon {
        if iterations >= config.max_iterations {
            return Err(Error::IterationLimit {
                limit: config.max_iterations,
            });
        }
        let z = 0.5 * (lower + upper);
        let outcome = oracle.check(z)?;
        iterations += 1;
        log::debug!(
            "iter {iterations:3}  lower {lower:.10}  upper {upper:.10}  z {z:.10}  feasible {}",
            outcome.feasible
        );
        levels_tried.push(LevelRecord {
            z,
            feasible: outcome.feasible,
        });
        match outcome.witness {
            Some(w) if outcome.feasible => {
                upper = z;
                witness = w;
            }
            _ => lower = z,
        }
    }

    let grid_max_deviation = oracle.deviation(&witness)?;
    Ok(FitResult {
        witness,
        lower,
        upper,
        levels_tried,
        grid_max_deviation,
        iterations,
    })
}

/// Best uniform approximation of the grid data by `model`.
pub fn fit_rational(model: &RationalModel, grid: &Grid, config: &BisectionConfig) -> Result<FitResult<Coefficients>> {
    let mut oracle = RationalOracle::new(model, grid, config.delta)?;
    bisect(&mut oracle, config)
}

/// Best knot for a one-knot piecewise linear model with fixed coefficients.
pub fn fit_hinge(problem: &HingeProblem, config: &BisectionConfig) -> Result<FitResult<HingeWitness>> {
    bisect(&mut HingeOracle::new(problem), config)
}
