//! Approximation targets, discretization grids and generalized rational models.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::basis::{BasisFunction, BasisSet};
use crate::error::{Error, Result};

/// Denominators with magnitude below this are treated as vanishing.
pub const ZERO_DENOMINATOR: f64 = 1e-30;

/// Grid size used when a configuration does not specify one.
pub const DEFAULT_GRID_SIZE: usize = 2001;

/// Closed-form target functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    /// `f(t) = √|t − center|`.
    SqrtAbsShift { center: f64 },
}

impl Builtin {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Builtin::SqrtAbsShift { center } => (t - center).abs().sqrt(),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::SqrtAbsShift { center } => write!(f, "sqrt_abs_shift({center})"),
        }
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::InvalidConfig(format!("unknown builtin target `{s}`"));
        let arg = s
            .strip_prefix("sqrt_abs_shift(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let center: f64 = arg.parse().map_err(|_| bad())?;
        if !center.is_finite() {
            return Err(bad());
        }
        Ok(Builtin::SqrtAbsShift { center })
    }
}

/// The function being approximated.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetFunction {
    Builtin(Builtin),
    /// `(t, f(t))` pairs with strictly increasing, finite abscissae.
    Samples(Vec<(f64, f64)>),
}

impl TargetFunction {
    pub fn sqrt_abs_shift(center: f64) -> Self {
        TargetFunction::Builtin(Builtin::SqrtAbsShift { center })
    }

    /// Validates and wraps sampled data.
    pub fn samples(samples: Vec<(f64, f64)>) -> Result<Self> {
        if let Some((t, f)) = samples.iter().find(|(t, f)| !t.is_finite() || !f.is_finite()) {
            return Err(Error::InvalidSamples(format!("non-finite sample ({t}, {f})")));
        }
        if let Some(w) = samples.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidSamples(format!(
                "abscissae must be strictly increasing ({} then {})",
                w[0].0, w[1].0
            )));
        }
        Ok(TargetFunction::Samples(samples))
    }

    /// Reads `t,f` samples from CSV. A header row is optional.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::samples(read_samples(file)?)
    }
}

fn read_samples<R: std::io::Read>(reader: R) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != 2 {
            return Err(Error::InvalidSamples(format!(
                "row {} has {} columns, expected 2",
                row + 1,
                record.len()
            )));
        }
        let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
        match parsed {
            (Ok(t), Ok(f)) => out.push((t, f)),
            _ if row == 0 => continue,
            _ => {
                return Err(Error::InvalidSamples(format!(
                    "row {} is not numeric: {:?}",
                    row + 1,
                    record
                )))
            }
        }
    }
    Ok(out)
}

/// Ordered sample of `[c, d]` with target values.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
    values: Vec<f64>,
    interval: (f64, f64),
}

impl Grid {
    /// Builds a grid from raw points. Points must be strictly increasing and
    /// all values finite; the interval is `[first, last]`.
    pub fn from_points(points: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::InvalidSamples(format!(
                "{} points but {} values",
                points.len(),
                values.len()
            )));
        }
        let samples: Vec<_> = points.iter().copied().zip(values.iter().copied()).collect();
        TargetFunction::samples(samples)?;
        if points.len() < 2 {
            let (c, d) = (
                points.first().copied().unwrap_or(0.0),
                points.last().copied().unwrap_or(0.0),
            );
            return Err(Error::InsufficientSamples {
                c,
                d,
                found: points.len(),
            });
        }
        let interval = (points[0], points[points.len() - 1]);
        Ok(Grid {
            points,
            values,
            interval,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().copied().zip(self.values.iter().copied())
    }

    /// `(min f, max f)` over the grid.
    pub fn value_range(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }
}

/// Discretizes `target` over `[c, d]`.
///
/// Builtins are sampled on `n_points` uniformly spaced points with exact
/// endpoints. Sampled targets are restricted to `[c, d]` and used as given;
/// `n_points` is ignored for them.
pub fn build_grid(target: &TargetFunction, interval: (f64, f64), n_points: usize) -> Result<Grid> {
    let (c, d) = interval;
    if !(c < d) || !c.is_finite() || !d.is_finite() {
        return Err(Error::EmptyInterval { c, d });
    }
    match target {
        TargetFunction::Builtin(f) => {
            if n_points < 2 {
                return Err(Error::InsufficientSamples { c, d, found: n_points });
            }
            let last = (n_points - 1) as f64;
            let points: Vec<f64> = (0..n_points)
                .map(|i| {
                    if i + 1 == n_points {
                        d
                    } else {
                        c + (d - c) * (i as f64 / last)
                    }
                })
                .collect();
            let values: Vec<f64> = points.iter().map(|&t| f.eval(t)).collect();
            if let Some(v) = values.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidSamples(format!("target produced non-finite value {v}")));
            }
            Ok(Grid {
                points,
                values,
                interval,
            })
        }
        TargetFunction::Samples(samples) => {
            let inside: Vec<(f64, f64)> = samples.iter().copied().filter(|&(t, _)| t >= c && t <= d).collect();
            if inside.len() < 2 {
                return Err(Error::InsufficientSamples {
                    c,
                    d,
                    found: inside.len(),
                });
            }
            let (first, last) = (inside[0].0, inside[inside.len() - 1].0);
            if first != c || last != d {
                return Err(Error::UncoveredInterval { c, d, first, last });
            }
            let (points, values) = inside.into_iter().unzip();
            Ok(Grid {
                points,
                values,
                interval,
            })
        }
    }
}

/// Free coefficients of a [`RationalModel`]: numerator `a`, denominator tail `b`
/// (the constant denominator coefficient is pinned to 1 and not stored).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl Coefficients {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Self {
        Coefficients { a, b }
    }

    pub fn is_finite(&self) -> bool {
        self.a.iter().chain(&self.b).all(|v| v.is_finite())
    }

    /// Concatenation `(a, b)`, the decision-variable vector.
    pub fn to_flat(&self) -> Vec<f64> {
        self.a.iter().chain(&self.b).copied().collect()
    }

    pub fn from_flat(flat: &[f64], n_numerator: usize) -> Self {
        Coefficients {
            a: flat[..n_numerator].to_vec(),
            b: flat[n_numerator..].to_vec(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let coef: Coefficients = serde_json::from_str(text)?;
        if !coef.is_finite() {
            return Err(Error::InvalidModel("coefficients must be finite".into()));
        }
        Ok(coef)
    }
}

/// `AᵀG(t) / (1 + Σ_{j≥1} b_j h_j(t))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RationalModel {
    numerator: BasisSet,
    denominator: BasisSet,
}

impl RationalModel {
    /// The first denominator element must be the constant function; its
    /// coefficient is pinned to 1.
    pub fn new(numerator: BasisSet, denominator: BasisSet) -> Result<Self> {
        if !denominator.elements()[0].is_constant() {
            return Err(Error::InvalidModel(format!(
                "denominator must start with the constant `1`, found `{}`",
                denominator.elements()[0]
            )));
        }
        Ok(RationalModel { numerator, denominator })
    }

    /// Plain linear form `AᵀG(t)` (denominator ≡ 1).
    pub fn linear(numerator: BasisSet) -> Self {
        RationalModel {
            numerator,
            denominator: BasisSet::new(vec![BasisFunction::Constant]).expect("nonempty"),
        }
    }

    /// Ratio of two piecewise polynomials of the same degree with the given knots.
    pub fn piecewise_ratio(degree: u32, numerator_knots: &[f64], denominator_knots: &[f64]) -> Result<Self> {
        RationalModel::new(
            BasisSet::piecewise_polynomial(degree, numerator_knots)?,
            BasisSet::piecewise_polynomial(degree, denominator_knots)?,
        )
    }

    pub fn numerator(&self) -> &BasisSet {
        &self.numerator
    }

    pub fn denominator(&self) -> &BasisSet {
        &self.denominator
    }

    /// `n + 1`, the number of numerator coefficients.
    pub fn n_numerator(&self) -> usize {
        self.numerator.len()
    }

    /// `m`, the number of free denominator coefficients.
    pub fn n_denominator_free(&self) -> usize {
        self.denominator.len() - 1
    }

    pub fn n_free(&self) -> usize {
        self.n_numerator() + self.n_denominator_free()
    }

    fn check_shape(&self, coef: &Coefficients) -> Result<()> {
        if coef.a.len() != self.n_numerator() || coef.b.len() != self.n_denominator_free() {
            return Err(Error::InvalidModel(format!(
                "expected {} numerator and {} denominator coefficients, got {} and {}",
                self.n_numerator(),
                self.n_denominator_free(),
                coef.a.len(),
                coef.b.len()
            )));
        }
        Ok(())
    }

    pub fn numerator_value(&self, coef: &Coefficients, t: f64) -> f64 {
        self.numerator.combine(&coef.a, t)
    }

    pub fn denominator_value(&self, coef: &Coefficients, t: f64) -> f64 {
        1.0 + self.denominator.elements()[1..]
            .iter()
            .zip(&coef.b)
            .map(|(h, b)| b * h.eval(t))
            .sum::<f64>()
    }

    /// Evaluates the model at `t`.
    pub fn eval(&self, coef: &Coefficients, t: f64) -> Result<f64> {
        self.check_shape(coef)?;
        let den = self.denominator_value(coef, t);
        if den.abs() < ZERO_DENOMINATOR || !den.is_finite() {
            return Err(Error::ZeroDenominator { t, value: den });
        }
        Ok(self.numerator_value(coef, t) / den)
    }

    /// Smallest denominator value over the grid.
    pub fn min_denominator(&self, coef: &Coefficients, grid: &Grid) -> f64 {
        grid.points()
            .iter()
            .map(|&t| self.denominator_value(coef, t))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Free-function form of [`RationalModel::eval`].
pub fn eval_model(model: &RationalModel, coef: &Coefficients, t: f64) -> Result<f64> {
    model.eval(coef, t)
}

/// `max_i |f(tᵢ) − F(tᵢ)|` over the grid.
pub fn max_deviation(model: &RationalModel, coef: &Coefficients, grid: &Grid) -> Result<f64> {
    grid.iter()
        .try_fold(0.0f64, |acc, (t, f)| Ok(acc.max((f - model.eval(coef, t)?).abs())))
}
