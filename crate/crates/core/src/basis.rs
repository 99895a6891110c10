//! Scalar basis functions for numerators and denominators.
//!
//! A basis is a closed set of function families so that every model can be
//! written down as plain text and reloaded bit-for-bit. The textual grammar is
//!
//! ```text
//! basis   := "1" | "t" | "t^" k | "hinge(" knot ")" [ "^" k ]
//! knot    := number | number "/" number | "theta" index
//! ```
//!
//! where `hinge(θ)^k` is the truncated power `(max{0, t − θ})^k` and
//! `thetaN` refers to the N-th (1-based) entry of a knot table supplied by the
//! caller.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// One scalar basis element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisFunction {
    /// The constant function 1.
    Constant,
    /// `t^degree`.
    Monomial { degree: u32 },
    /// `(max{0, t − knot})^degree`, `degree ≥ 1`.
    TruncatedPower { knot: f64, degree: u32 },
}

impl BasisFunction {
    pub fn monomial(degree: u32) -> Self {
        BasisFunction::Monomial { degree }
    }

    /// Truncated power with the given knot. Fails for degree 0 or a non-finite knot.
    pub fn truncated_power(knot: f64, degree: u32) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidBasis {
                spec: format!("hinge({knot})^0"),
                reason: "truncated power degree must be at least 1".into(),
            });
        }
        if !knot.is_finite() {
            return Err(Error::InvalidBasis {
                spec: format!("hinge({knot})^{degree}"),
                reason: "knot must be finite".into(),
            });
        }
        Ok(BasisFunction::TruncatedPower { knot, degree })
    }

    pub fn hinge(knot: f64) -> Result<Self> {
        Self::truncated_power(knot, 1)
    }

    /// Evaluates the basis element at `t`.
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            BasisFunction::Constant => 1.0,
            BasisFunction::Monomial { degree } => powu(t, degree),
            BasisFunction::TruncatedPower { knot, degree } => {
                if t <= knot {
                    0.0
                } else {
                    powu(t - knot, degree)
                }
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, BasisFunction::Constant | BasisFunction::Monomial { degree: 0 })
    }

    /// Parses one basis element, resolving `thetaN` against `knots`.
    pub fn parse_with_knots(spec: &str, knots: &[f64]) -> Result<Self> {
        let invalid = |reason: &str| Error::InvalidBasis {
            spec: spec.to_string(),
            reason: reason.to_string(),
        };
        let s: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "1" {
            return Ok(BasisFunction::Constant);
        }
        if s == "t" {
            return Ok(BasisFunction::monomial(1));
        }
        if let Some(exp) = s.strip_prefix("t^") {
            let degree = exp
                .parse::<u32>()
                .map_err(|_| invalid("exponent must be a nonnegative integer"))?;
            return Ok(BasisFunction::monomial(degree));
        }
        if let Some(rest) = s.strip_prefix("hinge(") {
            let close = rest.find(')').ok_or_else(|| invalid("missing `)`"))?;
            let knot = parse_knot(&rest[..close], knots).map_err(|r| invalid(&r))?;
            let tail = &rest[close + 1..];
            let degree = if tail.is_empty() {
                1
            } else {
                tail.strip_prefix('^')
                    .and_then(|e| e.parse::<u32>().ok())
                    .ok_or_else(|| invalid("expected `^k` after `hinge(..)`"))?
            };
            return BasisFunction::truncated_power(knot, degree).map_err(|e| match e {
                Error::InvalidBasis { reason, .. } => invalid(&reason),
                other => other,
            });
        }
        Err(invalid("expected `1`, `t`, `t^k` or `hinge(theta)^k`"))
    }
}

fn parse_knot(text: &str, knots: &[f64]) -> std::result::Result<f64, String> {
    if let Some(idx) = text.strip_prefix("theta") {
        let i: usize = idx.parse().map_err(|_| format!("bad knot reference `{text}`"))?;
        return i
            .checked_sub(1)
            .and_then(|i| knots.get(i).copied())
            .ok_or_else(|| format!("knot reference `{text}` out of range ({} knots)", knots.len()));
    }
    let value = if let Some((num, den)) = text.split_once('/') {
        let num: f64 = num.parse().map_err(|_| format!("bad knot `{text}`"))?;
        let den: f64 = den.parse().map_err(|_| format!("bad knot `{text}`"))?;
        num / den
    } else {
        text.parse().map_err(|_| format!("bad knot `{text}`"))?
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("knot `{text}` is not finite"))
    }
}

#[inline]
fn powu(x: f64, k: u32) -> f64 {
    match k {
        0 => 1.0,
        1 => x,
        2 => x * x,
        _ => x.powi(k as i32),
    }
}

impl fmt::Display for BasisFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BasisFunction::Constant => write!(f, "1"),
            BasisFunction::Monomial { degree: 1 } => write!(f, "t"),
            BasisFunction::Monomial { degree } => write!(f, "t^{degree}"),
            BasisFunction::TruncatedPower { knot, degree: 1 } => write!(f, "hinge({knot})"),
            BasisFunction::TruncatedPower { knot, degree } => write!(f, "hinge({knot})^{degree}"),
        }
    }
}

impl FromStr for BasisFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BasisFunction::parse_with_knots(s, &[])
    }
}

impl Serialize for BasisFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BasisFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Ordered, nonempty list of basis functions. The order fixes coefficient indexing.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct BasisSet {
    elements: Vec<BasisFunction>,
}

impl BasisSet {
    pub fn new(elements: Vec<BasisFunction>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidModel("basis set must not be empty".into()));
        }
        Ok(BasisSet { elements })
    }

    /// Parses a list of basis specs, resolving `thetaN` references against `knots`.
    pub fn parse<S: AsRef<str>>(specs: &[S], knots: &[f64]) -> Result<Self> {
        let elements = specs
            .iter()
            .map(|s| BasisFunction::parse_with_knots(s.as_ref(), knots))
            .collect::<Result<Vec<_>>>()?;
        BasisSet::new(elements)
    }

    /// `{1, t, …, t^degree}` followed by `hinge(knot)^1 … hinge(knot)^degree`
    /// for every knot: a piecewise polynomial of the given degree.
    pub fn piecewise_polynomial(degree: u32, knots: &[f64]) -> Result<Self> {
        let mut elements = vec![BasisFunction::Constant];
        elements.extend((1..=degree).map(BasisFunction::monomial));
        for &knot in knots {
            for k in 1..=degree {
                elements.push(BasisFunction::truncated_power(knot, k)?);
            }
        }
        BasisSet::new(elements)
    }

    pub fn elements(&self) -> &[BasisFunction] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Evaluates every element at `t`.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        self.elements.iter().map(|b| b.eval(t)).collect()
    }

    /// Writes the element values at `t` into `out` (which must have length `len()`).
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        for (o, b) in out.iter_mut().zip(&self.elements) {
            *o = b.eval(t);
        }
    }

    /// Linear combination `Σ coef[i] · elements[i](t)`.
    pub fn combine(&self, coef: &[f64], t: f64) -> f64 {
        self.elements.iter().zip(coef).map(|(b, c)| c * b.eval(t)).sum()
    }

    pub fn specs(&self) -> Vec<String> {
        self.elements.iter().map(ToString::to_string).collect()
    }
}

impl<'de> Deserialize<'de> for BasisSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let elements = Vec::<BasisFunction>::deserialize(deserializer)?;
        BasisSet::new(elements).map_err(serde::de::Error::custom)
    }
}

/// Free-function form of [`BasisFunction::eval`].
pub fn eval_basis(b: &BasisFunction, t: f64) -> f64 {
    b.eval(t)
}

/// Free-function form of [`BasisSet::eval`].
pub fn eval_set(s: &BasisSet, t: f64) -> Vec<f64> {
    s.eval(t)
}
