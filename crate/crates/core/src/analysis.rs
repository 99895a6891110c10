//! Error curves, alternation counting and sampled quasiconvexity checks.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Coefficients, Grid, RationalModel};

/// Default fraction of the maximal error a peak must reach to be counted.
pub const DEFAULT_RHO: f64 = 0.9;

/// Slack allowed in the quasiconvexity inequality.
pub const QUASICONVEX_TOL: f64 = 1e-9;

/// Pointwise residuals `e = f(t) − F(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurve {
    pub points: Vec<(f64, f64)>,
    pub max_abs: f64,
}

impl ErrorCurve {
    pub fn from_points(points: Vec<(f64, f64)>) -> Self {
        let max_abs = points.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
        ErrorCurve { points, max_abs }
    }

    pub fn negated(&self) -> Self {
        ErrorCurve {
            points: self.points.iter().map(|&(t, e)| (t, -e)).collect(),
            max_abs: self.max_abs,
        }
    }

    /// CSV with a `t,e` header.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "e"])?;
        for &(t, e) in &self.points {
            w.write_record([format!("{t:?}"), format!("{e:?}")])?;
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

/// Residual curve of `model` with `coef` over the grid.
pub fn error_curve(model: &RationalModel, coef: &Coefficients, grid: &Grid) -> Result<ErrorCurve> {
    let points = grid
        .iter()
        .map(|(t, f)| Ok((t, f - model.eval(coef, t)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorCurve::from_points(points))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub t: f64,
    pub e: f64,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremaReport {
    pub extrema: Vec<Extremum>,
    #[serde(rename = "count")]
    pub alternation_count: usize,
    pub rho: f64,
}

impl ExtremaReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Near-maximal error peaks with alternating signs.
///
/// A point is a candidate when it is a grid endpoint or the discrete slope
/// changes sign there, and `|e| ≥ rho · max_abs`. Runs of same-sign
/// candidates are collapsed to their largest `|e|`, so the reported sequence
/// alternates.
pub fn count_alternations(curve: &ErrorCurve, rho: f64) -> Result<ExtremaReport> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::InvalidConfig(format!("rho must lie in (0, 1], got {rho}")));
    }
    let pts = &curve.points;
    let mut extrema: Vec<Extremum> = Vec::new();
    if curve.max_abs > 0.0 {
        let threshold = rho * curve.max_abs;
        let n = pts.len();
        for i in 0..n {
            let e = pts[i].1;
            if e.abs() < threshold {
                continue;
            }
            let turning = i == 0 || i + 1 == n || (e - pts[i - 1].1) * (pts[i + 1].1 - e) <= 0.0;
            if !turning {
                continue;
            }
            let sign = if e > 0.0 { 1 } else { -1 };
            match extrema.last_mut() {
                Some(last) if last.sign == sign => {
                    if e.abs() > last.e.abs() {
                        *last = Extremum { t: pts[i].0, e, sign };
                    }
                }
                _ => extrema.push(Extremum { t: pts[i].0, e, sign }),
            }
        }
    }
    Ok(ExtremaReport {
        alternation_count: extrema.len(),
        extrema,
        rho,
    })
}

/// `Φ(coefficients) = max deviation`, defined where the denominator is
/// positive on every grid point and [`Error::DomainSkip`] elsewhere.
pub fn deviation_objective<'a>(model: &'a RationalModel, grid: &'a Grid) -> impl Fn(&[f64]) -> Result<f64> + 'a {
    move |flat: &[f64]| {
        let coef = Coefficients::from_flat(flat, model.n_numerator());
        if !(model.min_denominator(&coef, grid) > 0.0) {
            return Err(Error::DomainSkip);
        }
        crate::model::max_deviation(model, &coef, grid)
    }
}

/// Checks `Φ(λx + (1−λ)y) ≤ max{Φ(x), Φ(y)}` up to [`QUASICONVEX_TOL`].
pub fn check_quasiconvexity_sample<F>(phi: F, x: &[f64], y: &[f64], lambda: f64) -> Result<bool>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if !(0.0..=1.0).contains(&lambda) || x.len() != y.len() {
        return Err(Error::InvalidConfig(format!(
            "need λ ∈ [0, 1] and equal-length points, got λ = {lambda}"
        )));
    }
    let mid: Vec<f64> = x.iter().zip(y).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
    let (px, py, pm) = (phi(x)?, phi(y)?, phi(&mid)?);
    Ok(pm <= px.max(py) + QUASICONVEX_TOL)
}
