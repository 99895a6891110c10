//! Level tests: given a deviation level `z`, decide whether some member of the
//! model family stays within `z` of the target on every grid point.
//!
//! Two oracles are provided. [`RationalOracle`] handles generalized rational
//! models by linearizing `|f − AᵀG/BᵀH| ≤ z` (valid because `BᵀH > 0`) into an
//! LP whose optimal slack `u*` is nonpositive exactly when the level is
//! attainable. [`HingeOracle`] handles the one-knot model
//! `a₀ + a₁t + a₂·max{0, t − θ}` with fixed coefficients, where the feasible
//! knots form an interval that can be intersected in closed form.

use std::path::PathBuf;

use crate::basis::{BasisFunction, BasisSet};
use crate::bisection::LevelOracle;
use crate::error::{Error, Result};
use crate::model::{max_deviation, Coefficients, Grid, RationalModel};
use crate::simplex::{solve_lp, LinearProgram, LpStatus, Relation};

/// `u*` at or below this counts as feasible.
pub const TOL_FEAS: f64 = 1e-9;

/// Allowed excess of a witness's grid deviation over the tested level.
pub const WITNESS_TOL: f64 = 1e-7;

/// Denominator floor used when none is configured.
pub const DEFAULT_DELTA: f64 = 1e-6;

/// Lower box bound on the LP slack variable `u`.
const SLACK_FLOOR: f64 = -1.0;

/// Answer to one level test.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityOutcome<W> {
    pub feasible: bool,
    /// Present iff `feasible`.
    pub witness: Option<W>,
    /// Optimal slack `u*` of the LP route; `None` for analytic oracles.
    pub slack: Option<f64>,
}

impl<W> FeasibilityOutcome<W> {
    fn infeasible(slack: Option<f64>) -> Self {
        FeasibilityOutcome {
            feasible: false,
            witness: None,
            slack,
        }
    }
}

// ---------------------------------------------------------------------------
// Generalized rational models

/// Basis values of a model sampled on a grid, reused across levels.
#[derive(Debug, Clone)]
struct SampledModel {
    /// `g_k(tᵢ)`, row-major `N × (n+1)`.
    numerator: Vec<f64>,
    /// `h_j(tᵢ)` for `j ≥ 1`, row-major `N × m`.
    denominator: Vec<f64>,
    n_num: usize,
    n_den: usize,
}

impl SampledModel {
    fn new(model: &RationalModel, grid: &Grid) -> Self {
        let n_num = model.n_numerator();
        let n_den = model.n_denominator_free();
        let mut numerator = vec![0.0; grid.len() * n_num];
        let mut denominator = vec![0.0; grid.len() * n_den];
        let den_tail = &model.denominator().elements()[1..];
        for (i, &t) in grid.points().iter().enumerate() {
            model
                .numerator()
                .eval_into(t, &mut numerator[i * n_num..(i + 1) * n_num]);
            for (dst, h) in denominator[i * n_den..(i + 1) * n_den].iter_mut().zip(den_tail) {
                *dst = h.eval(t);
            }
        }
        SampledModel {
            numerator,
            denominator,
            n_num,
            n_den,
        }
    }

    /// Variables `(a₀..a_n, b₁..b_m, u)`; per grid point the rows
    ///
    /// ```text
    /// (f − z)·BᵀH − AᵀG ≤ u
    /// AᵀG − (f + z)·BᵀH ≤ u
    /// BᵀH ≥ δ
    /// ```
    ///
    /// with `b₀ = 1` moved to the right-hand side, objective `min u` and `u ≥ −1`.
    fn build_lp(&self, grid: &Grid, z: f64, delta: f64) -> LinearProgram {
        let (nn, nd) = (self.n_num, self.n_den);
        let n_vars = nn + nd + 1;
        let u = n_vars - 1;
        let mut objective = vec![0.0; n_vars];
        objective[u] = 1.0;
        let mut lp = LinearProgram::with_capacity(objective, 3 * grid.len());
        for (i, &f) in grid.values().iter().enumerate() {
            let g = &self.numerator[i * nn..(i + 1) * nn];
            let h = &self.denominator[i * nd..(i + 1) * nd];

            let mut below = vec![0.0; n_vars];
            let mut above = vec![0.0; n_vars];
            let mut floor = vec![0.0; n_vars];
            for k in 0..nn {
                below[k] = -g[k];
                above[k] = g[k];
            }
            for j in 0..nd {
                below[nn + j] = (f - z) * h[j];
                above[nn + j] = -(f + z) * h[j];
                floor[nn + j] = h[j];
            }
            below[u] = -1.0;
            above[u] = -1.0;
            lp.add_constraint(below, Relation::Le, -(f - z));
            lp.add_constraint(above, Relation::Le, f + z);
            lp.add_constraint(floor, Relation::Ge, delta - 1.0);
        }
        lp.set_bounds(u, SLACK_FLOOR, f64::INFINITY);
        lp
    }
}

/// The level-`z` LP for `model` on `grid` with denominator floor `delta`.
pub fn build_feasibility_lp(model: &RationalModel, grid: &Grid, z: f64, delta: f64) -> Result<LinearProgram> {
    check_level_args(z, delta)?;
    Ok(SampledModel::new(model, grid).build_lp(grid, z, delta))
}

fn check_level_args(z: f64, delta: f64) -> Result<()> {
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "deviation level must be finite and nonnegative, got {z}"
        )));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "denominator floor must be positive, got {delta}"
        )));
    }
    Ok(())
}

/// One-shot level test for a rational model.
pub fn check_level_rational(
    model: &RationalModel,
    grid: &Grid,
    z: f64,
    delta: f64,
) -> Result<FeasibilityOutcome<Coefficients>> {
    RationalOracle::new(model, grid, delta)?.check(z)
}

/// Level oracle for a generalized rational model on a fixed grid.
#[derive(Debug, Clone)]
pub struct RationalOracle<'a> {
    model: &'a RationalModel,
    grid: &'a Grid,
    delta: f64,
    sampled: SampledModel,
    dump_dir: Option<PathBuf>,
    calls: usize,
}

impl<'a> RationalOracle<'a> {
    pub fn new(model: &'a RationalModel, grid: &'a Grid, delta: f64) -> Result<Self> {
        check_level_args(0.0, delta)?;
        Ok(RationalOracle {
            model,
            grid,
            delta,
            sampled: SampledModel::new(model, grid),
            dump_dir: None,
            calls: 0,
        })
    }

    /// Writes every level LP to `dir/lp_level_NNN.txt` before solving it.
    pub fn dump_lps_to(mut self, dir: impl Into<PathBuf>) -> Self {
        self.dump_dir = Some(dir.into());
        self
    }

    pub fn build_lp(&self, z: f64) -> LinearProgram {
        self.sampled.build_lp(self.grid, z, self.delta)
    }

    /// Denominator at least `δ − 10⁻⁹` and deviation at most `z + 10⁻⁷` on the grid.
    fn certifies(&self, coef: &Coefficients, z: f64) -> bool {
        self.model.min_denominator(coef, self.grid) >= self.delta - 1e-9
            && max_deviation(self.model, coef, self.grid).is_ok_and(|d| d <= z + WITNESS_TOL)
    }

    fn witness_from(&self, x: &[f64]) -> Coefficients {
        Coefficients::from_flat(&x[..x.len() - 1], self.model.n_numerator())
    }

    pub fn check(&mut self, z: f64) -> Result<FeasibilityOutcome<Coefficients>> {
        check_level_args(z, self.delta)?;
        let lp = self.build_lp(z);
        if let Some(dir) = &self.dump_dir {
            let path = dir.join(format!("lp_level_{:03}.txt", self.calls));
            std::fs::write(&path, lp.to_debug_text()).map_err(|e| Error::io(path, e))?;
        }
        self.calls += 1;

        let sol = solve_lp(&lp).map_err(|e| Error::LpFailure(Box::new(e)))?;
        match sol.status {
            LpStatus::Optimal => {
                let x = sol.x.expect("optimal solution carries a point");
                let u = x[x.len() - 1];
                if u > TOL_FEAS {
                    return Ok(FeasibilityOutcome::infeasible(Some(u)));
                }
                // A tiny positive u is amplified by 1/BᵀH in the true residual,
                // so the witness must certify the level on its own.
                let witness = self.witness_from(&x);
                if !self.certifies(&witness, z) {
                    log::debug!("level {z}: u* = {u:e} accepted by the LP but the witness misses the band");
                    return Ok(FeasibilityOutcome::infeasible(Some(u)));
                }
                Ok(FeasibilityOutcome {
                    feasible: true,
                    witness: Some(witness),
                    slack: Some(u),
                })
            }
            LpStatus::Unbounded => {
                // Cannot happen while u has a finite floor; a ray with u → −∞
                // still means the level is attainable, so recover a point.
                log::warn!("level LP at z = {z} reported unbounded; re-solving as a pure feasibility problem");
                let mut capped = lp.clone();
                let u = capped.n_vars() - 1;
                capped.set_bounds(u, SLACK_FLOOR, 0.0);
                let sol = solve_lp(&capped).map_err(|e| Error::LpFailure(Box::new(e)))?;
                let x = sol.x.ok_or_else(|| {
                    Error::LpFailure(Box::new(Error::MalformedLp(
                        "unbounded level LP has no feasible point".into(),
                    )))
                })?;
                Ok(FeasibilityOutcome {
                    feasible: true,
                    witness: Some(self.witness_from(&x)),
                    slack: Some(f64::NEG_INFINITY),
                })
            }
            // b = 0, A = 0, u large is always feasible, so this signals numerical trouble.
            LpStatus::Infeasible => Err(Error::LpFailure(Box::new(Error::MalformedLp(format!(
                "level LP at z = {z} reported infeasible"
            ))))),
        }
    }
}

impl LevelOracle for RationalOracle<'_> {
    type Witness = Coefficients;

    fn check(&mut self, level: f64) -> Result<FeasibilityOutcome<Coefficients>> {
        RationalOracle::check(self, level)
    }

    fn default_bounds(&self) -> (f64, f64) {
        crate::bisection::init_bounds(self.grid)
    }

    fn deviation(&self, witness: &Coefficients) -> Result<f64> {
        max_deviation(self.model, witness, self.grid)
    }
}

// ---------------------------------------------------------------------------
// One-knot piecewise linear model

/// `S(θ, t) = a₀ + a₁t + a₂·max{0, t − θ}` with fixed coefficients on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HingeProblem {
    a0: f64,
    a1: f64,
    a2: f64,
    grid: Grid,
}

/// Feasible knot interval and the chosen knot (its midpoint).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HingeWitness {
    pub theta: f64,
    pub interval: (f64, f64),
}

impl HingeProblem {
    pub fn new(a0: f64, a1: f64, a2: f64, grid: Grid) -> Result<Self> {
        if !(a0.is_finite() && a1.is_finite() && a2.is_finite()) {
            return Err(Error::InvalidModel("hinge coefficients must be finite".into()));
        }
        if a2 == 0.0 {
            return Err(Error::InvalidModel("hinge slope change a2 must be nonzero".into()));
        }
        Ok(HingeProblem { a0, a1, a2, grid })
    }

    pub fn coefficients(&self) -> (f64, f64, f64) {
        (self.a0, self.a1, self.a2)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn eval(&self, theta: f64, t: f64) -> f64 {
        self.a0 + self.a1 * t + self.a2 * (t - theta).max(0.0)
    }

    /// `max_i |f(tᵢ) − S(θ, tᵢ)|`.
    pub fn deviation(&self, theta: f64) -> f64 {
        self.grid
            .iter()
            .map(|(t, f)| (f - self.eval(theta, t)).abs())
            .fold(0.0, f64::max)
    }

    /// The same function as a linear form over `{1, t, hinge(θ)}`.
    pub fn as_rational(&self, theta: f64) -> Result<(RationalModel, Coefficients)> {
        let numerator = BasisSet::new(vec![
            BasisFunction::Constant,
            BasisFunction::monomial(1),
            BasisFunction::hinge(theta)?,
        ])?;
        Ok((
            RationalModel::linear(numerator),
            Coefficients::new(vec![self.a0, self.a1, self.a2], Vec::new()),
        ))
    }

    /// `g(tᵢ) = (f(tᵢ) − a₀ − a₁tᵢ) / a₂`.
    pub fn scaled_residual(&self, t: f64, f: f64) -> f64 {
        (f - self.a0 - self.a1 * t) / self.a2
    }
}

/// Widening of the hinge band, in units of `f`, that absorbs rounding in
/// the interval endpoints when the level is exactly attained.
pub const HINGE_ROUNDING: f64 = 1e-12;

/// Knot interval on which `|f − S(θ, ·)| ≤ level` holds on the whole grid.
///
/// `level` is measured in units of `f`; the band for the normalized hinge
/// `max{0, t − θ}` is `g ± level/|a₂|`.
pub fn check_level_hinge(p: &HingeProblem, level: f64) -> Result<FeasibilityOutcome<HingeWitness>> {
    if !(level >= 0.0) || !level.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "deviation level must be finite and nonnegative, got {level}"
        )));
    }
    let z = (level + HINGE_ROUNDING) / p.a2.abs();
    let (c, d) = p.grid.interval();
    let (mut lo, mut hi) = (c, d);
    for (t, f) in p.grid.iter() {
        let g = p.scaled_residual(t, f);
        let (l, u) = (g - z, g + z);
        if u < 0.0 {
            return Ok(FeasibilityOutcome::infeasible(None));
        }
        lo = lo.max(t - u);
        if l > 0.0 {
            hi = hi.min(t - l);
        }
        if lo > hi {
            return Ok(FeasibilityOutcome::infeasible(None));
        }
    }
    Ok(FeasibilityOutcome {
        feasible: true,
        witness: Some(HingeWitness {
            theta: 0.5 * (lo + hi),
            interval: (lo, hi),
        }),
        slack: None,
    })
}

/// Level oracle over the knot of a [`HingeProblem`].
#[derive(Debug, Clone)]
pub struct HingeOracle<'a> {
    problem: &'a HingeProblem,
}

impl<'a> HingeOracle<'a> {
    pub fn new(problem: &'a HingeProblem) -> Self {
        HingeOracle { problem }
    }
}

impl LevelOracle for HingeOracle<'_> {
    type Witness = HingeWitness;

    fn check(&mut self, level: f64) -> Result<FeasibilityOutcome<HingeWitness>> {
        check_level_hinge(self.problem, level)
    }

    fn default_bounds(&self) -> (f64, f64) {
        // Any knot in [c, d] is a valid starting point; its deviation is attainable.
        let (_, d) = self.problem.grid.interval();
        (0.0, self.problem.deviation(d))
    }

    fn deviation(&self, witness: &HingeWitness) -> Result<f64> {
        Ok(self.problem.deviation(witness.theta))
    }
}
