//! Dense two-phase simplex.
//!
//! Problems are stated as
//!
//! ```text
//! minimize    cᵀx
//! subject to  aᵢᵀx  (≤ | ≥ | =)  bᵢ
//!             lⱼ ≤ xⱼ ≤ uⱼ        (either side may be infinite)
//! ```
//!
//! [`solve_primal`] runs the textbook two-phase method on a row-major tableau
//! with one row per constraint. That tableau is quadratic in the row count, so
//! tall problems (many more constraints than variables, which is what the
//! level-feasibility LPs look like) are routed through [`solve_dual`]: the
//! dual has one equality row per primal variable, it is solved by the same
//! tableau code, and the primal point is read back from the dual's simplex
//! multipliers. [`solve_lp`] picks the route.
//!
//! Pricing is Dantzig's most-negative reduced cost until `bland_after` pivots
//! have been spent, then Bland's smallest-index rule, which cannot cycle.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Absolute tolerance on row residuals of a returned optimal point.
pub const TOL_LP: f64 = 1e-9;

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }

    fn from_symbol(s: &str) -> Option<Self> {
        match s {
            "<=" => Some(Relation::Le),
            ">=" => Some(Relation::Ge),
            "=" | "==" => Some(Relation::Eq),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    /// Signed violation of the row at `x` (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs: f64 = self.coeffs.iter().zip(x).map(|(a, x)| a * x).sum();
        match self.relation {
            Relation::Le => (lhs - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - lhs).max(0.0),
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// Variable bounds; use infinities for missing sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    pub const FREE: Bounds = Bounds {
        lower: f64::NEG_INFINITY,
        upper: f64::INFINITY,
    };
    pub const NONNEGATIVE: Bounds = Bounds {
        lower: 0.0,
        upper: f64::INFINITY,
    };

    pub fn new(lower: f64, upper: f64) -> Self {
        Bounds { lower, upper }
    }
}

/// A dense linear program. Variables are free unless bounded explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
    bounds: Vec<Bounds>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            constraints: Vec::new(),
            bounds: vec![Bounds::FREE; n],
        }
    }

    pub fn with_capacity(objective: Vec<f64>, rows: usize) -> Self {
        let mut lp = LinearProgram::new(objective);
        lp.constraints.reserve(rows);
        lp
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) -> &mut Self {
        self.bounds[var] = Bounds::new(lower, upper);
        self
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn n_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn bounds(&self) -> &[Bounds] {
        &self.bounds
    }

    /// Checks row widths, finiteness and bound ordering.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_vars();
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::MalformedLp("objective has non-finite entries".into()));
        }
        for (i, row) in self.constraints.iter().enumerate() {
            if row.coeffs.len() != n {
                return Err(Error::MalformedLp(format!(
                    "row {i} has {} coefficients, expected {n}",
                    row.coeffs.len()
                )));
            }
            if !row.rhs.is_finite() || row.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(Error::MalformedLp(format!("row {i} has non-finite entries")));
            }
        }
        for (j, b) in self.bounds.iter().enumerate() {
            if b.lower.is_nan()
                || b.upper.is_nan()
                || b.lower > b.upper
                || b.lower == f64::INFINITY
                || b.upper == f64::NEG_INFINITY
            {
                return Err(Error::MalformedLp(format!(
                    "variable {j} has invalid bounds [{}, {}]",
                    b.lower, b.upper
                )));
            }
        }
        Ok(())
    }

    /// Largest constraint or bound violation at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.constraints.iter().map(|r| r.violation(x));
        let bounds = self
            .bounds
            .iter()
            .zip(x)
            .map(|(b, &v)| (b.lower - v).max(v - b.upper).max(0.0));
        rows.chain(bounds).fold(0.0, f64::max)
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    /// Plain-text dump: an `objective` line, one `bounds` line per variable,
    /// then one line per row of the form `a₁ … aₙ <= b`.
    pub fn to_debug_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# lp vars={} rows={}", self.n_vars(), self.n_constraints());
        out.push_str("objective");
        for c in &self.objective {
            let _ = write!(out, " {c:?}");
        }
        out.push('\n');
        for (j, b) in self.bounds.iter().enumerate() {
            let _ = writeln!(out, "bounds {j} {:?} {:?}", b.lower, b.upper);
        }
        for row in &self.constraints {
            for a in &row.coeffs {
                let _ = write!(out, "{a:?} ");
            }
            let _ = writeln!(out, "{} {:?}", row.relation.symbol(), row.rhs);
        }
        out
    }

    /// Parses the format written by [`LinearProgram::to_debug_text`].
    pub fn from_debug_text(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::MalformedLp(format!("line {}: {msg}", line + 1));
        let num = |line: usize, s: &str| s.parse::<f64>().map_err(|_| bad(line, &format!("bad number `{s}`")));
        let mut lp: Option<LinearProgram> = None;
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let head = tokens.next().unwrap_or_default();
            match head {
                "objective" => {
                    let c = tokens.map(|s| num(ln, s)).collect::<Result<Vec<_>>>()?;
                    lp = Some(LinearProgram::new(c));
                }
                "bounds" => {
                    let lp = lp.as_mut().ok_or_else(|| bad(ln, "bounds before objective"))?;
                    let parts: Vec<&str> = tokens.collect();
                    if parts.len() != 3 {
                        return Err(bad(ln, "expected `bounds j lower upper`"));
                    }
                    let j: usize = parts[0].parse().map_err(|_| bad(ln, "bad variable index"))?;
                    if j >= lp.n_vars() {
                        return Err(bad(ln, "variable index out of range"));
                    }
                    lp.set_bounds(j, num(ln, parts[1])?, num(ln, parts[2])?);
                }
                _ => {
                    let lp = lp.as_mut().ok_or_else(|| bad(ln, "row before objective"))?;
                    let parts: Vec<&str> = line.split_whitespace().collect();
                    if parts.len() < 2 {
                        return Err(bad(ln, "row needs a relation and a rhs"));
                    }
                    let rel =
                        Relation::from_symbol(parts[parts.len() - 2]).ok_or_else(|| bad(ln, "missing relation"))?;
                    let rhs = num(ln, parts[parts.len() - 1])?;
                    let coeffs = parts[..parts.len() - 2]
                        .iter()
                        .map(|s| num(ln, s))
                        .collect::<Result<Vec<_>>>()?;
                    lp.add_constraint(coeffs, rel, rhs);
                }
            }
        }
        let lp = lp.ok_or_else(|| Error::MalformedLp("missing objective line".into()))?;
        lp.validate()?;
        Ok(lp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Present iff `status == Optimal`.
    pub x: Option<Vec<f64>>,
    /// Present iff `status == Optimal`.
    pub objective_value: Option<f64>,
    /// Simplex pivots spent.
    pub pivots: usize,
}

impl LpSolution {
    fn without_point(status: LpStatus, pivots: usize) -> Self {
        LpSolution {
            status,
            x: None,
            objective_value: None,
            pivots,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Dual route for tall problems, primal otherwise.
    Auto,
    Primal,
    Dual,
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    /// Dantzig pivots allowed before switching to Bland's rule.
    pub bland_after: usize,
    pub method: Method,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            bland_after: 1000,
            method: Method::Auto,
        }
    }
}

/// Solves `lp` with default options.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    solve_with(lp, &SimplexOptions::default())
}

pub fn solve_with(lp: &LinearProgram, opts: &SimplexOptions) -> Result<LpSolution> {
    lp.validate()?;
    let method = match opts.method {
        Method::Auto => {
            let finite_bounds: usize = lp
                .bounds
                .iter()
                .map(|b| b.lower.is_finite() as usize + b.upper.is_finite() as usize)
                .sum();
            if lp.n_constraints() + finite_bounds > 4 * lp.n_vars() + 16 {
                Method::Dual
            } else {
                Method::Primal
            }
        }
        m => m,
    };
    match method {
        Method::Dual => solve_dual_route(lp, opts),
        _ => solve_primal_route(lp, opts),
    }
}

/// Two-phase primal simplex on the full constraint tableau.
pub fn solve_primal(lp: &LinearProgram) -> Result<LpSolution> {
    solve_with(
        lp,
        &SimplexOptions {
            method: Method::Primal,
            ..SimplexOptions::default()
        },
    )
}

/// Solves through the dual problem. Falls back to the primal route when the
/// dual is infeasible, since that alone does not tell infeasible from unbounded.
pub fn solve_dual(lp: &LinearProgram) -> Result<LpSolution> {
    solve_with(
        lp,
        &SimplexOptions {
            method: Method::Dual,
            ..SimplexOptions::default()
        },
    )
}

// ---------------------------------------------------------------------------
// Standard form

/// How an original variable is expressed through nonnegative tableau columns:
/// `x = offset + Σ sign · column`.
#[derive(Debug, Clone)]
struct VarMap {
    offset: f64,
    terms: Vec<(usize, f64)>,
}

/// `A x' (rel) b` with `x' ≥ 0`.
struct StandardForm {
    rows: Vec<(Vec<f64>, Relation, f64)>,
    cost: Vec<f64>,
    vars: Vec<VarMap>,
    n_cols: usize,
    /// Rows `0..n_original_rows` correspond to the LP's constraints.
    n_original_rows: usize,
}

fn standardize(lp: &LinearProgram) -> StandardForm {
    let mut vars = Vec::with_capacity(lp.n_vars());
    let mut n_cols = 0;
    let mut upper_rows = Vec::new();
    for b in &lp.bounds {
        let lo = b.lower.is_finite();
        let hi = b.upper.is_finite();
        let map = match (lo, hi) {
            (true, _) => {
                let col = n_cols;
                n_cols += 1;
                if hi {
                    upper_rows.push((col, b.upper - b.lower));
                }
                VarMap {
                    offset: b.lower,
                    terms: vec![(col, 1.0)],
                }
            }
            (false, true) => {
                let col = n_cols;
                n_cols += 1;
                VarMap {
                    offset: b.upper,
                    terms: vec![(col, -1.0)],
                }
            }
            (false, false) => {
                let col = n_cols;
                n_cols += 2;
                VarMap {
                    offset: 0.0,
                    terms: vec![(col, 1.0), (col + 1, -1.0)],
                }
            }
        };
        vars.push(map);
    }

    let mut rows = Vec::with_capacity(lp.n_constraints() + upper_rows.len());
    for row in &lp.constraints {
        let mut a = vec![0.0; n_cols];
        let mut rhs = row.rhs;
        for (coef, map) in row.coeffs.iter().zip(&vars) {
            if *coef == 0.0 {
                continue;
            }
            rhs -= coef * map.offset;
            for &(col, sign) in &map.terms {
                a[col] += coef * sign;
            }
        }
        rows.push((a, row.relation, rhs));
    }
    for (col, width) in upper_rows {
        let mut a = vec![0.0; n_cols];
        a[col] = 1.0;
        rows.push((a, Relation::Le, width));
    }

    let mut cost = vec![0.0; n_cols];
    for (c, map) in lp.objective.iter().zip(&vars) {
        for &(col, sign) in &map.terms {
            cost[col] += c * sign;
        }
    }

    StandardForm {
        rows,
        cost,
        vars,
        n_cols,
        n_original_rows: lp.n_constraints(),
    }
}

// ---------------------------------------------------------------------------
// Tableau

struct Tableau {
    n_rows: usize,
    /// Columns excluding the rhs.
    n_cols: usize,
    /// Row-major, `n_rows × (n_cols + 1)`; last entry of each row is the rhs.
    data: Vec<f64>,
    /// Reduced costs, last entry is minus the objective value.
    cost_row: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
    limit: usize,
    bland_after: usize,
}

/// Tableaus with at most this many rows are reinverted at the end of each
/// phase to shed accumulated rounding.
const REFACTOR_MAX_ROWS: usize = 256;
const MAX_REFACTORS: usize = 5;

enum PhaseEnd {
    Optimal,
    Unbounded,
}

impl Tableau {
    #[inline]
    fn width(&self) -> usize {
        self.n_cols + 1
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width() + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.data[r * self.width() + self.n_cols]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width();
        let p = self.data[pr * w + pc];
        let (before, rest) = self.data.split_at_mut(pr * w);
        let (prow, after) = rest.split_at_mut(w);
        for v in prow.iter_mut() {
            *v /= p;
        }
        prow[pc] = 1.0;
        let eliminate = |row: &mut [f64]| {
            let f = row[pc];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * pv;
                }
                row[pc] = 0.0;
            }
        };
        before.chunks_exact_mut(w).for_each(eliminate);
        after.chunks_exact_mut(w).for_each(eliminate);
        eliminate(&mut self.cost_row);
        self.basis[pr] = pc;
        self.pivots += 1;
    }

    /// Sets the cost row to `cost` priced out against the current basis.
    fn price_out(&mut self, cost: &[f64]) {
        let w = self.width();
        self.cost_row = cost.to_vec();
        self.cost_row.push(0.0);
        for r in 0..self.n_rows {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                let row = &self.data[r * w..(r + 1) * w];
                for (v, a) in self.cost_row.iter_mut().zip(row) {
                    *v -= cb * a;
                }
            }
        }
    }

    fn choose_entering(&self, allowed: &[bool]) -> Option<usize> {
        let bland = self.pivots >= self.bland_after;
        let mut best: Option<(usize, f64)> = None;
        for (j, &d) in self.cost_row[..self.n_cols].iter().enumerate() {
            if !allowed[j] || d >= -COST_TOL {
                continue;
            }
            if bland {
                return Some(j);
            }
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        best.map(|(j, _)| j)
    }

    fn choose_leaving(&self, col: usize) -> Option<usize> {
        let bland = self.pivots >= self.bland_after;
        let mut best: Option<(usize, f64, f64)> = None;
        for r in 0..self.n_rows {
            let a = self.at(r, col);
            if a <= PIVOT_TOL {
                continue;
            }
            let ratio = self.rhs(r).max(0.0) / a;
            let replace = match best {
                None => true,
                Some((br, bratio, ba)) => {
                    let tie = (ratio - bratio).abs() <= 1e-12 * (1.0 + bratio.abs());
                    if !tie {
                        ratio < bratio
                    } else if bland {
                        self.basis[r] < self.basis[br]
                    } else {
                        a > ba
                    }
                }
            };
            if replace {
                best = Some((r, ratio, a));
            }
        }
        best.map(|(r, _, _)| r)
    }

    /// Rebuilds the tableau from the original data for the current basis.
    /// Returns `false` (leaving the tableau untouched) if the basis is
    /// numerically singular.
    fn reinvert(&mut self, initial: &[f64]) -> bool {
        let w = self.width();
        let saved = (
            std::mem::replace(&mut self.data, initial.to_vec()),
            self.basis.clone(),
            self.pivots,
        );
        let mut assigned = vec![false; self.n_rows];
        for &col in &saved.1 {
            let row = (0..self.n_rows)
                .filter(|&r| !assigned[r])
                .max_by(|&a, &b| self.data[a * w + col].abs().total_cmp(&self.data[b * w + col].abs()));
            match row {
                Some(r) if self.data[r * w + col].abs() > PIVOT_TOL => {
                    self.pivot(r, col);
                    assigned[r] = true;
                }
                _ => {
                    (self.data, self.basis, self.pivots) = saved;
                    return false;
                }
            }
        }
        self.pivots = saved.2;
        true
    }

    /// Reinverts and resumes until a fresh tableau confirms optimality.
    fn polish(&mut self, initial: &[f64], cost: &[f64], allowed: &[bool]) -> Result<PhaseEnd> {
        for _ in 0..MAX_REFACTORS {
            if !self.reinvert(initial) {
                break;
            }
            self.price_out(cost);
            let before = self.pivots;
            if let PhaseEnd::Unbounded = self.run(allowed)? {
                return Ok(PhaseEnd::Unbounded);
            }
            if self.pivots == before {
                break;
            }
        }
        Ok(PhaseEnd::Optimal)
    }

    fn run(&mut self, allowed: &[bool]) -> Result<PhaseEnd> {
        loop {
            let Some(col) = self.choose_entering(allowed) else {
                return Ok(PhaseEnd::Optimal);
            };
            let Some(row) = self.choose_leaving(col) else {
                return Ok(PhaseEnd::Unbounded);
            };
            if self.pivots >= self.limit {
                return Err(Error::MaxIterations { limit: self.limit });
            }
            self.pivot(row, col);
        }
    }
}

/// Result of the tableau method on a standard form.
struct StdOutcome {
    status: LpStatus,
    /// Column values (when optimal).
    values: Vec<f64>,
    /// Simplex multipliers for every standard-form row (when optimal and
    /// requested), in the sign convention `reduced cost = c − Σ yᵢ aᵢ`.
    multipliers: Vec<f64>,
    pivots: usize,
}

fn solve_standard(sf: &StandardForm, opts: &SimplexOptions, want_multipliers: bool) -> Result<StdOutcome> {
    let m = sf.rows.len();
    let n = sf.n_cols;

    // Column layout: structural | slack/surplus | artificial.
    // Each row owns one identity column (slack for ≤, artificial otherwise)
    // whose reduced cost yields the row multiplier at the end.
    let mut flipped = vec![false; m];
    let mut n_slack = 0;
    let mut n_art = 0;
    let mut kinds = Vec::with_capacity(m);
    for (i, (_, rel, rhs)) in sf.rows.iter().enumerate() {
        let mut rel = *rel;
        if *rhs < 0.0 {
            flipped[i] = true;
            rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        match rel {
            Relation::Le => n_slack += 1,
            Relation::Ge => {
                n_slack += 1;
                n_art += 1
            }
            Relation::Eq => n_art += 1,
        }
        kinds.push(rel);
    }
    let n_total = n + n_slack + n_art;
    let w = n_total + 1;
    let mut data = vec![0.0; m * w];
    let mut basis = vec![0; m];
    let mut identity_col = vec![0; m];
    let mut is_artificial = vec![false; n_total];
    let mut next_slack = n;
    let mut next_art = n + n_slack;
    for (i, ((a, _, rhs), rel)) in sf.rows.iter().zip(&kinds).enumerate() {
        let sign = if flipped[i] { -1.0 } else { 1.0 };
        let row = &mut data[i * w..(i + 1) * w];
        for (dst, v) in row[..n].iter_mut().zip(a) {
            *dst = sign * v;
        }
        row[n_total] = sign * rhs;
        match rel {
            Relation::Le => {
                row[next_slack] = 1.0;
                basis[i] = next_slack;
                identity_col[i] = next_slack;
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -1.0;
                next_slack += 1;
                row[next_art] = 1.0;
                basis[i] = next_art;
                identity_col[i] = next_art;
                is_artificial[next_art] = true;
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = 1.0;
                basis[i] = next_art;
                identity_col[i] = next_art;
                is_artificial[next_art] = true;
                next_art += 1;
            }
        }
    }

    let refactor = m <= REFACTOR_MAX_ROWS;
    let initial = if refactor || want_multipliers {
        data.clone()
    } else {
        Vec::new()
    };
    let mut tab = Tableau {
        n_rows: m,
        n_cols: n_total,
        data,
        cost_row: Vec::new(),
        basis,
        pivots: 0,
        limit: 50 * (m + n_total),
        bland_after: opts.bland_after,
    };

    if n_art > 0 {
        let phase1_cost: Vec<f64> = is_artificial.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect();
        tab.price_out(&phase1_cost);
        let allowed = vec![true; n_total];
        // Phase 1 is bounded below by zero.
        tab.run(&allowed)?;
        if refactor {
            tab.polish(&initial, &phase1_cost, &allowed)?;
        }
        let infeasibility = -tab.cost_row[n_total];
        let scale = 1.0 + sf.rows.iter().map(|r| r.2.abs()).fold(0.0, f64::max);
        if infeasibility > TOL_LP * scale {
            return Ok(StdOutcome {
                status: LpStatus::Infeasible,
                values: Vec::new(),
                multipliers: Vec::new(),
                pivots: tab.pivots,
            });
        }
        // Drive zero-level artificials out of the basis where possible.
        for r in 0..m {
            if !is_artificial[tab.basis[r]] {
                continue;
            }
            let entering = (0..n_total)
                .filter(|&j| !is_artificial[j])
                .max_by(|&x, &y| tab.at(r, x).abs().total_cmp(&tab.at(r, y).abs()))
                .filter(|&j| tab.at(r, j).abs() > 1e-9);
            if let Some(j) = entering {
                tab.pivot(r, j);
            }
        }
    }

    let mut phase2_cost = sf.cost.clone();
    phase2_cost.resize(n_total, 0.0);
    tab.price_out(&phase2_cost);
    let allowed: Vec<bool> = is_artificial.iter().map(|a| !a).collect();
    let mut end = tab.run(&allowed)?;
    if refactor && matches!(end, PhaseEnd::Optimal) {
        end = tab.polish(&initial, &phase2_cost, &allowed)?;
    }
    if let PhaseEnd::Unbounded = end {
        return Ok(StdOutcome {
            status: LpStatus::Unbounded,
            values: Vec::new(),
            multipliers: Vec::new(),
            pivots: tab.pivots,
        });
    }

    let mut values = vec![0.0; n];
    for (r, &col) in tab.basis.iter().enumerate() {
        if col < n {
            values[col] = tab.rhs(r).max(0.0);
        }
    }
    let multipliers = if want_multipliers {
        basis_multipliers(&initial, w, &flipped, &tab.basis, &phase2_cost)
    } else {
        Vec::new()
    };
    Ok(StdOutcome {
        status: LpStatus::Optimal,
        values,
        multipliers,
        pivots: tab.pivots,
    })
}

/// Solves `Bᵀy = c_B` against the original columns of the final basis.
///
/// Reading `y` off the reduced-cost row instead accumulates rounding from
/// every pivot, which is too coarse when `y` is the answer.
fn basis_multipliers(initial: &[f64], width: usize, flipped: &[bool], basis: &[usize], cost: &[f64]) -> Vec<f64> {
    let m = flipped.len();
    // Bᵀ has the basic columns as rows.
    let bt: Vec<Vec<f64>> = basis
        .iter()
        .map(|&j| (0..m).map(|i| initial[i * width + j]).collect())
        .collect();
    let cb: Vec<f64> = basis.iter().map(|&j| cost[j]).collect();
    let mut y = solve_dense(bt.clone(), cb.clone());
    // One step of iterative refinement.
    let resid: Vec<f64> = bt
        .iter()
        .zip(&cb)
        .map(|(row, c)| c - row.iter().zip(&y).map(|(a, v)| a * v).sum::<f64>())
        .collect();
    let dy = solve_dense(bt, resid);
    for (v, d) in y.iter_mut().zip(dy) {
        *v += d;
    }
    y.iter().zip(flipped).map(|(&v, &f)| if f { -v } else { v }).collect()
}

/// Gaussian elimination with partial pivoting; singular pivots are skipped.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    let mut perm_ok = vec![true; n];
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        let p = a[col][col];
        if p.abs() < 1e-300 {
            perm_ok[col] = false;
            continue;
        }
        let (top, rest) = a.split_at_mut(col + 1);
        let prow = &top[col];
        for (k, row) in rest.iter_mut().enumerate() {
            let f = row[col] / p;
            if f != 0.0 {
                for (v, pv) in row[col..].iter_mut().zip(&prow[col..]) {
                    *v -= f * pv;
                }
                b[col + 1 + k] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        if !perm_ok[i] {
            continue;
        }
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

fn solve_primal_route(lp: &LinearProgram, opts: &SimplexOptions) -> Result<LpSolution> {
    let sf = standardize(lp);
    let out = solve_standard(&sf, opts, false)?;
    if out.status != LpStatus::Optimal {
        return Ok(LpSolution::without_point(out.status, out.pivots));
    }
    let x: Vec<f64> = sf
        .vars
        .iter()
        .map(|map| map.offset + map.terms.iter().map(|&(c, s)| s * out.values[c]).sum::<f64>())
        .collect();
    let objective_value = lp.objective_at(&x);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x: Some(x),
        objective_value: Some(objective_value),
        pivots: out.pivots,
    })
}

/// Primal `min cᵀx, aᵢᵀx ≥ bᵢ (or =)` with free `x` has dual
/// `max bᵀy, Aᵀy = c, y ≥ 0 (free for equalities)`. The dual is stated as a
/// minimization, solved on the tableau, and `x` is recovered as the negated
/// multipliers of its equality rows.
fn solve_dual_route(lp: &LinearProgram, opts: &SimplexOptions) -> Result<LpSolution> {
    let n = lp.n_vars();
    // Primal rows in ≥ / = form, bounds included.
    let mut rows: Vec<(Vec<f64>, bool, f64)> = Vec::with_capacity(lp.n_constraints() + 2 * n);
    for row in &lp.constraints {
        match row.relation {
            Relation::Ge => rows.push((row.coeffs.clone(), false, row.rhs)),
            Relation::Le => rows.push((row.coeffs.iter().map(|a| -a).collect(), false, -row.rhs)),
            Relation::Eq => rows.push((row.coeffs.clone(), true, row.rhs)),
        }
    }
    for (j, b) in lp.bounds.iter().enumerate() {
        if b.lower.is_finite() {
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            rows.push((a, false, b.lower));
        }
        if b.upper.is_finite() {
            let mut a = vec![0.0; n];
            a[j] = -1.0;
            rows.push((a, false, -b.upper));
        }
    }

    let n_dual = rows.len();
    let mut dual = LinearProgram::with_capacity(rows.iter().map(|r| -r.2).collect(), n);
    for (i, r) in rows.iter().enumerate() {
        if !r.1 {
            dual.bounds[i] = Bounds::NONNEGATIVE;
        }
    }
    for j in 0..n {
        let coeffs: Vec<f64> = rows.iter().map(|r| r.0[j]).collect();
        dual.add_constraint(coeffs, Relation::Eq, lp.objective[j]);
    }
    debug_assert_eq!(dual.n_vars(), n_dual);

    let sf = standardize(&dual);
    let out = solve_standard(&sf, opts, true)?;
    match out.status {
        LpStatus::Unbounded => Ok(LpSolution::without_point(LpStatus::Infeasible, out.pivots)),
        LpStatus::Infeasible => {
            let mut fallback = solve_primal_route(lp, opts)?;
            fallback.pivots += out.pivots;
            Ok(fallback)
        }
        LpStatus::Optimal => {
            let x: Vec<f64> = out.multipliers[..sf.n_original_rows].iter().map(|y| -y).collect();
            let objective_value = lp.objective_at(&x);
            Ok(LpSolution {
                status: LpStatus::Optimal,
                x: Some(x),
                objective_value: Some(objective_value),
                pivots: out.pivots,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn both_routes(lp: &LinearProgram) -> [LpSolution; 2] {
        [solve_primal(lp).unwrap(), solve_dual(lp).unwrap()]
    }

    #[test]
    fn single_lower_row() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.add_constraint(vec![1.0], Relation::Ge, 2.0);
        for sol in both_routes(&lp) {
            assert_eq!(sol.status, LpStatus::Optimal);
            assert!((sol.x.unwrap()[0] - 2.0).abs() < 1e-12);
            assert!((sol.objective_value.unwrap() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let mut lp = LinearProgram::new(vec![0.0]);
        lp.add_constraint(vec![1.0], Relation::Le, 1.0);
        lp.add_constraint(vec![1.0], Relation::Ge, 2.0);
        for sol in both_routes(&lp) {
            assert_eq!(sol.status, LpStatus::Infeasible);
            assert!(sol.x.is_none() && sol.objective_value.is_none());
        }
    }

    #[test]
    fn box_bound_binds() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.set_bounds(0, -1.0, 0.0);
        for sol in both_routes(&lp) {
            assert_eq!(sol.status, LpStatus::Optimal);
            assert!((sol.x.unwrap()[0] + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = LinearProgram::new(vec![-1.0, 0.0]);
        lp.add_constraint(vec![1.0, -1.0], Relation::Le, 1.0);
        for sol in both_routes(&lp) {
            assert_eq!(sol.status, LpStatus::Unbounded);
        }
    }

    #[test]
    fn equality_and_free_variables() {
        // min x + 2y s.t. x + y = 3, x - y <= 1, y <= 5 ; x, y free.
        let mut lp = LinearProgram::new(vec![1.0, 2.0]);
        lp.add_constraint(vec![1.0, 1.0], Relation::Eq, 3.0);
        lp.add_constraint(vec![1.0, -1.0], Relation::Le, 1.0);
        lp.add_constraint(vec![0.0, 1.0], Relation::Le, 5.0);
        for sol in both_routes(&lp) {
            let x = sol.x.unwrap();
            assert!((x[0] - 2.0).abs() < 1e-10 && (x[1] - 1.0).abs() < 1e-10, "{x:?}");
            assert!((sol.objective_value.unwrap() - 4.0).abs() < 1e-10);
        }
    }

    #[test]
    fn upper_only_bound() {
        // max x (min -x) with x <= 3 as a bound only.
        let mut lp = LinearProgram::new(vec![-1.0]);
        lp.set_bounds(0, f64::NEG_INFINITY, 3.0);
        for sol in both_routes(&lp) {
            assert!((sol.x.unwrap()[0] - 3.0).abs() < 1e-12);
        }
    }

    /// Beale's example, which cycles under the textbook largest-coefficient rule.
    fn beale() -> LinearProgram {
        let mut lp = LinearProgram::new(vec![-0.75, 150.0, -0.02, 6.0]);
        for j in 0..4 {
            lp.set_bounds(j, 0.0, f64::INFINITY);
        }
        lp.add_constraint(vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0);
        lp.add_constraint(vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0);
        lp.add_constraint(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
        lp
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        let lp = beale();
        for bland_after in [0, 1000] {
            for method in [Method::Primal, Method::Dual] {
                let sol = solve_with(&lp, &SimplexOptions { bland_after, method }).unwrap();
                assert_eq!(sol.status, LpStatus::Optimal);
                assert!((sol.objective_value.unwrap() + 0.05).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn malformed_lp_rejected() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.add_constraint(vec![1.0], Relation::Le, 1.0);
        assert!(matches!(solve_lp(&lp), Err(Error::MalformedLp(_))));
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.set_bounds(0, 2.0, 1.0);
        assert!(solve_lp(&lp).is_err());
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.add_constraint(vec![f64::NAN], Relation::Le, 1.0);
        assert!(solve_lp(&lp).is_err());
    }

    #[test]
    fn debug_text_round_trip() {
        let mut lp = beale();
        lp.set_bounds(1, f64::NEG_INFINITY, 2.5);
        lp.add_constraint(vec![1e-30, 1.0 / 3.0, 0.0, -7.0], Relation::Eq, -2.0);
        let text = lp.to_debug_text();
        assert!(text.lines().any(|l| l.ends_with("<= 1.0")));
        let back = LinearProgram::from_debug_text(&text).unwrap();
        assert_eq!(back, lp);
        assert!(LinearProgram::from_debug_text("1 2 <= 3").is_err());
    }

    #[test]
    fn tall_problem_uses_dual_and_matches_primal() {
        // Best constant approximation of 40 values as an LP: min u s.t. |f_i - a| <= u.
        let values: Vec<f64> = (0..40).map(|i| ((i * 37 % 11) as f64).sin()).collect();
        let mut lp = LinearProgram::new(vec![0.0, 1.0]);
        for &f in &values {
            lp.add_constraint(vec![-1.0, -1.0], Relation::Le, -f);
            lp.add_constraint(vec![1.0, -1.0], Relation::Le, f);
        }
        let auto = solve_lp(&lp).unwrap();
        let primal = solve_primal(&lp).unwrap();
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        for sol in [auto, primal] {
            let x = sol.x.unwrap();
            assert!((x[1] - (hi - lo) / 2.0).abs() < 1e-10);
            assert!(lp.max_violation(&x) < TOL_LP);
        }
    }
}
