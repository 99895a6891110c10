//! Independent oracles and instance generators shared by the test suites.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ratfit_core::analysis::{check_quasiconvexity_sample, deviation_objective};
use ratfit_core::feasibility::{RationalOracle, DEFAULT_DELTA};
use ratfit_core::simplex::{LinearProgram, Relation};
use ratfit_core::{build_grid, Coefficients, FitResult, Grid, HingeProblem, RationalModel, TargetFunction};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// Linear programs

/// A hyperplane `aᵀx = b`; `must` marks equality rows that every vertex lies on.
struct Plane {
    a: Vec<f64>,
    b: f64,
    must: bool,
}

pub fn solve_square(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-9 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        let prow = m[col].clone();
        for r in (0..n).filter(|&r| r != col) {
            let f = m[r][col] / prow[col];
            for (v, pv) in m[r][col..].iter_mut().zip(&prow[col..]) {
                *v -= f * pv;
            }
            rhs[r] -= f * rhs[col];
        }
    }
    Some((0..n).map(|i| rhs[i] / m[i][i]).collect())
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Minimum objective over all feasible vertices, or `None` if there are none.
pub fn vertex_oracle(lp: &LinearProgram) -> Option<f64> {
    let n = lp.n_vars();
    let mut planes = Vec::new();
    for row in lp.constraints() {
        planes.push(Plane {
            a: row.coeffs.clone(),
            b: row.rhs,
            must: row.relation == Relation::Eq,
        });
    }
    for (j, b) in lp.bounds().iter().enumerate() {
        for v in [b.lower, b.upper] {
            if v.is_finite() {
                let mut a = vec![0.0; n];
                a[j] = 1.0;
                planes.push(Plane { a, b: v, must: false });
            }
        }
    }
    let mut best: Option<f64> = None;
    for subset in combinations(planes.len(), n) {
        let covers_eq = planes.iter().enumerate().all(|(i, p)| !p.must || subset.contains(&i));
        if !covers_eq {
            continue;
        }
        let m = subset.iter().map(|&i| planes[i].a.clone()).collect();
        let rhs = subset.iter().map(|&i| planes[i].b).collect();
        let Some(x) = solve_square(m, rhs) else { continue };
        if lp.max_violation(&x) <= 1e-9 {
            let obj = lp.objective_at(&x);
            best = Some(best.map_or(obj, |b: f64| b.min(obj)));
        }
    }
    best
}

pub fn random_lp(rng: &mut ChaCha8Rng) -> LinearProgram {
    let n = rng.random_range(1..=4);
    let rows = rng.random_range(1..=8);
    let c = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
    let mut lp = LinearProgram::new(c);
    for j in 0..n {
        let lo = rng.random_range(-6.0..0.0);
        let hi = rng.random_range(0.0..6.0);
        lp.set_bounds(j, lo, hi);
    }
    for _ in 0..rows {
        let a = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let rel = match rng.random_range(0..10) {
            0 => Relation::Eq,
            1..=5 => Relation::Le,
            _ => Relation::Ge,
        };
        lp.add_constraint(a, rel, rng.random_range(-4.0..4.0));
    }
    lp
}

pub fn scaled(lp: &LinearProgram, factor: f64) -> LinearProgram {
    let mut out = LinearProgram::new(lp.objective().to_vec());
    for (j, b) in lp.bounds().iter().enumerate() {
        out.set_bounds(j, b.lower, b.upper);
    }
    for row in lp.constraints() {
        out.add_constraint(
            row.coeffs.iter().map(|a| a * factor).collect(),
            row.relation,
            row.rhs * factor,
        );
    }
    out
}

// Hinge problems

pub const SCAN_POINTS: usize = 100_000;

pub fn random_hinge_problem(rng: &mut ChaCha8Rng) -> HingeProblem {
    let n = rng.random_range(5..=60);
    let (c, d) = (-1.0, 1.0);
    let points: Vec<f64> = (0..n).map(|i| c + (d - c) * i as f64 / (n - 1) as f64).collect();
    let knot = rng.random_range(-0.9..0.9);
    let (a0, a1, a2) = (
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(0.3..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 },
    );
    let noise = rng.random_range(0.0..0.3);
    let values = points
        .iter()
        .map(|&t| a0 + a1 * t + a2 * (t - knot).max(0.0) + noise * rng.random_range(-1.0..1.0))
        .collect();
    HingeProblem::new(a0, a1, a2, Grid::from_points(points, values).unwrap()).unwrap()
}

/// Minimal deviation over the scan and the step size of the scan.
pub fn theta_scan(p: &HingeProblem) -> (f64, f64) {
    let (c, d) = p.grid().interval();
    let h = (d - c) / (SCAN_POINTS - 1) as f64;
    let best = (0..SCAN_POINTS)
        .map(|k| p.deviation(c + h * k as f64))
        .fold(f64::INFINITY, f64::min);
    (best, h)
}

// Rational fits

/// The target `√|t − 0.25|` on `[−1, 1]`.
pub fn sqrt_grid(n: usize) -> Grid {
    build_grid(&TargetFunction::sqrt_abs_shift(0.25), (-1.0, 1.0), n).unwrap()
}

/// A small random target and piecewise ratio model.
pub fn random_rational_instance(rng: &mut ChaCha8Rng) -> (RationalModel, Grid) {
    let n = rng.random_range(21..=81);
    let grid = if rng.random_bool(0.5) {
        build_grid(
            &TargetFunction::sqrt_abs_shift(rng.random_range(-0.8..0.8)),
            (-1.0, 1.0),
            n,
        )
        .unwrap()
    } else {
        let points: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
        let (w, p) = (rng.random_range(1.0..8.0), rng.random_range(0.0..3.0));
        let values = points.iter().map(|&t| (w * t + p).sin() + 0.3 * t * t).collect();
        Grid::from_points(points, values).unwrap()
    };
    let degree = rng.random_range(1..=2);
    let knots = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..rng.random_range(0..=2))
            .map(|_| rng.random_range(-0.9..0.9))
            .collect()
    };
    let (kn, kd) = (knots(rng), knots(rng));
    (RationalModel::piecewise_ratio(degree, &kn, &kd).unwrap(), grid)
}

#[derive(Debug, Default)]
pub struct MonotonicityReport {
    pub pairs: usize,
    pub feasible_low: usize,
    pub violations: Vec<String>,
}

/// Feasible at `z` must imply feasible at every sampled `z′ > z`.
pub fn monotonicity_trial(seed: u64, instances: usize, pairs: usize) -> MonotonicityReport {
    let mut rng = rng(seed);
    let mut report = MonotonicityReport::default();
    for inst in 0..instances {
        let (model, grid) = random_rational_instance(&mut rng);
        let (lo, hi) = grid.value_range();
        let mut oracle = RationalOracle::new(&model, &grid, DEFAULT_DELTA).unwrap();
        for _ in 0..pairs {
            let a = rng.random_range(0.0..(hi - lo) * 0.5);
            let b = rng.random_range(0.0..(hi - lo) * 0.5);
            let (z, z2) = if a < b { (a, b) } else { (b, a) };
            let low = oracle.check(z).unwrap().feasible;
            let high = oracle.check(z2).unwrap().feasible;
            report.pairs += 1;
            if low {
                report.feasible_low += 1;
                if !high {
                    report
                        .violations
                        .push(format!("instance {inst}: feasible at {z}, infeasible at {z2}"));
                }
            }
        }
    }
    report
}

#[derive(Debug, Default)]
pub struct QuasiconvexityReport {
    pub tested: usize,
    pub skipped: usize,
    pub violations: usize,
}

/// Random coefficient pairs and weights for the degree-2 ratio with both
/// knots at 0.25.
pub fn quasiconvexity_trial(seed: u64, samples: usize) -> QuasiconvexityReport {
    let mut rng = rng(seed);
    let grid = sqrt_grid(2001);
    let model = RationalModel::piecewise_ratio(2, &[0.25], &[0.25]).unwrap();
    let phi = deviation_objective(&model, &grid);
    let n_a = model.n_numerator();
    let point = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..model.n_free())
            .map(|j| {
                if j < n_a {
                    rng.random_range(-2.0..2.0)
                } else {
                    rng.random_range(-1.0..1.0)
                }
            })
            .collect()
    };
    let mut report = QuasiconvexityReport::default();
    for _ in 0..samples {
        let (x, y) = (point(&mut rng), point(&mut rng));
        let lambda = rng.random_range(0.0..=1.0);
        match check_quasiconvexity_sample(&phi, &x, &y, lambda) {
            Ok(true) => report.tested += 1,
            Ok(false) => {
                report.tested += 1;
                report.violations += 1;
            }
            Err(ratfit_core::Error::DomainSkip) => report.skipped += 1,
            Err(e) => panic!("unexpected error: {e}"),
        }
    }
    report
}

/// Re-checks every feasible level of a fit and re-evaluates its witness
/// pointwise. Returns the levels whose witness fails, with the reason.
pub fn witness_failures(model: &RationalModel, grid: &Grid, fit: &FitResult<Coefficients>) -> Vec<String> {
    let mut oracle = RationalOracle::new(model, grid, DEFAULT_DELTA).unwrap();
    let mut failures = Vec::new();
    let mut check = |z: f64, coef: &Coefficients| {
        let mut dev: f64 = 0.0;
        let mut min_den = f64::INFINITY;
        for (t, f) in grid.iter() {
            let num: f64 = model.numerator().eval(t).iter().zip(&coef.a).map(|(g, a)| g * a).sum();
            let h = model.denominator().eval(t);
            let den = h[0] + h[1..].iter().zip(&coef.b).map(|(h, b)| h * b).sum::<f64>();
            dev = dev.max((f - num / den).abs());
            min_den = min_den.min(den);
        }
        if dev > z + 1e-7 {
            failures.push(format!("z = {z}: deviation {dev}"));
        }
        if min_den < DEFAULT_DELTA - 1e-9 {
            failures.push(format!("z = {z}: denominator {min_den}"));
        }
    };
    for rec in fit.levels_tried.iter().filter(|r| r.feasible) {
        let out = oracle.check(rec.z).unwrap();
        check(rec.z, out.witness.as_ref().unwrap());
    }
    check(fit.upper, &fit.witness);
    failures
}
