//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_GAPS` are still run and reported as failing,
//! but do not affect the exit status. Any other failure exits nonzero.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::time::Instant;

use ratfit_cli::{fit, preset, RunResult};
use ratfit_core::bisection::{bisect, BisectionConfig, LevelOracle};
use ratfit_core::feasibility::FeasibilityOutcome;
use ratfit_core::simplex::{solve_dual, solve_lp, solve_primal, LpStatus};
use ratfit_core::{check_level_hinge, fit_rational, RationalModel};

/// Criteria the current witness rule does not meet; the analysis lives in
/// the project notes.
const KNOWN_GAPS: &[&str] = &["table1", "intervals"];

type Criterion = (&'static str, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            pass: true,
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.pass &= ok;
        self.details
            .push(format!("{} {line}", if ok { "ok  " } else { "MISS" }));
    }
}

fn run_preset(name: &str) -> (RunResult, f64) {
    let start = Instant::now();
    let config = preset(name).unwrap_or_else(|| panic!("preset {name}"));
    let (result, _, _) = fit(&config, None).unwrap_or_else(|e| panic!("{name}: {e}"));
    (result, start.elapsed().as_secs_f64())
}

fn same_knot() -> Outcome {
    let mut out = Outcome::new();
    type Case<'a> = (&'a str, (f64, f64), &'a dyn Fn(usize) -> bool, &'a str);
    let cases: [Case; 4] = [
        (
            "paper-5.2.1-theta-0.25",
            (0.005, 0.02),
            &|c| (8..=10).contains(&c),
            "{8,9,10}",
        ),
        (
            "paper-5.2.1-theta-0.5",
            (0.06, 0.15),
            &|c| (7..=9).contains(&c),
            "{7,8,9}",
        ),
        ("paper-5.2.1-theta-0", (0.06, 0.15), &|c| c < 9, "< 9"),
        ("paper-5.2.1-theta-neg0.5", (0.06, 0.15), &|c| c < 9, "< 9"),
    ];
    for (name, (lo, hi), count_ok, count_text) in cases {
        let (r, secs) = run_preset(name);
        let dev = r.max_deviation;
        out.check(
            (lo..=hi).contains(&dev) && count_ok(r.alternation_count) && secs < 120.0,
            format!(
                "{name}: deviation {dev:.6} in [{lo}, {hi}], count {} in {count_text}, {secs:.2} s",
                r.alternation_count
            ),
        );
    }
    out
}

fn table1() -> Outcome {
    let mut out = Outcome::new();
    let rows = [
        ("paper-table1-0.25-0.5", 7),
        ("paper-table1-0.25-0", 7),
        ("paper-table1-0.5-0.25", 5),
        ("paper-table1-0.5-0", 6),
        ("paper-table1-0-0.25", 7),
        ("paper-table1-0-0.5", 7),
        ("paper-table1-neg1_3-1_3", 7),
        ("paper-table1-1_3-neg1_3", 9),
    ];
    let mut thirds = Vec::new();
    for (name, expected) in rows {
        let (r, _) = run_preset(name);
        let count = r.alternation_count;
        out.check(
            count.abs_diff(expected) <= 1,
            format!(
                "{name}: count {count}, table {expected} ± 1 (deviation {:.6})",
                r.max_deviation
            ),
        );
        if name.contains("1_3") {
            thirds.push(r.max_deviation);
        }
    }
    let gap = (thirds[0] - thirds[1]).abs();
    out.check(
        gap <= 1e-3,
        format!("±1/3 knot swap: deviations differ by {gap:.2e} (≤ 1e-3)"),
    );
    out
}

fn intervals() -> Outcome {
    let mut out = Outcome::new();
    let (four, _) = run_preset("paper-5.2.2-4intervals");
    out.check(
        (0.20..=0.30).contains(&four.max_deviation) && four.alternation_count.abs_diff(4) <= 1,
        format!(
            "4 intervals: deviation {:.6} in [0.20, 0.30], count {} in 4 ± 1",
            four.max_deviation, four.alternation_count
        ),
    );
    let (seven, _) = run_preset("paper-5.2.2-7intervals");
    let same_max = ["0.25", "0.5", "0", "neg0.5"]
        .iter()
        .map(|l| run_preset(&format!("paper-5.2.1-theta-{l}")).0.max_deviation)
        .fold(0.0, f64::max);
    out.check(
        seven.max_deviation > same_max,
        format!(
            "7 intervals: deviation {:.6} > every same-knot deviation (max {same_max:.6})",
            seven.max_deviation
        ),
    );
    out.check(
        seven.alternation_count <= 4,
        format!("7 intervals: count {} ≤ 4", seven.alternation_count),
    );
    out
}

/// Feasible iff `z ≥ threshold`.
struct Step(f64);

impl LevelOracle for Step {
    type Witness = f64;

    fn check(&mut self, level: f64) -> ratfit_core::Result<FeasibilityOutcome<f64>> {
        let feasible = level >= self.0;
        Ok(FeasibilityOutcome {
            feasible,
            witness: feasible.then_some(level),
            slack: None,
        })
    }

    fn default_bounds(&self) -> (f64, f64) {
        (0.0, 2.0)
    }

    fn deviation(&self, w: &f64) -> ratfit_core::Result<f64> {
        Ok(*w)
    }
}

fn bisection() -> Outcome {
    let mut out = Outcome::new();
    let fit = bisect(&mut Step(0.5), &BisectionConfig::default()).unwrap();
    out.check(
        fit.iterations == 18 && fit.lower <= 0.5 && 0.5 <= fit.upper,
        format!(
            "step oracle: {} iterations, bracket [{}, {}]",
            fit.iterations, fit.lower, fit.upper
        ),
    );
    let (mut lo, mut hi) = (0.0f64, 2.0f64);
    let mut halves = true;
    for rec in &fit.levels_tried[1..] {
        let width = hi - lo;
        halves &= rec.z == 0.5 * (lo + hi);
        if rec.feasible {
            hi = rec.z
        } else {
            lo = rec.z
        }
        halves &= hi - lo == 0.5 * width;
    }
    out.check(halves, "bracket halves exactly at every step".into());

    let grid = support::sqrt_grid(2001);
    for (label, model) in [
        (
            "same knot 0.25",
            RationalModel::piecewise_ratio(2, &[0.25], &[0.25]).unwrap(),
        ),
        (
            "knots 0.5 / 0.25",
            RationalModel::piecewise_ratio(2, &[0.5], &[0.25]).unwrap(),
        ),
        (
            "4 intervals",
            RationalModel::piecewise_ratio(1, &[-0.5, 0.0, 0.5], &[-0.5, 0.0, 0.5]).unwrap(),
        ),
    ] {
        let fit = fit_rational(&model, &grid, &BisectionConfig::default()).unwrap();
        let failures = support::witness_failures(&model, &grid, &fit);
        out.check(
            fit.grid_max_deviation <= fit.upper + 1e-7 && failures.is_empty(),
            format!(
                "{label}: witness deviation {:.9} ≤ upper {:.9} + 1e-7; {} uncertified levels",
                fit.grid_max_deviation,
                fit.upper,
                failures.len()
            ),
        );
    }
    out
}

fn lp_oracle() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = support::rng(2024);
    let (mut worst, mut status_mismatch, mut optimal) = (0.0f64, 0, 0);
    for _ in 0..200 {
        let lp = support::random_lp(&mut rng);
        let oracle = support::vertex_oracle(&lp);
        for sol in [
            solve_lp(&lp).unwrap(),
            solve_primal(&lp).unwrap(),
            solve_dual(&lp).unwrap(),
        ] {
            match (oracle, sol.status) {
                (Some(best), LpStatus::Optimal) => worst = worst.max((sol.objective_value.unwrap() - best).abs()),
                (None, LpStatus::Infeasible) => {}
                _ => status_mismatch += 1,
            }
        }
        optimal += oracle.is_some() as usize;
    }
    out.check(
        worst <= 1e-8 && status_mismatch == 0,
        format!("200 LPs ({optimal} optimal): worst objective gap {worst:.1e}, {status_mismatch} status mismatches"),
    );
    out
}

fn hinge_oracle() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = support::rng(7);
    let (mut disagreements, mut bad_theta, mut checks) = (0, 0, 0);
    for _ in 0..100 {
        let p = support::random_hinge_problem(&mut rng);
        let (best, h) = support::theta_scan(&p);
        let slope = p.coefficients().2.abs();
        for z in [best, best * 1.05 + 1e-6, (best - 2.0 * slope * h) * 0.9, best * 0.5] {
            if z < 0.0 {
                continue;
            }
            checks += 1;
            let res = check_level_hinge(&p, z).unwrap();
            disagreements += (res.feasible != (z >= best)) as usize;
            if let Some(w) = res.witness {
                bad_theta += (p.deviation(w.theta) > z + 1e-9) as usize;
            }
        }
    }
    out.check(
        disagreements == 0 && bad_theta == 0,
        format!("100 problems, {checks} levels: {disagreements} disagreements with the θ scan, {bad_theta} witnesses above z + 1e-9"),
    );
    out
}

fn quasiconvexity() -> Outcome {
    let mut out = Outcome::new();
    let r = support::quasiconvexity_trial(5, 10_000);
    out.check(
        r.violations == 0,
        format!(
            "{} triples tested, {} violations, {} skipped outside the domain",
            r.tested, r.violations, r.skipped
        ),
    );
    out
}

fn monotonicity() -> Outcome {
    let mut out = Outcome::new();
    let r = support::monotonicity_trial(11, 20, 10);
    out.check(
        r.violations.is_empty(),
        format!(
            "{} level pairs ({} feasible at the lower level), {} violations",
            r.pairs,
            r.feasible_low,
            r.violations.len()
        ),
    );
    for v in &r.violations {
        out.details.push(format!("     {v}"));
    }
    out
}

fn main() {
    let criteria: [Criterion; 8] = [
        (
            "same_knot",
            "same-knot quadratic ratios: deviation and peak counts",
            same_knot,
        ),
        ("table1", "distinct knots: peak counts within one of the table", table1),
        ("intervals", "piecewise linear ratios with 4 and 7 intervals", intervals),
        (
            "bisection",
            "bisection halving, step count and certified witness",
            bisection,
        ),
        ("lp_oracle", "simplex against vertex enumeration", lp_oracle),
        ("hinge_oracle", "knot interval against a dense θ scan", hinge_oracle),
        (
            "quasiconvexity",
            "sampled quasiconvexity of the maximal deviation",
            quasiconvexity,
        ),
        ("monotonicity", "level feasibility is monotone", monotonicity),
    ];
    let mut unexpected = 0;
    let mut failed = 0;
    for (id, title, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let known = KNOWN_GAPS.contains(&id);
        let tag = match (outcome.pass, known) {
            (true, false) => "PASS",
            (true, true) => "PASS (listed as a known gap)",
            (false, true) => "FAIL (known gap)",
            (false, false) => "FAIL",
        };
        println!("{tag:<5} {id}: {title} [{:.1} s]", start.elapsed().as_secs_f64());
        for line in &outcome.details {
            println!("      {line}");
        }
        if !outcome.pass {
            failed += 1;
            if !known {
                unexpected += 1;
            }
        }
    }
    println!(
        "\n{} of 8 criteria pass; {failed} fail ({unexpected} unexpected)",
        8 - failed
    );
    if unexpected > 0 {
        std::process::exit(1);
    }
}
