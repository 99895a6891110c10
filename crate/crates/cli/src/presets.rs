//! Named experiment configurations for `√|t − 0.25|` on `[−1, 1]`.

use crate::config::{Mode, RunConfig, TargetSpec};

const TARGET: &str = "sqrt_abs_shift(0.25)";

/// Preset names in a fixed order.
pub fn list_presets() -> Vec<String> {
    catalog().into_iter().map(|(name, _)| name).collect()
}

pub fn preset(name: &str) -> Option<RunConfig> {
    catalog().into_iter().find(|(n, _)| n == name).map(|(_, c)| c)
}

fn base(numerator: &[&str], denominator: &[&str], knots: Vec<f64>) -> RunConfig {
    RunConfig {
        target: TargetSpec::Builtin(TARGET.into()),
        interval: (-1.0, 1.0),
        grid_size: ratfit_core::model::DEFAULT_GRID_SIZE,
        numerator: numerator.iter().map(|s| s.to_string()).collect(),
        denominator: denominator.iter().map(|s| s.to_string()).collect(),
        knots,
        epsilon: 1e-5,
        delta: ratfit_core::feasibility::DEFAULT_DELTA,
        rho: ratfit_core::analysis::DEFAULT_RHO,
        max_iterations: 200,
        mode: Mode::Rational,
        hinge: None,
        output: None,
    }
}

/// Quadratic pieces over quadratic pieces, numerator knot `theta1`,
/// denominator knot `theta2`.
fn quadratic_ratio(num_knot: f64, den_knot: f64) -> RunConfig {
    base(
        &["1", "t", "t^2", "hinge(theta1)", "hinge(theta1)^2"],
        &["1", "t", "t^2", "hinge(theta2)", "hinge(theta2)^2"],
        vec![num_knot, den_knot],
    )
}

/// Linear pieces over linear pieces with three knots on each side.
fn linear_ratio(knots: [f64; 6]) -> RunConfig {
    base(
        &["1", "t", "hinge(theta1)", "hinge(theta2)", "hinge(theta3)"],
        &["1", "t", "hinge(theta4)", "hinge(theta5)", "hinge(theta6)"],
        knots.to_vec(),
    )
}

fn catalog() -> Vec<(String, RunConfig)> {
    let mut out = Vec::new();
    for (label, theta) in [("0.25", 0.25), ("0.5", 0.5), ("0", 0.0), ("neg0.5", -0.5)] {
        out.push((format!("paper-5.2.1-theta-{label}"), quadratic_ratio(theta, theta)));
    }
    let third = 1.0 / 3.0;
    for (l1, t1, l2, t2) in [
        ("0.25", 0.25, "0.5", 0.5),
        ("0.25", 0.25, "0", 0.0),
        ("0.5", 0.5, "0.25", 0.25),
        ("0.5", 0.5, "0", 0.0),
        ("0", 0.0, "0.25", 0.25),
        ("0", 0.0, "0.5", 0.5),
        ("neg1_3", -third, "1_3", third),
        ("1_3", third, "neg1_3", -third),
    ] {
        out.push((format!("paper-table1-{l1}-{l2}"), quadratic_ratio(t1, t2)));
    }
    out.push((
        "paper-5.2.2-4intervals".into(),
        linear_ratio([-0.5, 0.0, 0.5, -0.5, 0.0, 0.5]),
    ));
    let s = |k: f64| k / 7.0;
    out.push((
        "paper-5.2.2-7intervals".into(),
        linear_ratio([s(-5.0), s(-3.0), s(-1.0), s(1.0), s(3.0), s(5.0)]),
    ));
    out
}
