//! Best uniform (Chebyshev) approximation by generalized rational functions
//! and other quasilinear families.
//!
//! The smallest achievable maximal deviation is found by bisection on the
//! deviation level. Each level test is a convex feasibility problem: a linear
//! program for ratios of linear forms ([`feasibility::RationalOracle`]), or a
//! closed-form interval intersection for a one-knot piecewise linear function
//! with fixed coefficients ([`feasibility::HingeOracle`]).
//!
//! ```
//! use ratfit_core::{build_grid, fit_rational, BisectionConfig, RationalModel, TargetFunction};
//!
//! let grid = build_grid(&TargetFunction::sqrt_abs_shift(0.25), (-1.0, 1.0), 201).unwrap();
//! let model = RationalModel::piecewise_ratio(1, &[0.25], &[0.25]).unwrap();
//! let fit = fit_rational(&model, &grid, &BisectionConfig::default()).unwrap();
//! assert!(fit.upper - fit.lower < 1e-5);
//! assert!(fit.grid_max_deviation <= fit.upper + 1e-7);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod basis;
pub mod bisection;
pub mod error;
pub mod feasibility;
pub mod model;
pub mod simplex;

pub use analysis::{count_alternations, error_curve, ErrorCurve, ExtremaReport, Extremum};
pub use basis::{BasisFunction, BasisSet};
pub use bisection::{
    bisect, fit_hinge, fit_rational, init_bounds, BisectionConfig, FitResult, LevelOracle, LevelRecord,
};
pub use error::{Error, Result};
pub use feasibility::{check_level_hinge, check_level_rational, FeasibilityOutcome, HingeProblem, HingeWitness};
pub use model::{build_grid, eval_model, max_deviation, Builtin, Coefficients, Grid, RationalModel, TargetFunction};
pub use simplex::{solve_lp, LinearProgram, LpSolution, LpStatus, Relation};
