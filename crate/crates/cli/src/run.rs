//! Fit driver and output files.

use std::path::{Path, PathBuf};

use ratfit_core::bisection::bisect;
use ratfit_core::feasibility::{HingeOracle, RationalOracle};
use ratfit_core::{
    build_grid, count_alternations, error_curve, BisectionConfig, Coefficients, ErrorCurve, ExtremaReport,
    HingeProblem, LevelRecord, RationalModel,
};
use serde::Serialize;

use crate::config::{Problem, RunConfig};
use crate::CliError;

pub const RESULT_FILE: &str = "result.json";
pub const CURVE_FILE: &str = "error_curve.csv";
pub const EXTREMA_FILE: &str = "extrema.json";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides the config's output directory.
    pub out_dir: Option<PathBuf>,
    /// Write every level LP under `<out>/lp/`.
    pub dump_lp: bool,
}

/// Contents of `result.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Coefficients>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numerator: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub denominator: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_interval: Option<(f64, f64)>,
    pub lower: f64,
    pub upper: f64,
    pub max_deviation: f64,
    pub iterations: usize,
    pub alternation_count: usize,
    pub rho: f64,
    pub grid_size: usize,
    pub levels_tried: Vec<LevelRecord>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub result: RunResult,
    pub curve: ErrorCurve,
    pub extrema: ExtremaReport,
    pub out_dir: PathBuf,
}

/// Fits without writing anything.
pub fn fit(config: &RunConfig, lp_dir: Option<&Path>) -> Result<(RunResult, ErrorCurve, ExtremaReport), CliError> {
    let problem = config.validate()?;
    let grid = build_grid(&config.target()?, config.interval, config.grid_size)?;
    let settings = BisectionConfig {
        epsilon: config.epsilon,
        delta: config.delta,
        max_iterations: config.max_iterations,
        ..BisectionConfig::default()
    };
    let (mut result, curve) = match problem {
        Problem::Rational(model) => {
            let mut oracle = RationalOracle::new(&model, &grid, config.delta)?;
            if let Some(dir) = lp_dir {
                oracle = oracle.dump_lps_to(dir);
            }
            let fit = bisect(&mut oracle, &settings)?;
            let curve = error_curve(&model, &fit.witness, &grid)?;
            let result = RunResult {
                mode: "rational",
                coefficients: Some(fit.witness),
                numerator: Some(model.numerator().specs()),
                denominator: Some(model.denominator().specs()),
                theta: None,
                theta_interval: None,
                lower: fit.lower,
                upper: fit.upper,
                max_deviation: fit.grid_max_deviation,
                iterations: fit.iterations,
                alternation_count: 0,
                rho: config.rho,
                grid_size: grid.len(),
                levels_tried: fit.levels_tried,
            };
            (result, curve)
        }
        Problem::Hinge(h) => {
            let problem = HingeProblem::new(h.a0, h.a1, h.a2, grid.clone())?;
            let fit = bisect(&mut HingeOracle::new(&problem), &settings)?;
            let (model, coef): (RationalModel, Coefficients) = problem.as_rational(fit.witness.theta)?;
            let curve = error_curve(&model, &coef, &grid)?;
            let result = RunResult {
                mode: "hinge",
                coefficients: None,
                numerator: None,
                denominator: None,
                theta: Some(fit.witness.theta),
                theta_interval: Some(fit.witness.interval),
                lower: fit.lower,
                upper: fit.upper,
                max_deviation: fit.grid_max_deviation,
                iterations: fit.iterations,
                alternation_count: 0,
                rho: config.rho,
                grid_size: grid.len(),
                levels_tried: fit.levels_tried,
            };
            (result, curve)
        }
    };
    let extrema = count_alternations(&curve, config.rho)?;
    result.alternation_count = extrema.alternation_count;
    Ok((result, curve, extrema))
}

/// Fits and writes `result.json`, `error_curve.csv` and `extrema.json`.
pub fn run(config: &RunConfig, options: &RunOptions) -> Result<RunOutput, CliError> {
    config.validate()?;
    let out_dir = options
        .out_dir
        .clone()
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    create_dir(&out_dir)?;
    let lp_dir = if options.dump_lp {
        let dir = out_dir.join("lp");
        create_dir(&dir)?;
        Some(dir)
    } else {
        None
    };

    let (result, curve, extrema) = fit(config, lp_dir.as_deref())?;

    let json = serde_json::to_string_pretty(&result).expect("result serializes");
    write(&out_dir.join(RESULT_FILE), json + "\n")?;
    curve.save_csv(out_dir.join(CURVE_FILE))?;
    write(&out_dir.join(EXTREMA_FILE), extrema.to_json()? + "\n")?;
    log::info!("wrote {}", out_dir.display());
    Ok(RunOutput {
        result,
        curve,
        extrema,
        out_dir,
    })
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn write(path: &Path, contents: String) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
