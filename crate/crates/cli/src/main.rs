use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ratfit_cli::{list_presets, preset, run, CliError, RunConfig, RunOptions};

/// Best uniform approximation by generalized rational functions.
#[derive(Debug, Parser)]
#[command(name = "ratfit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a fit from a JSON config or a named preset.
    Fit(FitArgs),
    /// List the preset names.
    Presets {
        /// Print the config of one preset instead.
        #[arg(long, value_name = "NAME")]
        show: Option<String>,
    },
}

#[derive(Debug, Args)]
struct FitArgs {
    #[arg(
        long,
        value_name = "PATH",
        conflicts_with = "preset",
        required_unless_present = "preset"
    )]
    config: Option<PathBuf>,
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Output directory (default: the config's `output`, else `out`).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Log every bisection step.
    #[arg(long)]
    verbose: bool,
    /// Write each level LP to `<out>/lp/`.
    #[arg(long)]
    dump_lp: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let verbose = matches!(&cli.command, Command::Fit(a) if a.verbose);
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if verbose { "debug" } else { "warn" }))
        .format_timestamp(None)
        .init();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Presets { show: None } => {
            for name in list_presets() {
                println!("{name}");
            }
            Ok(())
        }
        Command::Presets { show: Some(name) } => {
            let config = preset(&name).ok_or(CliError::UnknownPreset(name))?;
            println!("{}", config.to_json());
            Ok(())
        }
        Command::Fit(args) => {
            let config = match (&args.config, &args.preset) {
                (Some(path), _) => RunConfig::from_file(path)?,
                (None, Some(name)) => preset(name).ok_or_else(|| CliError::UnknownPreset(name.clone()))?,
                (None, None) => unreachable!("clap requires one of --config and --preset"),
            };
            let options = RunOptions {
                out_dir: args.out,
                dump_lp: args.dump_lp,
            };
            let out = run(&config, &options)?;
            let r = &out.result;
            println!(
                "max deviation {:.9} (bracket [{:.9}, {:.9}], {} iterations), {} alternating peaks at rho {}",
                r.max_deviation, r.lower, r.upper, r.iterations, r.alternation_count, r.rho
            );
            println!("wrote {}", out.out_dir.display());
            Ok(())
        }
    }
}
