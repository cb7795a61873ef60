use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};
use somqe::imaging::TransformMode;
use somqe::pipeline::{parse_config, parse_grid_dims, ConfigError, PipelineError, RunConfig};
use somqe::som::DecayMode;
use somqe::stats::YearFix;

mod commands;

#[derive(Debug, Parser)]
#[command(
    name = "somqe",
    version,
    about = "Change detection in image time series via SOM quantization error"
)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Co-register and normalize a stack; writes aligned frames and transforms.txt.
    Register(StackArgs),
    /// Train the map on the prepared anchor frame; writes grid.som.
    Train(StackArgs),
    /// Score every frame against a saved map; writes report.csv.
    Score {
        #[command(flatten)]
        stack: StackArgs,
        /// Map written by `train`.
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
    },
    /// Least-squares trend of every column of a year table.
    Stats(TableArgs),
    /// Pearson correlation of every QE column against every covariate.
    Correlate {
        /// Year table of QE values.
        #[arg(long, value_name = "FILE")]
        qe: PathBuf,
        #[command(flatten)]
        table: TableArgs,
    },
    /// Full pipeline: register, normalize, train, score, fit, report.
    Run {
        #[command(flatten)]
        stack: StackArgs,
        /// Optional covariate table to correlate against.
        #[arg(long, value_name = "FILE")]
        covariates: Option<PathBuf>,
    },
    /// Scatter plots with fitted trend for every column of a year table.
    Plot {
        #[arg(long, value_name = "FILE")]
        covariates: PathBuf,
        #[arg(long, value_name = "DIR", default_value = ".")]
        out: PathBuf,
        #[arg(long, value_name = "FIX")]
        year_fix: Option<YearFix>,
    },
}

#[derive(Debug, Args)]
struct StackArgs {
    /// Tab-separated manifest: path, label, year.
    #[arg(long, value_name = "FILE")]
    manifest: PathBuf,
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Debug, Args)]
struct TableArgs {
    /// Year table (header `year,<name>,...`).
    #[arg(long, value_name = "FILE")]
    covariates: PathBuf,
    /// Write a CSV here in addition to stdout.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Year interpretation; both are reported when omitted.
    #[arg(long, value_name = "FIX")]
    year_fix: Option<YearFix>,
}

/// Settings that override the config file.
#[derive(Debug, Args)]
struct Overrides {
    /// key = value config file.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Map size as WxH.
    #[arg(long, value_name = "WxH", value_parser = parse_grid_dims)]
    grid: Option<(usize, usize)>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    /// constant | linear
    #[arg(long)]
    decay: Option<DecayMode>,
    /// translation | rigid
    #[arg(long)]
    mode: Option<TransformMode>,
    /// as-printed | relabel-1990
    #[arg(long)]
    year_fix: Option<YearFix>,
}

impl Overrides {
    fn resolve(&self) -> Result<RunConfig, PipelineError> {
        let mut config = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
                    path: path.clone(),
                    message: e.to_string(),
                })?;
                parse_config(&text)?
            }
            None => RunConfig::default(),
        };
        if let Some(v) = self.seed {
            config.som.seed = v;
        }
        if let Some(v) = self.grid {
            config.grid = v;
        }
        if let Some(v) = self.iterations {
            config.som.iterations = v;
        }
        if let Some(v) = self.alpha {
            config.som.learning_rate = v;
        }
        if let Some(v) = self.radius {
            config.som.neighborhood_radius = v;
        }
        if let Some(v) = self.decay {
            config.som.decay = v;
        }
        if let Some(v) = self.mode {
            config.mode = v;
        }
        if let Some(v) = self.year_fix {
            config.year_fix = v;
        }
        config.som.validate()?;
        Ok(config)
    }
}

fn dispatch(command: Command) -> Result<(), PipelineError> {
    match command {
        Command::Register(s) => commands::register(&s.manifest, &s.out, &s.overrides.resolve()?),
        Command::Train(s) => commands::train(&s.manifest, &s.out, &s.overrides.resolve()?),
        Command::Score { stack: s, model } => commands::score(&s.manifest, &s.out, &model, &s.overrides.resolve()?),
        Command::Stats(t) => commands::stats(&t.covariates, t.out.as_deref(), t.year_fix),
        Command::Correlate { qe, table: t } => commands::correlate(&qe, &t.covariates, t.out.as_deref(), t.year_fix),
        Command::Run { stack: s, covariates } => {
            commands::run(&s.manifest, &s.out, covariates.as_deref(), &s.overrides.resolve()?)
        }
        Command::Plot {
            covariates,
            out,
            year_fix,
        } => commands::plot(&covariates, &out, year_fix.unwrap_or_default()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let first = e.to_string().lines().next().unwrap_or_default().replace('"', "'");
            eprintln!("error stage=usage index=- exit=1 message=\"{first}\"");
            return ExitCode::from(1);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
