//! Command-line front end for the vbpbb toolkit.

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use vbpbb::sim::{GridScale, TableKind};
use vbpbb::{EdgePolicy, ResampleMode};

use commands::{BootstrapArgs, FilterArgs, GridSource, ReportArgs, SimulateArgs, TransferArgs};
use error::CliError;

#[derive(Parser)]
#[command(
    name = "vbpbb",
    version,
    about = "KZFT filtering and periodic block bootstrap"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Edge {
    Truncate,
    Renormalize,
}

impl From<Edge> for EdgePolicy {
    fn from(e: Edge) -> Self {
        match e {
            Edge::Truncate => EdgePolicy::Truncate,
            Edge::Renormalize => EdgePolicy::Renormalize,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Phasewise,
    SeasonBlock,
}

impl From<Mode> for ResampleMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Phasewise => ResampleMode::Phasewise,
            Mode::SeasonBlock => ResampleMode::SeasonBlock,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Desk,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a KZ (nu = 0) or KZFT bandpass filter to a series.
    Filter {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0.0)]
        nu: f64,
        #[arg(long, value_enum, default_value = "truncate")]
        edge: Edge,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Periodic block bootstrap band for the periodic mean.
    Bootstrap {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        period: usize,
        #[arg(long = "B", visible_alias = "resamples", default_value_t = 500)]
        resamples: usize,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        #[arg(long, value_enum, default_value = "phasewise")]
        mode: Mode,
        /// Seed; drawn from OS entropy and recorded in the output when omitted.
        #[arg(long)]
        seed: Option<u64>,
        /// Bandpass the series at nu = 1/period first (VBPBB), given as `m,k`.
        #[arg(long, value_parser = commands::parse_filter_spec)]
        filter: Option<(usize, usize)>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a PBB versus VBPBB simulation grid.
    Simulate {
        /// JSON scenario grid: an array, or an object with a `scenarios` array.
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        grid: Option<PathBuf>,
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        #[arg(long)]
        out_dir: PathBuf,
        /// Worker threads; results do not depend on this.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Master seed for scenarios that do not set one.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Tabulate the energy transfer function of a KZFT filter.
    Transfer {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0.0)]
        nu: f64,
        #[arg(long, default_value_t = 501)]
        grid_points: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Rebuild a summary table from saved scenario reports.
    Report {
        #[arg(long)]
        in_dir: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        table: u8,
        /// Round cells and print small outside differences as `<0.01` / `<0.05`.
        #[arg(long = "paper-style")]
        threshold_style: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Filter {
            input,
            m,
            k,
            nu,
            edge,
            output,
        } => commands::filter(&FilterArgs {
            input,
            m,
            k,
            nu,
            edge: edge.into(),
            output,
        }),
        Command::Bootstrap {
            input,
            period,
            resamples,
            level,
            mode,
            seed,
            filter,
            output,
        } => commands::bootstrap(&BootstrapArgs {
            input,
            period,
            resamples,
            level,
            mode: mode.into(),
            seed,
            filter,
            output,
        }),
        Command::Simulate {
            grid,
            preset,
            out_dir,
            threads,
            seed,
        } => {
            let grid = match (grid, preset) {
                (Some(path), _) => GridSource::File(path),
                (None, Some(Preset::Desk)) => GridSource::Preset(GridScale::Desk),
                (None, Some(Preset::Full)) => GridSource::Preset(GridScale::Full),
                (None, None) => {
                    return Err(CliError::Usage(
                        "one of --grid or --preset is required".into(),
                    ))
                }
            };
            commands::simulate(&SimulateArgs {
                grid,
                out_dir,
                threads,
                seed,
            })
        }
        Command::Transfer {
            m,
            k,
            nu,
            grid_points,
            output,
        } => commands::transfer(&TransferArgs {
            m,
            k,
            nu,
            grid_points,
            output,
        }),
        Command::Report {
            in_dir,
            table,
            threshold_style,
            output,
        } => {
            let table = TableKind::from_number(table)
                .ok_or_else(|| CliError::Usage(format!("no table {table}")))?;
            commands::report(&ReportArgs {
                in_dir,
                table,
                threshold_style,
                output,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
