//! `peakhabit`: thresholds, policies, simulations and sweeps from the command
//! line.

mod check;
mod commands;
mod table;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use peakhabit::{LimitDirection, ModelParams, SweepParam, SweepQuantity};

use table::Format;

#[derive(Debug, Parser)]
#[command(
    name = "peakhabit",
    version,
    about = "Consumption and investment with a consumption-peak habit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
struct Common {
    /// JSON parameter file.
    #[arg(long)]
    params: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Worker threads; all available cores when omitted.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct HGrid {
    #[arg(long, default_value_t = 0.1)]
    h_min: f64,
    #[arg(long, default_value_t = 20.0)]
    h_max: f64,
    #[arg(long, default_value_t = 200)]
    h_steps: usize,
}

#[derive(Debug, Args)]
struct Mc {
    /// Starting wealth.
    #[arg(long)]
    x0: f64,
    /// Starting habit level.
    #[arg(long)]
    h0: f64,
    /// Horizon in years.
    #[arg(long, default_value_t = 30.0)]
    horizon: f64,
    /// Time step in years.
    #[arg(long, default_value_t = 1.0 / 252.0)]
    dt: f64,
    #[arg(long, default_value_t = 1000)]
    paths: usize,
    #[arg(long)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the consistency checks and report pass or fail for each.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.1)]
        h_min: f64,
        #[arg(long, default_value_t = 20.0)]
        h_max: f64,
        #[arg(long, default_value_t = 40)]
        h_steps: usize,
    },
    /// Wealth thresholds on a habit grid.
    Thresholds {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: HGrid,
    },
    /// Optimal policy on a wealth grid at one habit level.
    Policy {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        h: f64,
        #[arg(long, default_value_t = 200)]
        x_steps: usize,
        /// Lower end of the wealth grid; the wealth floor when omitted.
        #[arg(long)]
        x_min: Option<f64>,
        /// Upper end of the wealth grid; the bliss curve when omitted.
        #[arg(long)]
        x_max: Option<f64>,
    },
    /// Value function at given wealth levels.
    Value {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        h: f64,
        /// Wealth levels, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<f64>,
    },
    /// Simulate the optimally controlled wealth and peak.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        mc: Mc,
        /// Keep every n-th step in the output.
        #[arg(long, default_value_t = 1)]
        record_every: usize,
    },
    /// Solve the budget equation for the dual starting point by Monte Carlo.
    Budget {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        mc: Mc,
        /// Evaluate the budget at these dual values instead of solving.
        #[arg(long, value_delimiter = ',')]
        y: Vec<f64>,
    },
    /// One-parameter sensitivity sweep.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_sweep_param)]
        param: SweepParam,
        /// Swept values, comma separated. Defaults to an even grid over the
        /// admissible range for alpha and lambda.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        /// Number of default swept values.
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, value_parser = parse_quantity, default_value = "thresholds")]
        quantity: SweepQuantity,
        #[command(flatten)]
        grid: HGrid,
        #[arg(long, default_value_t = 100)]
        x_steps: usize,
    },
    /// Thresholds along a sequence of vanishing risk aversion.
    Limits {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_direction)]
        direction: LimitDirection,
        /// Strictly decreasing positive values, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1,0.1,0.01,0.001")]
        betas: Vec<f64>,
        #[arg(long, default_value_t = 4.0)]
        h: f64,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Check { common, .. }
            | Command::Thresholds { common, .. }
            | Command::Policy { common, .. }
            | Command::Value { common, .. }
            | Command::Simulate { common, .. }
            | Command::Budget { common, .. }
            | Command::Sweep { common, .. }
            | Command::Limits { common, .. } => common,
        }
    }
}

fn parse_sweep_param(s: &str) -> Result<SweepParam, String> {
    match s {
        "alpha" => Ok(SweepParam::Alpha),
        "lambda" => Ok(SweepParam::Lambda),
        "beta1" => Ok(SweepParam::Beta1),
        "beta2" => Ok(SweepParam::Beta2),
        _ => Err("expected alpha, lambda, beta1 or beta2".into()),
    }
}

fn parse_quantity(s: &str) -> Result<SweepQuantity, String> {
    match s {
        "thresholds" => Ok(SweepQuantity::Thresholds),
        "consumption" => Ok(SweepQuantity::Consumption),
        "proportion" => Ok(SweepQuantity::Proportion),
        _ => Err("expected thresholds, consumption or proportion".into()),
    }
}

fn parse_direction(s: &str) -> Result<LimitDirection, String> {
    match s {
        "beta1" => Ok(LimitDirection::Beta1ToZero),
        "beta2" => Ok(LimitDirection::Beta2ToZero),
        _ => Err("expected beta1 or beta2".into()),
    }
}

/// Failure modes, mapped to exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flag values or combinations (exit 2).
    #[error("{0}")]
    Usage(String),
    /// Domain, convergence and I/O failures (exit 1).
    #[error(transparent)]
    Model(#[from] peakhabit::Error),
    #[error("{0}")]
    Io(String),
    /// A `check` gate failed; the report has already been written.
    #[error("{0} check(s) failed")]
    ChecksFailed(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

fn read_params(path: &Path) -> Result<ModelParams, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let p: ModelParams = serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    p.validate()?;
    Ok(p)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let common = cli.command.common();
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    let params = read_params(&common.params)?;
    let (format, output) = (common.format, common.output.as_deref());
    let (table, failures) = match &cli.command {
        Command::Check {
            h_min, h_max, h_steps, ..
        } => {
            let grid = commands::h_grid(*h_min, *h_max, *h_steps)?;
            let report = check::run(&params, &grid)?;
            let failed = report.failures();
            (report.into_table(), failed)
        }
        Command::Thresholds { grid, .. } => {
            let hs = commands::h_grid(grid.h_min, grid.h_max, grid.h_steps)?;
            (commands::thresholds(&params, &hs)?, 0)
        }
        Command::Policy {
            h,
            x_steps,
            x_min,
            x_max,
            ..
        } => (commands::policy(&params, *h, *x_steps, *x_min, *x_max)?, 0),
        Command::Value { h, x, .. } => (commands::value(&params, *h, x)?, 0),
        Command::Simulate { mc, record_every, .. } => (commands::simulate(&params, &mc.into(), *record_every)?, 0),
        Command::Budget { mc, y, .. } => (commands::budget(&params, &mc.into(), y)?, 0),
        Command::Sweep {
            param,
            values,
            n,
            quantity,
            grid,
            x_steps,
            ..
        } => {
            let hs = commands::h_grid(grid.h_min, grid.h_max, grid.h_steps)?;
            (
                commands::sweep(&params, *param, values, *n, *quantity, hs, *x_steps)?,
                0,
            )
        }
        Command::Limits {
            direction, betas, h, ..
        } => (commands::limits(&params, *direction, betas, *h)?, 0),
    };
    table::emit(&table.render(format), output).map_err(|e| CliError::Io(e.to_string()))?;
    if failures > 0 {
        return Err(CliError::ChecksFailed(failures));
    }
    Ok(())
}

impl From<&Mc> for commands::McArgs {
    fn from(m: &Mc) -> Self {
        Self {
            x0: m.x0,
            h0: m.h0,
            horizon: m.horizon,
            dt: m.dt,
            paths: m.paths,
            seed: m.seed,
        }
    }
}

/// Output is rendered in memory and written in one step at the end, so a
/// failed run never leaves a partial file behind.
fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
