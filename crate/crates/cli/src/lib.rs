//! Experiment runner for the `udn-core` engines: SE sweeps, Monte Carlo
//! validation, profit-optimal deployment and figure data.

pub mod commands;
pub mod config;
mod error;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use commands::figures::FigureId;
use config::{CommandKind, Overrides, Settings};
pub use error::{CliError, Result};
use output::write_file;

/// Output directory used when `--out` is absent.
pub const OUT_DIR_ENV: &str = "UDN_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "udn", version, about = "Ultra-dense network SE and deployment economics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact, ultra-dense and lower-bound SE over a BS-density sweep.
    SeSweep,
    /// Monte Carlo SE against the exact integral.
    Montecarlo {
        /// Also write the point sets of the first N trials.
        #[arg(long, value_name = "N")]
        dump: Option<u64>,
    },
    /// Closed-form and numerically optimal deployments over a user-density or
    /// willingness-to-pay sweep.
    Optimize,
    /// Data files and gnuplot stubs for one figure.
    Figures {
        #[arg(value_enum)]
        id: FigureId,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML experiment file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "PATH", env = OUT_DIR_ENV)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, global = true)]
    pub lambda_b: Option<f64>,
    #[arg(long, global = true)]
    pub lambda_u: Option<f64>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub b: Option<f64>,
    #[arg(long, global = true)]
    pub c_b: Option<f64>,
    #[arg(long, global = true)]
    pub c_w: Option<f64>,
}

impl Common {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            lambda_b: self.lambda_b,
            lambda_u: self.lambda_u,
            alpha: self.alpha,
            b: self.b,
            c_b: self.c_b,
            c_w: self.c_w,
            seed: self.seed,
            trials: self.trials,
        }
    }

    fn out_dir(&self) -> &Path {
        self.out.as_deref().unwrap_or(Path::new("."))
    }
}

/// Runs one command and returns the files it wrote.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let kind = match cli.command {
        Command::SeSweep => CommandKind::SeSweep,
        Command::Montecarlo { .. } => CommandKind::MonteCarlo,
        Command::Optimize => CommandKind::Optimize,
        Command::Figures { .. } => CommandKind::Figures,
    };
    let settings = Settings::load(kind, cli.common.config.as_deref(), &cli.common.overrides())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.common.threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} threads: {e}", cli.common.threads)))?;
    pool.install(|| dispatch(&cli.command, &settings, cli.common.out_dir()))
}

fn dispatch(command: &Command, s: &Settings, dir: &Path) -> Result<Vec<PathBuf>> {
    use commands::{figures, montecarlo, optimize, se_sweep};
    match command {
        Command::SeSweep => Ok(vec![write_file(dir, "se_sweep.csv", &se_sweep::table(s)?.to_csv())?]),
        Command::Montecarlo { dump } => {
            let table = montecarlo::table(s)?;
            let mut out = vec![write_file(dir, "montecarlo.csv", &table.to_csv())?];
            if let Some(n) = dump {
                let pts = montecarlo::realizations(s, *n)?;
                out.push(write_file(dir, "realizations.csv", &pts.to_csv())?);
            }
            Ok(out)
        }
        Command::Optimize => {
            let table = optimize::table(s)?;
            print!("{}", optimize::summary(&table));
            Ok(vec![write_file(dir, "optimize.csv", &table.to_csv())?])
        }
        Command::Figures { id } => figures::write(*id, s, dir),
    }
}
