//! `d2d`: analytic and Monte Carlo spectral efficiency of D2D links sharing a
//! cellular uplink, written out as CSV.

mod commands;
mod grid;
mod output;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use d2d_core::mcsim::SimConfig;
use d2d_core::{Mode, SystemParams};

use crate::grid::{Range, Scale};

/// Environment variable holding the default Monte Carlo seed.
pub const SEED_ENV: &str = "D2D_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "d2d",
    version,
    about = "Spectral efficiency of D2D links integrated with a cellular uplink"
)]
struct Cli {
    /// Directory for CSV files and manifests.
    #[arg(long, global = true, default_value = "./out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// CDF of a local-average SIR, the instantaneous SIR or a link spectral efficiency.
    Cdf(commands::cdf::CdfArgs),
    /// Average spectral efficiency, optionally swept over one parameter.
    AvgSe(commands::avg_se::AvgSeArgs),
    /// Reproduces the curves of one figure.
    Figure(commands::figure::FigureArgs),
    /// Break-even contour between a D2D link and the uplink.
    Contour(commands::contour::ContourArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Underlay,
    Overlay,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Underlay => Mode::Underlay,
            ModeArg::Overlay => Mode::Overlay,
        }
    }
}

/// Model parameters shared by the analytic commands.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value = "overlay")]
    pub mode: ModeArg,
    /// D2D to cellular power ratio; required with underlay.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Mean number of D2D links per cell.
    #[arg(long, default_value_t = 10.0)]
    pub k: f64,
    /// Link-length scaling exponent.
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    /// Normalized D2D reference distance.
    #[arg(long, default_value_t = 0.1)]
    pub a: f64,
    /// Cellular pathloss exponent.
    #[arg(long = "eta-c", default_value_t = 3.5)]
    pub eta_c: f64,
    /// User-to-user pathloss exponent.
    #[arg(long = "eta-d", default_value_t = 4.5)]
    pub eta_d: f64,
    /// Normalized exclusion radius around each base station.
    #[arg(long = "a-ex", default_value_t = 0.0)]
    pub a_ex: f64,
}

/// Power ratio used with overlay, where it does not enter any result.
const OVERLAY_MU: f64 = 0.1;

impl ModelArgs {
    /// Builds the parameter set. `mu_free` skips the underlay `--mu`
    /// requirement when `mu` is supplied some other way (a sweep).
    pub fn params(&self, mu_free: bool) -> Result<SystemParams, Usage> {
        let mode = Mode::from(self.mode);
        let mu = match (self.mu, mode) {
            (Some(mu), _) => mu,
            (None, Mode::Overlay) => OVERLAY_MU,
            (None, Mode::Underlay) if mu_free => OVERLAY_MU,
            (None, Mode::Underlay) => return Err(Usage("--mu is required with --mode underlay".into())),
        };
        Ok(SystemParams {
            mode,
            mu,
            k_mean: self.k,
            beta: self.beta,
            a: self.a,
            eta_c: self.eta_c,
            eta_d: self.eta_d,
            a_ex: self.a_ex,
        })
    }
}

/// Monte Carlo flags.
#[derive(Debug, Clone, Args)]
pub struct McArgs {
    /// Add Monte Carlo estimates.
    #[arg(long)]
    pub mc: bool,
    /// Monte Carlo geometries.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    /// Master seed.
    #[arg(long, env = SEED_ENV, default_value_t = 1)]
    pub seed: u64,
}

impl McArgs {
    pub fn config(&self) -> SimConfig {
        SimConfig::new(self.samples, self.seed)
    }
}

/// A grid flag with its scale.
pub fn expand(range: &Range, scale: Scale) -> Result<Vec<f64>, Usage> {
    range.points(scale).map_err(Usage)
}

/// A flag-level error: bad values or combinations. Exit code 1.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// A failure that always counts as numerical. Exit code 2.
#[derive(Debug)]
pub struct Numerical(pub String);

impl std::fmt::Display for Numerical {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Numerical {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Usage>() {
            return 1;
        }
        if cause.is::<Numerical>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<d2d_core::Error>() {
            return if e.is_numerical() || matches!(e, d2d_core::Error::Domain(_)) {
                2
            } else {
                1
            };
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Cdf(args) => commands::cdf::run(args, &cli.out),
        Command::AvgSe(args) => commands::avg_se::run(args, &cli.out),
        Command::Figure(args) => commands::figure::run(args, &cli.out),
        Command::Contour(args) => commands::contour::run(args, &cli.out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
