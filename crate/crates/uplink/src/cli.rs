//! Command-line front end.
//!
//! Flags use human-facing units (per-km², dBm, dB) and are converted once, when
//! the [`ExperimentSpec`] is built. A `--config FILE` of `key = value` lines may
//! supply any flag by its long name; flags on the command line win.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;
use uplink_core::mcsim::SimulationConfig;
use uplink_core::RawParams;

use crate::experiment::{Command, Engine, ExperimentSpec};
use crate::grid::{parse_linear, parse_log};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "uplink",
    version,
    about = "SINR, rate and scheduling-gain tables for uplink Poisson cellular networks",
    allow_negative_numbers = true,
    args_override_self = true
)]
pub struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    pub command: Command,

    /// Read default flag values from a file of `key = value` lines.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[arg(long, default_value_t = 20.0)]
    pub lambda_bs_per_km2: f64,
    #[arg(long, default_value_t = 8.0)]
    pub lambda_ue_per_km2: f64,
    /// Path-loss exponent, above 2.
    #[arg(long, default_value_t = 4.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = -90.0)]
    pub noise_dbm: f64,
    /// Maximum transmit power.
    #[arg(long, default_value_t = 23.0)]
    pub pu_dbm: f64,
    /// Target received power of channel inversion.
    #[arg(long, default_value_t = -70.0)]
    pub rho_dbm: f64,
    /// Drop the noise term.
    #[arg(long)]
    pub interference_limited: bool,

    /// SINR thresholds in dB, `start:stop:count` or a comma list.
    #[arg(long, default_value = "-20:30:101", allow_hyphen_values = true)]
    pub theta_db: String,
    /// BS densities per km² for `validity`, log-spaced `start:stop:count` or a comma list.
    #[arg(long, default_value = "0.01:100:81")]
    pub lambda_bs_grid: String,
    /// User-to-BS density ratios for `gain`, `start:stop:count` or a comma list.
    #[arg(long, default_value = "1:10:10")]
    pub ratios: String,

    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Simulation window radius; defaults to max(10/√λ_BS, 4R).
    #[arg(long)]
    pub window_radius_m: Option<f64>,
    /// Sample every user in the window instead of only those within R of a BS.
    #[arg(long)]
    pub full_window: bool,
    /// Trial index for `dump-realization`.
    #[arg(long, default_value_t = 0)]
    pub trial_index: u64,
    /// Worker threads for the simulation; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,

    /// Engines to run.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = Engine::ALL)]
    pub engines: Vec<Engine>,

    /// Output CSV path; standard output when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

impl Cli {
    pub fn to_spec(&self) -> Result<ExperimentSpec, CliError> {
        let mut sim = SimulationConfig::new(self.trials, self.seed);
        sim.window_radius = self.window_radius_m;
        if self.full_window {
            sim.sampling = uplink_core::mcsim::UserSampling::FullWindow;
        }
        let spec = ExperimentSpec {
            command: self.command,
            params: RawParams {
                lambda_bs_per_km2: self.lambda_bs_per_km2,
                lambda_ue_per_km2: self.lambda_ue_per_km2,
                alpha: self.alpha,
                noise_dbm: self.noise_dbm,
                pu_dbm: self.pu_dbm,
                rho_dbm: self.rho_dbm,
                interference_limited: self.interference_limited,
            },
            sim,
            theta_db: parse_linear(&self.theta_db)?,
            lambda_bs_grid: parse_log(&self.lambda_bs_grid)?,
            ratios: parse_linear(&self.ratios)?,
            engines: self.engines.clone(),
            threads: self.threads,
            trial_index: self.trial_index,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Turns `key = value` lines into flags. Blank lines and `#` comments are
/// skipped; `key = true` becomes a bare switch and `key = false` is dropped.
pub fn config_to_args(text: &str) -> Result<Vec<OsString>, CliError> {
    let mut args = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("config line {}: expected `key = value`", i + 1)));
        };
        let key = key.trim().replace('_', "-");
        let value = value.trim().trim_matches('"');
        match value {
            "true" => args.push(format!("--{key}").into()),
            "false" => {}
            _ => args.push(format!("--{key}={value}").into()),
        }
    }
    Ok(args)
}

/// Parses the command line, splicing in flags from `--config` ahead of the
/// explicit ones.
pub fn parse_args<I, T>(args: I) -> Result<Cli, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let first = Cli::try_parse_from(&args).map_err(clap_error)?;
    let Some(path) = &first.config else {
        return Ok(first);
    };
    let text = std::fs::read_to_string(path)?;
    let mut merged = vec![args[0].clone()];
    merged.extend(config_to_args(&text)?);
    merged.extend(args[1..].iter().cloned());
    Cli::try_parse_from(merged).map_err(clap_error)
}

fn clap_error(e: clap::Error) -> CliError {
    use clap::error::ErrorKind;
    match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Help(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    }
}

/// Runs one invocation and writes its table.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let table = crate::experiment::run(&cli.to_spec()?)?;
    match &cli.out {
        Some(path) => table.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?)),
        None => table.write_csv(std::io::stdout().lock()),
    }
}
