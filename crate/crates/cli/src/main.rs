//! `evla`: fluence and temperature dumps, damage tables and the
//! validation report, all as CSV or plain text.

mod commands;
mod output;

use clap::{Args, Parser, Subcommand};
use evla_core::params::{parse_config, preset, ParamError, ParamSet};
use std::path::PathBuf;
use std::process::ExitCode;
use thiserror::Error;

#[derive(Parser, Debug)]
#[command(name = "evla", version, about = "Analytic EVLA fluence, temperature and damage solver")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Configuration file, applied over the preset.
    #[arg(long, global = true, env = "EVLA_CONFIG")]
    config: Option<PathBuf>,
    /// Built-in scenario: 810-15w, 980-15w, 980-10w or 1064-10w.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Write CSV here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Sample times [s], comma separated.
    #[arg(long, global = true, value_delimiter = ',', default_value = "0,2.5,5,7.5,10")]
    times: Vec<f64>,
    /// Sample counts `nr,nz` along r and z.
    #[arg(long, global = true, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// On-axis and radial fluence profiles.
    Fluence,
    /// Temperature on an r-z grid at each sample time.
    Temperature {
        /// 1 forces stagnant blood, 2 flowing blood.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        case: Option<u8>,
    },
    /// Damage bounds (`--table3`) or a damage map (`--map`).
    Damage {
        #[arg(long)]
        table3: bool,
        #[arg(long, conflicts_with = "table3")]
        map: bool,
        /// Keep map points whose sampled peak temperature reaches this [°C].
        #[arg(long, requires = "map")]
        tmin: Option<f64>,
    },
    /// Runs the acceptance criteria and prints one line per criterion.
    Validate {
        /// Criterion id or name (A1, table3, ...); repeatable.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        #[arg(long, default_value_t = 1)]
        grid_refine: usize,
    },
    /// Built-in material table.
    Registry,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected nr,nz")?;
    let nr: usize = a.trim().parse().map_err(|e| format!("nr: {e}"))?;
    let nz: usize = b.trim().parse().map_err(|e| format!("nz: {e}"))?;
    if nr < 2 || nz < 2 {
        return Err("nr and nz must be at least 2".into());
    }
    Ok((nr, nz))
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Solver(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("output: {0}")]
    Io(String),
}

impl From<ParamError> for CliError {
    fn from(e: ParamError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Config(_) => 2,
            CliError::Solver(_) | CliError::Io(_) => 3,
        }
    }
}

/// The preset (810-15w by default) with the config file applied over it.
fn load_params(g: &Global) -> Result<ParamSet, CliError> {
    let base = preset(g.preset.as_deref().unwrap_or("810-15w"))?;
    let Some(path) = &g.config else {
        return Ok(base);
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_config(&text, Some(&base))?)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = &cli.global;
    match cli.cmd {
        Command::Registry => commands::registry(g),
        Command::Validate { only, grid_refine } => commands::validate(g, &only, grid_refine),
        Command::Fluence => commands::fluence(g, &load_params(g)?),
        Command::Temperature { case } => commands::temperature(g, load_params(g)?, case),
        Command::Damage { map, tmin, .. } => {
            let params = load_params(g)?;
            if map {
                commands::damage_map(g, &params, tmin)
            } else {
                commands::table3(g, &params)
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
