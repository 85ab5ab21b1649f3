//! `vlceq`: IMDD link modeling and capacity-optimal pre-equalizer design.
//!
//! Exit codes: 0 success, 1 validation-threshold failure, 2 configuration or
//! environment error.

use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use vlceq_cli::config::{load_config, ConfigError};
use vlceq_cli::{cmd_compare, cmd_design, cmd_response, cmd_sweep, cmd_validate};

#[derive(Parser)]
#[command(
    name = "vlceq",
    version,
    about = "Models an IMDD visible-light link and designs the capacity-optimal analog pre-equalizer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the optimal design at one attenuation (JSON report)
    Design {
        /// JSON config file; defaults apply when omitted
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the channel attenuation h
        #[arg(long)]
        h: Option<f64>,
        /// Output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Frequency response of LED, equalizer and link (CSV)
    Response {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the channel attenuation h
        #[arg(long)]
        h: Option<f64>,
        /// Number of log-spaced frequency points
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Upper frequency bound in Hz (table spans four decades below it)
        #[arg(long, default_value_t = 1e10)]
        fmax: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Attenuation sweep: closed form, refined and grid oracle (CSV)
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grade closed forms against the grid oracle (JSON; exit 1 on failure)
    Validate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare CCE, BCE and the bare link across the sweep (CSV)
    Compare {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: Option<&Path>, content: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, content),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(content.as_bytes())
        }
    }
}

fn load_with_override(
    config: Option<&Path>,
    h: Option<f64>,
) -> Result<vlceq_cli::RunConfig, ConfigError> {
    let mut run = load_config(config)?;
    if let Some(h) = h {
        run.h = h;
        run.validate()?;
    }
    Ok(run)
}

fn run() -> Result<u8, String> {
    let cli = Cli::parse();
    let outcome: Result<(String, Option<PathBuf>, u8), String> = match cli.command {
        Command::Design { config, h, out } => {
            let run = load_with_override(config.as_deref(), h).map_err(|e| e.to_string())?;
            let report = cmd_design(&run).map_err(|e| e.to_string())?;
            let json = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
            Ok((json + "\n", out, 0))
        }
        Command::Response {
            config,
            h,
            points,
            fmax,
            out,
        } => {
            let run = load_with_override(config.as_deref(), h).map_err(|e| e.to_string())?;
            let csv = cmd_response(&run, points, fmax).map_err(|e| e.to_string())?;
            Ok((csv, out, 0))
        }
        Command::Sweep { config, out } => {
            let run = load_config(config.as_deref()).map_err(|e| e.to_string())?;
            let csv = cmd_sweep(&run).map_err(|e| e.to_string())?;
            Ok((csv, out, 0))
        }
        Command::Validate { config, out } => {
            let run = load_config(config.as_deref()).map_err(|e| e.to_string())?;
            let report = cmd_validate(&run).map_err(|e| e.to_string())?;
            let json = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
            Ok((json + "\n", out, if report.pass { 0 } else { 1 }))
        }
        Command::Compare { config, out } => {
            let run = load_config(config.as_deref()).map_err(|e| e.to_string())?;
            let csv = cmd_compare(&run).map_err(|e| e.to_string())?;
            Ok((csv, out, 0))
        }
    };
    let (content, out, code) = outcome?;
    emit(out.as_deref(), &content).map_err(|e| format!("cannot write output: {e}"))?;
    Ok(code)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
