//! `cfsim` — campaign runner for the cell-free massive MIMO mobility
//! simulator.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 on runtime errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cfsim_core::handover::Scheme;
use cfsim_core::{emit_outputs, run_campaign, SimConfig};

#[derive(Parser)]
#[command(name = "cfsim", version, about = "Mobile cell-free massive MIMO handover simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo campaign and emit CDF/summary files.
    Simulate {
        /// Campaign config (flat JSON; missing keys use defaults).
        #[arg(long)]
        config: PathBuf,
        /// Output directory for summary.json, per_ue.csv and cdf_<scheme>.csv.
        #[arg(long)]
        out: PathBuf,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the number of realizations.
        #[arg(long)]
        realizations: Option<usize>,
        /// Override the scheme list (comma-separated).
        #[arg(long, value_delimiter = ',')]
        schemes: Option<Vec<Scheme>>,
        /// Override the mobility period in seconds.
        #[arg(long = "duration-s")]
        duration_s: Option<f64>,
    },
    /// Parse and validate a config without running anything.
    ValidateConfig {
        #[arg(long)]
        config: PathBuf,
    },
}

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}

fn run(cli: Cli) -> Result<(), u8> {
    match cli.command {
        Command::ValidateConfig { config } => {
            let cfg = load_config(&config)?;
            println!(
                "config ok: {} APs, {} UEs, {} schemes, {} realizations x {} s, seed {}",
                cfg.topology_path
                    .as_ref()
                    .map(|p| format!("file {}", p.display()))
                    .unwrap_or_else(|| cfg.num_aps.to_string()),
                cfg.num_ues,
                cfg.schemes.len(),
                cfg.n_realizations,
                cfg.duration_s,
                cfg.seed
            );
            Ok(())
        }
        Command::Simulate {
            config,
            out,
            seed,
            realizations,
            schemes,
            duration_s,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(n) = realizations {
                cfg.n_realizations = n;
            }
            if let Some(schemes) = schemes {
                cfg.schemes = schemes;
            }
            if let Some(d) = duration_s {
                cfg.duration_s = d;
            }
            cfg.validate().map_err(|e| {
                eprintln!("error: {e}");
                EXIT_CONFIG
            })?;

            let report = run_campaign(&cfg).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_RUNTIME
            })?;
            emit_outputs(&report, &out).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_RUNTIME
            })?;

            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            println!(
                "{} realizations x {} blocks, Q_avg {:.2}",
                cfg.n_realizations,
                cfg.num_blocks(),
                report.q_avg
            );
            for s in &report.schemes {
                println!(
                    "{:<10} median SE {:.4}  p95 SE {:.4}  h_cluster {:.4}/s  h_ap {:.3}/s  fairness {:.4}",
                    s.scheme.to_string(),
                    s.median_se_mobility,
                    s.p95_se_mobility,
                    s.mean_h_cluster,
                    s.mean_h_ap,
                    s.mean_fairness
                );
            }
            println!("outputs written to {}", out.display());
            Ok(())
        }
    }
}

fn load_config(path: &Path) -> Result<SimConfig, u8> {
    let cfg = SimConfig::from_path(path).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_CONFIG
    })?;
    cfg.validate().map_err(|e| {
        eprintln!("error: {e}");
        EXIT_CONFIG
    })?;
    Ok(cfg)
}
