use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use hmlp::config::{Config, WeightsSection};
use hmlp::inputs::read_numbers;
use hmlp::report::{schedule_text, summary_table, sweep_csv, thresholds_csv};
use hmlp::run::{optimize, par_sweep};
use hmlp_core::lp::RateWeights;

/// Broadcast time sharing with hierarchical modulation: modcod thresholds,
/// optimal schedules and beam simulations.
#[derive(Parser, Debug)]
#[command(name = "hmlp", version)]
struct Cli {
    /// TOML configuration; built-in defaults when absent.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    #[arg(long, global = true, value_name = "N")]
    receivers: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    trials: Option<usize>,
    /// Peak SNR grid in dB, inclusive.
    #[arg(long, global = true, value_name = "a:b:step")]
    snr_max_grid: Option<String>,
    #[arg(long, global = true, value_parser = ["reference", "pairing", "optimal", "all"])]
    scheme: Option<String>,
    /// Rate weights, one per receiver line.
    #[arg(long, global = true, value_name = "PATH")]
    weights: Option<PathBuf>,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the modcod table with thresholds and efficiencies as CSV.
    Thresholds,
    /// Optimal schedule for a list of receiver SNRs (dB, one per line).
    Optimize {
        snr_file: PathBuf,
        /// Write the LP as a column list.
        #[arg(long, value_name = "PATH")]
        dump_lp: Option<PathBuf>,
    },
    /// Beam simulation over the peak SNR grid, CSV output.
    Sweep {
        /// 500 receivers and 100 trials.
        #[arg(long)]
        full_scale: bool,
        /// Record real solve times in wall_ms (otherwise 0).
        #[arg(long)]
        wall_clock: bool,
        /// `greedy` or `optimal-matching`.
        #[arg(long)]
        pairing: Option<String>,
        /// Skip the per-grid summary on stderr.
        #[arg(long)]
        quiet: bool,
    },
    /// Print the effective configuration.
    Config,
}

fn load_config(cli: &Cli) -> Result<Config> {
    let mut c = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(s) = cli.seed {
        c.scenario.seed = s;
    }
    if let Some(n) = cli.receivers {
        c.scenario.receivers = n;
    }
    if let Some(n) = cli.trials {
        c.scenario.trials = n;
    }
    if let Some(g) = &cli.snr_max_grid {
        c.scenario.snr_max_grid = g.clone();
    }
    if let Some(s) = &cli.scheme {
        c.scenario.scheme = s.clone();
    }
    if let Some(p) = &cli.weights {
        c.weights = Some(WeightsSection { values: read_numbers(p, "weight")? });
    }
    if let Command::Sweep { full_scale, pairing, .. } = &cli.command {
        if *full_scale {
            c.scenario.receivers = 500;
            c.scenario.trials = 100;
        }
        if let Some(p) = pairing {
            c.scenario.pairing = p.clone();
        }
    }
    c.validate()?;
    Ok(c)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let config = load_config(&cli)?;
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Config => emit(out, &config.to_toml()),
        Command::Thresholds => emit(out, &thresholds_csv(&config.table()?)),
        Command::Optimize { snr_file, dump_lp } => {
            let snrs = read_numbers(snr_file, "SNR")?;
            let weights = match config.weights() {
                Some(w) => w?,
                None => RateWeights::uniform(snrs.len()),
            };
            let table = config.table()?;
            let scenario = config.scenario()?;
            let o = optimize(&snrs, &table, &scenario.limits, &weights)?;
            if let Some(p) = dump_lp {
                std::fs::write(p, o.problem.to_text()).with_context(|| format!("cannot write {}", p.display()))?;
            }
            emit(out, &schedule_text(&o.schedule, &table, &snrs, weights.as_slice()))
        }
        Command::Sweep { wall_clock, quiet, .. } => {
            let scenario = config.scenario()?;
            let schemes = config.schemes()?;
            let table = config.table()?;
            let (results, summary) = par_sweep(&scenario, &table, *wall_clock)?;
            emit(out, &sweep_csv(&results, schemes))?;
            if !quiet {
                eprint!("{}", summary_table(&summary, schemes));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
