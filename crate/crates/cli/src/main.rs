use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use wsnsim_core::experiment::{comparison_csv, comparison_rows, comparison_table, sweep_seeds};
use wsnsim_core::metrics::{
    csv_string, deployment_csv, export_csv, export_summary_json, render_plots,
};
use wsnsim_core::{
    load_config, run_pair, run_simulation, ConfigFileError, PairedRun, SimConfig, SimError,
};
use wsnsim_core::{Protocol, SimulationState};

#[derive(Parser)]
#[command(
    name = "wsnsim",
    version,
    about = "LEACH vs MONCH sensor network simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the protocol named in the config once.
    Run(RunSpec),
    /// Run LEACH and MONCH on the same deployment, optionally over several seeds.
    Compare(RunSpec),
}

#[derive(Args)]
struct RunSpec {
    /// TOML config file
    config: PathBuf,
    /// Override the config seed (first seed of a sweep)
    #[arg(long)]
    seed: Option<u64>,
    /// Number of consecutive seeds to sweep (compare only)
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    seeds: u64,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the round limit
    #[arg(long)]
    max_rounds: Option<u32>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Config(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn one_line(msg: &str) -> String {
    msg.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Runtime(format!("{}: {e}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| io_failure(path, e))
}

fn create_dir(path: &Path) -> Result<(), Failure> {
    fs::create_dir_all(path).map_err(|e| io_failure(path, e))
}

fn load(spec: &RunSpec) -> Result<SimConfig, Failure> {
    let mut config = load_config(&spec.config).map_err(|e| match e {
        ConfigFileError::Io { .. } => Failure::Usage(e.to_string()),
        _ => Failure::Usage(format!("{}: {e}", spec.config.display())),
    })?;
    if let Some(seed) = spec.seed {
        config.seed = seed;
    }
    if let Some(max_rounds) = spec.max_rounds {
        config.max_rounds = max_rounds;
    }
    wsnsim_core::validate_config(config)
        .map_err(|e| Failure::Usage(format!("{}: {e}", spec.config.display())))
}

fn cmd_run(spec: &RunSpec) -> Result<(), Failure> {
    let config = load(spec)?;
    let result = run_simulation(&config)?;
    create_dir(&spec.out)?;
    let positions: Vec<_> = SimulationState::deploy(&config)
        .nodes
        .iter()
        .map(|n| n.position)
        .collect();
    write(
        &spec.out.join("deployment.csv"),
        &deployment_csv(&positions),
    )?;
    export_csv(&result, &spec.out.join("rounds.csv"))?;
    export_summary_json(&result, &spec.out.join("summary.json"))?;
    render_plots(
        std::slice::from_ref(&result),
        &[config.protocol.name().to_uppercase()],
        &spec.out,
    )?;
    let s = result.summary;
    let show = |r: Option<u32>| r.map_or_else(|| "-".into(), |r| r.to_string());
    println!(
        "{} seed {}: rounds {}, first death {}, half death {}, last death {}, packets {}",
        config.protocol.name(),
        config.seed,
        s.rounds_executed,
        show(s.first_node_death_round),
        show(s.half_nodes_death_round),
        show(s.last_node_death_round),
        s.total_packets_to_bs
    );
    Ok(())
}

fn write_pair(pair: &PairedRun, dir: &Path) -> Result<(), Failure> {
    create_dir(dir)?;
    write(
        &dir.join("deployment.csv"),
        &deployment_csv(&pair.deployment),
    )?;
    for (protocol, result) in [
        (Protocol::Leach, &pair.leach),
        (Protocol::Monch, &pair.monch),
    ] {
        let name = protocol.name();
        write(&dir.join(format!("{name}.csv")), &csv_string(result))?;
        export_summary_json(result, &dir.join(format!("{name}_summary.json")))?;
    }
    let labels = ["LEACH".to_string(), "MONCH".to_string()];
    render_plots(&[pair.leach.clone(), pair.monch.clone()], &labels, dir)?;
    Ok(())
}

fn cmd_compare(spec: &RunSpec) -> Result<(), Failure> {
    let config = load(spec)?;
    let seeds = sweep_seeds(config.seed, spec.seeds as usize);
    create_dir(&spec.out)?;
    // each seed owns its own subdirectory, so workers never share a file
    let pairs = seeds
        .par_iter()
        .map(|&seed| {
            let pair = run_pair(&config, seed)?;
            write_pair(&pair, &spec.out.join(format!("seed-{seed}")))?;
            Ok(pair)
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let rows = comparison_rows(&pairs);
    write(&spec.out.join("comparison.csv"), &comparison_csv(&rows))?;
    print!("{}", comparison_table(&rows));
    Ok(())
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
            return ExitCode::from(1);
        }
    };
    let outcome = match &cli.command {
        Command::Run(spec) => cmd_run(spec),
        Command::Compare(spec) => cmd_compare(spec),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("wsnsim: {}", one_line(&msg));
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("wsnsim: {}", one_line(&msg));
            ExitCode::from(2)
        }
    }
}
