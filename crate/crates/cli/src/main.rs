use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use sway_core::harness::{run_experiment, write_report, write_results, ExperimentConfig};
use sway_core::metrics::{hv_estimate, Front, HvConfig, HvMode};
use sway_core::models::builtin_models;
use sway_core::satgen::{parse_dimacs, sample_valid};
use sway_core::Error;

#[derive(Parser)]
#[command(
    name = "sway",
    version,
    about = "Sampling-based multi-objective optimization experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Built-in models.
    Models {
        #[command(subcommand)]
        action: ModelsAction,
    },
    /// Print valid assignments of a DIMACS formula as 0/1 strings.
    Sample {
        cnf: PathBuf,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Hypervolume of a normalized, minimize-oriented front.
    Hv {
        front: PathBuf,
        /// Comma-separated reference point; defaults to all ones.
        #[arg(long = "ref", value_delimiter = ',')]
        reference: Option<Vec<f64>>,
        /// Estimate with this many Monte Carlo samples instead of computing exactly.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Summarize a results directory into report.md and boxplot.csv.
    Report { dir: PathBuf },
}

#[derive(Subcommand)]
enum ModelsAction {
    List,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Config(_) | Error::Io(_)) => 2,
        Some(
            Error::Model(_)
            | Error::Parse { .. }
            | Error::Unsatisfiable
            | Error::Solver(_)
            | Error::Validity(_),
        ) => 3,
        Some(
            Error::Invariant(_)
            | Error::Structural(_)
            | Error::Unevaluated(_)
            | Error::Normalization(_)
            | Error::InsufficientSamples(_),
        ) => 4,
        None => 1,
    }
}

fn read_front(path: &PathBuf) -> anyhow::Result<Front> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split(',').map(|v| v.trim().parse::<f64>()).collect();
        match row {
            Ok(p) => points.push(p),
            // A header row of objective names.
            Err(_) if i == 0 => {}
            Err(e) => bail!("{}:{}: {e}", path.display(), i + 1),
        }
    }
    Ok(Front::new(points))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run { config, output } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let root = output
                .or_else(|| cfg.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from("results"));
            let report = run_experiment(&cfg)?;
            let dir = write_results(&report, &root)?;
            println!(
                "{} ({} repeats, pool {})",
                report.scenario, report.repeats, report.pool_size
            );
            println!(
                "{:<12} {:>10} {:>10} {:>8} {:>10} {:>12}",
                "algorithm", "gd", "gs", "pfs", "hv", "evaluations"
            );
            for s in &report.summary {
                println!(
                    "{:<12} {:>10.4} {:>10.4} {:>8} {:>10.4} {:>12}",
                    s.algorithm.as_str(),
                    s.median_gd,
                    s.median_gs,
                    s.median_pfs,
                    s.median_hv,
                    s.median_evaluations
                );
            }
            println!("results written to {}", dir.display());
            if !report.violations.is_empty() {
                return Err(Error::Invariant(report.violations.join("; ")).into());
            }
        }
        Command::Models {
            action: ModelsAction::List,
        } => {
            for m in builtin_models() {
                println!("{:<14} {:<6} {}", m.name, m.family.as_str(), m.description);
            }
        }
        Command::Sample { cnf, count, seed } => {
            let text = fs::read_to_string(&cnf).map_err(Error::Io)?;
            let formula = parse_dimacs(&text)?;
            for a in sample_valid(&formula, count, seed)? {
                println!("{}", a.to_bitstring());
            }
        }
        Command::Hv {
            front,
            reference,
            samples,
            seed,
        } => {
            let front = read_front(&front)?;
            let mode = match samples {
                Some(samples) => HvMode::MonteCarlo { samples, seed },
                None => HvMode::Exact,
            };
            let est = hv_estimate(&front, &HvConfig { reference, mode })?;
            if samples.is_some() {
                println!("{} ± {}", est.value, est.std_error);
            } else {
                println!("{}", est.value);
            }
        }
        Command::Report { dir } => {
            write_report(&dir)?;
            println!(
                "wrote {} and {}",
                dir.join("report.md").display(),
                dir.join("boxplot.csv").display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
