use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};

use clutch_opt::bench::{emit_results, run_benchmark, BenchmarkConfig, OutputFormat};
use clutch_opt::qubo::{build_qubo, default_penalty};
use clutch_opt::solvers::{solve, Objective, SolveParams, SolverChoice};
use clutch_opt::stack::{generate_instance, DiskStack};
use clutch_opt::{Error, Result};

#[derive(Parser)]
#[command(name = "clutch-opt", version, about = "Clutch disk stacking optimizer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance file.
    Generate {
        #[arg(long)]
        nd: usize,
        #[arg(long)]
        ns: usize,
        /// Target element thickness.
        #[arg(long, default_value_t = 2.0)]
        a0: f64,
        /// Full width of the uniform thickness tolerance band.
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve an instance and print the result as JSON.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solver: SolverChoice,
        #[arg(long, default_value_t = Objective::Range)]
        objective: Objective,
        /// QUBO penalty strength (sa only); defaults to a provably safe value.
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, default_value_t = 1500)]
        sweeps: usize,
        #[arg(long, default_value_t = 35)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Wall-clock budget in seconds for exact and approx.
        #[arg(long)]
        budget: Option<f64>,
        /// Also write the gauge-fixed QUBO to this path.
        #[arg(long)]
        export_qubo: Option<PathBuf>,
    },
    /// Run a benchmark grid from a TOML config.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Output file; falls back to the config's `output`, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// `csv` or `jsonl`; inferred from the output extension when omitted.
        #[arg(long)]
        format: Option<OutputFormat>,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate {
            nd,
            ns,
            a0,
            delta,
            seed,
            out,
        } => generate_instance(nd, ns, a0, delta, seed)?.save(out),
        Command::Solve {
            instance,
            solver,
            objective,
            rho,
            sweeps,
            samples,
            seed,
            budget,
            export_qubo,
        } => {
            let devs = DiskStack::load(instance)?.deviations();
            if let Some(path) = export_qubo {
                let rho = rho.unwrap_or_else(|| default_penalty(&devs));
                build_qubo(&devs, rho, true)?.export(path)?;
            }
            let budget = match budget {
                Some(b) if !(b.is_finite() && b >= 0.0) => {
                    return Err(Error::InvalidInput(format!("invalid budget {b}")))
                }
                b => b.map(Duration::from_secs_f64),
            };
            let params = SolveParams {
                objective,
                rho,
                sweeps,
                samples,
                seed,
                budget,
                ..SolveParams::default()
            };
            let result = solve(&devs, solver, &params)?;
            let mut stdout = io::stdout().lock();
            serde_json::to_writer_pretty(&mut stdout, &result).map_err(|e| Error::Io(e.into()))?;
            writeln!(stdout)?;
            Ok(())
        }
        Command::Bench { config, out, format } => {
            let config = BenchmarkConfig::load(config)?;
            let out = out.or_else(|| config.output.clone());
            let format = format.unwrap_or_else(|| match &out {
                Some(p) if p.extension().is_some_and(|e| e == "jsonl") => OutputFormat::Jsonl,
                _ => OutputFormat::Csv,
            });
            let records = run_benchmark(&config)?;
            match out {
                Some(path) => emit_results(&records, format, BufWriter::new(File::create(path)?)),
                None => emit_results(&records, format, io::stdout().lock()),
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
