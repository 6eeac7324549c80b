use std::path::PathBuf;
use std::process::ExitCode;

use ancr::data::{FileFormat, Rescale};
use ancr::solvers::{Method, SolverConfig};
use ancr_harness::audit::oracle_check;
use ancr_harness::report::write_file;
use ancr_harness::solve_one::solve_one;
use ancr_harness::{emit_convergence, run_benchmark, run_lambda_sweep, ExperimentConfig, HarnessError, Overrides};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "ancr", version, about = "Affine non-negative collaborative representation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    method: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
}

impl RunArgs {
    fn load(&self) -> Result<ExperimentConfig, HarnessError> {
        let ov = Overrides {
            seed: self.seed,
            out: self.out.clone(),
            jobs: self.jobs,
            method: self.method.clone(),
            lambda: self.lambda,
        };
        ExperimentConfig::from_file(&self.config, &ov)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Accuracy over every (method, N, λ, repetition) cell.
    Bench(RunArgs),
    /// As `bench`, plus sweep.csv with one mean accuracy per λ.
    Sweep(RunArgs),
    /// Per-iteration objective and residuals for one test query.
    Converge {
        #[command(flatten)]
        run: RunArgs,
        /// Test column to trace.
        #[arg(long, default_value_t = 0)]
        query: usize,
    },
    /// Code one query against a dictionary file and print the details.
    SolveOne {
        #[arg(long)]
        dict: PathBuf,
        #[arg(long)]
        query: PathBuf,
        /// Data line of the query file to use.
        #[arg(long, default_value_t = 0)]
        row: usize,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long, default_value = "auto")]
        rescale: String,
        #[arg(long, default_value = "ancr")]
        method: String,
        #[arg(long, allow_negative_numbers = true)]
        lambda: Option<f64>,
    },
    /// Random audit of the solvers against brute-force oracles.
    OracleCheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        instances: usize,
    },
}

fn config_err(e: ancr::Error) -> HarnessError {
    HarnessError::Config(e.to_string())
}

fn execute(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Bench(args) => {
            let cfg = args.load()?;
            let report = run_benchmark(&cfg)?;
            print!("{}", ancr_harness::report::summary_csv(&report.summary));
            eprintln!("wrote {}", cfg.out.display());
        }
        Command::Sweep(args) => {
            let cfg = args.load()?;
            let report = run_lambda_sweep(&cfg)?;
            print!("{}", ancr_harness::report::sweep_csv(&report.summary));
            eprintln!("wrote {}", cfg.out.display());
        }
        Command::Converge { run, query } => {
            let cfg = run.load()?;
            let csv = emit_convergence(&cfg, query)?;
            let path = write_file(&cfg.out, &format!("convergence_q{query}.csv"), &csv)?;
            print!("{csv}");
            eprintln!("wrote {}", path.display());
        }
        Command::SolveOne { dict, query, row, format, rescale, method, lambda } => {
            let format: FileFormat = format.parse().map_err(config_err)?;
            let rescale: Rescale = rescale.parse().map_err(config_err)?;
            let method: Method = method.parse().map_err(config_err)?;
            let solver = SolverConfig::default().with_lambda(lambda.unwrap_or(SolverConfig::default().lambda));
            solver.validate().map_err(config_err)?;
            print!("{}", solve_one(&dict, &query, row, format, rescale, method, &solver)?.render());
        }
        Command::OracleCheck { seed, instances } => {
            let lines = oracle_check(seed, instances)?;
            let mut ok = true;
            for l in &lines {
                println!(
                    "{} {:<22} worst {:.3e} bound {:.0e} over {} instances",
                    if l.passed() { "PASS" } else { "FAIL" },
                    l.check,
                    l.worst,
                    l.bound,
                    l.instances
                );
                ok &= l.passed();
            }
            if !ok {
                return Err(HarnessError::Internal("oracle audit failed".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    // Usage errors are config errors (exit 1), not clap's default 2.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
