use std::ffi::OsString;
use std::path::PathBuf;

use blackbench_core::harness::{optimizer, run_experiment, ExperimentConfig};
use blackbench_core::observer::ObserverConfig;
use blackbench_core::suite::{registered_suites, Suite, SuiteFilter, BBOB_LITE};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::report::build_report;

/// Overrides `--seed` of `run` and `postprocess` when set.
pub const SEED_ENV: &str = "BLACKBENCH_SEED";

const EXIT_RUNTIME: i32 = 1;
const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "blackbench",
    version,
    about = "Benchmark black-box optimizers and report their runtimes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List registered suites and their number of problems
    Suites,
    /// Run an optimizer on a suite with independent restarts
    Run(RunArgs),
    /// Build a static report from an experiment folder
    Postprocess(PostprocessArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, default_value = BBOB_LITE)]
    suite: String,
    /// Optimizer id, e.g. random-search or nelder-mead
    #[arg(long)]
    optimizer: String,
    /// Evaluations per problem as a multiple of the dimension
    #[arg(long, default_value_t = 10.0)]
    budget_multiplier: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Result folder; a numeric suffix is added if it exists
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated function ids (default: all)
    #[arg(long, value_delimiter = ',')]
    functions: Option<Vec<u32>>,
    /// Comma-separated dimensions (default: all)
    #[arg(long, value_delimiter = ',')]
    dimensions: Option<Vec<usize>>,
    /// Comma-separated instance ids (default: all)
    #[arg(long, value_delimiter = ',')]
    instances: Option<Vec<u32>>,
    #[arg(long, default_value = "")]
    algorithm_info: String,
}

#[derive(Debug, Args)]
struct PostprocessArgs {
    /// Experiment folder written by `run`
    input: PathBuf,
    /// Report folder
    #[arg(long)]
    out: PathBuf,
    /// Seed of the simulated restarts
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Runtime(e.into())
    }
}

fn usage(message: impl std::fmt::Display) -> Failure {
    Failure::Usage(format!(
        "error: {message}\n\nFor more information, try '--help'."
    ))
}

fn effective_seed(flag: u64) -> Result<u64, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(value) => value
            .trim()
            .parse()
            .map_err(|_| usage(format!("{SEED_ENV}={value:?} is not an unsigned integer"))),
        Err(std::env::VarError::NotPresent) => Ok(flag),
        Err(e) => Err(usage(format!("{SEED_ENV}: {e}"))),
    }
}

fn suites() -> Result<(), Failure> {
    for spec in registered_suites() {
        println!(
            "{} {}\t({} functions x {} dimensions x {} instances)",
            spec.name(),
            spec.problem_count(),
            spec.function_ids().len(),
            spec.dimensions().len(),
            spec.instance_ids().len()
        );
    }
    Ok(())
}

fn run_command(args: RunArgs) -> Result<(), Failure> {
    let seed = effective_seed(args.seed)?;
    let optimizer = optimizer(&args.optimizer).map_err(usage)?;
    let filter = SuiteFilter {
        function_ids: args.functions,
        dimensions: args.dimensions,
        instance_ids: args.instances,
    };
    let mut observer = ObserverConfig::new(&args.out, optimizer.name());
    observer.algorithm_info = args.algorithm_info;
    let config = ExperimentConfig {
        suite_name: args.suite,
        filter,
        optimizer: args.optimizer,
        budget_multiplier: args.budget_multiplier,
        master_seed: seed,
        observer,
    };
    config.validate().map_err(usage)?;
    let suite = Suite::create(&config.suite_name, &config.filter).map_err(usage)?;
    eprintln!(
        "running {} on {} problems of {}",
        optimizer.name(),
        suite.len(),
        suite.name()
    );
    let folder = run_experiment(&config)?;
    println!("{}", folder.display());
    Ok(())
}

fn postprocess(args: PostprocessArgs) -> Result<(), Failure> {
    let seed = effective_seed(args.seed)?;
    let bundle = build_report(&args.input, &args.out, seed)?;
    println!("{}", bundle.folder.join(&bundle.index).display());
    Ok(())
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code: 0 on success, 1 on runtime errors, 2 on usage errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
        }
    };
    let outcome = match cli.command {
        Command::Suites => suites(),
        Command::Run(args) => run_command(args),
        Command::Postprocess(args) => postprocess(args),
    };
    match outcome {
        Ok(()) => 0,
        Err(Failure::Usage(message)) => {
            eprintln!("{message}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            EXIT_RUNTIME
        }
    }
}
