//! `edmkit`: reproducible single-life experiments from the command line.
//!
//! Exit codes: 0 success, 2 input or parse error, 3 capacity exceeded,
//! 4 missing or failing oracle, 5 generation failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use edmkit::Error;

#[derive(Parser, Debug)]
#[command(name = "edmkit", version, about = "Worlds, lives and event-driven models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random perfect world.
    Generate(GenerateArgs),
    /// Live one life in a world; writes life.log and path.txt.
    Run(RunArgs),
    /// Project a life log onto event definitions; writes an event stream.
    Project(ProjectArgs),
    /// Look for the trace of a model in a life; writes findings.csv and summary.txt.
    Infer(InferArgs),
    /// Build the synchronous product of models and report its reachable part.
    Compose(ComposeArgs),
    /// Compare two scored lives under the prefix rule.
    Compare(CompareArgs),
    /// Write the files of a bundled example.
    Example(ExampleArgs),
    /// Run a generate-run-infer pipeline described by a config file.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    states: usize,
    #[arg(long)]
    actions: usize,
    #[arg(long)]
    observations: usize,
    /// Probability that a move is incorrect, in [0, 1).
    #[arg(long, default_value_t = 0.0)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Allow states without a correct move.
    #[arg(long)]
    allow_sudden_death: bool,
    #[arg(long, default_value_t = 1000)]
    max_retries: usize,
    /// Output file; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    world: PathBuf,
    /// `uniform`, `repeat:EPSILON` or `scripted:a,b,...`.
    #[arg(long, default_value = "uniform")]
    policy: String,
    #[arg(long)]
    horizon: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "output-dir", short)]
    output_dir: PathBuf,
}

#[derive(Args, Debug)]
struct ProjectArgs {
    #[arg(long)]
    log: PathBuf,
    #[arg(long)]
    events: PathBuf,
    /// Firings of invisible and semi-visible events.
    #[arg(long)]
    transcript: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct InferArgs {
    #[arg(long)]
    log: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    events: PathBuf,
    #[arg(long)]
    transcript: Option<PathBuf>,
    /// World-side path; selects the exact (world-side) mode.
    #[arg(long)]
    ground_truth: Option<PathBuf>,
    #[command(flatten)]
    params: InferParams,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "output-dir", short)]
    output_dir: PathBuf,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct InferParams {
    /// Arrow window half-width in steps.
    #[arg(long, default_value_t = 2)]
    pub window: usize,
    #[arg(long, default_value_t = 30.0)]
    pub min_support: f64,
    #[arg(long, default_value_t = 3.0)]
    pub threshold: f64,
    #[arg(long, default_value_t = 1)]
    pub lag: usize,
    #[arg(long, default_value_t = 0.05)]
    pub significance: f64,
}

impl Default for InferParams {
    fn default() -> Self {
        InferParams { window: 2, min_support: 30.0, threshold: 3.0, lag: 1, significance: 0.05 }
    }
}

#[derive(Args, Debug)]
struct ComposeArgs {
    /// Component models, named after their file stems.
    #[arg(required = true)]
    models: Vec<PathBuf>,
    /// Most composite states to explore.
    #[arg(long, default_value_t = 1_000_000)]
    cap: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    first: PathBuf,
    second: PathBuf,
    /// `pareto` or `lex:I,J,...` (criteria indices by decreasing priority).
    #[arg(long, default_value = "pareto")]
    mode: String,
    /// Comma-separated increasing prefix lengths; `1,2,4,...,2^20` by default.
    #[arg(long)]
    schedule: Option<String>,
}

#[derive(Args, Debug)]
struct ExampleArgs {
    /// Example name; omit to list them.
    name: Option<String>,
    #[arg(long = "output-dir", short)]
    output_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    config: PathBuf,
    /// Overrides the output directory of the config.
    #[arg(long = "output-dir", short)]
    output_dir: Option<PathBuf>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Input(_) | Error::Parse { .. } | Error::Range(_) | Error::Consistency(_) => 2,
        Error::Capacity { .. } => 3,
        Error::MissingOracle(_) | Error::Oracle(_) => 4,
        Error::Generation(_) => 5,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Run(a) => commands::run(a),
        Command::Project(a) => commands::project(a),
        Command::Infer(a) => commands::infer(a),
        Command::Compose(a) => commands::compose(a),
        Command::Compare(a) => commands::compare(a),
        Command::Example(a) => commands::example(a),
        Command::Experiment(a) => commands::experiment(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("edmkit: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
