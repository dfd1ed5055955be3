//! Command-line front end: generate instances, run solvers, verify bounds
//! against brute force, and sweep parameter grids. Exit codes: 0 success,
//! 2 malformed instance file, 3 violated precondition or bad configuration,
//! 4 ground set too large for an exact check.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use regsubmax_harness::{
    gen_digraph_cut_instance, load_instance, run_experiment, save_instance, AlgorithmChoice,
    ConstraintSpec, ExperimentConfig, HarnessError, CSV_HEADER,
};

#[derive(Parser)]
#[command(
    name = "regsubmax",
    about = "Solvers for maximizing a non-negative submodular gain minus a modular cost",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random directed-cut instance and write it as JSON.
    Gen(GenArgs),
    /// Run one solver on an instance and report CSV rows.
    Solve(SolveArgs),
    /// Like solve, but always compare against the brute-force optimum.
    Verify(SolveArgs),
    /// Run solve over a grid of k and epsilon values, one CSV for all.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Ground set size (at least 2).
    #[arg(long)]
    n: usize,
    /// Probability of each ordered pair becoming an arc, in (0, 1].
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    /// Upper bound for arc weights, drawn uniformly from (0, max-weight].
    #[arg(long, default_value_t = 1.0)]
    max_weight: f64,
    /// Costs are drawn uniformly from [0, cost-scale times M].
    #[arg(long, default_value_t = 0.3)]
    cost_scale: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Attach a uniform cardinality constraint of this rank.
    #[arg(long)]
    k: Option<usize>,
    /// Output path; omitted means stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Path to the instance JSON file.
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum)]
    algorithm: AlgorithmChoice,
    /// Cardinality bound; may also come from the instance's constraint.
    #[arg(long)]
    k: Option<usize>,
    /// Accuracy parameter for the continuous, sampling, and auto solvers.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent replicas to run.
    #[arg(long, default_value_t = 1)]
    reps: usize,
    /// Output CSV path; omitted means stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Brute-force the optimum (n <= 20) and report the guarantee bound.
    #[arg(long)]
    verify: bool,
    /// Worker threads for replica parallelism; omitted uses all cores.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    base: SolveArgs,
    /// Comma-separated k values to sweep; empty keeps --k.
    #[arg(long, value_delimiter = ',')]
    k_grid: Vec<usize>,
    /// Comma-separated epsilon values to sweep; empty keeps --epsilon.
    #[arg(long, value_delimiter = ',')]
    epsilon_grid: Vec<f64>,
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), HarnessError> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run_gen(args: &GenArgs) -> Result<(), HarnessError> {
    let instance = gen_digraph_cut_instance(
        args.n,
        args.density,
        args.max_weight,
        args.cost_scale,
        args.seed,
    )?;
    let instance = match args.k {
        Some(k) => instance.with_constraint(ConstraintSpec::Uniform { k })?,
        None => instance,
    };
    match &args.out {
        Some(path) => save_instance(path, &instance),
        None => write_output(&None, &regsubmax_harness::instance_to_json(&instance.file)),
    }
}

fn experiment_config(args: &SolveArgs, verify: bool) -> ExperimentConfig {
    ExperimentConfig {
        algorithm: args.algorithm,
        k: args.k,
        epsilon: args.epsilon,
        seed: args.seed,
        reps: args.reps,
        verify: verify || args.verify,
        threads: args.threads,
    }
}

fn run_solve(args: &SolveArgs, force_verify: bool) -> Result<(), HarnessError> {
    let instance = load_instance(&args.instance)?;
    let report = run_experiment(&instance, &experiment_config(args, force_verify))?;
    write_output(&args.out, &report.to_csv())
}

fn run_sweep(args: &SweepArgs) -> Result<(), HarnessError> {
    let instance = load_instance(&args.base.instance)?;
    let ks: Vec<Option<usize>> = if args.k_grid.is_empty() {
        vec![args.base.k]
    } else {
        args.k_grid.iter().copied().map(Some).collect()
    };
    let epsilons: Vec<Option<f64>> = if args.epsilon_grid.is_empty() {
        vec![args.base.epsilon]
    } else {
        args.epsilon_grid.iter().copied().map(Some).collect()
    };
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for &k in &ks {
        for &epsilon in &epsilons {
            let mut config = experiment_config(&args.base, false);
            config.k = k;
            config.epsilon = epsilon;
            let report = run_experiment(&instance, &config)?;
            csv.push_str(&report.to_csv_rows());
        }
    }
    write_output(&args.base.out, &csv)
}

fn run(cli: &Cli) -> Result<(), HarnessError> {
    match &cli.command {
        Command::Gen(args) => run_gen(args),
        Command::Solve(args) => run_solve(args, false),
        Command::Verify(args) => run_solve(args, true),
        Command::Sweep(args) => run_sweep(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
