//! Command-line front end: parses instances and objectives, runs the
//! matching solver, and prints a run report.

use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};

use ordsolve::lpround::Mode;
use ordsolve::refcli::{
    parse_budgets, parse_km_instance, parse_lb_instance, parse_norm, parse_rational,
    parse_weights, run_km, run_lb, CliError, Objective, RunOptions,
};

#[derive(Parser)]
#[command(name = "ordsolve", about = "Ordered and min-norm optimization solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load balancing on unrelated machines.
    Lb(RunArgs),
    /// k-clustering under a metric.
    Km(RunArgs),
}

#[derive(Args)]
#[command(group(
    ArgGroup::new("objective")
        .required(true)
        .args(["topl", "ordered", "minmax", "norm", "budget", "simul"]),
))]
struct RunArgs {
    /// Instance file.
    instance: String,
    /// Minimize the sum of the L largest costs.
    #[arg(long, value_name = "L")]
    topl: Option<usize>,
    /// Minimize an ordered objective; FILE holds the weights.
    #[arg(long, value_name = "FILE")]
    ordered: Option<String>,
    /// Minimize the maximum of several ordered objectives.
    #[arg(long, value_name = "FILE", num_args = 1..)]
    minmax: Option<Vec<String>>,
    /// Minimize a monotone symmetric norm given in the norm DSL.
    #[arg(long, value_name = "SPEC")]
    norm: Option<String>,
    /// Find a solution meeting several ordered budgets; FILE holds one
    /// "B w_1 ... w_d" line per budget.
    #[arg(long, value_name = "FILE")]
    budget: Option<String>,
    /// Simultaneously near-optimal solution for all Top-L objectives.
    #[arg(long)]
    simul: bool,
    /// Accuracy parameter for ordered / min-norm / simultaneous solvers.
    #[arg(long, default_value = "1/2")]
    eps: String,
    /// Accuracy parameter for min-max and budget solvers.
    #[arg(long, default_value = "1")]
    delta: String,
    /// RNG seed (recorded in the report; solvers are deterministic).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Solve LPs in exact rational arithmetic (default).
    #[arg(long, conflicts_with = "float")]
    exact_rational: bool,
    /// Solve LPs in floating point with exact verification of the result.
    #[arg(long)]
    float: bool,
    /// Also run the brute-force oracle and report the approximation ratio.
    #[arg(long)]
    oracle: bool,
    /// Advisory parallelism degree.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn build_objective(args: &RunArgs, dim: usize) -> Result<Objective, CliError> {
    let read = |path: &String| {
        std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("cannot read {path}: {e}")))
    };
    if let Some(l) = args.topl {
        Ok(Objective::TopL(l))
    } else if let Some(path) = &args.ordered {
        Ok(Objective::Ordered(parse_weights(&read(path)?)?))
    } else if let Some(paths) = &args.minmax {
        let ws = paths
            .iter()
            .map(|p| parse_weights(&read(p)?))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Objective::MinMax(ws))
    } else if let Some(spec) = &args.norm {
        Ok(Objective::Norm(parse_norm(spec, dim)?))
    } else if let Some(path) = &args.budget {
        Ok(Objective::Budget(parse_budgets(&read(path)?, dim)?))
    } else {
        Ok(Objective::Simul)
    }
}

fn build_options(args: &RunArgs, dim: usize) -> Result<RunOptions, CliError> {
    if args.jobs == 0 {
        return Err(CliError::Parse("--jobs must be at least 1".into()));
    }
    Ok(RunOptions {
        objective: build_objective(args, dim)?,
        eps: parse_rational(&args.eps)?,
        delta: parse_rational(&args.delta)?,
        seed: args.seed,
        mode: if args.float { Mode::Float } else { Mode::Exact },
        oracle: args.oracle,
        jobs: args.jobs,
    })
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let (args, is_lb) = match &cli.command {
        Command::Lb(a) => (a, true),
        Command::Km(a) => (a, false),
    };
    let text = std::fs::read_to_string(&args.instance)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", args.instance)))?;
    let report = if is_lb {
        let inst = parse_lb_instance(&text)?;
        run_lb(&inst, &build_options(args, inst.m)?)?
    } else {
        let inst = parse_km_instance(&text)?;
        run_km(&inst, &build_options(args, inst.n)?)?
    };
    Ok(report.render(true))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
