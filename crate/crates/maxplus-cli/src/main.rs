use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use maxplus_cli::bench::{default_sizes, render_csv, run_suite, Suite};
use maxplus_cli::commands::{
    cmd_conv, cmd_ilp, cmd_knapsack, cmd_reduce, ConvEngine, IlpSolver, KnapsackSolver, Reduction,
    SemanticsArg,
};
use maxplus_cli::format::VariantTag;
use maxplus_cli::gen::{generate, GenKind, GenOptions};
use maxplus_cli::ring::{verify_ring, RingOptions};
use maxplus_cli::CliError;

#[derive(Parser)]
#[command(
    name = "maxplus",
    version,
    about = "Solvers and verification harness for (max,+)-convolution, \
             multidimensional knapsack and bounded integer programs"
)]
struct Cli {
    /// Worker threads (env MAXPLUS_THREADS overrides). The current solvers
    /// are single-threaded; values above 1 are accepted and reserved.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Naive,
    Linearized,
    Concave,
}

#[derive(Clone, Copy, ValueEnum)]
enum KnapsackSolverArg {
    Classconv,
    Bellman,
    Brute,
    Colorcoding,
}

#[derive(Clone, Copy, ValueEnum)]
enum IlpSolverArg {
    Proximity,
    Divconq,
    Brute,
}

#[derive(Clone, Copy, ValueEnum)]
enum SemanticsCliArg {
    Exact,
    Atmost,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKindArg {
    Conv,
    Knapsack,
    Ilp,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    ZeroOne,
    Bounded,
    Unbounded,
    ExactEq,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReductionArg {
    BinaryEncoding,
    Monotonize,
    SuperaddToKnapsack,
    UpperboundToSuperadd,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Conv,
    Knapsack,
    Ilp,
}

#[derive(Subcommand)]
enum Command {
    /// Convolve the two arrays of a "conv" file (truncated, equal sizes)
    Conv {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = EngineArg::Naive)]
        engine: EngineArg,
        /// Output array file
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve a "knapsack" file for every capacity at once
    Knapsack {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = KnapsackSolverArg::Classconv)]
        solver: KnapsackSolverArg,
        /// Failure probability for the color-coding solver
        #[arg(long)]
        delta: Option<f64>,
        /// Random seed for the color-coding solver
        #[arg(long)]
        seed: Option<u64>,
        /// Result semantics (default: exact; color coding always at-most)
        #[arg(long, value_enum)]
        semantics: Option<SemanticsCliArg>,
        /// Cross-check the result against brute force (exit 4 on mismatch)
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve an "ilp" file and print status, value and witness
    Ilp {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = IlpSolverArg::Proximity)]
        solver: IlpSolverArg,
        /// Cross-check against brute force (exit 4 on mismatch)
        #[arg(long)]
        verify: bool,
    },
    /// Apply one constructive reduction to an instance file
    Reduce {
        input: PathBuf,
        #[arg(long, value_enum)]
        reduction: ReductionArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every constructive reduction against its naive check
    VerifyRing {
        #[arg(long, default_value_t = 2)]
        dims: usize,
        /// Upper bound on the number of array entries per trial
        #[arg(long, default_value_t = 64)]
        max_size: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Test hook: corrupt one result to prove failures are detected
        #[arg(long)]
        inject_fault: bool,
    },
    /// Write a random schema-valid instance file
    Gen {
        #[arg(long, value_enum)]
        kind: GenKindArg,
        #[arg(long, default_value_t = 1)]
        dims: usize,
        /// Item / variable count
        #[arg(long, default_value_t = 5)]
        n: usize,
        /// Capacity (knapsack) or size (conv) bound per dimension
        #[arg(long, default_value_t = 8)]
        tmax: u64,
        /// Bound on weight components / absolute matrix entries
        #[arg(long, default_value_t = 3)]
        delta_max: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Knapsack variant
        #[arg(long, value_enum, default_value_t = VariantArg::ZeroOne)]
        variant: VariantArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time a solver suite and write a CSV table
    Bench {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        /// Comma-separated size list (suite-specific; see README)
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<u64>,
        #[arg(long)]
        csv: PathBuf,
    },
}

fn effective_threads(flag: usize) -> Result<usize, CliError> {
    let threads = match std::env::var("MAXPLUS_THREADS") {
        Ok(v) => v
            .parse::<usize>()
            .map_err(|_| CliError::Input(format!("MAXPLUS_THREADS is not a number: {v}")))?,
        Err(_) => flag,
    };
    if threads == 0 {
        return Err(CliError::Input("--threads must be at least 1".into()));
    }
    Ok(threads)
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let _threads = effective_threads(cli.threads)?;
    match cli.command {
        Command::Conv { input, engine, out } => {
            let engine = match engine {
                EngineArg::Naive => ConvEngine::Naive,
                EngineArg::Linearized => ConvEngine::Linearized,
                EngineArg::Concave => ConvEngine::Concave,
            };
            let report = cmd_conv(&input, engine, &out)?;
            println!("{}", serde_json::to_string(&report).expect("serializable"));
            Ok(0)
        }
        Command::Knapsack {
            input,
            solver,
            delta,
            seed,
            semantics,
            verify,
            out,
        } => {
            let solver = match solver {
                KnapsackSolverArg::Classconv => KnapsackSolver::Classconv,
                KnapsackSolverArg::Bellman => KnapsackSolver::Bellman,
                KnapsackSolverArg::Brute => KnapsackSolver::Brute,
                KnapsackSolverArg::Colorcoding => KnapsackSolver::Colorcoding,
            };
            let semantics = semantics.map(|s| match s {
                SemanticsCliArg::Exact => SemanticsArg::Exact,
                SemanticsCliArg::Atmost => SemanticsArg::Atmost,
            });
            let run = cmd_knapsack(&input, solver, delta, seed, semantics, verify, &out)?;
            println!(
                "{}",
                serde_json::to_string(&run.report).expect("serializable")
            );
            Ok(if run.verify_failed { 4 } else { 0 })
        }
        Command::Ilp {
            input,
            solver,
            verify,
        } => {
            let solver = match solver {
                IlpSolverArg::Proximity => IlpSolver::Proximity,
                IlpSolverArg::Divconq => IlpSolver::Divconq,
                IlpSolverArg::Brute => IlpSolver::Brute,
            };
            let run = cmd_ilp(&input, solver, verify)?;
            match run.result.status {
                maxplus::ilp::IlpStatus::Optimal => {
                    println!("status OPTIMAL");
                    println!("value {}", run.result.value);
                    println!("x {:?}", run.result.x);
                }
                maxplus::ilp::IlpStatus::Infeasible => println!("status INFEASIBLE"),
            }
            println!(
                "{}",
                serde_json::to_string(&run.report).expect("serializable")
            );
            Ok(if run.verify_failed { 4 } else { 0 })
        }
        Command::Reduce {
            input,
            reduction,
            out,
        } => {
            let reduction = match reduction {
                ReductionArg::BinaryEncoding => Reduction::BinaryEncoding,
                ReductionArg::Monotonize => Reduction::Monotonize,
                ReductionArg::SuperaddToKnapsack => Reduction::SuperaddToKnapsack,
                ReductionArg::UpperboundToSuperadd => Reduction::UpperboundToSuperadd,
            };
            let report = cmd_reduce(&input, reduction, &out)?;
            println!("{}", serde_json::to_string(&report).expect("serializable"));
            Ok(0)
        }
        Command::VerifyRing {
            dims,
            max_size,
            trials,
            seed,
            inject_fault,
        } => {
            let report = verify_ring(&RingOptions {
                dims,
                max_size,
                trials,
                seed,
                inject_fault,
            })?;
            print!("{}", report.render());
            Ok(if report.all_pass() { 0 } else { 4 })
        }
        Command::Gen {
            kind,
            dims,
            n,
            tmax,
            delta_max,
            seed,
            variant,
            out,
        } => {
            let opts = GenOptions {
                kind: match kind {
                    GenKindArg::Conv => GenKind::Conv,
                    GenKindArg::Knapsack => GenKind::Knapsack,
                    GenKindArg::Ilp => GenKind::Ilp,
                },
                dims,
                n,
                tmax,
                delta_max,
                seed,
                variant: match variant {
                    VariantArg::ZeroOne => VariantTag::ZeroOne,
                    VariantArg::Bounded => VariantTag::Bounded,
                    VariantArg::Unbounded => VariantTag::Unbounded,
                    VariantArg::ExactEq => VariantTag::ExactEq,
                },
            };
            if opts.dims == 0 {
                return Err(CliError::Input("--dims must be at least 1".into()));
            }
            generate(&opts).save(&out)?;
            Ok(0)
        }
        Command::Bench { suite, sizes, csv } => {
            let suite = match suite {
                SuiteArg::Conv => Suite::Conv,
                SuiteArg::Knapsack => Suite::Knapsack,
                SuiteArg::Ilp => Suite::Ilp,
            };
            let sizes = if sizes.is_empty() {
                default_sizes(suite)
            } else {
                sizes
            };
            let rows = run_suite(suite, &sizes)?;
            let text = render_csv(&rows);
            std::fs::write(&csv, &text)
                .map_err(|e| CliError::Input(format!("cannot write {}: {e}", csv.display())))?;
            print!("{text}");
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
