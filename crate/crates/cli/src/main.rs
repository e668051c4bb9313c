//! `permres` command-line interface. Every command prints one JSON document.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "permres", version, about = "Permutation resemblance of functions over finite groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Target {
    /// Group: zn:<n>, gf:<p>^<e>, gf:<q>[:poly=c0,..,ce], prod:(<g>)x(<h>), cayley:<path>
    #[arg(long)]
    group: String,
    /// Function: pow:<d>, table:<i0,i1,..>, file:<path>
    #[arg(long = "fn")]
    function: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    Pres,
    Du,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    Average,
    Greedy,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ParityArg {
    Even,
    Odd,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact pres(f) with a witness g
    Pres {
        #[command(flatten)]
        target: Target,
        /// Largest value-set size tried
        #[arg(long)]
        max_k: Option<usize>,
        /// Worker threads (0: all cores)
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Do not restrict value sets to those containing 0
        #[arg(long)]
        no_symmetry: bool,
        /// Write the witness as a pres-model assignment
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// pres(f) by enumerating every g (order <= 5)
    BruteforcePres {
        #[command(flatten)]
        target: Target,
    },
    /// Greedy square-table construction of an upper bound
    Greedy {
        #[command(flatten)]
        target: Target,
        #[arg(long, value_enum, default_value = "average")]
        strategy: StrategyArg,
        /// Number of construction steps
        #[arg(long, default_value_t = 1)]
        steps: usize,
        /// Values forced at the first steps
        #[arg(long, value_delimiter = ',')]
        choices: Vec<usize>,
    },
    /// Bounds on pres: generic, or closed forms for two-to-one functions
    Bound {
        #[arg(long)]
        group: String,
        #[arg(long = "fn")]
        function: Option<String>,
        /// Closed-form bound for two-to-one functions over the group
        #[arg(long, value_enum)]
        two_to_one: Option<ParityArg>,
    },
    /// Cover test for a value set, optionally followed by assignment repair
    Cover {
        #[command(flatten)]
        target: Target,
        /// Value set, comma separated element indices
        #[arg(long, value_delimiter = ',', required = true)]
        set: Vec<usize>,
        /// Run the repair search for a range-G subtable
        #[arg(long)]
        repair: bool,
        /// Repair iteration cap (default 10 q^2)
        #[arg(long)]
        iters: Option<usize>,
        /// Randomize the repair choices with this seed
        #[arg(long)]
        seed: Option<u64>,
        /// Extra seeded runs after a failed one
        #[arg(long, default_value_t = 0)]
        restarts: u64,
    },
    /// Exact values of the expected-coverage inequality for k = 1, 2, ...
    ExpectBound {
        /// Group order
        #[arg(long)]
        q: usize,
        /// Image size V(f)
        #[arg(long)]
        v: usize,
        /// Largest k listed (default: through min_k)
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Differential uniformity of f, and the product bound for g + f
    Du {
        #[command(flatten)]
        target: Target,
        /// Second function g for the product bound
        #[arg(long)]
        g: Option<String>,
    },
    /// Minimum-DU permutation by backtracking
    DuMin {
        #[arg(long)]
        group: String,
        /// Search-node cap
        #[arg(long)]
        budget: Option<u64>,
        /// Write the witness as a DU-model assignment
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a model as an LP file
    ExportLp {
        #[arg(long, value_enum)]
        model: ModelKind,
        #[arg(long)]
        group: String,
        /// Function (the DU model defaults to f = 0)
        #[arg(long = "fn")]
        function: Option<String>,
        /// DU model: add y_v and V
        #[arg(long)]
        with_y: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check an assignment file against a model
    Verify {
        #[arg(long, value_enum)]
        model: ModelKind,
        /// JSON file {"vars": {...}}; may carry "group" and "fn"
        #[arg(long)]
        assignment: PathBuf,
        #[arg(long)]
        group: Option<String>,
        #[arg(long = "fn")]
        function: Option<String>,
    },
    /// Recompute an embedded pres table within size limits
    Repro {
        #[arg(long)]
        table: String,
        #[arg(long)]
        max_p: Option<u64>,
        #[arg(long)]
        max_q: Option<u64>,
        /// Seconds; rows not started in time are skipped
        #[arg(long)]
        time_budget: Option<f64>,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(out) => {
            let text = serde_json::to_string_pretty(&out.json).expect("serializable");
            // a closed pipe is not an error for a report printer
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
