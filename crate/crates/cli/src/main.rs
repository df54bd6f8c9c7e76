use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod failure;

/// Probabilities of first-order properties of Poisson Galton-Watson trees.
#[derive(Parser, Debug)]
#[command(name = "gwfo", version)]
struct Cli {
    /// Worker threads; defaults to the number of CPUs. Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compile a sentence into a state system file.
    Compile {
        /// Sentence text, or a file containing it.
        #[arg(long)]
        sentence: String,
        /// Quantifier depth of the class space; at least the sentence's depth.
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2000)]
        max_states: usize,
        #[arg(long, default_value_t = 600.0)]
        max_seconds: f64,
    },
    /// Solve for the fixed point at one offspring mean.
    Solve {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        c: f64,
        #[command(flatten)]
        solver: SolverArgs,
        /// Output CSV; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve over a grid of offspring means and write CSV.
    Sweep {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        step: f64,
        /// Start every row from the uniform distribution and run rows in parallel.
        #[arg(long)]
        cold: bool,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Interval estimate of the acceptance probability from truncated samples.
    Simulate {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        c: f64,
        /// Truncation depth.
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Widening threshold for a node's candidate set.
        #[arg(long, default_value_t = gwfo::montecarlo::DEFAULT_SET_LIMIT)]
        set_limit: usize,
        /// Nodes read per sample before giving up.
        #[arg(long, default_value_t = gwfo::tree::DEFAULT_MAX_NODES)]
        max_nodes: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Numerical checks of solver properties.
    #[command(subcommand)]
    Verify(Verify),
    /// Decide the k-round Ehrenfeucht game on two trees.
    Game {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Evaluate a sentence on a tree.
    Eval {
        #[arg(long)]
        sentence: String,
        #[arg(long)]
        tree: PathBuf,
    },
    /// Build the universal tree carrying the given ornaments.
    Universal {
        /// One tree per line.
        #[arg(long)]
        ornaments: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum Verify {
    /// Largest distance ratio of the s-th power of psi over random pairs.
    Contraction {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 1)]
        power: usize,
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Solve from many starts and compare the limits.
    Uniqueness {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 20)]
        starts: usize,
        /// Largest pairwise distance accepted between limits.
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Compare one-sided slopes of the acceptance probability.
    Smoothness {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        step: f64,
        /// Only compare slopes at this grid point.
        #[arg(long)]
        breakpoint: Option<f64>,
        /// Largest accepted gap between left and right slopes.
        #[arg(long, default_value_t = 1e-2)]
        tolerance: f64,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Args, Debug)]
struct SystemArgs {
    /// System file, or the name of a bundled system (example1, example2, infinite).
    #[arg(long)]
    system: String,
    /// Comma-separated accepting states, replacing the file's.
    #[arg(long, value_delimiter = ',')]
    accept: Option<Vec<String>>,
}

#[derive(Args, Debug)]
struct SolverArgs {
    #[arg(long, default_value_t = gwfo::solver::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = gwfo::solver::DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Seed of the sampled psi used for very large systems.
    #[arg(long = "psi-seed", default_value_t = 1)]
    psi_seed: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // Help and version requests.
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let detail = e.to_string();
            let first: Vec<&str> = detail
                .lines()
                .take_while(|l| !l.starts_with("Usage:"))
                .map(|l| l.trim().trim_start_matches("error: "))
                .filter(|l| !l.is_empty())
                .collect();
            let first = first.join(" ");
            eprintln!("error: usage: {first}");
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: usage: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (code, category, msg) = failure::classify(&e);
            eprintln!("error: {category}: {msg}");
            ExitCode::from(code)
        }
    }
}
