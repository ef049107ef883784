//! `ternpath` command-line front end.
//!
//! Every command writes one JSON document to stdout. Exit codes: 0 success,
//! 1 a verdict failed (or the axiom gate refused the instance), 2 I/O, parse
//! or configuration errors, 3 the solver hit its iteration cap.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "ternpath", version, about = "Ternary idempotent path algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct AlgebraArgs {
    /// minplus, boolf2 or table:<path>
    #[arg(long, default_value = "minplus")]
    pub alg: String,
    #[arg(long, default_value = "g0")]
    pub gamma: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the four ordered axiom checkers.
    Check {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Kleene iteration of the relaxation operator from a source vertex.
    Solve(SolveArgs),
    /// Brute-force path optima between two vertices.
    Oracle {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 0)]
        source: usize,
        #[arg(long)]
        target: usize,
        /// Defaults to the vertex count.
        #[arg(long)]
        max_edges: Option<usize>,
        /// Enumerate walks instead of simple paths.
        #[arg(long)]
        revisits: bool,
    },
    /// Per-vertex comparison of the solver against the path oracle.
    Compare(SolveArgs),
    /// Closed-form against constructed window-graph sizes.
    Windows {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "2")]
        width: Vec<usize>,
    },
    /// Associativity and binary non-factorization of a finite ternary table.
    Separation {
        /// boolf2 or table:<path>
        #[arg(long, default_value = "boolf2")]
        op: String,
        #[arg(long, default_value = "g0")]
        gamma: String,
    },
    /// Finite search for ordered instances with no binary factorization.
    Search {
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        parallel: bool,
    },
    /// Windows-per-iteration growth over a nested random graph family.
    Bench {
        #[arg(long, default_value_t = 12)]
        vertices: usize,
        #[arg(long, default_value_t = 8)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        parallel: bool,
    },
}

#[derive(Debug, Args, Clone)]
pub struct SolveArgs {
    #[command(flatten)]
    pub alg: AlgebraArgs,
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub source: usize,
    #[arg(long, default_value_t = 2)]
    pub width: usize,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Oracle edge bound for `compare`; defaults to the vertex count.
    #[arg(long)]
    pub max_edges: Option<usize>,
    /// Sample budget of the axiom gate.
    #[arg(long, default_value_t = 1000)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Solve even if the instance fails the ordered axioms.
    #[arg(long)]
    pub force: bool,
    #[arg(long)]
    pub parallel: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check { alg, budget, seed } => commands::check(&alg, budget, seed),
        Command::Solve(args) => commands::solve(&args),
        Command::Oracle {
            alg,
            graph,
            source,
            target,
            max_edges,
            revisits,
        } => commands::oracle(&alg, &graph, source, target, max_edges, revisits),
        Command::Compare(args) => commands::compare(&args),
        Command::Windows { alg, graph, width } => commands::windows(&alg, &graph, &width),
        Command::Separation { op, gamma } => commands::separation(&op, &gamma),
        Command::Search {
            size,
            budget,
            seed,
            parallel,
        } => commands::search(size, budget, seed, parallel),
        Command::Bench {
            vertices,
            steps,
            seed,
            parallel,
        } => commands::bench(vertices, steps, seed, parallel),
    };
    let (doc, code) = match result {
        Ok(out) => (out.doc, out.code),
        Err(err) => {
            eprintln!("error: {}", err.message);
            let mut doc = serde_json::json!({ "error": err.message });
            if let Some(extra) = err.detail {
                doc["detail"] = extra;
            }
            (doc, err.code)
        }
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&doc).expect("JSON values always serialize")
    );
    ExitCode::from(code)
}
