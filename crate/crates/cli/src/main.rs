mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use superknap::apps::RandomParams;

use commands::{GenMode, IntersectArgs, OptimizeArgs};
use report::{class_name, CliError, Inputs, Report, RunManifest};

#[derive(Parser)]
#[command(
    name = "superknap",
    version,
    about = "Exact tools for superincreasing integer knapsacks"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an instance file
    Check { path: PathBuf },
    /// Greedy point (<=) or minimal packing (>=) with uniqueness report
    Greedy { path: PathBuf },
    /// Complete inequality description of the knapsack polytope
    Facets { path: PathBuf },
    /// Maximize linear objectives with the dynamic program
    Optimize {
        path: PathBuf,
        /// Comma-separated rationals, e.g. `1,-2/3,0.5`
        #[arg(long, allow_hyphen_values = true, conflicts_with = "random")]
        c: Option<String>,
        /// Number of random objectives
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Compare every result against brute-force enumeration
        #[arg(long)]
        verify: bool,
        /// Print the per-node values of the DP walk
        #[arg(long)]
        trace: bool,
    },
    /// Hull of a <= and a >= knapsack over a common box
    Intersect {
        /// Pair file, or the <= instance when a second path is given
        le: PathBuf,
        /// The >= instance
        ge: Option<PathBuf>,
        /// Hull of the >= side, used for relaxations
        #[arg(long)]
        ge_hull: Option<PathBuf>,
        /// Build the side-by-side relaxation instead of the exact hull
        #[arg(long)]
        relax: bool,
        /// Also print the extended (x, y) formulation
        #[arg(long)]
        extend: bool,
    },
    /// Run every certificate on the given instance or pair files
    Verify {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Generate an instance
    Gen(GenArgs),
    /// Extended formulation of a mixed knapsack with one continuous variable
    Mixed { path: PathBuf },
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "mode")]
struct GenModeArgs {
    /// Base of the alpha-nary instance
    #[arg(long, requires = "ubound")]
    alpha: Option<String>,
    /// Divisor chain `1,a2,...,an`
    #[arg(long, requires_all = ["bound", "capacity"])]
    basis: Option<String>,
    /// Number of variables of a random instance
    #[arg(long)]
    random_superincreasing: Option<usize>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    mode: GenModeArgs,
    /// Capacity of the alpha-nary instance
    #[arg(long)]
    ubound: Option<String>,
    /// Bound on the last variable of a basis instance
    #[arg(long)]
    bound: Option<String>,
    #[arg(long)]
    capacity: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = RandomParams::default().max_bound)]
    max_bound: u64,
    #[arg(long, default_value_t = RandomParams::default().max_first)]
    max_first: u64,
    #[arg(long, default_value_t = RandomParams::default().max_slack)]
    max_slack: u64,
}

fn gen_mode(g: GenArgs) -> GenMode {
    let m = g.mode;
    if let Some(alpha) = m.alpha {
        GenMode::Alpha {
            alpha,
            ubound: g.ubound.unwrap_or_default(),
        }
    } else if let Some(chain) = m.basis {
        GenMode::Basis {
            chain,
            bound: g.bound.unwrap_or_default(),
            capacity: g.capacity.unwrap_or_default(),
        }
    } else {
        let params = RandomParams {
            max_bound: g.max_bound,
            max_first: g.max_first,
            max_slack: g.max_slack,
        };
        GenMode::Random {
            n: m.random_superincreasing.unwrap_or_default(),
            seed: g.seed,
            params,
        }
    }
}

fn run(command: Command, inp: &mut Inputs) -> (&'static str, Result<Report, CliError>) {
    match command {
        Command::Check { path } => ("check", commands::check(inp, &path)),
        Command::Greedy { path } => ("greedy", commands::greedy(inp, &path)),
        Command::Facets { path } => ("facets", commands::facets(inp, &path)),
        Command::Optimize {
            path,
            c,
            random,
            seed,
            verify,
            trace,
        } => (
            "optimize",
            commands::optimize(
                inp,
                &path,
                &OptimizeArgs {
                    c,
                    random,
                    seed,
                    verify,
                    trace,
                },
            ),
        ),
        Command::Intersect {
            le,
            ge,
            ge_hull,
            relax,
            extend,
        } => (
            "intersect",
            commands::intersect(
                inp,
                &IntersectArgs {
                    le,
                    ge,
                    ge_hull,
                    relax,
                    extend,
                },
            ),
        ),
        Command::Verify { paths } => ("verify", commands::verify(inp, &paths)),
        Command::Gen(g) => ("gen", commands::generate(inp, &gen_mode(g))),
        Command::Mixed { path } => ("mixed", commands::mixed(inp, &path)),
    }
}

/// Writes to stdout; a closed pipe (`| head`) is not an error.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn emit_json(doc: &serde_json::Value) {
    let mut text = serde_json::to_string_pretty(doc).expect("report serializes");
    text.push('\n');
    emit(&text);
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut inp = Inputs::default();
    let (name, outcome) = run(cli.command, &mut inp);
    let digest = inp.digest();
    let manifest = |outcome: String, seed: Option<u64>| RunManifest {
        command: name.to_string(),
        input_digest: digest.clone(),
        tool_version: env!("CARGO_PKG_VERSION"),
        seed,
        outcome,
    };
    let code = match outcome {
        Ok(report) => {
            match cli.format {
                Format::Text => emit(&report.text),
                Format::Json => {
                    let doc = json!({ "manifest": manifest(report.outcome.clone(), report.seed), "result": report.result });
                    emit_json(&doc);
                }
            }
            report.exit
        }
        Err(e) => {
            eprintln!("error ({}): {}", class_name(e.class), e.message);
            if cli.format == Format::Json {
                let doc = json!({
                    "manifest": manifest(class_name(e.class).to_string(), None),
                    "error": { "class": class_name(e.class), "message": e.message },
                });
                emit_json(&doc);
            }
            e.class.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
