use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use refspace::cli::{self, Flags, Format, Outcome, EXIT_INPUT};
use refspace::invariant::DEFAULT_MAX_ENUM_DIM;
use refspace::problem::{load_fixture, Problem};
use refspace::reflexivity::Execution;

#[derive(Parser)]
#[command(
    name = "refspace",
    version,
    about = "Exact reflexivity analysis for finite-dimensional operator spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: GlobalFlags,
}

#[derive(Args)]
struct GlobalFlags {
    /// Number of random sample vectors (or random pairs for `check`).
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Seed for all random streams.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Largest ambient dimension for coordinate-lattice enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ENUM_DIM)]
    max_enum_dim: usize,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Generate sample constraints on one thread.
    #[arg(long, global = true)]
    serial: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Text,
}

#[derive(Args)]
struct Input {
    /// Problem file (JSON).
    #[arg(required_unless_present = "fixture", conflicts_with = "fixture")]
    file: Option<PathBuf>,
    /// Use a shipped fixture instead of a file.
    #[arg(long)]
    fixture: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Module algebras, reflexivity verdict and equivalence checks.
    Analyze {
        #[command(flatten)]
        input: Input,
    },
    /// Evaluate the Galois maps on a subspace.
    Galois {
        #[command(flatten)]
        input: Input,
        /// Subspace of H1 (`zero`, `full`, `e1`, `e1+e3`).
        #[arg(long)]
        p: Option<String>,
        /// Subspace of H2.
        #[arg(long)]
        q: Option<String>,
    },
    /// Run law suites: module-algebras, galois, enlargement, psi, equivalences or all.
    Check {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// List or run the shipped fixtures.
    Fixtures {
        #[arg(long, conflicts_with = "run")]
        list: bool,
        #[arg(long)]
        run: Option<String>,
    },
}

fn load(input: &Input) -> Result<Problem, Outcome> {
    let problem = match (&input.file, &input.fixture) {
        (_, Some(name)) => load_fixture(name),
        (Some(path), None) => match std::fs::read_to_string(path) {
            Ok(text) => Problem::parse(&text),
            Err(e) => {
                return Err(Outcome {
                    code: EXIT_INPUT,
                    output: format!("error: cannot read {}: {e}\n", path.display()),
                })
            }
        },
        (None, None) => unreachable!("clap requires an input"),
    };
    problem.map_err(|e| Outcome::error(&e))
}

fn run(cli: Cli) -> Outcome {
    let g = cli.flags;
    let flags = Flags {
        samples: g.samples,
        seed: g.seed,
        max_enum_dim: g.max_enum_dim,
        format: match g.format {
            OutputFormat::Json => Format::Json,
            OutputFormat::Text => Format::Text,
        },
        execution: if g.serial {
            Execution::Serial
        } else {
            Execution::Parallel
        },
    };
    match cli.command {
        Command::Analyze { input } => match load(&input) {
            Ok(problem) => cli::cmd_analyze(&problem, &flags),
            Err(o) => o,
        },
        Command::Galois { input, p, q } => match load(&input) {
            Ok(problem) => cli::cmd_galois(&problem, p.as_deref(), q.as_deref(), &flags),
            Err(o) => o,
        },
        Command::Check { input, suite } => match load(&input) {
            Ok(problem) => cli::cmd_check(&problem, &suite, &flags),
            Err(o) => o,
        },
        Command::Fixtures {
            run: Some(name), ..
        } => cli::cmd_fixtures_run(&name, &flags),
        Command::Fixtures { .. } => cli::cmd_fixtures_list(&flags),
    }
}

fn main() -> ExitCode {
    let outcome = run(Cli::parse());
    if outcome.code == EXIT_INPUT && outcome.output.starts_with("error:") {
        eprint!("{}", outcome.output);
    } else {
        print!("{}", outcome.output);
    }
    ExitCode::from(outcome.code as u8)
}
