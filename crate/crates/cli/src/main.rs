use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

mod commands;
mod wire;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] freelip::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(freelip::Error::Certificate(_)) => 1,
            _ => 2,
        }
    }
}

/// Exact computations in Lipschitz-free spaces over finite pointed metric
/// spaces. Every command prints a JSON report on stdout.
#[derive(Debug, Parser)]
#[command(name = "freelip", version)]
struct Cli {
    /// Print compact single-line JSON.
    #[arg(long, global = true)]
    compact: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the metric axioms and report every violation.
    Validate { metric: PathBuf },
    /// Norm of an element with dual and primal witnesses.
    Norm {
        element: PathBuf,
        #[arg(long, default_value = "transport")]
        solver: String,
    },
    /// An optimal representation of an element.
    Represent {
        element: PathBuf,
        /// Return the ≼-minimal optimal representation.
        #[arg(long)]
        minimal: bool,
    },
    /// Decide mu ≼ nu with a certificate.
    Preorder {
        mu: PathBuf,
        nu: PathBuf,
        #[arg(long, default_value = "triangle-moves")]
        method: String,
    },
    /// The minimal measure below mu.
    Minimal { mu: PathBuf },
    /// Classify molecules as extreme points of the unit ball.
    Extreme {
        metric: PathBuf,
        /// Only classify the ordered pair (x, y), given by label.
        #[arg(long, num_args = 2, value_names = ["X", "Y"])]
        pair: Option<Vec<String>>,
        /// Cross-check against the hull-membership oracle.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value = "betweenness")]
        classifier: String,
    },
    /// Norm-additive decomposition along a partition of the pairs.
    Decompose {
        element: PathBuf,
        #[arg(long)]
        parts: PathBuf,
    },
    /// Split into molecular and diagonal parts.
    Diagonal { element: PathBuf },
    /// All dilations between two metric spaces.
    Dilations {
        from: PathBuf,
        to: PathBuf,
        /// Check the induced linear isometry for each dilation.
        #[arg(long)]
        verify: bool,
    },
    /// Membership of an edge function in the cone G.
    Gcheck { edge_function: PathBuf },
    /// Run the property suite over randomly generated spaces.
    Corpus {
        /// Maximum number of points per space.
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// List the registered algorithm strategies.
    Strategies,
}

/// A JSON report and whether the verdict it carries is a success.
pub struct Report {
    pub body: Value,
    pub ok: bool,
}

impl Report {
    pub fn ok(body: Value) -> Self {
        Report { body, ok: true }
    }
}

fn run(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Validate { metric } => commands::validate(metric),
        Command::Norm { element, solver } => commands::norm(element, solver),
        Command::Represent { element, minimal } => commands::represent(element, *minimal),
        Command::Preorder { mu, nu, method } => commands::preorder(mu, nu, method),
        Command::Minimal { mu } => commands::minimal(mu),
        Command::Extreme {
            metric,
            pair,
            oracle,
            classifier,
        } => commands::extreme(metric, pair.as_deref(), *oracle, classifier),
        Command::Decompose { element, parts } => commands::decompose(element, parts),
        Command::Diagonal { element } => commands::diagonal(element),
        Command::Dilations { from, to, verify } => commands::dilations(from, to, *verify),
        Command::Gcheck { edge_function } => commands::gcheck(edge_function),
        Command::Corpus { n, count, seed } => commands::corpus(*n, *count, *seed),
        Command::Strategies => Ok(commands::strategies()),
    }
}

fn print(value: &Value, compact: bool) {
    let text = if compact {
        serde_json::to_string(value)
    } else {
        serde_json::to_string_pretty(value)
    };
    println!("{}", text.expect("JSON values always serialize"));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(report) => {
            print(&report.body, cli.compact);
            ExitCode::from(if report.ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
