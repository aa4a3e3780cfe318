//! `zetageo`: batch front end. Each subcommand writes one result document
//! (CSV or JSON) in which every row repeats the parameters of the run.
//!
//! Exit status: 0 on success, 2 on invalid input, 3 when the enumeration
//! budget (`ZETAGEO_BUDGET`) is exceeded, 1 for anything else.

mod commands;
mod input;
mod report;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::Format;

const CSV_HELP: &str = "CSV columns (all subcommands): command, quantity, index, value_re, value_im, exact, \
tail_bound, params. `index` is empty or a comma-separated tuple; `exact` holds rational, integer or boolean \
results verbatim; `params` is a `key=value;...` echo of every parameter. The doc format is a JSON object \
{command, params, records} with the same record fields.";

#[derive(Parser, Debug)]
#[command(name = "zetageo", version, about = "Zeta functions, entropies and information geometry at desk scale", after_help = CSV_HELP)]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct VarietyArgs {
    /// Built-in variety: spec, A<n> or P<n>.
    #[arg(long)]
    pub builtin: Option<String>,
    /// Variety document (JSON with p, e, kind, ambient_dim, equations, potential).
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Characteristic; overrides the document.
    #[arg(long)]
    pub p: Option<u32>,
    /// Extension degree of the base field; overrides the document.
    #[arg(long)]
    pub e: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum QuadOp {
    Dual,
    Black,
    White,
    Check,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Hasse–Weil zeta coefficients (rows quantity=zeta_coeff, index n, exact rational).
    Zeta {
        #[command(flatten)]
        variety: VarietyArgs,
        #[arg(long, default_value_t = 8)]
        trunc: usize,
    },
    /// Character-weighted zeta ζ_χ((X,f), t) via its Euler product.
    ZetaChi {
        #[command(flatten)]
        variety: VarietyArgs,
        /// Potential f; overrides the document.
        #[arg(long)]
        potential: Option<String>,
        /// Frequency j of the character χ_j.
        #[arg(long = "char-j")]
        char_j: u32,
        #[arg(long, default_value_t = 8)]
        trunc: usize,
    },
    /// Shannon entropy of the zeta partition function at t = q^{-s}.
    Entropy {
        #[command(flatten)]
        variety: VarietyArgs,
        #[arg(long)]
        s: f64,
        /// Truncation; chosen from the tail estimate when omitted.
        #[arg(long)]
        trunc: Option<usize>,
        /// Also report S_μ for the character χ_j.
        #[arg(long = "char-j")]
        char_j: Option<u32>,
        #[arg(long)]
        potential: Option<String>,
    },
    /// Euler product of Hasse–Weil factors over primes and its entropy.
    Lfun {
        #[arg(long)]
        builtin: Option<String>,
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        s: f64,
        #[arg(long = "prime-bound", default_value_t = 10_000)]
        prime_bound: u64,
        #[arg(long, default_value_t = 40)]
        trunc: usize,
    },
    /// KL divergence between zeta distributions under a deformation f → f + εh,
    /// or between two characters when --char-j2 is given.
    Kl {
        #[command(flatten)]
        variety: VarietyArgs,
        #[arg(long)]
        potential: Option<String>,
        /// Deformation direction h.
        #[arg(long)]
        h: Option<String>,
        #[arg(long = "char-j")]
        char_j: u32,
        #[arg(long = "char-j2")]
        char_j2: Option<u32>,
        /// ε as an element index of the base field.
        #[arg(long, default_value_t = 1)]
        eps: u64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 4)]
        trunc: usize,
    },
    /// Count reduced integer matrices, optionally checking the partition identity.
    Red {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: u64,
        /// Prime for the partition-function check.
        #[arg(long)]
        p: Option<u32>,
        #[arg(long, default_value_t = 4.0)]
        s: f64,
        /// Largest power p^k in the partition check.
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
    /// Fisher–Rao metric and Amari–Chentsov tensor of a statistical family.
    Fisher {
        /// bernoulli, logistic, categorical-K, simplex-K or exponential-tilt.
        #[arg(long)]
        family: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        gamma: Vec<f64>,
        /// JSON {stats, base} for exponential-tilt.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Motivic Fisher metric and Amari–Chentsov tensor of (X, f).
    MotivicFisher {
        #[command(flatten)]
        variety: VarietyArgs,
        #[arg(long)]
        potential: Option<String>,
        #[arg(long = "char-j")]
        char_j: u32,
        /// Frequency of χ′, the character applied to derivatives.
        #[arg(long = "char-j2")]
        char_j2: u32,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 3)]
        trunc: usize,
    },
    /// Hessian geometry of a convex cone from its characteristic function.
    Cone {
        /// orthant, lorentz or psd.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        /// Monte Carlo samples for φ(x); omitted means no MC estimate.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// CP/TP verdicts and Choi spectrum of a channel.
    Channel {
        /// JSON {d_in, d_out, matrix, state?} with (re,im) pair grids.
        #[arg(long)]
        input: Option<PathBuf>,
        /// identity, transpose or depolarizing.
        #[arg(long)]
        builtin: Option<String>,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        lambda: f64,
    },
    /// Structure checks for the Clifford algebra Cl_{p,q}.
    Clifford {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
    },
    /// Quadratic-algebra duality and black/white products.
    Quad {
        #[arg(long, value_enum)]
        op: QuadOp,
        /// `k`, `one`, or a JSON {generators, relations} document.
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: Option<String>,
    },
    /// Hom-set convexity sweeps in the classical and quantum categories.
    CatCheck {
        #[arg(long = "weights-in", value_delimiter = ',')]
        weights_in: Vec<f64>,
        #[arg(long = "weights-out", value_delimiter = ',')]
        weights_out: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also sweep quantum channels between random states of this dimension.
        #[arg(long = "quantum-dim")]
        quantum_dim: Option<usize>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Core(zetageo::Error),
    Input { field: &'static str, msg: String },
    Io(String),
}

impl CliError {
    pub fn input(field: &'static str, msg: impl Into<String>) -> Self {
        CliError::Input { field, msg: msg.into() }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(zetageo::Error::Budget { .. }) => 3,
            CliError::Core(zetageo::Error::InternalDisagreement(_)) | CliError::Io(_) => 1,
            CliError::Core(_) | CliError::Input { .. } => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e @ zetageo::Error::Budget { .. }) => {
                write!(f, "{e} (raise {} to allow more)", zetageo::variety::BUDGET_ENV)
            }
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Input { field, msg } => write!(f, "invalid `{field}`: {msg}"),
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<zetageo::Error> for CliError {
    fn from(e: zetageo::Error) -> Self {
        CliError::Core(e)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let report = commands::dispatch(&cli.command)?;
    let io = |e: std::io::Error| CliError::Io(format!("cannot write output: {e}"));
    match &cli.output {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            report.write(cli.format, &mut w).map_err(io)?;
            w.flush().map_err(io)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            report.write(cli.format, &mut lock).map_err(io)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
