use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dynprec::rootfind::Mode;
use dynprec::{ArithError, PrecisionError, Rounding, SolveError};
use thiserror::Error;

mod commands;
mod settings;

use settings::{Format, Layer};

/// Dynamic-precision floating point: arithmetic traces, adaptive sums and Newton runs.
#[derive(Parser, Debug)]
#[command(name = "dynprec", version, about, long_about = None)]
pub struct Cli {
    /// Digit base β
    #[arg(long, global = true)]
    base: Option<u32>,
    /// Digits per chunk minus one
    #[arg(long, global = true)]
    t: Option<u32>,
    /// Highest chunk index
    #[arg(long = "T", global = true)]
    big_t: Option<usize>,
    /// truncate or nearest_even
    #[arg(long, global = true, value_parser = parse_rounding)]
    rounding: Option<Rounding>,
    /// dynamic or fixed(q)
    #[arg(long, global = true)]
    mode: Option<Mode>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Escalation safety factor s in (0, 1]
    #[arg(long, global = true)]
    safety: Option<f64>,
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file (a directory for `figure`)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// key=value settings file; flags win over it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

fn parse_rounding(s: &str) -> Result<Rounding, String> {
    s.parse().map_err(|e: ArithError| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Show the pipeline of one operation
    Demo {
        #[arg(value_enum)]
        op: DemoOp,
        /// Operands as literals (`+2^0 : 1.110|1.010`) or decimals; omitted
        /// operands select the built-in worked example
        #[arg(allow_negative_numbers = true)]
        operands: Vec<String>,
        /// Result section (defaults to T)
        #[arg(long)]
        rs: Option<usize>,
    },
    /// Adaptive-precision sum of signed terms; put negative literals after `--`
    EvalSum {
        #[arg(allow_negative_numbers = true)]
        terms: Vec<String>,
        /// Relative accuracy target, e.g. 1e-6 or 2^-8
        #[arg(long, value_parser = parse_target)]
        target: Option<f64>,
        /// Built-in three-term example (1, 2 or 3)
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        example: Option<u8>,
    },
    /// Newton iteration on a polynomial
    Newton {
        /// Integer coefficients, highest degree first
        #[arg(long, allow_hyphen_values = true)]
        poly: Option<String>,
        /// Starting point (literal or decimal)
        #[arg(long, allow_hyphen_values = true)]
        x0: Option<String>,
        /// Known root (decimal), adds a true_err column
        #[arg(long, allow_hyphen_values = true)]
        root: Option<String>,
    },
    /// Regenerate the convergence data behind a figure
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
    },
    /// Operation counter dump
    Report {
        #[arg(value_enum, default_value_t = ReportKind::Costs)]
        kind: ReportKind,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DemoOp {
    Add,
    Sub,
    Mul,
    Recip,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportKind {
    /// Predicted and measured grossdigit costs for every section pair
    Costs,
    /// Counters of a Newton run on the default quintic
    Newton,
}

fn parse_target(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v = match s.split_once('^') {
        Some((b, e)) => {
            let b: f64 = b.trim().parse().map_err(|_| format!("bad target `{s}`"))?;
            let e: i32 = e.trim().parse().map_err(|_| format!("bad target `{s}`"))?;
            b.powi(e)
        }
        None => s.parse().map_err(|_| format!("bad target `{s}`"))?,
    };
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("target `{s}` must be positive"))
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Precision(#[from] PrecisionError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

fn arith_code(e: &ArithError) -> u8 {
    match e {
        ArithError::Format { .. } | ArithError::InvalidConfig(_) | ArithError::SectionOutOfRange { .. } => 1,
        _ => 2,
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Arith(e) => arith_code(e),
            CliError::Precision(PrecisionError::AccuracyExhausted { .. }) => 3,
            CliError::Precision(PrecisionError::Arith(e)) => arith_code(e),
            CliError::Precision(PrecisionError::Safety(_) | PrecisionError::EmptySum) => 1,
            CliError::Precision(_) => 2,
            CliError::Solve(SolveError::Arith(e)) => arith_code(e),
            CliError::Solve(SolveError::Input(_)) => 1,
            CliError::Solve(_) => 2,
        }
    }
}

impl Cli {
    fn flag_layer(&self) -> Layer {
        Layer {
            base: self.base,
            t: self.t,
            big_t: self.big_t,
            rounding: self.rounding,
            mode: self.mode,
            tol: self.tol,
            safety: self.safety,
            max_iter: self.max_iter,
            format: self.format,
            out: self.out.clone(),
        }
    }

    /// Flags over the config file over `preset`.
    fn layers(&self, preset: Layer) -> Result<Layer, CliError> {
        let file = match &self.config {
            Some(p) => Layer::load(p)?,
            None => Layer::default(),
        };
        Ok(self.flag_layer().over(file).over(preset))
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Demo { op, operands, rs } => commands::demo(cli, *op, operands, *rs),
        Command::EvalSum { terms, target, example } => commands::eval_sum(cli, terms, *target, *example),
        Command::Newton { poly, x0, root } => commands::newton(cli, poly.as_deref(), x0.as_deref(), root.as_deref()),
        Command::Figure { which } => commands::figure(cli, *which),
        Command::Report { kind } => commands::report(cli, *kind),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = std::io::stdout().flush();
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
