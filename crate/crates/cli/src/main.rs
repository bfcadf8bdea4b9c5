mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use wfa_aak::aak::{HankelSize, Verification, Warning};
use wfa_aak::{Error, Tolerances};

/// Optimal spectral-norm reduction of one-letter weighted automata.
#[derive(Debug, Parser)]
#[command(name = "wfa-aak", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print f(k) for each requested k.
    Eval(EvalArgs),
    /// Remove unreachable and unobservable states.
    Minimize(IoArgs),
    /// Convert to singular-value form.
    Sva(IoArgs),
    /// Print the Hankel singular numbers.
    SingularValues(SingularValuesArgs),
    /// Optimal reduction of a stable automaton.
    Reduce(ReduceArgs),
    /// Reduce an automaton with eigenvalues outside the unit disc (not optimal).
    ReduceGeneral(ReduceGeneralArgs),
    /// Compare the optimal reduction against truncation baselines.
    Compare(CompareArgs),
    /// Run the verification checks on fixtures or random instances.
    Check(CheckArgs),
    /// Dump a truncated Hankel matrix as CSV.
    Hankel(HankelArgs),
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    /// Index to evaluate; may be repeated.
    #[arg(long = "k", value_name = "K", required = true)]
    k: Vec<usize>,
    /// Print every digit needed to recover the exact double.
    #[arg(long)]
    full_precision: bool,
}

#[derive(Debug, Args)]
struct IoArgs {
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    /// Destination for the automaton JSON; standard output if omitted.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Debug, Args)]
struct SingularValuesArgs {
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    /// Also report singular values of the N×N truncated Hankel matrix.
    #[arg(long, value_name = "N", value_parser = parse_fixed_size)]
    hankel_size: Option<usize>,
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Debug, Clone, Args)]
struct TolArgs {
    /// Relative tolerance for grouping equal singular numbers.
    #[arg(long, value_name = "X", value_parser = parse_positive)]
    tol_mult: Option<f64>,
    /// Minimum distance of eigenvalues from the unit circle.
    #[arg(long, value_name = "X", value_parser = parse_positive)]
    tol_circle: Option<f64>,
}

impl TolArgs {
    fn tolerances(&self) -> Tolerances {
        let mut t = Tolerances::default();
        if let Some(x) = self.tol_mult {
            t.multiplicity = x;
        }
        if let Some(x) = self.tol_circle {
            t.circle = x;
        }
        t
    }
}

#[derive(Debug, Clone, Args)]
struct VerifyArgs {
    /// Always run the oracle verification (default: only for n ≤ 64).
    #[arg(long, overrides_with = "no_verify")]
    verify: bool,
    /// Never run the oracle verification.
    #[arg(long, overrides_with = "verify")]
    no_verify: bool,
    /// Truncation size for the oracle: a positive integer or `auto`.
    #[arg(long, value_name = "N|auto", default_value = "auto", value_parser = parse_hankel_size)]
    hankel_size: HankelSize,
    /// Circle samples for the unimodularity check.
    #[arg(long, value_name = "M", default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
}

impl VerifyArgs {
    fn verification(&self) -> Verification {
        if self.verify {
            Verification::On
        } else if self.no_verify {
            Verification::Off
        } else {
            Verification::Auto
        }
    }
}

#[derive(Debug, Args)]
struct ReduceArgs {
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    /// Number of states of the reduced automaton.
    #[arg(long, value_name = "K")]
    states: usize,
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Write the JSON report here.
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
    #[command(flatten)]
    verify: VerifyArgs,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Debug, Args)]
struct ReduceGeneralArgs {
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    /// States kept from the stable part.
    #[arg(long, value_name = "K")]
    states: usize,
    /// States kept from the part outside the unit disc.
    #[arg(long, value_name = "K", default_value_t = 0)]
    unstable_states: usize,
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
    #[command(flatten)]
    verify: VerifyArgs,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    #[arg(long, value_name = "K")]
    states: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    #[arg(long, value_name = "N|auto", default_value = "auto", value_parser = parse_hankel_size)]
    hankel_size: HankelSize,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Fixture automata to check; may be repeated.
    #[arg(long, value_name = "PATH", required_unless_present = "random")]
    input: Vec<PathBuf>,
    /// Check seeded random stable automata instead of fixtures.
    #[arg(long, conflicts_with = "input")]
    random: bool,
    /// Number of random instances.
    #[arg(long, value_name = "C", default_value_t = 20)]
    count: usize,
    #[arg(long, value_name = "S", default_value_t = 0)]
    seed: u64,
    /// Worker threads for independent instances.
    #[arg(long, value_name = "J", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: u64,
    #[arg(long, value_name = "N|auto", default_value = "auto", value_parser = parse_hankel_size)]
    hankel_size: HankelSize,
    #[arg(long, value_name = "M", default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Debug, Args)]
struct HankelArgs {
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    #[arg(long, value_name = "N", value_parser = parse_fixed_size)]
    hankel_size: usize,
    /// CSV destination for the matrix; standard output if omitted.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Also write `index,singular_value` rows here.
    #[arg(long, value_name = "PATH")]
    singular_values: Option<PathBuf>,
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
        _ => Err(format!("expected a positive number, got `{s}`")),
    }
}

fn parse_fixed_size(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("expected a positive integer, got `{s}`")),
    }
}

fn parse_hankel_size(s: &str) -> Result<HankelSize, String> {
    if s == "auto" {
        Ok(HankelSize::Auto)
    } else {
        parse_fixed_size(s).map(HankelSize::Fixed)
    }
}

/// Why a command did not succeed; each maps to an exit code.
#[derive(Debug)]
pub enum Failure {
    Input { kind: String, message: String },
    Numerical { kind: String, message: String },
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input { kind: e.kind().to_string(), message: e.to_string() }
        } else {
            Failure::Numerical { kind: e.kind().to_string(), message: e.to_string() }
        }
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input { .. } => 1,
            Failure::Numerical { .. } => 2,
            Failure::Verification(_) => 3,
        }
    }

    fn diagnostic(&self) -> serde_json::Value {
        match self {
            Failure::Input { kind, message } | Failure::Numerical { kind, message } => {
                json!({"level": "error", "kind": kind, "message": message})
            }
            Failure::Verification(m) => json!({"level": "error", "kind": "VerificationFailed", "message": m}),
        }
    }
}

pub fn emit_warnings(warnings: &[Warning]) {
    for w in warnings {
        eprintln!("{}", json!({"level": "warning", "code": w.code, "message": w.message}));
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let diag = json!({"level": "error", "kind": "Usage", "message": e.to_string().trim_end()});
            eprintln!("{diag}");
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Eval(a) => commands::eval(&a.input, &a.k, a.full_precision),
        Command::Minimize(a) => commands::minimize(&a.input, a.output.as_deref(), &a.tol.tolerances()),
        Command::Sva(a) => commands::sva(&a.input, a.output.as_deref(), &a.tol.tolerances()),
        Command::SingularValues(a) => {
            commands::singular_values(&a.input, a.hankel_size, a.output.as_deref(), &a.tol.tolerances())
        }
        Command::Reduce(a) => commands::reduce(&commands::ReduceRequest {
            input: &a.input,
            states: a.states,
            unstable_states: None,
            output: a.output.as_deref(),
            report: a.report.as_deref(),
            options: reduce_options(&a.verify, &a.tol),
        }),
        Command::ReduceGeneral(a) => commands::reduce(&commands::ReduceRequest {
            input: &a.input,
            states: a.states,
            unstable_states: Some(a.unstable_states),
            output: a.output.as_deref(),
            report: a.report.as_deref(),
            options: reduce_options(&a.verify, &a.tol),
        }),
        Command::Compare(a) => {
            let opts = wfa_aak::ReduceOptions {
                verification: Verification::On,
                hankel_size: a.hankel_size,
                tolerances: a.tol.tolerances(),
                ..Default::default()
            };
            commands::compare(&a.input, a.states, matches!(a.format, Format::Csv), a.output.as_deref(), &opts)
        }
        Command::Check(a) => {
            let opts = wfa_aak::ReduceOptions {
                verification: Verification::On,
                hankel_size: a.hankel_size,
                samples: a.samples as usize,
                tolerances: a.tol.tolerances(),
            };
            let source = if a.random {
                commands::CheckSource::Random { count: a.count, seed: a.seed }
            } else {
                commands::CheckSource::Files(&a.input)
            };
            commands::check(source, a.jobs as usize, a.output.as_deref(), &opts)
        }
        Command::Hankel(a) => {
            commands::hankel(&a.input, a.hankel_size, a.output.as_deref(), a.singular_values.as_deref())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.diagnostic());
            ExitCode::from(f.code())
        }
    }
}

fn reduce_options(v: &VerifyArgs, t: &TolArgs) -> wfa_aak::ReduceOptions {
    wfa_aak::ReduceOptions {
        verification: v.verification(),
        hankel_size: v.hankel_size,
        samples: v.samples as usize,
        tolerances: t.tolerances(),
    }
}
