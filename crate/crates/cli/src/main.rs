mod commands;
mod input;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use commands::{CommandError, Exit, Options, Report};
use isocalc::wold::DEFAULT_BOUND;

#[derive(Parser)]
#[command(name = "isocalc", version, about = "Exact computations with sums of weighted partial isometries")]
struct Cli {
    /// Index bound for prefix-tier certificates.
    #[arg(long, global = true, env = "ISOCALC_BOUND", default_value_t = DEFAULT_BOUND,
          value_parser = clap::value_parser!(u64).range(1..=1 << 20))]
    bound: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Truncation size for `truncate` (default 64) and `cross-validate` (default 128).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..=1 << 14))]
    truncation: Option<u64>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Inputs are file paths, `-` for stdin, or inline JSON.
#[derive(Subcommand)]
enum Command {
    /// Shift whose wandering set is the given index set.
    MakeShift { wandering: String },
    /// Shift whose range is the given index set.
    MakeRangeShift { range: String },
    /// Isometry with a prescribed unitary part and range.
    MakeIsometry { unitary: String, range: String },
    /// Generators e_i ↦ e_{n·i+r} of the Cuntz algebra.
    MakeCuntz {
        #[arg(value_parser = clap::value_parser!(u64).range(2..=64))]
        n: u64,
    },
    /// Decide whether the operators span an MI-space.
    CheckMi {
        #[arg(required = true)]
        operators: Vec<String>,
    },
    /// Gram matrix of inner products.
    Gram {
        #[arg(required = true)]
        operators: Vec<String>,
    },
    /// Wold decomposition of an isometry.
    Wold { operator: String },
    /// Check the commutator identity for two operators.
    CommutatorCheck { a: String, b: String },
    /// Structural audit of an MI-space.
    Audit {
        #[arg(required = true)]
        operators: Vec<String>,
    },
    /// Floating-point truncation P_N A P_N.
    Truncate { operator: String },
    /// Compare exact and truncated products.
    CrossValidate { a: String, b: String },
}

fn run(cli: &Cli) -> Result<Report, CommandError> {
    let opts = Options {
        bound: cli.bound,
        truncation: cli.truncation.map(|n| n as usize),
    };
    match &cli.command {
        Command::MakeShift { wandering } => commands::make_shift(wandering, &opts),
        Command::MakeRangeShift { range } => commands::make_range_shift(range, &opts),
        Command::MakeIsometry { unitary, range } => commands::make_isometry(unitary, range, &opts),
        Command::MakeCuntz { n } => commands::make_cuntz_family(*n),
        Command::CheckMi { operators } => commands::check_mi(operators),
        Command::Gram { operators } => commands::gram(operators),
        Command::Wold { operator } => commands::wold_command(operator, &opts),
        Command::CommutatorCheck { a, b } => commands::commutator_check(a, b),
        Command::Audit { operators } => commands::audit(operators),
        Command::Truncate { operator } => commands::truncate_command(operator, &opts),
        Command::CrossValidate { a, b } => commands::cross_validate_command(a, b, &opts),
    }
}

fn report_error(e: &CommandError, format: Format) {
    let (input, pointer, witness) = match e {
        CommandError::Input(i) => (Some(i.label()), i.pointer(), i.witness()),
        _ => (None, None, None),
    };
    match format {
        Format::Json => {
            let v = json!({ "error": {
                "message": e.to_string(),
                "input": input,
                "pointer": pointer,
                "witness": witness,
            }});
            eprintln!("{v}");
        }
        Format::Text => {
            let w = witness.map(|w| format!(" (witness index {w})")).unwrap_or_default();
            eprintln!("isocalc: {e}{w}");
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            report_error(&e, cli.format);
            return ExitCode::from(Exit::Input as u8);
        }
    };
    let text = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.to_json()).expect("serialisable");
            s.push('\n');
            s
        }
        Format::Text => report.to_text(),
    };
    let written = match &cli.out {
        Some(path) => fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| format!("cannot write output: {e}")),
    };
    if let Err(msg) = written {
        eprintln!("isocalc: {msg}");
        return ExitCode::from(Exit::Input as u8);
    }
    ExitCode::from(report.exit as u8)
}
