mod commands;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};

use report::{Diagnostic, ReportDocument, RequestEcho};
use stabcoh::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Betti,
    Ext,
    Tor,
    Actions,
    Bounded,
    Stable,
    CheckSymmetry,
    CheckCommutativity,
    Model,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

/// Resolutions, Ext/Tor bimodules, bounded and stable cohomology of graded local rings.
#[derive(Parser, Debug)]
#[command(name = "stabcoh", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Presentation such as `F101[x,y]/(x^3,y^3)` or `Q[x,y]/(x*y)`.
    #[arg(long)]
    ring: String,
    /// `k`, `R`, or generators `(p1,...)` of a cyclic module R/J.
    #[arg(long, default_value = "k")]
    module: String,
    /// Largest homological degree.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u16).range(1..=64))]
    max: u16,
    /// Half-width of the cohomological window for bounded and stable cohomology.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u16).range(1..=64))]
    window: u16,
    /// Largest internal degree materialized in the ring.
    #[arg(long, default_value_t = 14, value_parser = clap::value_parser!(u16).range(2..=200))]
    degree_bound: u16,
    /// Override the coefficient field: `F<p>` or `Q`.
    #[arg(long)]
    field: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Assert depth ℰ ≥ 2 for a Gorenstein ring that is not a complete intersection.
    #[arg(long)]
    assume_depth2: bool,
    /// Record the running time in the report (makes output nondeterministic).
    #[arg(long)]
    timing: bool,
}

pub struct Request {
    pub command: Command,
    pub ring: String,
    pub module: String,
    pub max: usize,
    pub window: usize,
    pub degree_bound: usize,
    pub field: Option<String>,
    pub assume_depth2: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. }
        | Error::UnknownVariable { .. }
        | Error::InvalidField(_)
        | Error::Inhomogeneous { .. }
        | Error::LowDegreeGenerator { .. } => 2,
        Error::Precondition(_) => 3,
        Error::Truncation { .. } | Error::Inconclusive(_) => 4,
        _ => 1,
    }
}

fn diagnostic(e: &Error) -> Diagnostic {
    let (kind, position) = match e {
        Error::Parse { position, .. } | Error::UnknownVariable { position, .. } => ("parse", Some(*position)),
        Error::InvalidField(_) | Error::Inhomogeneous { .. } | Error::LowDegreeGenerator { .. } => ("parse", None),
        Error::Precondition(_) => ("refusal", None),
        Error::Truncation { .. } | Error::Inconclusive(_) => ("inconclusive", None),
        _ => ("internal", None),
    };
    Diagnostic {
        kind: kind.into(),
        message: e.to_string(),
        position,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let req = Request {
        command: cli.command,
        ring: cli.ring.clone(),
        module: cli.module.clone(),
        max: cli.max as usize,
        window: cli.window as usize,
        degree_bound: cli.degree_bound as usize,
        field: cli.field.clone(),
        assume_depth2: cli.assume_depth2,
    };
    let echo = RequestEcho {
        subcommand: cli.command.to_possible_value().expect("named").get_name().to_string(),
        ring: req.ring.clone(),
        module: req.module.clone(),
        max: req.max,
        window: req.window,
        degree_bound: req.degree_bound,
        field: req.field.clone(),
        assume_depth2: req.assume_depth2,
    };
    let start = Instant::now();
    let mut doc = ReportDocument::new(echo);
    let code = match commands::run(&req, &mut doc) {
        Ok(()) if doc.has_incomplete() => 4,
        Ok(()) => 0,
        Err(e) => {
            doc.error = Some(diagnostic(&e));
            exit_code(&e)
        }
    };
    if cli.timing {
        doc.timing_ms = Some(start.elapsed().as_millis() as u64);
    }
    match cli.format {
        Format::Json => print!("{}", doc.to_json()),
        Format::Table => print!("{}", doc.to_table()),
    }
    if let Some(e) = &doc.error {
        eprintln!("stabcoh: {}", e.message);
    }
    ExitCode::from(code)
}
