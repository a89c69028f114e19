//! Command-line front end for the coverage engine.

pub mod args;
mod report;
mod request;
mod verify;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::Path;

use clap::error::ErrorKind;
use clap::Parser;
use covprob::engine::{analyze, coverage_curve, EngineError};
use covprob::procedures::table_file;
use covprob::{fmt_real, BoundsMode};
use thiserror::Error;

use args::{AnalyzeArgs, Bounds, Cli, Command, CurveArgs, TableArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("out: cannot write {path}: {reason}")]
    Write { path: String, reason: String },
    #[error("verification failed")]
    VerifyFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed => 1,
            CliError::Usage(_) => 2,
            CliError::Certification(_) => 3,
            CliError::Write { .. } => 4,
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        if e.is_certification() {
            CliError::Certification(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let shown = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(shown.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(shown.as_bytes());
                    2
                }
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            if !matches!(e, CliError::VerifyFailed) {
                let _ = writeln!(err, "error: {e}");
            }
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Analyze(a) => run_analyze(&a, out),
        Command::Curve(c) => run_curve(&c, out),
        Command::Verify(v) => {
            let (text, passed) = verify::run(&v)?;
            emit(v.out.as_deref(), &text, out)?;
            if passed {
                Ok(())
            } else {
                Err(CliError::VerifyFailed)
            }
        }
        Command::Table(t) => run_table(&t, out),
    }
}

/// Writes `text` to `path`, or to `out` without one.
fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    let shown = path.map_or_else(|| "<stdout>".to_string(), |p| p.display().to_string());
    let fail = |e: std::io::Error| CliError::Write {
        path: shown.clone(),
        reason: e.to_string(),
    };
    match path {
        Some(p) => fs::write(p, text).map_err(fail),
        None => out.write_all(text.as_bytes()).map_err(fail),
    }
}

fn modes(bounds: Bounds) -> Vec<BoundsMode> {
    match bounds {
        Bounds::Open => vec![BoundsMode::OpenOpen],
        Bounds::Closed => vec![BoundsMode::ClosedClosed],
        Bounds::Both => vec![BoundsMode::OpenOpen, BoundsMode::ClosedClosed],
    }
}

fn bounds_name(bounds: Bounds) -> &'static str {
    match bounds {
        Bounds::Open => "open",
        Bounds::Closed => "closed",
        Bounds::Both => "both",
    }
}

fn run_analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let r = request::resolve(&args.procedure)?;
    let (a, b) = request::parse_range(args.range.as_deref(), &r.spec)?;
    let reports = modes(args.bounds)
        .into_iter()
        .map(|mode| analyze(&r.spec, &r.procedure, a, b, mode))
        .collect::<Result<Vec<_>, _>>()?;
    let text = report::render(&r.spec, &r.procedure, (a, b), bounds_name(args.bounds), &reports);
    emit(args.out.as_deref(), &text, out)
}

fn run_curve(args: &CurveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mode = match args.bounds {
        Bounds::Open => BoundsMode::OpenOpen,
        Bounds::Closed => BoundsMode::ClosedClosed,
        Bounds::Both => {
            return Err(CliError::Usage(
                "bounds: curve takes a single mode, open or closed".into(),
            ))
        }
    };
    let r = request::resolve(&args.procedure)?;
    let (a, b) = request::parse_range(args.range.as_deref(), &r.spec)?;
    let rows = coverage_curve(&r.spec, &r.procedure, a, b, mode, args.points)?;
    let mut text = String::from("theta,coverage,breakpoint\n");
    for row in rows {
        text.push_str(&format!(
            "{},{},{}\n",
            fmt_real(row.theta),
            fmt_real(row.coverage),
            row.breakpoint
        ));
    }
    emit(args.out.as_deref(), &text, out)
}

fn run_table(args: &TableArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if args.procedure.table.is_some() {
        return Err(CliError::Usage("table: expects --method, not --table".into()));
    }
    let r = request::resolve(&args.procedure)?;
    let text = table_file::render(&r.spec, &r.procedure, args.k_last);
    emit(args.out.as_deref(), &text, out)
}
