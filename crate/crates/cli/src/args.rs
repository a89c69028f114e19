use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "covprob", version, about = "Exact worst-case coverage of random intervals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Infimum of the coverage over a parameter range.
    Analyze(AnalyzeArgs),
    /// Coverage on a grid plus every critical point, as CSV.
    Curve(CurveArgs),
    /// Seeded engine-versus-oracle equivalence and the exact identity suite.
    Verify(VerifyArgs),
    /// Write a built-in procedure in the table format.
    Table(TableArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    ClopperPearson,
    Garwood,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Bounds {
    Open,
    Closed,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct ProcedureArgs {
    /// binomial, poisson, negbinomial (or geometric), hypergeometric
    #[arg(long)]
    pub family: Option<String>,
    /// Trials, samples or draws.
    #[arg(long)]
    pub n: Option<u64>,
    /// Hypergeometric population size.
    #[arg(long = "N")]
    pub population: Option<u64>,
    /// Negative-binomial shape.
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    /// Procedure table file.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub procedure: ProcedureArgs,
    /// Parameter range `a:b`.
    #[arg(long)]
    pub range: Option<String>,
    #[arg(long, value_enum, default_value_t = Bounds::Closed)]
    pub bounds: Bounds,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub procedure: ProcedureArgs,
    #[arg(long)]
    pub range: Option<String>,
    #[arg(long, value_enum, default_value_t = Bounds::Closed)]
    pub bounds: Bounds,
    /// Evenly spaced grid points, critical points come on top.
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub cases: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run the identity suite against a wrong hypergeometric weight.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub procedure: ProcedureArgs,
    /// Last row written for unbounded supports.
    #[arg(long, default_value_t = 200)]
    pub k_last: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
