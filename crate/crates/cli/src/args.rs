use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use commcap::Family;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "commcap",
    version,
    about = "Quantum communication capacity lower bounds for two-party Boolean functions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Capacity entropy, Renyi-2 value and the four communication lower bounds.
    Bound(BoundArgs),
    /// Renyi-2 entropy under uniform inputs via the integer fast path.
    Renyi2(FunctionArgs),
    /// Search for input distributions with large capacity entropy.
    Optimize(OptimizeArgs),
    /// Simulate the clean protocol and noisy answer models.
    ProtocolCheck(ProtocolArgs),
    /// Monte Carlo tail frequency of low Renyi-2 entropy for random functions.
    Tail(TailArgs),
    /// CSV table of entropies and bounds over a range of n.
    Sweep(SweepArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Bound(_) => "bound",
            Command::Renyi2(_) => "renyi2",
            Command::Optimize(_) => "optimize",
            Command::ProtocolCheck(_) => "protocol-check",
            Command::Tail(_) => "tail",
            Command::Sweep(_) => "sweep",
        }
    }
}

fn family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|_| {
        let names: Vec<_> = Family::ALL.iter().map(|f| f.name()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

fn epsilon(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..0.5).contains(&v) {
        Ok(v)
    } else {
        Err("must lie in [0, 0.5)".into())
    }
}

fn delta(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err("must lie in (0, 1)".into())
    }
}

#[derive(Debug, Args, Serialize)]
#[group(id = "source", required = true, multiple = false)]
pub struct Source {
    /// Built-in function family.
    #[arg(long = "fn", value_name = "FAMILY", value_parser = family, group = "source")]
    #[serde(rename = "fn")]
    pub family: Option<Family>,
    /// CCF1 truth table file.
    #[arg(long, value_name = "PATH", group = "source")]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct FunctionArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: Source,
    /// Bits per party (taken from the file when --file is used).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=13), required_unless_present = "file")]
    pub n: Option<u32>,
    /// Seed for the random family and for optimizer restarts.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Dist {
    Uniform,
    Optimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Fannes {
    Paper,
    Conservative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args, Serialize)]
pub struct OptimizerFlags {
    /// Dirichlet restarts on top of the uniform start.
    #[arg(long, default_value_t = 4)]
    pub restarts: usize,
    #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_iters: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub function: FunctionArgs,
    #[arg(long, value_enum, default_value_t = Dist::Uniform)]
    pub dist: Dist,
    /// Allowed error probability.
    #[arg(long, default_value_t = 0.0, value_parser = epsilon)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = Fannes::Conservative)]
    pub fannes: Fannes,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    #[serde(flatten)]
    pub optimizer: OptimizerFlags,
}

#[derive(Debug, Args, Serialize)]
pub struct OptimizeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub function: FunctionArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub optimizer: OptimizerFlags,
}

#[derive(Debug, Args, Serialize)]
pub struct ProtocolArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: Source,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=6), required_unless_present = "file")]
    pub n: Option<u32>,
    #[arg(long, default_value_t = 0.01, value_parser = epsilon)]
    pub eps: f64,
    /// Number of sampled noisy answer models.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct TailArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=13))]
    pub n: u32,
    #[arg(long, value_parser = delta)]
    pub delta: f64,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long = "fn", value_name = "FAMILY", value_parser = family)]
    #[serde(rename = "fn")]
    pub family: Family,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=13))]
    pub n_min: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=13))]
    pub n_max: u32,
    #[arg(long, value_enum, default_value_t = Dist::Uniform)]
    pub dist: Dist,
    #[arg(long, default_value_t = 0.0, value_parser = epsilon)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = Fannes::Conservative)]
    pub fannes: Fannes,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub optimizer: OptimizerFlags,
}
