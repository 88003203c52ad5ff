//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "ekamm",
    version,
    about = "Pool settlement over a one-parameter family of AMM liquidity curves",
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Create a pool document from genesis deposits and prices.
    Init(InitArgs),
    /// Price a trade without touching the pool document.
    Quote(TradeArgs),
    /// Settle a trade and atomically rewrite the pool document.
    Apply(TradeArgs),
    /// Replay a trade-log CSV with per-step invariant auditing.
    Replay(ReplayArgs),
    /// Export liquidity-curve samples as CSV.
    Curve(CurveArgs),
}

#[derive(Debug, Args)]
pub struct InitArgs {
    /// Pool document path to create.
    #[arg(long)]
    pub pool: PathBuf,
    /// Comma-separated asset symbols.
    #[arg(long, value_delimiter = ',', required = true)]
    pub tokens: Vec<String>,
    /// Comma-separated genesis deposits, one per token.
    #[arg(long, value_delimiter = ',', required = true)]
    pub amounts: Vec<f64>,
    /// Comma-separated genesis prices in pool-token numeraire.
    #[arg(long, value_delimiter = ',', required = true)]
    pub prices: Vec<f64>,
    /// Curve parameter in [0, 1].
    #[arg(long)]
    pub k: f64,
    /// Weight policy: "equal" or "constant".
    #[arg(long, default_value = "equal")]
    pub policy: String,
    /// Comma-separated target weights (constant policy only).
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct TradeArgs {
    /// Pool document path.
    #[arg(long)]
    pub pool: PathBuf,
    /// Fixed leg as TOKEN:AMOUNT (repeatable). Positive amounts flow into
    /// the pool. POOL_TOKEN fixes the pool-token leg in supply units.
    #[arg(long = "in", value_name = "TOKEN:AMOUNT")]
    pub legs: Vec<String>,
    /// The leg to solve for: an asset symbol or POOL_TOKEN.
    #[arg(long = "out", value_name = "TOKEN")]
    pub unknown: String,
    /// Trade kind; inferred from the legs when omitted.
    #[arg(long)]
    pub kind: Option<String>,
    /// Cross-check the solved leg against the bisection oracle.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Pool document path; rewritten only if the whole log settles.
    #[arg(long)]
    pub pool: PathBuf,
    /// Trade-log CSV path.
    #[arg(long)]
    pub trades: PathBuf,
    /// Cross-check every solved leg against the bisection oracle.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Sweep mode: "swap" (two-asset swap curve) or "stake"
    /// (single-asset staking curve).
    #[arg(long)]
    pub sweep: String,
    /// Comma-separated curve parameters, each in [0, 1].
    #[arg(long, value_delimiter = ',', required = true)]
    pub k: Vec<f64>,
    /// Sample grid lo:hi:steps over the swept growth factor.
    #[arg(long)]
    pub range: String,
    /// Pool size for stake sweeps.
    #[arg(long)]
    pub n: Option<usize>,
    /// Cross-check every sample against the bisection oracle.
    #[arg(long)]
    pub verify: bool,
}
