use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use scaling_lab::{FadingSpec, MRule};

#[derive(Debug, Parser)]
#[command(
    name = "scaling-lab",
    version,
    about = "Throughput-scaling simulator for ad hoc networks under the random connection model"
)]
pub struct Cli {
    /// Worker threads for the trial harness (defaults to all cores).
    #[arg(long, global = true, env = "SCALING_LAB_WORKERS")]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw samples from a fading law and summarize them.
    Sample(SampleArgs),
    /// Exhaustive genie search for the largest valid set.
    Genie(GenieArgs),
    /// Opportunistic two-hop relaying experiment.
    Relay(RelayArgs),
    /// Run any experiment from a JSON config file.
    Run(RunArgs),
    /// Evaluate an analytic bound over a grid.
    Bounds(BoundsArgs),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Rayleigh,
    LogNormal,
    Nakagami,
    Extremal,
    ParetoPathloss,
    ParetoGeneral,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// Fading family.
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// Mean (extremal law; also accepted as the Rayleigh or Nakagami mean).
    #[arg(long)]
    pub mu: Option<f64>,
    /// Standard deviation of the extremal law.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Population size of the extremal law (defaults to n in experiments).
    #[arg(long)]
    pub pop: Option<u64>,
    /// Mean power of the Rayleigh or Nakagami law.
    #[arg(long)]
    pub mean: Option<f64>,
    /// Log-normal shadowing spread in dB.
    #[arg(long)]
    pub sigma_db: Option<f64>,
    /// Nakagami shape parameter.
    #[arg(long)]
    pub shape: Option<f64>,
    /// Path-loss exponent of the Pareto path-loss law.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Tail index of the general Pareto law.
    #[arg(long)]
    pub nu: Option<f64>,
    /// Tail constant of the general Pareto law.
    #[arg(long)]
    pub c0: Option<f64>,
}

impl ModelArgs {
    /// `None` when no `--model` was given.
    pub fn spec(&self) -> Result<Option<FadingSpec>, String> {
        let Some(kind) = self.model else {
            return Ok(None);
        };
        let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| format!("--model {kind:?} needs --{flag}"));
        let spec = match kind {
            ModelKind::Rayleigh => FadingSpec::Rayleigh {
                mean: self.mean.or(self.mu).unwrap_or(1.0),
            },
            ModelKind::LogNormal => FadingSpec::LogNormal {
                sigma_db: need(self.sigma_db, "sigma-db")?,
            },
            ModelKind::Nakagami => FadingSpec::Nakagami {
                shape: need(self.shape, "shape")?,
                mean: self.mean.or(self.mu).unwrap_or(1.0),
            },
            ModelKind::Extremal => FadingSpec::ExtremalMv {
                mu: need(self.mu, "mu")?,
                sigma: need(self.sigma, "sigma")?,
                pop: self.pop,
            },
            ModelKind::ParetoPathloss => FadingSpec::ParetoPathloss {
                alpha: need(self.alpha, "alpha")?,
            },
            ModelKind::ParetoGeneral => FadingSpec::ParetoGeneral {
                nu: need(self.nu, "nu")?,
                c0: need(self.c0, "c0")?,
            },
        };
        Ok(Some(spec))
    }
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Number of draws.
    #[arg(long, default_value_t = 100_000)]
    pub n_samples: usize,
    /// Base seed; a random one is chosen and printed when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the samples CSV here (stdout otherwise, with the summary on stderr).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Flags shared by the experiment commands; each overrides the config file.
#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// JSON experiment config, or a manifest from an earlier run.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Comma-separated sizes, or `start:end:step`, or `2^a..2^b` for powers of two.
    #[arg(long)]
    pub n_grid: Option<String>,
    /// Signal-to-noise ratio (default 10).
    #[arg(long)]
    pub rho: Option<f64>,
    /// SINR threshold (default 1, or 1 - 2/alpha for pareto-linear).
    #[arg(long)]
    pub beta0: Option<f64>,
    /// Monte Carlo trials per grid point.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Base seed; a random one is chosen and recorded when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for results.csv, summary.json and manifest.json.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenieModeArg {
    Single,
    TwoHop,
}

#[derive(Debug, Args)]
pub struct GenieArgs {
    /// Search for one hop, or for a two-hop relay assignment.
    #[arg(long, value_enum, default_value = "single")]
    pub mode: GenieModeArg,
    /// Single instance size (alternative to --n-grid).
    #[arg(long, conflicts_with = "n_grid")]
    pub n: Option<usize>,
    /// Lift the exhaustive-search size limits and accept exponential cost.
    #[arg(long)]
    pub force_exponential: bool,
    #[command(flatten)]
    pub exp: ExperimentArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RelaySchemeArg {
    /// Square-root scaling setup (any finite-variance law).
    Opportunistic,
    /// Linear scaling setup (Pareto path-loss law, m = n, beta0 = 1 - 2/alpha).
    ParetoLinear,
}

#[derive(Debug, Args)]
pub struct RelayArgs {
    #[arg(long, value_enum)]
    pub scheme: Option<RelaySchemeArg>,
    /// `paper-sqrt`, `equal-n` or `fixed:<k>`.
    #[arg(long)]
    pub m_rule: Option<MRule>,
    /// Also write per-hop records to hops.csv.
    #[arg(long)]
    pub hops: bool,
    #[command(flatten)]
    pub exp: ExperimentArgs,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// `paper-sqrt`, `equal-n` or `fixed:<k>`.
    #[arg(long)]
    pub m_rule: Option<MRule>,
    #[command(flatten)]
    pub exp: ExperimentArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundKindArg {
    /// Two-term single-link success bound over an m grid.
    SinrUpper,
    /// First-moment existence bound, single hop.
    GenieSingle,
    /// First-moment existence bound, two hop.
    GenieTwoHop,
    /// Feige lower bound over a delta grid.
    Feige,
    /// Exact all-distinct probability over an m grid.
    Distinct,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, value_enum)]
    pub bound: BoundKindArg,
    /// Grid of m (or delta for feige): comma list or `start:end:step`.
    #[arg(long)]
    pub grid: String,
    /// Mean of the fading law.
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Variance of the fading law.
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    /// SINR threshold.
    #[arg(long, default_value_t = 1.0)]
    pub beta0: f64,
    /// Signal-to-noise ratio.
    #[arg(long, default_value_t = 10.0)]
    pub rho: f64,
    /// Network size for the genie and distinct bounds.
    #[arg(long)]
    pub n: Option<u64>,
    /// Per-link success bound for the genie bounds; the two-term bound at
    /// each m is used when omitted.
    #[arg(long)]
    pub p_bound: Option<f64>,
    /// Write the curve here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Reduced trial counts.
    #[arg(long)]
    pub quick: bool,
    /// Base seed for every criterion (a fixed default when omitted).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Only these criteria (comma-separated ids).
    #[arg(long, value_delimiter = ',')]
    pub criteria: Vec<u8>,
    /// Where to write the JSON report.
    #[arg(long, default_value = "verify.json")]
    pub json: PathBuf,
}
