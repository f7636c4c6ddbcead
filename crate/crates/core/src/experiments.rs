//! Monte Carlo harness: sweeps over `n`, per-trial seeding, aggregation and
//! power-law fits.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::channel::{ChannelMatrix, CompensatedSum, LinkParams};
use crate::error::{Error, Result};
use crate::fading::{FadingModel, FadingSpec, Moment};
use crate::genie::{self, GenieLimits};
use crate::relay::{self, RelayConfig};
use crate::seed;

/// Bootstrap resamples used by [`fit_scaling`].
pub const BOOTSTRAP_RESAMPLES: usize = 200;
const BOOTSTRAP_SEED: u64 = 0x0b00_7575_7261_7073;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    GenieSingle,
    GenieTwoHop,
    OpportunisticTwoHop,
    ParetoLinear,
    DistributionDiagnostics,
    BoundOverlay,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::GenieSingle => "genie_single",
            Scheme::GenieTwoHop => "genie_two_hop",
            Scheme::OpportunisticTwoHop => "opportunistic_two_hop",
            Scheme::ParetoLinear => "pareto_linear",
            Scheme::DistributionDiagnostics => "distribution_diagnostics",
            Scheme::BoundOverlay => "bound_overlay",
        }
    }
}

/// How the relay (or active-set) count follows `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MRule {
    Fixed(usize),
    PaperSqrt,
    EqualN,
}

impl MRule {
    pub fn relays(self, n: usize) -> usize {
        match self {
            MRule::Fixed(k) => k,
            MRule::PaperSqrt => relay::paper_sqrt_relays(n),
            MRule::EqualN => n,
        }
    }
}

impl fmt::Display for MRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MRule::Fixed(k) => write!(f, "fixed:{k}"),
            MRule::PaperSqrt => f.write_str("paper-sqrt"),
            MRule::EqualN => f.write_str("equal-n"),
        }
    }
}

impl FromStr for MRule {
    type Err = Error;

    /// Accepts `paper-sqrt`, `equal-n` and `fixed:<k>` (underscores also allowed).
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().replace('_', "-");
        match norm.as_str() {
            "paper-sqrt" => Ok(MRule::PaperSqrt),
            "equal-n" => Ok(MRule::EqualN),
            other => other
                .strip_prefix("fixed:")
                .and_then(|k| k.parse().ok())
                .map(MRule::Fixed)
                .ok_or_else(|| Error::config("m_rule", format!("`{s}` is not paper-sqrt, equal-n or fixed:<k>"))),
        }
    }
}

fn default_rho() -> f64 {
    relay::DEFAULT_RHO
}

fn default_m_rule() -> MRule {
    MRule::PaperSqrt
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scheme: Scheme,
    pub model: FadingSpec,
    pub n_grid: Vec<usize>,
    #[serde(default = "default_m_rule")]
    pub m_rule: MRule,
    #[serde(default = "default_rho")]
    pub rho: f64,
    /// SINR threshold; `None` selects 1, or `1 − 2/α` for `pareto_linear`.
    #[serde(default)]
    pub beta0: Option<f64>,
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub genie_limits: GenieLimits,
}

/// Everything a trial at a given `n` needs.
#[derive(Debug, Clone, Copy)]
struct Plan {
    n: usize,
    m: usize,
    params: LinkParams,
    model: FadingModel,
}

impl ExperimentConfig {
    pub fn new(scheme: Scheme, model: FadingSpec, n_grid: Vec<usize>, trials: usize, base_seed: u64) -> Self {
        Self {
            scheme,
            model,
            n_grid,
            m_rule: match scheme {
                Scheme::ParetoLinear => MRule::EqualN,
                _ => MRule::PaperSqrt,
            },
            rho: relay::DEFAULT_RHO,
            beta0: None,
            trials,
            base_seed,
            genie_limits: GenieLimits::default(),
        }
    }

    fn beta0_for(&self, model: &FadingModel) -> f64 {
        match (self.beta0, self.scheme, model.spec()) {
            (Some(b), _, _) => b,
            (None, Scheme::ParetoLinear, FadingSpec::ParetoPathloss { alpha }) => 1.0 - 2.0 / alpha,
            _ => 1.0,
        }
    }

    fn plan(&self, n: usize) -> Result<Plan> {
        let model = FadingModel::new(self.model.with_default_population(n as u64))
            .map_err(|e| Error::config("model", e.to_string()))?;
        let params = LinkParams::new(self.rho, self.beta0_for(&model)).map_err(|e| match e {
            Error::InvalidParameter { name, reason } => Error::config(name, reason),
            other => other,
        })?;
        Ok(Plan {
            n,
            m: self.m_rule.relays(n),
            params,
            model,
        })
    }

    /// Checks every field before any computation, naming the offending one.
    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::config("n_grid", "must not be empty"));
        }
        if self.n_grid[0] == 0 {
            return Err(Error::config("n_grid", "entries must be >= 1"));
        }
        if self.n_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("n_grid", "must be strictly increasing"));
        }
        if self.trials == 0 {
            return Err(Error::config("trials", "must be >= 1"));
        }
        if let MRule::Fixed(0) = self.m_rule {
            return Err(Error::config("m_rule", "fixed relay count must be >= 1"));
        }
        for &n in &self.n_grid {
            let plan = self.plan(n)?;
            match self.scheme {
                Scheme::GenieSingle => {
                    if n > self.genie_limits.single_hop.min(GenieLimits::MAX_REPRESENTABLE) {
                        return Err(Error::config(
                            "n_grid",
                            format!(
                                "n = {n} exceeds the single-hop exhaustive limit {}",
                                self.genie_limits.single_hop
                            ),
                        ));
                    }
                }
                Scheme::GenieTwoHop => {
                    if n > self.genie_limits.two_hop.min(GenieLimits::MAX_REPRESENTABLE) {
                        return Err(Error::config(
                            "n_grid",
                            format!(
                                "n = {n} exceeds the two-hop exhaustive limit {}",
                                self.genie_limits.two_hop
                            ),
                        ));
                    }
                    if plan.params.beta0() < 1.0 {
                        return Err(Error::config("beta0", "two-hop genie search needs beta0 >= 1"));
                    }
                }
                Scheme::ParetoLinear => {
                    let FadingSpec::ParetoPathloss { alpha } = self.model else {
                        return Err(Error::config("model", "pareto_linear needs the pareto_pathloss family"));
                    };
                    if alpha <= 2.0 {
                        return Err(Error::config("model", "pareto_linear needs alpha > 2"));
                    }
                    if self.m_rule != MRule::EqualN {
                        return Err(Error::config("m_rule", "pareto_linear uses m = n (equal-n)"));
                    }
                }
                Scheme::BoundOverlay => {
                    let moments = plan.model.moments();
                    if moments.mean.is_infinite() || moments.variance.is_infinite() {
                        return Err(Error::config("model", "bound_overlay needs finite mean and variance"));
                    }
                    if plan.m < 2 {
                        return Err(Error::config("m_rule", "bound_overlay needs m >= 2"));
                    }
                }
                Scheme::OpportunisticTwoHop | Scheme::DistributionDiagnostics => {}
            }
        }
        Ok(())
    }
}

/// One trial. Fields that do not apply to the scheme are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub n: usize,
    /// Relay count, active-set size, or the genie's `m*`.
    pub m: usize,
    pub trial_index: usize,
    pub throughput_bits: f64,
    pub distinct_event: Option<bool>,
    pub per_link_success_rate: f64,
    pub scheduled_sources: Option<usize>,
    pub max_gain: Option<f64>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub first_hop_successes: Option<usize>,
    pub second_hop_successes: Option<usize>,
}

impl TrialResult {
    fn blank(plan: &Plan, trial_index: usize) -> Self {
        Self {
            n: plan.n,
            m: plan.m,
            trial_index,
            throughput_bits: 0.0,
            distinct_event: None,
            per_link_success_rate: 0.0,
            scheduled_sources: None,
            max_gain: None,
            r1: None,
            r2: None,
            first_hop_successes: None,
            second_hop_successes: None,
        }
    }
}

/// Aggregates for one `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NSummary {
    pub n: usize,
    /// Configured relay or active-set count (mean `m*` for genie schemes).
    pub m: f64,
    pub trials: usize,
    pub mean_throughput: f64,
    pub std_err: f64,
    pub median_throughput: f64,
    pub per_link_success_rate: f64,
    pub distinct_event_frequency: Option<f64>,
    /// Mean first-hop throughput counted only on the all-distinct event.
    pub conditional_r1: Option<f64>,
    /// Mean first-hop throughput with duplicate decodes credited once.
    pub unconditional_r1: Option<f64>,
    pub mean_r2: Option<f64>,
    pub scheduled_fraction: Option<f64>,
    pub mean_max_gain: Option<f64>,
    /// Analytic upper bound matching the measured success rate, if any.
    pub bound_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub trials: Vec<TrialResult>,
    pub summaries: Vec<NSummary>,
    pub fit: Option<ScalingFit>,
}

/// `(p̂, √(p̂(1−p̂)/trials))`.
pub fn estimate_probability(successes: u64, trials: u64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::domain("trials must be >= 1"));
    }
    if successes > trials {
        return Err(Error::domain(format!("successes {successes} exceed trials {trials}")));
    }
    let p = successes as f64 / trials as f64;
    Ok((p, (p * (1.0 - p) / trials as f64).sqrt()))
}

/// Mean and standard error of the mean.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let k = xs.len() as f64;
    let mean = xs.iter().copied().collect::<CompensatedSum>().value() / k;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss = xs
        .iter()
        .map(|x| (x - mean) * (x - mean))
        .collect::<CompensatedSum>()
        .value();
    (mean, (ss / (k - 1.0) / k).sqrt())
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

fn ols(points: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Some((slope, intercept, r2))
}

/// Least squares on `(ln n, ln y)` with a 95% percentile bootstrap over
/// points. The interval always contains the point estimate.
pub fn fit_scaling(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::domain(format!("need at least 3 points, got {}", points.len())));
    }
    if let Some(p) = points.iter().find(|p| !(p.0 > 0.0 && p.1 > 0.0)) {
        return Err(Error::domain(format!("log of nonpositive point ({}, {})", p.0, p.1)));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let (slope, intercept, r_squared) = ols(&logs).ok_or_else(|| Error::domain("all n values are equal"))?;

    let mut rng = seed::stream(BOOTSTRAP_SEED);
    let mut slopes = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    let mut sample = Vec::with_capacity(logs.len());
    while slopes.len() < BOOTSTRAP_RESAMPLES {
        sample.clear();
        sample.extend((0..logs.len()).map(|_| logs[rng.random_range(0..logs.len())]));
        if let Some((s, _, _)) = ols(&sample) {
            slopes.push(s);
        }
    }
    slopes.sort_by(f64::total_cmp);
    let pick = |q: f64| slopes[((q * (slopes.len() - 1) as f64).round()) as usize];
    Ok(ScalingFit {
        slope,
        intercept,
        ci_low: pick(0.025).min(slope),
        ci_high: pick(0.975).max(slope),
        r_squared,
    })
}

/// Monte Carlo `Pr[γ/(1/ρ + Z) ≥ β0]` with `Z` a sum of `m − 1` independent
/// interferers. Returns `(p̂, std_err)`.
pub fn link_success_probability<R: RngCore + ?Sized>(
    model: &FadingModel,
    m: usize,
    params: &LinkParams,
    trials: u64,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if m == 0 {
        return Err(Error::param("m", "must be >= 1"));
    }
    let mut hits = 0u64;
    for _ in 0..trials {
        let signal = model.sample(rng);
        let z: CompensatedSum = (1..m).map(|_| model.sample(rng)).collect();
        hits += params.passes(signal / (params.noise() + z.value())) as u64;
    }
    estimate_probability(hits, trials)
}

/// Monte Carlo `Pr[I ≤ threshold]` for `I` a sum of `terms` independent gains.
pub fn sum_below_probability<R: RngCore + ?Sized>(
    model: &FadingModel,
    terms: usize,
    threshold: f64,
    trials: u64,
    rng: &mut R,
) -> Result<(f64, f64)> {
    let mut hits = 0u64;
    for _ in 0..trials {
        let s: CompensatedSum = (0..terms).map(|_| model.sample(rng)).collect();
        hits += (s.value() <= threshold) as u64;
    }
    estimate_probability(hits, trials)
}

fn run_trial(
    scheme: Scheme,
    limits: &GenieLimits,
    plan: &Plan,
    seed_value: u64,
    trial_index: usize,
) -> Result<TrialResult> {
    let mut rng = seed::stream(seed_value);
    let mut out = TrialResult::blank(plan, trial_index);
    let p = &plan.params;
    match scheme {
        Scheme::GenieSingle | Scheme::GenieTwoHop => {
            let h = ChannelMatrix::draw(plan.n, plan.n, &plan.model, &mut rng)?;
            let res = if scheme == Scheme::GenieSingle {
                genie::max_valid_single_hop(&h, p, limits)?
            } else {
                genie::max_valid_two_hop(&h, p, limits)?
            };
            let alone = (0..plan.n).filter(|&i| p.passes(h.gain(i, i) * p.rho())).count();
            out.m = res.m_star;
            out.per_link_success_rate = alone as f64 / plan.n as f64;
            let bits = res.m_star as f64 * p.r0();
            // the second hop is the same problem, so one search bounds both hops
            out.throughput_bits = if scheme == Scheme::GenieSingle {
                bits
            } else {
                0.5 * bits
            };
        }
        Scheme::OpportunisticTwoHop | Scheme::ParetoLinear => {
            let cfg = RelayConfig::new(plan.n, plan.m, plan.params, plan.model)?;
            let r = relay::two_hop_realization(&cfg, &mut rng)?;
            out.throughput_bits = r.throughput_bits;
            out.distinct_event = Some(r.first.distinct_event);
            out.per_link_success_rate = r.first.successes as f64 / plan.m as f64;
            out.scheduled_sources = Some(r.first.scheduled());
            out.r1 = Some(r.first.throughput_bits);
            out.r2 = Some(r.second.throughput_bits);
            out.first_hop_successes = Some(r.first.successes);
            out.second_hop_successes = Some(r.second.successes);
        }
        Scheme::DistributionDiagnostics => {
            let max = (0..plan.n)
                .map(|_| plan.model.sample(&mut rng))
                .fold(f64::NEG_INFINITY, f64::max);
            out.max_gain = Some(max);
        }
        Scheme::BoundOverlay => {
            let (hit, _) = link_success_probability(&plan.model, plan.m, p, 1, &mut rng)?;
            out.per_link_success_rate = hit;
        }
    }
    Ok(out)
}

fn mean_of(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = xs.collect();
    (!v.is_empty()).then(|| mean_and_se(&v).0)
}

fn summarize(cfg: &ExperimentConfig, plan: &Plan, trials: &[TrialResult]) -> Result<NSummary> {
    let tp: Vec<f64> = trials.iter().map(|t| t.throughput_bits).collect();
    let (mean_throughput, std_err) = mean_and_se(&tp);
    let m = match cfg.scheme {
        Scheme::GenieSingle | Scheme::GenieTwoHop => mean_of(trials.iter().map(|t| t.m as f64)).unwrap_or(0.0),
        _ => plan.m as f64,
    };
    let bound_value = match cfg.scheme {
        Scheme::BoundOverlay => {
            let mom = plan.model.moments();
            let (Moment::Finite(mu), Moment::Finite(var)) = (mom.mean, mom.variance) else {
                return Err(Error::config("model", "bound_overlay needs finite moments"));
            };
            bounds::sinr_success_upper(plan.m as u64, mu, var, plan.params.beta0(), plan.params.rho())
                .ok()
                .map(|b| b.value)
        }
        _ => None,
    };
    Ok(NSummary {
        n: plan.n,
        m,
        trials: trials.len(),
        mean_throughput,
        std_err,
        median_throughput: median(&tp),
        per_link_success_rate: mean_of(trials.iter().map(|t| t.per_link_success_rate)).unwrap_or(0.0),
        distinct_event_frequency: mean_of(trials.iter().filter_map(|t| t.distinct_event.map(|e| e as u8 as f64))),
        conditional_r1: mean_of(
            trials
                .iter()
                .filter_map(|t| Some(if t.distinct_event? { t.r1? } else { 0.0 })),
        ),
        unconditional_r1: mean_of(trials.iter().filter_map(|t| t.r1)),
        mean_r2: mean_of(trials.iter().filter_map(|t| t.r2)),
        scheduled_fraction: mean_of(
            trials
                .iter()
                .filter_map(|t| t.scheduled_sources.map(|s| s as f64 / t.n as f64)),
        ),
        mean_max_gain: mean_of(trials.iter().filter_map(|t| t.max_gain)),
        bound_value,
    })
}

/// Runs every `(n, trial)` pair on a pool of `workers` threads (all cores
/// when `None`). Trial `t` at size `n` uses the stream
/// `seed::trial_seed(base_seed, n, t)`, so results do not depend on the
/// worker count.
pub fn run(config: &ExperimentConfig, workers: Option<usize>) -> Result<RunOutput> {
    config.validate()?;
    if workers == Some(0) {
        return Err(Error::config("workers", "must be >= 1"));
    }
    let plans: Vec<Plan> = config.n_grid.iter().map(|&n| config.plan(n)).collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> = (0..plans.len())
        .flat_map(|k| (0..config.trials).map(move |t| (k, t)))
        .collect();

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| Error::config("workers", e.to_string()))?;
    let trials: Vec<TrialResult> = pool.install(|| {
        jobs.par_iter()
            .map(|&(k, t)| {
                let plan = &plans[k];
                let s = seed::trial_seed(config.base_seed, plan.n as u64, t as u64);
                run_trial(config.scheme, &config.genie_limits, plan, s, t)
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let summaries: Vec<NSummary> = plans
        .iter()
        .zip(trials.chunks(config.trials))
        .map(|(plan, chunk)| summarize(config, plan, chunk))
        .collect::<Result<_>>()?;

    let points: Vec<(f64, f64)> = summaries.iter().map(|s| (s.n as f64, s.mean_throughput)).collect();
    let fit = match config.scheme {
        Scheme::DistributionDiagnostics | Scheme::BoundOverlay => None,
        _ => fit_scaling(&points).ok(),
    };
    Ok(RunOutput { trials, summaries, fit })
}
