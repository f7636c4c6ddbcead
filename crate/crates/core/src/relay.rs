//! Two-hop opportunistic relaying.
//!
//! First hop: every relay feeds back the index of its strongest source and
//! the selected sources transmit together. Second hop: every destination
//! evaluates each relay's SINR with all other relays treated as interferers
//! and, if the best one clears the threshold, requests that relay. The
//! end-to-end rate of a realization is `½ · min(R1, R2)`.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::channel::{sinr_in_column, CompensatedSum, GainColumns, LazyChannel, LinkParams, ScheduleOutcome};
use crate::error::{Error, Result};
use crate::fading::FadingModel;

/// Default linear SNR (10 dB).
pub const DEFAULT_RHO: f64 = 10.0;

/// `round((n−1)/√(2n−1))`, at least 1: the relay count that keeps the
/// extremal law's multiuser-diversity gain on par with the interference.
pub fn paper_sqrt_relays(n: usize) -> usize {
    if n < 2 {
        return 1;
    }
    let n = n as f64;
    (((n - 1.0) / (2.0 * n - 1.0).sqrt()).round() as usize).max(1)
}

#[derive(Debug, Clone, Copy)]
pub struct RelayConfig {
    /// Number of source–destination pairs.
    pub n: usize,
    /// Number of relays.
    pub m: usize,
    pub params: LinkParams,
    pub model: FadingModel,
}

impl RelayConfig {
    pub fn new(n: usize, m: usize, params: LinkParams, model: FadingModel) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "need at least one source-destination pair"));
        }
        if m == 0 {
            return Err(Error::param("m", "need at least one relay"));
        }
        Ok(Self { n, m, params, model })
    }

    /// Extremal law `(μ, σ) = (1, 1)` with population `n`, threshold 1 and
    /// `m = round((n−1)/√(2n−1))`.
    pub fn extremal_sqrt(n: usize, rho: f64) -> Result<Self> {
        let model = FadingModel::extremal(1.0, 1.0, n as u64)?;
        Self::new(n, paper_sqrt_relays(n), LinkParams::new(rho, 1.0)?, model)
    }
}

/// Linear-scaling setup for path-loss Pareto fading with `ν = 2/α`:
/// `β0 = 1 − ν`, `R0 = ln(2 − ν)` and as many relays as pairs.
pub fn pareto_linear_config(n: usize, alpha: f64) -> Result<RelayConfig> {
    pareto_linear_config_with_rho(n, alpha, DEFAULT_RHO)
}

pub fn pareto_linear_config_with_rho(n: usize, alpha: f64, rho: f64) -> Result<RelayConfig> {
    if !(alpha.is_finite() && alpha > 2.0) {
        return Err(Error::domain(format!(
            "alpha = {alpha} gives tail index 2/alpha outside (0, 1); need alpha > 2"
        )));
    }
    let nu = 2.0 / alpha;
    RelayConfig::new(
        n,
        n,
        LinkParams::new(rho, 1.0 - nu)?,
        FadingModel::pareto_pathloss(alpha)?,
    )
}

/// Result of one hop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopReport {
    /// Receiver → requested transmitter.
    pub selections: Vec<Option<usize>>,
    /// All requested transmitters are distinct (the event `N_m` on the first hop).
    pub distinct_event: bool,
    /// Receivers whose requested link cleared the threshold.
    pub successes: usize,
    pub throughput_bits: f64,
    pub outcome: ScheduleOutcome,
}

impl HopReport {
    /// Number of distinct requested transmitters.
    pub fn scheduled(&self) -> usize {
        self.outcome.active_tx.len()
    }
}

/// Column argmax per receiver, ties to the lowest transmitter index.
pub fn schedule_first_hop<C: GainColumns + ?Sized>(h_sr: &C) -> Vec<usize> {
    let mut scratch = Vec::new();
    (0..h_sr.n_rx()).map(|j| argmax(h_sr.column(j, &mut scratch))).collect()
}

#[inline]
fn argmax(col: &[f64]) -> usize {
    let mut best = 0;
    let mut best_gain = col[0];
    for (i, &g) in col.iter().enumerate().skip(1) {
        if g > best_gain {
            best = i;
            best_gain = g;
        }
    }
    best
}

fn distinct(values: impl Iterator<Item = usize>, universe: usize) -> (Vec<usize>, bool) {
    let mut seen = vec![false; universe];
    let mut all_distinct = true;
    for v in values {
        if seen[v] {
            all_distinct = false;
        }
        seen[v] = true;
    }
    let set = seen.iter().enumerate().filter_map(|(i, &s)| s.then_some(i)).collect();
    (set, all_distinct)
}

/// First hop: selected sources transmit together and each relay decodes its
/// own selection against the others. A source decoded by several relays is
/// credited once.
pub fn first_hop_throughput<C: GainColumns + ?Sized>(h_sr: &C, params: &LinkParams) -> HopReport {
    let selections = schedule_first_hop(h_sr);
    let (active, distinct_event) = distinct(selections.iter().copied(), h_sr.n_tx());

    let mut scratch = Vec::new();
    let successes: Vec<(usize, usize)> = selections
        .iter()
        .enumerate()
        .filter(|&(j, &i)| {
            let col = h_sr.column(j, &mut scratch);
            params.passes(sinr_in_column(col, &active, i, params.rho()))
        })
        .map(|(j, &i)| (i, j))
        .collect();

    let outcome = ScheduleOutcome::new(active, successes, params.r0());
    HopReport {
        selections: selections.into_iter().map(Some).collect(),
        distinct_event,
        successes: outcome.successes.len(),
        throughput_bits: outcome.delivered_bits,
        outcome,
    }
}

/// Second hop over `h_rd` (relays × destinations). Each destination tests
/// every relay against interference from all other relays; the strongest
/// relay is the only one that can pass, so it is the one requested. A relay
/// requested by several destinations serves the lowest-index one.
pub fn schedule_second_hop<C: GainColumns + ?Sized>(h_rd: &C, params: &LinkParams) -> HopReport {
    let m = h_rd.n_tx();
    let noise = params.noise();
    let mut scratch = Vec::new();
    let selections: Vec<Option<usize>> = (0..h_rd.n_rx())
        .map(|j| {
            let col = h_rd.column(j, &mut scratch);
            let best = argmax(col);
            let interference: CompensatedSum = col
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != best)
                .map(|(_, &g)| g)
                .collect();
            params
                .passes(col[best] / (noise + interference.value()))
                .then_some(best)
        })
        .collect();

    let mut served: Vec<Option<usize>> = vec![None; m];
    for (j, sel) in selections.iter().enumerate() {
        if let Some(k) = *sel {
            served[k].get_or_insert(j);
        }
    }
    let (active, distinct_event) = distinct(selections.iter().flatten().copied(), m);
    let links: Vec<(usize, usize)> = served
        .iter()
        .enumerate()
        .filter_map(|(k, d)| d.map(|d| (k, d)))
        .collect();
    let outcome = ScheduleOutcome::new(active, links, params.r0());
    HopReport {
        selections,
        distinct_event,
        successes: outcome.successes.len(),
        throughput_bits: outcome.delivered_bits,
        outcome,
    }
}

/// One two-hop realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoHopRealization {
    pub first: HopReport,
    pub second: HopReport,
    /// `½ · min(R1, R2)`.
    pub throughput_bits: f64,
}

impl TwoHopRealization {
    /// First-hop throughput credited only on the all-distinct event.
    pub fn conditional_first_hop_bits(&self) -> f64 {
        if self.first.distinct_event {
            self.first.throughput_bits
        } else {
            0.0
        }
    }
}

/// Draws independent source→relay and relay→destination channels and runs
/// both hops. Channels are regenerated column by column, never stored.
pub fn two_hop_realization<R: RngCore + ?Sized>(cfg: &RelayConfig, rng: &mut R) -> Result<TwoHopRealization> {
    let h_sr = LazyChannel::draw(cfg.n, cfg.m, cfg.model, rng)?;
    let h_rd = LazyChannel::draw(cfg.m, cfg.n, cfg.model, rng)?;
    let first = first_hop_throughput(&h_sr, &cfg.params);
    let second = schedule_second_hop(&h_rd, &cfg.params);
    let throughput_bits = 0.5 * first.throughput_bits.min(second.throughput_bits);
    Ok(TwoHopRealization {
        first,
        second,
        throughput_bits,
    })
}

pub fn two_hop_throughput<R: RngCore + ?Sized>(cfg: &RelayConfig, rng: &mut R) -> Result<f64> {
    Ok(two_hop_realization(cfg, rng)?.throughput_bits)
}

/// Exact `Pr[N_m]` with a Monte Carlo companion estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistinctProbability {
    pub exact: f64,
    pub estimate: f64,
    pub std_err: f64,
}

/// `Pr[N_m]` for `m` relays choosing among `n` sources over i.i.d. unit
/// Rayleigh channels. The returned `exact` value is the falling-factorial
/// product; `estimate` is the empirical frequency over `trials` draws.
pub fn estimate_distinct_prob<R: RngCore + ?Sized>(
    n: usize,
    m: usize,
    trials: usize,
    rng: &mut R,
) -> Result<DistinctProbability> {
    let exact = bounds::prob_all_distinct(n as u64, m as u64)?;
    if trials == 0 {
        return Err(Error::param("trials", "must be >= 1"));
    }
    let model = FadingModel::rayleigh(1.0)?;
    let mut hits = 0usize;
    for _ in 0..trials {
        let h = LazyChannel::draw(n, m, model, rng)?;
        let (_, all_distinct) = distinct(schedule_first_hop(&h).into_iter(), n);
        hits += all_distinct as usize;
    }
    let estimate = hits as f64 / trials as f64;
    Ok(DistinctProbability {
        exact,
        estimate,
        std_err: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionEstimate {
    pub mean: f64,
    pub std_err: f64,
}

/// Mean fraction of sources scheduled in the first hop with `m = n` relays.
pub fn scheduled_fraction<R: RngCore + ?Sized>(
    cfg: &RelayConfig,
    trials: usize,
    rng: &mut R,
) -> Result<FractionEstimate> {
    if cfg.m != cfg.n {
        return Err(Error::domain("scheduled fraction is defined for m = n"));
    }
    if trials == 0 {
        return Err(Error::param("trials", "must be >= 1"));
    }
    let mut fractions = Vec::with_capacity(trials);
    for _ in 0..trials {
        let h = LazyChannel::draw(cfg.n, cfg.m, cfg.model, rng)?;
        let (active, _) = distinct(schedule_first_hop(&h).into_iter(), cfg.n);
        fractions.push(active.len() as f64 / cfg.n as f64);
    }
    let mean = fractions.iter().sum::<f64>() / trials as f64;
    let var = if trials > 1 {
        fractions.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (trials - 1) as f64
    } else {
        0.0
    };
    Ok(FractionEstimate {
        mean,
        std_err: (var / trials as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelMatrix;
    use crate::seed;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn mat(rows: &[&[f64]]) -> ChannelMatrix {
        ChannelMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn unit() -> LinkParams {
        LinkParams::new(10.0, 1.0).unwrap()
    }

    #[test]
    fn first_hop_selection_examples() {
        assert_eq!(schedule_first_hop(&mat(&[&[0.2], &[0.9], &[0.4]])), vec![1]);

        let same = mat(&[&[0.3, 0.3], &[0.8, 0.8]]);
        assert_eq!(schedule_first_hop(&same), vec![1, 1]);
        assert!(!first_hop_throughput(&same, &unit()).distinct_event);

        let h = mat(&[&[1.0, 3.0], &[2.0, 1.0], &[0.5, 0.5]]);
        assert_eq!(schedule_first_hop(&h), vec![1, 0]);
        assert!(first_hop_throughput(&h, &unit()).distinct_event);

        // ties go to the lowest index
        assert_eq!(schedule_first_hop(&mat(&[&[0.7], &[0.7]])), vec![0]);
    }

    #[test]
    fn first_hop_throughput_examples() {
        let p = unit();
        let r = first_hop_throughput(&mat(&[&[5.0]]), &p);
        assert_eq!(r.throughput_bits, p.r0());

        let h = mat(&[&[5.0, 0.1], &[0.1, 5.0], &[0.1, 0.1]]);
        let r = first_hop_throughput(&h, &p);
        assert_eq!(r.selections, vec![Some(0), Some(1)]);
        assert_eq!(r.successes, 2);
        assert_relative_eq!(r.throughput_bits, 2.0 * p.r0());
        assert_relative_eq!(
            sinr_in_column(h.column_slice(0), &[0, 1], 0, 10.0),
            25.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn duplicate_decodes_credit_once() {
        // both relays pick source 0 and both decode it
        let h = mat(&[&[5.0, 6.0], &[0.1, 0.1]]);
        let r = first_hop_throughput(&h, &unit());
        assert_eq!(r.successes, 2);
        assert_eq!(r.outcome.active_tx, vec![0]);
        assert_relative_eq!(r.throughput_bits, unit().r0());
    }

    #[test]
    fn second_hop_examples() {
        let p = unit();
        let r = schedule_second_hop(&mat(&[&[1.0]]), &p);
        assert_eq!(r.successes, 1);
        assert_eq!(r.throughput_bits, p.r0());

        let r = schedule_second_hop(&mat(&[&[0.01], &[0.01]]), &p);
        assert_eq!(r.throughput_bits, 0.0);
        assert_eq!(r.selections, vec![None]);

        let r = schedule_second_hop(&mat(&[&[5.0], &[0.1]]), &p);
        assert_eq!(r.selections, vec![Some(0)]);
        assert_eq!(r.successes, 1);
    }

    #[test]
    fn second_hop_relay_serves_lowest_destination() {
        // relay 0 is the best at both destinations
        let h = mat(&[&[5.0, 6.0], &[0.1, 0.1]]);
        let r = schedule_second_hop(&h, &unit());
        assert_eq!(r.selections, vec![Some(0), Some(0)]);
        assert!(!r.distinct_event);
        assert_eq!(r.outcome.successes, vec![(0, 0)]);
        assert_eq!(r.successes, 1);
    }

    #[test]
    fn two_hop_combination() {
        let cfg = RelayConfig::extremal_sqrt(64, DEFAULT_RHO).unwrap();
        let a = two_hop_realization(&cfg, &mut seed::stream(4)).unwrap();
        let b = two_hop_realization(&cfg, &mut seed::stream(4)).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            a.throughput_bits,
            0.5 * a.first.throughput_bits.min(a.second.throughput_bits)
        );
        assert!(a.throughput_bits <= cfg.m as f64 * cfg.params.r0() / 2.0);
    }

    #[test]
    fn lazy_and_dense_hops_agree() {
        let model = FadingModel::pareto_pathloss(4.0).unwrap();
        let lazy = LazyChannel::new(40, 40, model, 99).unwrap();
        let dense = lazy.materialize();
        let p = LinkParams::new(10.0, 0.5).unwrap();
        assert_eq!(first_hop_throughput(&lazy, &p), first_hop_throughput(&dense, &p));
        assert_eq!(schedule_second_hop(&lazy, &p), schedule_second_hop(&dense, &p));
    }

    #[test]
    fn pareto_config_examples() {
        let cfg = pareto_linear_config(100, 4.0).unwrap();
        assert_eq!(cfg.m, 100);
        assert_relative_eq!(cfg.params.beta0(), 0.5);
        assert_relative_eq!(cfg.params.r0(), 1.5f64.ln(), epsilon = 1e-15);
        assert_relative_eq!(cfg.params.r0(), 0.405_465, epsilon = 1e-6);

        let far = pareto_linear_config(10, 1e9).unwrap();
        assert!((far.params.beta0() - 1.0).abs() < 1e-8);

        assert!(matches!(pareto_linear_config(10, 2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn paper_sqrt_relay_counts() {
        assert_eq!(paper_sqrt_relays(1), 1);
        assert_eq!(paper_sqrt_relays(2), 1);
        // (n-1)/sqrt(2n-1): 255/sqrt(511) = 11.28, 16383/sqrt(32767) = 90.51
        assert_eq!(paper_sqrt_relays(256), 11);
        assert_eq!(paper_sqrt_relays(16384), 91);
        assert_eq!(paper_sqrt_relays(128), 8);
    }

    #[test]
    fn distinct_probability_examples() {
        // 9 equally likely ordered selections of 2 relays among 3 sources, 6 distinct
        let mut hits = 0;
        for a in 0..3 {
            for b in 0..3 {
                hits += (a != b) as usize;
            }
        }
        let r = estimate_distinct_prob(3, 2, 20_000, &mut seed::stream(1)).unwrap();
        assert_relative_eq!(r.exact, hits as f64 / 9.0, epsilon = 1e-12);
        assert!((r.estimate - r.exact).abs() < 3.0 * (r.exact * (1.0 - r.exact) / 20_000.0).sqrt());

        let one = estimate_distinct_prob(50, 1, 10, &mut seed::stream(1)).unwrap();
        assert_eq!((one.exact, one.estimate), (1.0, 1.0));
    }

    #[test]
    fn scheduled_fraction_examples() {
        let single = RelayConfig::new(1, 1, unit(), FadingModel::rayleigh(1.0).unwrap()).unwrap();
        assert_eq!(scheduled_fraction(&single, 5, &mut seed::stream(0)).unwrap().mean, 1.0);

        // n = 2: four equally likely selection pairs, E[Z]/n = 1 − (1/2)^2
        let two = RelayConfig::new(2, 2, unit(), FadingModel::rayleigh(1.0).unwrap()).unwrap();
        let f = scheduled_fraction(&two, 40_000, &mut seed::stream(3)).unwrap();
        assert!((f.mean - 0.75).abs() < 3.0 * f.std_err, "{f:?}");

        let cfg = pareto_linear_config(1000, 4.0).unwrap();
        let f = scheduled_fraction(&cfg, 60, &mut seed::stream(5)).unwrap();
        let limit = 1.0 - (-1.0f64).exp();
        assert!((f.mean - limit).abs() / limit < 0.01, "{f:?}");

        let bad = RelayConfig::new(4, 2, unit(), FadingModel::rayleigh(1.0).unwrap()).unwrap();
        assert!(scheduled_fraction(&bad, 1, &mut seed::stream(0)).is_err());
    }

    #[test]
    fn second_hop_scheduled_relays_succeed() {
        let model = FadingModel::extremal(1.0, 1.0, 200).unwrap();
        let p = unit();
        for s in 0..30 {
            let h = ChannelMatrix::draw(10, 200, &model, &mut seed::stream(s)).unwrap();
            let r = schedule_second_hop(&h, &p);
            let scheduled = &r.outcome.active_tx;
            for &(k, d) in &r.outcome.successes {
                let v = sinr_in_column(h.column_slice(d), scheduled, k, p.rho());
                assert!(p.passes(v));
            }
        }
    }

    #[test]
    fn extremal_relay_success_above_one_in_26() {
        for n in [100usize, 1000] {
            let cfg = RelayConfig::extremal_sqrt(n, DEFAULT_RHO).unwrap();
            let mut rng = seed::stream(n as u64);
            let (mut ok, mut total) = (0usize, 0usize);
            for _ in 0..100 {
                let h = LazyChannel::draw(cfg.n, cfg.m, cfg.model, &mut rng).unwrap();
                let r = first_hop_throughput(&h, &cfg.params);
                ok += r.successes;
                total += cfg.m;
            }
            assert!(ok as f64 / total as f64 >= 1.0 / 26.0, "n={n}");
        }
    }

    #[test]
    fn pareto_max_to_sum_ratio_is_stable() {
        // Pr[M_n / I_n ≥ 1 − ν] for the path-loss law with α = 4
        let model = FadingModel::pareto_pathloss(4.0).unwrap();
        let mut rng = seed::stream(8);
        let rates: Vec<f64> = [100usize, 1000, 10_000]
            .iter()
            .map(|&n| {
                let trials = 2000;
                let hits = (0..trials)
                    .filter(|_| {
                        let xs: Vec<f64> = (0..n).map(|_| model.sample(&mut rng)).collect();
                        let max = xs.iter().cloned().fold(0.0, f64::max);
                        let sum: CompensatedSum = xs.iter().copied().collect();
                        max / sum.value() >= 0.5
                    })
                    .count();
                hits as f64 / trials as f64
            })
            .collect();
        let lo = rates.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = rates.iter().cloned().fold(0.0, f64::max);
        assert!(lo > 0.0);
        assert!((hi - lo) / hi < 0.3, "{rates:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn relabeling_sources_permutes_selections(
            seed_value in any::<u64>(),
            perm in Just((0..12usize).collect::<Vec<_>>()).prop_shuffle(),
        ) {
            let model = FadingModel::rayleigh(1.0).unwrap();
            let h = ChannelMatrix::draw(12, 4, &model, &mut seed::stream(seed_value)).unwrap();
            let permuted = h.permute_rows(&perm);
            let p = unit();
            let a = first_hop_throughput(&h, &p);
            let b = first_hop_throughput(&permuted, &p);
            prop_assert_eq!(a.throughput_bits, b.throughput_bits);
            for (sa, sb) in a.selections.iter().zip(&b.selections) {
                prop_assert_eq!(perm[sb.unwrap()], sa.unwrap());
            }
        }

        #[test]
        fn unselected_rows_do_not_move_selection(
            seed_value in any::<u64>(),
            swap in (0usize..8, 0usize..8),
        ) {
            let model = FadingModel::rayleigh(1.0).unwrap();
            let h = ChannelMatrix::draw(8, 1, &model, &mut seed::stream(seed_value)).unwrap();
            let chosen = schedule_first_hop(&h)[0];
            prop_assume!(swap.0 != chosen && swap.1 != chosen);
            let mut perm: Vec<usize> = (0..8).collect();
            perm.swap(swap.0, swap.1);
            prop_assert_eq!(schedule_first_hop(&h.permute_rows(&perm))[0], chosen);
        }

        #[test]
        fn hop_invariants(seed_value in any::<u64>(), n in 1usize..30, m in 1usize..10) {
            let model = FadingModel::rayleigh(1.0).unwrap();
            let p = unit();
            let h = ChannelMatrix::draw(n, m, &model, &mut seed::stream(seed_value)).unwrap();
            let first = first_hop_throughput(&h, &p);
            prop_assert!(first.successes <= m);
            prop_assert_eq!(first.throughput_bits, p.r0() * first.outcome.distinct_packets() as f64);
            let back = ChannelMatrix::draw(m, n, &model, &mut seed::stream(seed_value ^ 1)).unwrap();
            let second = schedule_second_hop(&back, &p);
            prop_assert!(second.successes <= m);
            prop_assert_eq!(second.throughput_bits, p.r0() * second.successes as f64);
        }
    }
}
