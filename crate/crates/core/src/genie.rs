//! Genie-aided exhaustive scheduling.
//!
//! A genie with full channel knowledge looks for the largest set of
//! concurrent transmissions that all meet the SINR threshold. Single-hop
//! pairs transmitter `i` with receiver `i`; the two-hop first layer may
//! assign each scheduled source to any relay, one source per relay.
//!
//! Sizes are searched in descending order with an early exit at the first
//! valid size. For two-hop, interference at a relay depends only on the set
//! of active sources, so each candidate set reduces to a perfect-matching
//! test on its success graph instead of an `m!` assignment enumeration.

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::channel::{sinr_in_column, ChannelMatrix, GainColumns, LinkParams};
use crate::error::{Error, Result};
use crate::matching::maximum_matching;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenieMode {
    Single,
    TwoHop,
}

/// Largest instance sizes the exhaustive search accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenieLimits {
    pub single_hop: usize,
    pub two_hop: usize,
}

impl Default for GenieLimits {
    fn default() -> Self {
        Self {
            single_hop: 16,
            two_hop: 12,
        }
    }
}

impl GenieLimits {
    /// Hard ceiling imposed by the 64-bit subset representation.
    pub const MAX_REPRESENTABLE: usize = 63;

    /// Lifts the defaults; the caller accepts exponential running time.
    pub fn accept_exponential() -> Self {
        Self {
            single_hop: Self::MAX_REPRESENTABLE,
            two_hop: Self::MAX_REPRESENTABLE,
        }
    }

    fn check(&self, mode: GenieMode, n: usize) -> Result<()> {
        let limit = match mode {
            GenieMode::Single => self.single_hop,
            GenieMode::TwoHop => self.two_hop,
        }
        .min(Self::MAX_REPRESENTABLE);
        if n > limit {
            Err(Error::SizeLimit { n, limit })
        } else {
            Ok(())
        }
    }
}

/// The scheduled transmitters and, for two-hop, the `(source, relay)` pairs.
/// Single-hop witnesses pair every transmitter with its own receiver.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub transmitters: Vec<usize>,
    pub assignment: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenieResult {
    pub m_star: usize,
    pub witness: Witness,
    /// `X(m)` when a specific size was requested alongside the search.
    pub valid_count: Option<u64>,
}

fn members(mask: u64) -> Vec<usize> {
    (0..64).filter(|b| mask >> b & 1 == 1).collect()
}

/// Calls `f` on every `k`-subset of `0..n` in increasing bitmask order until
/// it returns `true`. Returns whether it did.
fn any_subset(n: usize, k: usize, mut f: impl FnMut(u64) -> bool) -> bool {
    if k > n {
        return false;
    }
    if k == 0 {
        return f(0);
    }
    let limit = 1u64 << n;
    let mut mask = (1u64 << k) - 1;
    while mask < limit {
        if f(mask) {
            return true;
        }
        // Gosper's hack: next integer with the same popcount
        let low = mask & mask.wrapping_neg();
        let ripple = mask + low;
        mask = (((ripple ^ mask) >> 2) / low) | ripple;
    }
    false
}

fn single_hop_valid(h: &ChannelMatrix, params: &LinkParams, active: &[usize]) -> bool {
    active
        .iter()
        .all(|&i| params.passes(sinr_in_column(h.column_slice(i), active, i, params.rho())))
}

/// Perfect matching of `active` sources onto relays in the success graph.
fn two_hop_assignment(h: &ChannelMatrix, params: &LinkParams, active: &[usize]) -> Option<Vec<(usize, usize)>> {
    let mut adj = Vec::with_capacity(active.len());
    for &i in active {
        let edges: Vec<usize> = (0..h.n_rx())
            .filter(|&j| params.passes(sinr_in_column(h.column_slice(j), active, i, params.rho())))
            .collect();
        if edges.is_empty() {
            return None;
        }
        adj.push(edges);
    }
    let m = maximum_matching(&adj, h.n_rx());
    (m.size == active.len()).then(|| m.pairs().map(|(l, r)| (active[l], r)).collect())
}

fn require_two_hop_threshold(params: &LinkParams) -> Result<()> {
    if params.beta0() < 1.0 {
        return Err(Error::domain(format!(
            "two-hop genie requires beta0 >= 1 so that a relay decodes at most one source (got {})",
            params.beta0()
        )));
    }
    Ok(())
}

/// Largest set `S` with `SINR(i → i) ≥ β0` for every `i ∈ S`.
pub fn max_valid_single_hop(h: &ChannelMatrix, params: &LinkParams, limits: &GenieLimits) -> Result<GenieResult> {
    if h.n_tx() != h.n_rx() {
        return Err(Error::domain("single-hop genie needs a square channel"));
    }
    let n = h.n_tx();
    limits.check(GenieMode::Single, n)?;
    for m in (1..=n).rev() {
        let mut found = None;
        any_subset(n, m, |mask| {
            let active = members(mask);
            if single_hop_valid(h, params, &active) {
                found = Some(active);
                true
            } else {
                false
            }
        });
        if let Some(active) = found {
            return Ok(GenieResult {
                m_star: m,
                witness: Witness {
                    assignment: active.iter().map(|&i| (i, i)).collect(),
                    transmitters: active,
                },
                valid_count: None,
            });
        }
    }
    Ok(GenieResult {
        m_star: 0,
        witness: Witness::default(),
        valid_count: None,
    })
}

/// Largest source set with an injective source → relay assignment in which
/// every assigned link meets the threshold.
pub fn max_valid_two_hop(h: &ChannelMatrix, params: &LinkParams, limits: &GenieLimits) -> Result<GenieResult> {
    require_two_hop_threshold(params)?;
    let n = h.n_tx();
    limits.check(GenieMode::TwoHop, n)?;
    for m in (1..=n.min(h.n_rx())).rev() {
        let mut found = None;
        any_subset(n, m, |mask| {
            let active = members(mask);
            match two_hop_assignment(h, params, &active) {
                Some(assignment) => {
                    found = Some((active, assignment));
                    true
                }
                None => false,
            }
        });
        if let Some((transmitters, assignment)) = found {
            return Ok(GenieResult {
                m_star: m,
                witness: Witness {
                    transmitters,
                    assignment,
                },
                valid_count: None,
            });
        }
    }
    Ok(GenieResult {
        m_star: 0,
        witness: Witness::default(),
        valid_count: None,
    })
}

/// Runs the search for `mode` and attaches `X(m)` for the requested size.
pub fn search_with_count(
    h: &ChannelMatrix,
    params: &LinkParams,
    mode: GenieMode,
    count_size: usize,
    limits: &GenieLimits,
) -> Result<GenieResult> {
    let mut result = match mode {
        GenieMode::Single => max_valid_single_hop(h, params, limits)?,
        GenieMode::TwoHop => max_valid_two_hop(h, params, limits)?,
    };
    result.valid_count = Some(count_valid_sets(h, count_size, params, mode, limits)?);
    Ok(result)
}

/// `X(m)`: the number of valid transmitter sets of size `m`. For two-hop a
/// set counts once if it admits at least one valid assignment.
pub fn count_valid_sets(
    h: &ChannelMatrix,
    m: usize,
    params: &LinkParams,
    mode: GenieMode,
    limits: &GenieLimits,
) -> Result<u64> {
    let n = h.n_tx();
    match mode {
        GenieMode::Single => {
            if h.n_tx() != h.n_rx() {
                return Err(Error::domain("single-hop genie needs a square channel"));
            }
        }
        GenieMode::TwoHop => require_two_hop_threshold(params)?,
    }
    limits.check(mode, n)?;
    if m == 0 {
        return Ok(1);
    }
    let mut count = 0u64;
    any_subset(n, m, |mask| {
        let active = members(mask);
        let valid = match mode {
            GenieMode::Single => single_hop_valid(h, params, &active),
            GenieMode::TwoHop => two_hop_assignment(h, params, &active).is_some(),
        };
        count += valid as u64;
        false
    });
    Ok(count)
}

/// `E[X(m)] = C(n, m) p^m` for i.i.d. link successes, evaluated in log space.
pub fn expected_valid_sets(n: u64, m: u64, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("probability {p} outside [0, 1]")));
    }
    if m > n {
        return Err(Error::domain(format!("set size {m} exceeds n = {n}")));
    }
    if m == 0 {
        return Ok(1.0);
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    Ok((ln_binomial(n, m) + m as f64 * p.ln()).exp())
}

/// Re-evaluates every witness link under interference from the whole witness set.
pub fn witness_is_valid(h: &ChannelMatrix, params: &LinkParams, witness: &Witness) -> bool {
    let mut relays: Vec<usize> = witness.assignment.iter().map(|&(_, j)| j).collect();
    relays.sort_unstable();
    relays.dedup();
    relays.len() == witness.assignment.len()
        && witness.assignment.len() == witness.transmitters.len()
        && witness.assignment.iter().all(|&(i, j)| {
            witness.transmitters.contains(&i)
                && params.passes(sinr_in_column(
                    h.column_slice(j),
                    &witness.transmitters,
                    i,
                    params.rho(),
                ))
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fading::FadingModel;
    use crate::seed;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn mat(rows: &[&[f64]]) -> ChannelMatrix {
        ChannelMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn params() -> LinkParams {
        LinkParams::new(10.0, 1.0).unwrap()
    }

    fn lim() -> GenieLimits {
        GenieLimits::default()
    }

    // every subset by plain bitmask scan, no ordering or early exit
    fn single_hop_brute(h: &ChannelMatrix, p: &LinkParams) -> usize {
        let n = h.n_tx();
        (0u64..1 << n)
            .filter(|&mask| {
                let s = members(mask);
                s.iter().all(|&i| {
                    let interference: f64 = s.iter().filter(|&&t| t != i).map(|&t| h.gain(t, i)).sum();
                    h.gain(i, i) / (1.0 / p.rho() + interference) >= p.beta0()
                })
            })
            .map(|mask| mask.count_ones() as usize)
            .max()
            .unwrap()
    }

    #[test]
    fn single_hop_examples() {
        let r = max_valid_single_hop(&mat(&[&[5.0]]), &params(), &lim()).unwrap();
        assert_eq!(r.m_star, 1);

        let h = mat(&[&[10.0, 0.1], &[0.1, 10.0]]);
        let r = max_valid_single_hop(&h, &params(), &lim()).unwrap();
        assert_eq!(r.m_star, 2);
        assert_eq!(r.m_star, single_hop_brute(&h, &params()));

        let h = mat(&[&[1.0, 5.0], &[5.0, 1.0]]);
        let r = max_valid_single_hop(&h, &params(), &lim()).unwrap();
        assert_eq!(r.m_star, 1);
        assert_eq!(r.m_star, single_hop_brute(&h, &params()));
    }

    #[test]
    fn two_hop_examples() {
        let h = mat(&[&[5.0, 0.1], &[0.1, 5.0]]);
        let r = max_valid_two_hop(&h, &params(), &lim()).unwrap();
        assert_eq!(r.m_star, 2);
        assert_eq!(r.witness.assignment, vec![(0, 0), (1, 1)]);

        let h = mat(&[&[0.1, 5.0], &[5.0, 0.1]]);
        let r = max_valid_two_hop(&h, &params(), &lim()).unwrap();
        assert_eq!(r.m_star, 2);
        assert_eq!(r.witness.assignment, vec![(0, 1), (1, 0)]);
        // the same matrix only supports one single-hop pair
        assert_eq!(max_valid_single_hop(&h, &params(), &lim()).unwrap().m_star, 1);
    }

    #[test]
    fn two_hop_rejects_low_threshold() {
        let h = mat(&[&[5.0]]);
        let p = LinkParams::new(10.0, 0.5).unwrap();
        assert!(matches!(max_valid_two_hop(&h, &p, &lim()), Err(Error::Domain(_))));
    }

    #[test]
    fn size_limits_refuse() {
        let model = FadingModel::rayleigh(1.0).unwrap();
        let h = ChannelMatrix::draw(17, 17, &model, &mut seed::stream(1)).unwrap();
        assert!(matches!(
            max_valid_single_hop(&h, &params(), &lim()),
            Err(Error::SizeLimit { n: 17, limit: 16 })
        ));
        let h13 = ChannelMatrix::draw(13, 13, &model, &mut seed::stream(1)).unwrap();
        assert!(matches!(
            max_valid_two_hop(&h13, &params(), &lim()),
            Err(Error::SizeLimit { n: 13, limit: 12 })
        ));
        assert!(max_valid_single_hop(&h, &params(), &GenieLimits::accept_exponential()).is_ok());
    }

    #[test]
    fn count_examples() {
        let h = mat(&[&[10.0, 0.1], &[0.1, 10.0]]);
        assert_eq!(
            count_valid_sets(&h, 0, &params(), GenieMode::Single, &lim()).unwrap(),
            1
        );
        assert_eq!(
            count_valid_sets(&h, 1, &params(), GenieMode::Single, &lim()).unwrap(),
            2
        );
        assert_eq!(
            count_valid_sets(&h, 2, &params(), GenieMode::Single, &lim()).unwrap(),
            1
        );
        assert_eq!(
            count_valid_sets(&h, 3, &params(), GenieMode::Single, &lim()).unwrap(),
            0
        );
        assert_eq!(
            count_valid_sets(&h, 3, &params(), GenieMode::TwoHop, &lim()).unwrap(),
            0
        );

        let r = search_with_count(&h, &params(), GenieMode::Single, 1, &lim()).unwrap();
        assert_eq!((r.m_star, r.valid_count), (2, Some(2)));
    }

    #[test]
    fn expected_valid_sets_examples() {
        assert_relative_eq!(expected_valid_sets(4, 2, 0.5).unwrap(), 1.5, epsilon = 1e-12);
        assert_relative_eq!(expected_valid_sets(10, 3, 1.0).unwrap(), 120.0, epsilon = 1e-9);
        assert_eq!(expected_valid_sets(10, 3, 0.0).unwrap(), 0.0);
        assert_eq!(expected_valid_sets(10, 0, 0.0).unwrap(), 1.0);
        assert!(expected_valid_sets(3, 4, 0.5).is_err());
        assert!(expected_valid_sets(3, 2, 1.5).is_err());
        // no overflow at large n
        assert!(expected_valid_sets(100_000, 50_000, 1.0).unwrap().is_infinite());
        assert!(expected_valid_sets(100_000, 10, 1e-3).unwrap().is_finite());
    }

    #[test]
    fn first_moment_identity_small() {
        // links in a set read disjoint receiver columns, so E[X(m)] = C(n,m) p^m
        // with p = Pr[γ ≥ 0.1 + Γ(m−1, 1)] = e^{−0.1} 2^{−(m−1)} for unit Rayleigh
        let model = FadingModel::rayleigh(1.0).unwrap();
        let p = params();
        let mut rng = seed::stream(2024);
        let (n, m, draws) = (6usize, 2usize, 4000);
        let xs: Vec<f64> = (0..draws)
            .map(|_| {
                let h = ChannelMatrix::draw(n, n, &model, &mut rng).unwrap();
                count_valid_sets(&h, m, &p, GenieMode::Single, &lim()).unwrap() as f64
            })
            .collect();
        let mean = xs.iter().sum::<f64>() / draws as f64;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / draws as f64).sqrt();
        let single = (-0.1f64).exp() * 0.5;
        let expect = expected_valid_sets(n as u64, m as u64, single).unwrap();
        assert!(
            (mean - expect).abs() < 3.0 * sd / (draws as f64).sqrt(),
            "mean={mean} expect={expect}"
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn search_invariants(seed_value in any::<u64>(), n in 1usize..=7) {
            let model = FadingModel::rayleigh(1.0).unwrap();
            let h = ChannelMatrix::draw(n, n, &model, &mut seed::stream(seed_value)).unwrap();
            let p = params();
            let single = max_valid_single_hop(&h, &p, &lim()).unwrap();
            let two = max_valid_two_hop(&h, &p, &lim()).unwrap();

            prop_assert!(witness_is_valid(&h, &p, &single.witness));
            prop_assert!(witness_is_valid(&h, &p, &two.witness));
            prop_assert_eq!(single.m_star, single_hop_brute(&h, &p));
            prop_assert!(two.m_star >= single.m_star);

            // a valid set stays valid when members are removed
            let mut prev = u64::MAX;
            for m in 0..=n {
                let x = count_valid_sets(&h, m, &p, GenieMode::Single, &lim()).unwrap();
                prop_assert!(x == 0 || prev > 0);
                prop_assert_eq!(x > 0, m <= single.m_star);
                prev = x;
            }
        }
    }
}
