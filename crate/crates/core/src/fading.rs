//! Channel power-gain laws.
//!
//! Every family is expressed directly as a law on the received power gain
//! `γ ≥ 0`. Each model exposes its CDF, quantile, a sampler and its moment
//! metadata. The extremal and Pareto families sample by inverse transform
//! through their closed-form quantiles.

use std::f64::consts::{LN_10, PI};

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::{erfc, erfc_inv};
use statrs::function::gamma::{gamma, gamma_lr, ln_gamma};

use crate::error::{Error, Result};

/// Parameters of a fading law, as they appear in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FadingSpec {
    /// Exponentially distributed power gain with the given mean.
    Rayleigh { mean: f64 },
    /// Log-normal shadowing with standard deviation `sigma_db` (dB),
    /// normalized to unit mean power.
    LogNormal { sigma_db: f64 },
    /// Nakagami-m power gain: Gamma with shape `shape` and mean `mean`.
    Nakagami { shape: f64, mean: f64 },
    /// The extremal finite-mean/variance law for a population of `pop`
    /// nodes. `pop` may be left out in experiment templates, in which case
    /// the harness ties it to the swept node count.
    ExtremalMv {
        mu: f64,
        sigma: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pop: Option<u64>,
    },
    /// Received power of a uniformly placed node under path loss with
    /// exponent `alpha`: `F(γ) = 1 − π γ^{−2/α}` on `[π^{α/2}, ∞)`.
    ParetoPathloss { alpha: f64 },
    /// Pareto law with tail `c0 · x^{−ν} / Γ(1 − ν)` for `ν ∈ (0, 1)`.
    ParetoGeneral { nu: f64, c0: f64 },
}

impl FadingSpec {
    pub fn family_name(&self) -> &'static str {
        match self {
            FadingSpec::Rayleigh { .. } => "rayleigh",
            FadingSpec::LogNormal { .. } => "log_normal",
            FadingSpec::Nakagami { .. } => "nakagami",
            FadingSpec::ExtremalMv { .. } => "extremal_mv",
            FadingSpec::ParetoPathloss { .. } => "pareto_pathloss",
            FadingSpec::ParetoGeneral { .. } => "pareto_general",
        }
    }

    /// Fills an unset extremal population with `n`. Other specs are returned
    /// unchanged.
    pub fn with_default_population(self, n: u64) -> Self {
        match self {
            FadingSpec::ExtremalMv { mu, sigma, pop: None } => FadingSpec::ExtremalMv {
                mu,
                sigma,
                pop: Some(n),
            },
            other => other,
        }
    }
}

/// A finite moment or a divergent one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Moment {
    Finite(f64),
    Infinite,
}

impl Moment {
    pub fn finite(self) -> Option<f64> {
        match self {
            Moment::Finite(v) => Some(v),
            Moment::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Moment::Infinite)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub mean: Moment,
    pub variance: Moment,
    /// Tail index `ν`; present exactly for the Pareto families.
    pub tail_index: Option<f64>,
}

/// The extremal law maximizing the expected maximum of `pop` i.i.d. draws
/// among all laws with mean `mu` and standard deviation `sigma`:
///
/// ```text
/// F(x) = ( (x − μ)/σ / √(2n−1) · (n−1)/n + 1/n )^{1/(n−1)},
///        μ − √(2n−1)σ/(n−1) ≤ x ≤ μ + √(2n−1)σ
/// ```
///
/// This type carries the raw law and does not require a nonnegative support;
/// [`FadingModel`] adds that requirement for use as a power gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremalMv {
    mu: f64,
    sigma: f64,
    pop: u64,
    /// `σ √(2n−1) / (n−1)`
    step: f64,
}

impl ExtremalMv {
    pub fn new(mu: f64, sigma: f64, pop: u64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::param("mu", "must be finite"));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::param("sigma", "must be finite and > 0"));
        }
        if pop < 2 {
            return Err(Error::param("pop", "population must be at least 2"));
        }
        let n = pop as f64;
        Ok(Self {
            mu,
            sigma,
            pop,
            step: sigma * (2.0 * n - 1.0).sqrt() / (n - 1.0),
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn pop(&self) -> u64 {
        self.pop
    }

    pub fn support(&self) -> (f64, f64) {
        let n = self.pop as f64;
        (self.mu - self.step, self.mu + (2.0 * n - 1.0).sqrt() * self.sigma)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        let n = self.pop as f64;
        let base = (x - self.mu) / self.sigma / (2.0 * n - 1.0).sqrt() * (n - 1.0) / n + 1.0 / n;
        base.clamp(0.0, 1.0).powf(1.0 / (n - 1.0))
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        check_probability(u)?;
        Ok(self.quantile_unchecked(u))
    }

    #[inline]
    fn quantile_unchecked(&self, u: f64) -> f64 {
        let n = self.pop as f64;
        // u^{n-1} via exp/ln keeps the cost flat in n
        let v = if u <= 0.0 { 0.0 } else { ((n - 1.0) * u.ln()).exp() };
        self.mu - self.step + self.step * n * v
    }

    /// `E[M_n] = μ + σ (n−1)/√(2n−1)` for the maximum of `pop` draws.
    pub fn extreme_mean(&self) -> f64 {
        let n = self.pop as f64;
        self.mu + self.sigma * (n - 1.0) / (2.0 * n - 1.0).sqrt()
    }

    /// CDF of the maximum of `pop` i.i.d. draws, `F(x)^n`.
    pub fn max_cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        let n = self.pop as f64;
        let base = (x - self.mu) / self.sigma / (2.0 * n - 1.0).sqrt() * (n - 1.0) / n + 1.0 / n;
        base.clamp(0.0, 1.0).powf(n / (n - 1.0))
    }
}

#[derive(Debug, Clone, Copy)]
enum Kernel {
    Exponential {
        mean: f64,
    },
    LogNormal {
        mu_ln: f64,
        sigma_ln: f64,
    },
    Gamma {
        shape: f64,
        scale: f64,
        sampler: Gamma<f64>,
    },
    Extremal(ExtremalMv),
    Pathloss {
        alpha: f64,
        half_alpha: f64,
    },
    Pareto {
        nu: f64,
        x_min: f64,
    },
}

/// A validated, immutable fading law.
#[derive(Debug, Clone, Copy)]
pub struct FadingModel {
    spec: FadingSpec,
    kernel: Kernel,
}

impl FadingModel {
    pub fn new(spec: FadingSpec) -> Result<Self> {
        let kernel = match spec {
            FadingSpec::Rayleigh { mean } => {
                positive("mean", mean)?;
                Kernel::Exponential { mean }
            }
            FadingSpec::LogNormal { sigma_db } => {
                positive("sigma_db", sigma_db)?;
                let sigma_ln = sigma_db * LN_10 / 10.0;
                Kernel::LogNormal {
                    mu_ln: -0.5 * sigma_ln * sigma_ln,
                    sigma_ln,
                }
            }
            FadingSpec::Nakagami { shape, mean } => {
                if !(shape.is_finite() && shape >= 0.5) {
                    return Err(Error::param("shape", "Nakagami shape must be >= 0.5"));
                }
                positive("mean", mean)?;
                let scale = mean / shape;
                let sampler = Gamma::new(shape, scale).map_err(|e| Error::param("shape", e.to_string()))?;
                Kernel::Gamma { shape, scale, sampler }
            }
            FadingSpec::ExtremalMv { mu, sigma, pop } => {
                let pop = pop.ok_or_else(|| Error::param("pop", "extremal population is not set"))?;
                let law = ExtremalMv::new(mu, sigma, pop)?;
                if law.support().0 < 0.0 {
                    return Err(Error::param(
                        "mu",
                        "support lower endpoint mu - sqrt(2n-1)*sigma/(n-1) must be >= 0 for a power gain",
                    ));
                }
                Kernel::Extremal(law)
            }
            FadingSpec::ParetoPathloss { alpha } => {
                if !(alpha.is_finite() && alpha >= 2.0) {
                    return Err(Error::param("alpha", "path-loss exponent must be >= 2"));
                }
                Kernel::Pathloss {
                    alpha,
                    half_alpha: alpha / 2.0,
                }
            }
            FadingSpec::ParetoGeneral { nu, c0 } => {
                if !(nu > 0.0 && nu < 1.0) {
                    return Err(Error::param("nu", "tail index must lie in (0, 1)"));
                }
                positive("c0", c0)?;
                // 1 - F(x) = (x / x_min)^{-ν} matches the tail c0 x^{-ν} / Γ(1-ν)
                let x_min = (c0 / gamma(1.0 - nu)).powf(1.0 / nu);
                Kernel::Pareto { nu, x_min }
            }
        };
        Ok(Self { spec, kernel })
    }

    pub fn rayleigh(mean: f64) -> Result<Self> {
        Self::new(FadingSpec::Rayleigh { mean })
    }

    pub fn log_normal(sigma_db: f64) -> Result<Self> {
        Self::new(FadingSpec::LogNormal { sigma_db })
    }

    pub fn nakagami(shape: f64, mean: f64) -> Result<Self> {
        Self::new(FadingSpec::Nakagami { shape, mean })
    }

    pub fn extremal(mu: f64, sigma: f64, pop: u64) -> Result<Self> {
        Self::new(FadingSpec::ExtremalMv {
            mu,
            sigma,
            pop: Some(pop),
        })
    }

    pub fn pareto_pathloss(alpha: f64) -> Result<Self> {
        Self::new(FadingSpec::ParetoPathloss { alpha })
    }

    pub fn pareto_general(nu: f64, c0: f64) -> Result<Self> {
        Self::new(FadingSpec::ParetoGeneral { nu, c0 })
    }

    pub fn spec(&self) -> FadingSpec {
        self.spec
    }

    /// The extremal law, if this model is one.
    pub fn as_extremal(&self) -> Option<&ExtremalMv> {
        match &self.kernel {
            Kernel::Extremal(law) => Some(law),
            _ => None,
        }
    }

    /// Tail index `ν` of the Pareto families.
    pub fn tail_index(&self) -> Option<f64> {
        match self.kernel {
            Kernel::Pathloss { alpha, .. } => Some(2.0 / alpha),
            Kernel::Pareto { nu, .. } => Some(nu),
            _ => None,
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match self.kernel {
            Kernel::Exponential { .. } | Kernel::LogNormal { .. } | Kernel::Gamma { .. } => (0.0, f64::INFINITY),
            Kernel::Extremal(law) => law.support(),
            Kernel::Pathloss { half_alpha, .. } => (PI.powf(half_alpha), f64::INFINITY),
            Kernel::Pareto { x_min, .. } => (x_min, f64::INFINITY),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self.kernel {
            Kernel::Exponential { mean } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-x / mean).exp_m1()
                }
            }
            Kernel::LogNormal { mu_ln, sigma_ln } => {
                if x <= 0.0 {
                    0.0
                } else {
                    0.5 * erfc(-(x.ln() - mu_ln) / (sigma_ln * std::f64::consts::SQRT_2))
                }
            }
            Kernel::Gamma { shape, scale, .. } => {
                if x <= 0.0 {
                    0.0
                } else if x.is_infinite() {
                    1.0
                } else {
                    gamma_lr(shape, x / scale)
                }
            }
            Kernel::Extremal(law) => law.cdf(x),
            Kernel::Pathloss { alpha, half_alpha } => {
                if x <= PI.powf(half_alpha) {
                    0.0
                } else {
                    1.0 - PI * x.powf(-2.0 / alpha)
                }
            }
            Kernel::Pareto { nu, x_min } => {
                if x <= x_min {
                    0.0
                } else {
                    1.0 - (x / x_min).powf(-nu)
                }
            }
        }
    }

    /// Inverse CDF. `u = 1` is rejected on unbounded supports.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        check_probability(u)?;
        if u == 1.0 && self.support().1.is_infinite() {
            return Err(Error::domain(format!(
                "quantile(1) is unbounded for the {} family",
                self.spec.family_name()
            )));
        }
        Ok(match self.kernel {
            Kernel::Gamma { shape, scale, .. } => gamma_quantile(shape, u) * scale,
            Kernel::LogNormal { mu_ln, sigma_ln } => {
                if u == 0.0 {
                    0.0
                } else {
                    let z = -std::f64::consts::SQRT_2 * erfc_inv(2.0 * u);
                    (mu_ln + sigma_ln * z).exp()
                }
            }
            _ => self.quantile_fast(u),
        })
    }

    /// Closed-form inverse transforms; only valid for the families that have one.
    #[inline]
    fn quantile_fast(&self, u: f64) -> f64 {
        match self.kernel {
            Kernel::Exponential { mean } => -mean * (-u).ln_1p(),
            Kernel::Extremal(law) => law.quantile_unchecked(u),
            Kernel::Pathloss { half_alpha, .. } => {
                let base = PI / (1.0 - u);
                if half_alpha == 2.0 {
                    base * base
                } else {
                    base.powf(half_alpha)
                }
            }
            Kernel::Pareto { nu, x_min } => x_min * (1.0 - u).powf(-1.0 / nu),
            Kernel::LogNormal { .. } | Kernel::Gamma { .. } => unreachable!(),
        }
    }

    /// Draws one power gain.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kernel {
            Kernel::LogNormal { mu_ln, sigma_ln } => {
                let z: f64 = StandardNormal.sample(rng);
                (mu_ln + sigma_ln * z).exp()
            }
            Kernel::Gamma { sampler, .. } => sampler.sample(rng),
            _ => self.quantile_fast(rng.random::<f64>()),
        }
    }

    pub fn fill<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        for slot in out {
            *slot = self.sample(rng);
        }
    }

    pub fn moments(&self) -> MomentReport {
        let finite = |mean: f64, variance: f64| MomentReport {
            mean: Moment::Finite(mean),
            variance: Moment::Finite(variance),
            tail_index: None,
        };
        match self.kernel {
            Kernel::Exponential { mean } => finite(mean, mean * mean),
            Kernel::LogNormal { sigma_ln, .. } => finite(1.0, (sigma_ln * sigma_ln).exp_m1()),
            Kernel::Gamma { shape, scale, .. } => finite(shape * scale, shape * scale * scale),
            Kernel::Extremal(law) => finite(law.mu, law.sigma * law.sigma),
            Kernel::Pathloss { .. } | Kernel::Pareto { .. } => {
                // 1 − F ~ x^{−ν} with ν ≤ 1: the mean needs ν > 1, the variance ν > 2
                MomentReport {
                    mean: Moment::Infinite,
                    variance: Moment::Infinite,
                    tail_index: self.tail_index(),
                }
            }
        }
    }

    /// Expected maximum of `pop` draws; only defined for the extremal law.
    pub fn extreme_mean(&self) -> Result<f64> {
        self.as_extremal().map(ExtremalMv::extreme_mean).ok_or_else(|| {
            Error::domain(format!(
                "extreme_mean is only defined for extremal_mv, not {}",
                self.spec.family_name()
            ))
        })
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, "must be finite and > 0"))
    }
}

fn check_probability(u: f64) -> Result<()> {
    if (0.0..=1.0).contains(&u) {
        Ok(())
    } else {
        Err(Error::domain(format!("probability {u} outside [0, 1]")))
    }
}

/// Inverse of the regularized lower incomplete gamma function in `x` for unit
/// scale, by safeguarded Newton iteration.
fn gamma_quantile(shape: f64, u: f64) -> f64 {
    if u == 0.0 {
        return 0.0;
    }
    let ln_norm = ln_gamma(shape);
    let pdf = |x: f64| ((shape - 1.0) * x.ln() - x - ln_norm).exp();

    let mut lo = 0.0_f64;
    let mut hi = shape.max(1.0);
    while gamma_lr(shape, hi) < u {
        lo = hi;
        hi *= 2.0;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = gamma_lr(shape, x) - u;
        if f == 0.0 {
            return x;
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = pdf(x);
        let newton = x - f / d;
        x = if d > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (hi - lo) <= 4.0 * f64::EPSILON * x.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn all_models() -> Vec<FadingModel> {
        vec![
            FadingModel::rayleigh(1.0).unwrap(),
            FadingModel::rayleigh(2.5).unwrap(),
            FadingModel::log_normal(6.0).unwrap(),
            FadingModel::nakagami(0.5, 1.0).unwrap(),
            FadingModel::nakagami(3.0, 2.0).unwrap(),
            FadingModel::extremal(1.0, 1.0, 5).unwrap(),
            FadingModel::extremal(1.0, 1.0, 4).unwrap(),
            FadingModel::pareto_pathloss(2.0).unwrap(),
            FadingModel::pareto_pathloss(4.0).unwrap(),
            FadingModel::pareto_pathloss(3.0).unwrap(),
            FadingModel::pareto_general(0.5, 1.0).unwrap(),
        ]
    }

    #[test]
    fn cdf_at_support_edges() {
        let m = FadingModel::extremal(1.0, 1.0, 5).unwrap();
        assert_eq!(m.support(), (0.25, 4.0));
        assert_eq!(m.cdf(0.25), 0.0);
        assert_eq!(m.cdf(4.0), 1.0);
        assert_eq!(m.cdf(-3.0), 0.0);
        assert_eq!(m.cdf(10.0), 1.0);

        let p = FadingModel::pareto_pathloss(2.0).unwrap();
        assert_eq!(p.cdf(PI), 0.0);
        assert_eq!(p.support().0, PI);
    }

    #[test]
    fn quantile_examples() {
        let m = FadingModel::extremal(1.0, 1.0, 5).unwrap();
        assert_relative_eq!(m.quantile(1.0).unwrap(), 4.0, epsilon = 1e-12);

        let p = FadingModel::pareto_pathloss(2.0).unwrap();
        let q = p.quantile(0.5).unwrap();
        assert_relative_eq!(q, 2.0 * PI, epsilon = 1e-12);
        assert_relative_eq!(p.cdf(q), 0.5, epsilon = 1e-12);

        let r = FadingModel::rayleigh(1.0).unwrap();
        assert_relative_eq!(r.quantile(1.0 - (-1.0f64).exp()).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn quantile_domain_errors() {
        let p = FadingModel::pareto_pathloss(4.0).unwrap();
        assert!(matches!(p.quantile(1.0), Err(Error::Domain(_))));
        assert!(matches!(p.quantile(-0.1), Err(Error::Domain(_))));
        assert!(matches!(p.quantile(1.5), Err(Error::Domain(_))));
        let r = FadingModel::rayleigh(1.0).unwrap();
        assert!(r.quantile(1.0).is_err());
        assert_eq!(r.quantile(0.0).unwrap(), 0.0);
    }

    #[test]
    fn round_trip_on_uniform_grid() {
        for model in all_models() {
            for k in 1..=1000 {
                let u = k as f64 / 1001.0;
                let x = model.quantile(u).unwrap();
                let err = (model.cdf(x) - u).abs();
                assert!(err <= 1e-9, "{:?}: u={u} x={x} err={err}", model.spec());
            }
        }
    }

    // At large populations the extremal quantile is flat below the median, so
    // `x` cannot resolve `u` in f64; the inverse direction stays well posed.
    #[test]
    fn extremal_inverse_round_trip_large_population() {
        for pop in [50, 100, 10_000] {
            let law = ExtremalMv::new(1.0, 1.0, pop).unwrap();
            let (lo, hi) = law.support();
            for k in 1..1000 {
                let x = lo + (hi - lo) * k as f64 / 1000.0;
                let back = law.quantile(law.cdf(x)).unwrap();
                assert!(
                    (back - x).abs() <= 1e-9 * (1.0 + x.abs()),
                    "pop={pop} x={x} back={back}"
                );
            }
        }
    }

    #[test]
    fn quantile_strictly_increasing() {
        for model in all_models() {
            let mut prev = f64::NEG_INFINITY;
            for k in 1..=1000 {
                let x = model.quantile(k as f64 / 1001.0).unwrap();
                assert!(x > prev, "{:?} not increasing at k={k}", model.spec());
                prev = x;
            }
        }
    }

    #[test]
    fn moments_examples() {
        let r = FadingModel::rayleigh(2.0).unwrap().moments();
        assert_eq!(r.mean, Moment::Finite(2.0));
        assert_eq!(r.variance, Moment::Finite(4.0));
        assert_eq!(r.tail_index, None);

        let p = FadingModel::pareto_pathloss(2.0).unwrap().moments();
        assert!(p.mean.is_infinite());
        assert!(p.variance.is_infinite());
        assert_eq!(p.tail_index, Some(1.0));

        let g = FadingModel::pareto_general(0.3, 2.0).unwrap().moments();
        assert!(g.mean.is_infinite() && g.variance.is_infinite());
        assert_eq!(g.tail_index, Some(0.3));

        let e = FadingModel::extremal(1.0, 1.0, 50).unwrap().moments();
        assert_eq!(e.mean, Moment::Finite(1.0));
        assert_eq!(e.variance, Moment::Finite(1.0));
    }

    #[test]
    fn extremal_moments_by_monte_carlo() {
        let m = FadingModel::extremal(1.0, 1.0, 50).unwrap();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(11);
        let n = 400_000;
        let xs: Vec<f64> = (0..n).map(|_| m.sample(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        // fourth central moment bounds the spread of the variance estimate
        let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 4.0 * var.sqrt() / (n as f64).sqrt());
        assert!((var - 1.0).abs() < 4.0 * ((m4 - var * var) / n as f64).sqrt());
    }

    #[test]
    fn extreme_mean_examples() {
        assert_relative_eq!(
            FadingModel::extremal(1.0, 1.0, 5).unwrap().extreme_mean().unwrap(),
            1.0 + 4.0 / 3.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            FadingModel::extremal(1.0, 1.0, 100).unwrap().extreme_mean().unwrap(),
            1.0 + 99.0 / 199f64.sqrt(),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            ExtremalMv::new(0.0, 1.0, 2).unwrap().extreme_mean(),
            1.0 / 3f64.sqrt(),
            epsilon = 1e-12
        );
        assert!(FadingModel::rayleigh(1.0).unwrap().extreme_mean().is_err());
    }

    #[test]
    fn extreme_mean_matches_monte_carlo_max() {
        let law = FadingModel::extremal(1.0, 1.0, 5).unwrap();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(5);
        let trials = 200_000;
        let maxima: Vec<f64> = (0..trials)
            .map(|_| (0..5).map(|_| law.sample(&mut rng)).fold(f64::MIN, f64::max))
            .collect();
        let mean = maxima.iter().sum::<f64>() / trials as f64;
        let sd = (maxima.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / trials as f64).sqrt();
        let se = sd / (trials as f64).sqrt();
        assert!((mean - 7.0 / 3.0).abs() < 3.0 * se, "mean={mean} se={se}");
    }

    #[test]
    fn extremal_max_cdf_matches_empirical() {
        // Pr[M_n > t] against the closed-form CDF of the maximum
        let law = ExtremalMv::new(1.0, 1.0, 100).unwrap();
        let model = FadingModel::extremal(1.0, 1.0, 100).unwrap();
        let t = 99.0 / 199f64.sqrt();
        let exact = 1.0 - law.max_cdf(t);
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(3);
        let trials = 50_000;
        let hits = (0..trials)
            .filter(|_| (0..100).map(|_| model.sample(&mut rng)).fold(f64::MIN, f64::max) > t)
            .count();
        let p = hits as f64 / trials as f64;
        let se = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!((p - exact).abs() < 3.0 * se, "p={p} exact={exact}");
        // at the exact extreme mean the maximum is close to its median
        assert!((law.max_cdf(law.extreme_mean()) - 0.5).abs() < 0.002);
    }

    #[test]
    fn sampling_is_deterministic() {
        for model in all_models() {
            let draw = |seed| {
                let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
                (0..64).map(|_| model.sample(&mut rng)).collect::<Vec<_>>()
            };
            assert_eq!(draw(42), draw(42));
            assert!(draw(42).iter().all(|&g| g >= 0.0 && g.is_finite()));
        }
    }

    #[test]
    fn extremal_sample_mean() {
        let m = FadingModel::extremal(1.0, 1.0, 100).unwrap();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(9);
        let n = 1_000_000;
        let xs: Vec<f64> = (0..n).map(|_| m.sample(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
        assert!((mean - 1.0).abs() < 4.0 * sd / 1e3);
        let (lo, hi) = m.support();
        assert!(xs.iter().all(|&x| x >= lo && x <= hi));
    }

    #[test]
    fn pathloss_tail_law() {
        let m = FadingModel::pareto_pathloss(4.0).unwrap();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(21);
        let t = 100.0 * PI * PI;
        let n = 1_000_000;
        let hits = (0..n).filter(|_| m.sample(&mut rng) > t).count();
        let ratio = hits as f64 / n as f64 / (PI * t.powf(-0.5));
        assert!((0.95..=1.05).contains(&ratio), "ratio={ratio}");
    }

    #[test]
    fn classic_families_match_their_means() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(1);
        for model in [
            FadingModel::log_normal(4.0).unwrap(),
            FadingModel::nakagami(2.0, 3.0).unwrap(),
            FadingModel::rayleigh(0.5).unwrap(),
        ] {
            let mom = model.moments();
            let mean = mom.mean.finite().unwrap();
            let var = mom.variance.finite().unwrap();
            let n = 400_000;
            let s = (0..n).map(|_| model.sample(&mut rng)).sum::<f64>() / n as f64;
            assert!((s - mean).abs() < 4.0 * (var / n as f64).sqrt(), "{:?}", model.spec());
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(FadingModel::rayleigh(0.0).is_err());
        assert!(FadingModel::log_normal(-1.0).is_err());
        assert!(FadingModel::nakagami(0.4, 1.0).is_err());
        assert!(FadingModel::extremal(1.0, 0.0, 5).is_err());
        assert!(FadingModel::extremal(1.0, 1.0, 1).is_err());
        // negative lower endpoint is not a power gain
        assert!(FadingModel::extremal(0.0, 1.0, 2).is_err());
        assert!(FadingModel::pareto_pathloss(1.9).is_err());
        assert!(FadingModel::pareto_general(1.0, 1.0).is_err());
        assert!(FadingModel::new(FadingSpec::ExtremalMv {
            mu: 1.0,
            sigma: 1.0,
            pop: None
        })
        .is_err());
    }

    #[test]
    fn pareto_general_tail_constant() {
        let (nu, c0) = (0.5, 2.0);
        let m = FadingModel::pareto_general(nu, c0).unwrap();
        let x = 1e6;
        let tail = 1.0 - m.cdf(x);
        assert_relative_eq!(tail, c0 * x.powf(-nu) / gamma(1.0 - nu), max_relative = 1e-9);
    }

    #[test]
    fn spec_serde_shape() {
        let s: FadingSpec = serde_json::from_str(r#"{"family":"extremal_mv","mu":1.0,"sigma":1.0}"#).unwrap();
        assert_eq!(
            s.with_default_population(7),
            FadingSpec::ExtremalMv {
                mu: 1.0,
                sigma: 1.0,
                pop: Some(7)
            }
        );
        let back = serde_json::to_string(&FadingSpec::ParetoPathloss { alpha: 4.0 }).unwrap();
        assert_eq!(back, r#"{"family":"pareto_pathloss","alpha":4.0}"#);
    }
}
