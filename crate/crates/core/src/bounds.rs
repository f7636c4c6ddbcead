//! Closed-form probability bounds.
//!
//! Every probability bound reports its raw value next to the value clamped
//! to `[0, 1]`, so curves can be plotted without the clamp hiding the shape.

use std::f64::consts::E;
use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::genie::GenieMode;
use crate::report::fmt_float;

fn clamp01(x: f64) -> f64 {
    if x.is_nan() {
        1.0
    } else {
        x.clamp(0.0, 1.0)
    }
}

/// A bound given by its logarithm, with the raw and clamped values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogBound {
    pub ln_raw: f64,
    pub raw: f64,
    pub value: f64,
}

impl LogBound {
    fn from_ln(ln_raw: f64) -> Self {
        let raw = ln_raw.exp();
        Self {
            ln_raw,
            raw,
            value: clamp01(raw),
        }
    }
}

/// Feige: `Pr[S ≤ E[S] + δ] ≥ min(δ/(1+δ), 1/13)` for nonnegative
/// independent summands with means at most one.
pub fn feige_lower(delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::domain(format!("delta must be > 0, got {delta}")));
    }
    let ratio = if delta.is_infinite() {
        1.0
    } else {
        delta / (1.0 + delta)
    };
    Ok(ratio.min(1.0 / 13.0))
}

/// Maurer: `Pr[S ≤ E[S] − N·x] ≤ exp(−N²x² / (2 Σ E[X_i²]))`.
pub fn maurer_lower_tail(n: u64, x: f64, sum_second_moments: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("x must be > 0, got {x}")));
    }
    if !(sum_second_moments > 0.0) {
        return Err(Error::domain(format!(
            "sum of second moments must be > 0, got {sum_second_moments}"
        )));
    }
    let nx = n as f64 * x;
    Ok((-nx * nx / (2.0 * sum_second_moments)).exp())
}

fn signal_margin(mu: f64, beta0: f64, rho: f64, s: f64) -> f64 {
    beta0 * s + beta0 / rho - mu
}

/// Chebyshev bound on `Pr[γ ≥ β0(1/ρ + s)]`, clamped to 1.
pub fn chebyshev_signal_tail(mu: f64, sigma2: f64, beta0: f64, rho: f64, s: f64) -> Result<f64> {
    if !(sigma2 >= 0.0) {
        return Err(Error::domain(format!("variance must be >= 0, got {sigma2}")));
    }
    let margin = signal_margin(mu, beta0, rho, s);
    if !(margin > 0.0) {
        return Err(Error::domain(format!("need beta0 (1/rho + s) - mu > 0, got {margin}")));
    }
    Ok(clamp01(sigma2 / (margin * margin)))
}

/// Two-term upper bound on a single link's success probability when `m`
/// links are active.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinrUpperBound {
    pub m: u64,
    /// Split point between the interference and signal tails.
    pub s: f64,
    /// Interference lower-tail term.
    pub interference_term: f64,
    /// Signal upper-tail term (may exceed 1 or be infinite).
    pub signal_term: f64,
    pub raw: f64,
    pub value: f64,
}

/// Upper bound on `Pr[γ/(1/ρ + Z) ≥ β0]` with `Z` the sum of `m − 1`
/// interferers, split at `s = (m−1)μ/2`.
pub fn sinr_success_upper(m: u64, mu: f64, sigma2: f64, beta0: f64, rho: f64) -> Result<SinrUpperBound> {
    if m < 2 {
        return Err(Error::domain(format!("m must be >= 2, got {m}")));
    }
    sinr_success_upper_at(m, mu, sigma2, beta0, rho, (m - 1) as f64 * mu / 2.0)
}

/// Same bound at an arbitrary split point `μ/β0 − 1/ρ ≤ s < (m−1)μ`.
pub fn sinr_success_upper_at(m: u64, mu: f64, sigma2: f64, beta0: f64, rho: f64, s: f64) -> Result<SinrUpperBound> {
    if m < 2 {
        return Err(Error::domain(format!("m must be >= 2, got {m}")));
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::domain(format!("mean must be finite and > 0, got {mu}")));
    }
    if !(sigma2 >= 0.0 && sigma2.is_finite()) {
        return Err(Error::domain(format!("variance must be finite and >= 0, got {sigma2}")));
    }
    if !(beta0 > 0.0 && rho > 0.0) {
        return Err(Error::domain("beta0 and rho must be > 0"));
    }
    let k = (m - 1) as f64;
    let floor = mu / beta0 - 1.0 / rho;
    if !(s >= floor) {
        return Err(Error::domain(format!(
            "split point s = {s} is below mu/beta0 - 1/rho = {floor}"
        )));
    }
    if !(s < k * mu) {
        return Err(Error::domain(format!(
            "split point s = {s} is not below (m-1) mu = {}",
            k * mu
        )));
    }
    let x = mu - s / k;
    let interference_term = (-k * x * x / (2.0 * (mu * mu + sigma2))).exp();
    let margin = signal_margin(mu, beta0, rho, s);
    let signal_term = if margin > 0.0 {
        sigma2 / (margin * margin)
    } else {
        f64::INFINITY
    };
    let raw = interference_term + signal_term;
    Ok(SinrUpperBound {
        m,
        s,
        interference_term,
        signal_term,
        raw,
        value: clamp01(raw),
    })
}

/// First-moment upper bound on `Pr[X(m) ≥ 1]`, the probability that a
/// valid set of size `m` exists, given a per-link success bound `p`.
///
/// Single hop uses `C(n,m) ≤ (ne/m)^m`; two hop counts ordered
/// assignments, `C(n,m)·m! = n!/(n−m)!`.
pub fn genie_existence_upper(n: u64, m: u64, p_bound: f64, mode: GenieMode) -> Result<LogBound> {
    check_probability(p_bound)?;
    if m > n {
        return Ok(LogBound::from_ln(f64::NEG_INFINITY));
    }
    if m == 0 {
        return Ok(LogBound::from_ln(0.0));
    }
    let (nf, mf) = (n as f64, m as f64);
    let ln_count = match mode {
        GenieMode::Single => mf * (nf * E / mf).ln(),
        GenieMode::TwoHop => ln_falling_factorial(n, m),
    };
    Ok(LogBound::from_ln(ln_count + ln_pow(p_bound, m)))
}

/// Two-hop bound with `n!/(n−m)!` relaxed to `n^m`.
pub fn genie_existence_upper_simplified(n: u64, m: u64, p_bound: f64) -> Result<LogBound> {
    check_probability(p_bound)?;
    if m > n {
        return Ok(LogBound::from_ln(f64::NEG_INFINITY));
    }
    Ok(LogBound::from_ln(m as f64 * (n as f64).ln() + ln_pow(p_bound, m)))
}

/// `C(n,m)·p^m` with no relaxation of the binomial; the single-hop first
/// moment itself when `p` is the exact per-link probability.
pub fn genie_first_moment(n: u64, m: u64, p: f64) -> Result<LogBound> {
    check_probability(p)?;
    if m > n {
        return Ok(LogBound::from_ln(f64::NEG_INFINITY));
    }
    Ok(LogBound::from_ln(ln_binomial(n, m) + ln_pow(p, m)))
}

fn ln_pow(p: f64, m: u64) -> f64 {
    if m == 0 {
        0.0
    } else {
        m as f64 * p.ln()
    }
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::domain(format!("probability must lie in [0, 1], got {p}")))
    }
}

fn ln_falling_factorial(n: u64, m: u64) -> f64 {
    if m <= 64 {
        (0..m).map(|k| ((n - k) as f64).ln()).sum()
    } else {
        ln_gamma(n as f64 + 1.0) - ln_gamma((n - m) as f64 + 1.0)
    }
}

/// `n(n−1)···(n−m+1)/n^m`: all `m` uniform picks among `n` are distinct.
pub fn prob_all_distinct(n: u64, m: u64) -> Result<f64> {
    if m > n {
        return Err(Error::domain(format!("need m <= n, got m = {m}, n = {n}")));
    }
    let nf = n as f64;
    let ln: f64 = (1..m).map(|k| (-(k as f64) / nf).ln_1p()).sum();
    Ok(ln.exp())
}

/// `((n−m+1)/n)^m`, a lower bound on [`prob_all_distinct`] that tends to
/// `e^{−c²}` when `m = c√n`.
pub fn prob_all_distinct_lower_bound(n: u64, m: u64) -> Result<f64> {
    if m > n {
        return Err(Error::domain(format!("need m <= n, got m = {m}, n = {n}")));
    }
    if m == 0 {
        return Ok(1.0);
    }
    let frac = -((m - 1) as f64) / n as f64;
    Ok((m as f64 * frac.ln_1p()).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Upper,
    Lower,
    Exact,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::Upper => "upper",
            BoundKind::Lower => "lower",
            BoundKind::Exact => "exact",
        }
    }
}

/// A bound evaluated over a one-parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve {
    pub name: String,
    /// Name of the swept parameter.
    pub parameter: String,
    /// Fixed inputs, by name.
    pub inputs: Vec<(String, f64)>,
    pub kind: BoundKind,
    pub points: Vec<(f64, f64)>,
}

impl BoundCurve {
    /// CSV with header `parameter,bound_value,kind`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["parameter", "bound_value", "kind"])?;
        for &(x, y) in &self.points {
            w.write_record([fmt_float(x), fmt_float(y), self.kind.as_str().to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn sinr_upper(ms: &[u64], mu: f64, sigma2: f64, beta0: f64, rho: f64) -> Result<Self> {
        let points = ms
            .iter()
            .map(|&m| Ok((m as f64, sinr_success_upper(m, mu, sigma2, beta0, rho)?.value)))
            .collect::<Result<_>>()?;
        Ok(Self {
            name: "sinr_success_upper".into(),
            parameter: "m".into(),
            inputs: vec![
                ("mu".into(), mu),
                ("sigma2".into(), sigma2),
                ("beta0".into(), beta0),
                ("rho".into(), rho),
            ],
            kind: BoundKind::Upper,
            points,
        })
    }

    pub fn genie_upper(n: u64, ms: &[u64], p_bound: f64, mode: GenieMode) -> Result<Self> {
        let points = ms
            .iter()
            .map(|&m| Ok((m as f64, genie_existence_upper(n, m, p_bound, mode)?.value)))
            .collect::<Result<_>>()?;
        Ok(Self {
            name: match mode {
                GenieMode::Single => "genie_existence_upper_single".into(),
                GenieMode::TwoHop => "genie_existence_upper_two_hop".into(),
            },
            parameter: "m".into(),
            inputs: vec![("n".into(), n as f64), ("p_bound".into(), p_bound)],
            kind: BoundKind::Upper,
            points,
        })
    }

    /// Genie bound with `p` set to the two-term SINR bound at each `m`.
    pub fn genie_composed(
        n: u64,
        ms: &[u64],
        mu: f64,
        sigma2: f64,
        beta0: f64,
        rho: f64,
        mode: GenieMode,
    ) -> Result<Self> {
        let points = ms
            .iter()
            .map(|&m| {
                let p = sinr_success_upper(m, mu, sigma2, beta0, rho)?.value;
                Ok((m as f64, genie_existence_upper(n, m, p, mode)?.value))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            name: "genie_existence_upper_composed".into(),
            parameter: "m".into(),
            inputs: vec![
                ("n".into(), n as f64),
                ("mu".into(), mu),
                ("sigma2".into(), sigma2),
                ("beta0".into(), beta0),
                ("rho".into(), rho),
            ],
            kind: BoundKind::Upper,
            points,
        })
    }

    pub fn feige(deltas: &[f64]) -> Result<Self> {
        let points = deltas
            .iter()
            .map(|&d| Ok((d, feige_lower(d)?)))
            .collect::<Result<_>>()?;
        Ok(Self {
            name: "feige_lower".into(),
            parameter: "delta".into(),
            inputs: Vec::new(),
            kind: BoundKind::Lower,
            points,
        })
    }

    pub fn all_distinct(n: u64, ms: &[u64]) -> Result<Self> {
        let points = ms
            .iter()
            .map(|&m| Ok((m as f64, prob_all_distinct(n, m)?)))
            .collect::<Result<_>>()?;
        Ok(Self {
            name: "prob_all_distinct".into(),
            parameter: "m".into(),
            inputs: vec![("n".into(), n as f64)],
            kind: BoundKind::Exact,
            points,
        })
    }
}
