//! Channel realizations and the SINR success test shared by every protocol.
//!
//! Gains are organized by receiver: column `j` holds `γ_{i,j}` for every
//! transmitter `i`. Each column is generated from its own stream derived
//! from the channel seed, which lets large channels be regenerated column by
//! column ([`LazyChannel`]) instead of stored, while producing exactly the
//! same gains as the materialized [`ChannelMatrix`].

use std::io::Write;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fading::FadingModel;
use crate::seed;

/// Radio constants: linear SNR `ρ = P/σ²`, SINR threshold `β0` and the
/// on-off rate `R0 = ln(1 + β0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    rho: f64,
    beta0: f64,
    r0: f64,
}

impl LinkParams {
    pub fn new(rho: f64, beta0: f64) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::param("rho", "SNR must be finite and > 0"));
        }
        if !(beta0.is_finite() && beta0 > 0.0) {
            return Err(Error::param("beta0", "SINR threshold must be finite and > 0"));
        }
        Ok(Self {
            rho,
            beta0,
            r0: beta0.ln_1p(),
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn noise(&self) -> f64 {
        1.0 / self.rho
    }

    /// Threshold test; equality counts as success.
    #[inline]
    pub fn passes(&self, sinr: f64) -> bool {
        sinr >= self.beta0
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Read access to a channel one receiver column at a time.
pub trait GainColumns {
    fn n_tx(&self) -> usize;
    fn n_rx(&self) -> usize;

    /// Gains from every transmitter into receiver `j`. Implementations that
    /// do not store gains write them into `scratch` and return it.
    fn column<'a>(&'a self, j: usize, scratch: &'a mut Vec<f64>) -> &'a [f64];
}

/// A dense `n_tx × n_rx` matrix of nonnegative power gains.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    n_tx: usize,
    n_rx: usize,
    // column-major: gains[j * n_tx + i] = γ_{i,j}
    gains: Vec<f64>,
}

impl ChannelMatrix {
    /// Builds a matrix from rows (`rows[i][j] = γ_{i,j}`).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_tx = rows.len();
        let n_rx = rows.first().map_or(0, Vec::len);
        if n_tx == 0 || n_rx == 0 {
            return Err(Error::param("gains", "matrix dimensions must be >= 1"));
        }
        if rows.iter().any(|r| r.len() != n_rx) {
            return Err(Error::param("gains", "rows have unequal lengths"));
        }
        let mut gains = vec![0.0; n_tx * n_rx];
        for (i, row) in rows.iter().enumerate() {
            for (j, &g) in row.iter().enumerate() {
                if !(g.is_finite() && g >= 0.0) {
                    return Err(Error::param(
                        "gains",
                        format!("entry ({i},{j}) = {g} is not a finite nonnegative gain"),
                    ));
                }
                gains[j * n_tx + i] = g;
            }
        }
        Ok(Self { n_tx, n_rx, gains })
    }

    /// Draws an i.i.d. channel. Consumes one value from `rng` as the channel seed.
    pub fn draw<R: RngCore + ?Sized>(n_tx: usize, n_rx: usize, model: &FadingModel, rng: &mut R) -> Result<Self> {
        Ok(LazyChannel::draw(n_tx, n_rx, *model, rng)?.materialize())
    }

    #[inline]
    pub fn gain(&self, i: usize, j: usize) -> f64 {
        self.gains[j * self.n_tx + i]
    }

    pub fn column_slice(&self, j: usize) -> &[f64] {
        &self.gains[j * self.n_tx..(j + 1) * self.n_tx]
    }

    /// Returns the matrix with its transmitter rows reordered so that new
    /// row `k` is old row `perm[k]`.
    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n_tx);
        let mut gains = vec![0.0; self.gains.len()];
        for j in 0..self.n_rx {
            for (k, &old) in perm.iter().enumerate() {
                gains[j * self.n_tx + k] = self.gain(old, j);
            }
        }
        Self {
            n_tx: self.n_tx,
            n_rx: self.n_rx,
            gains,
        }
    }

    /// Multiplies every gain by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            n_tx: self.n_tx,
            n_rx: self.n_rx,
            gains: self.gains.iter().map(|g| g * c).collect(),
        }
    }

    /// CSV dump: one row per transmitter, one column per receiver.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["tx".to_string()];
        header.extend((0..self.n_rx).map(|j| format!("rx{j}")));
        w.write_record(&header)?;
        for i in 0..self.n_tx {
            let mut rec = vec![i.to_string()];
            rec.extend((0..self.n_rx).map(|j| crate::report::fmt_float(self.gain(i, j))));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

impl GainColumns for ChannelMatrix {
    fn n_tx(&self) -> usize {
        self.n_tx
    }

    fn n_rx(&self) -> usize {
        self.n_rx
    }

    fn column<'a>(&'a self, j: usize, _scratch: &'a mut Vec<f64>) -> &'a [f64] {
        self.column_slice(j)
    }
}

/// An i.i.d. channel described by its seed; columns are regenerated on demand.
#[derive(Debug, Clone, Copy)]
pub struct LazyChannel {
    n_tx: usize,
    n_rx: usize,
    model: FadingModel,
    seed: u64,
}

impl LazyChannel {
    pub fn new(n_tx: usize, n_rx: usize, model: FadingModel, seed: u64) -> Result<Self> {
        if n_tx == 0 || n_rx == 0 {
            return Err(Error::param("dimensions", "channel dimensions must be >= 1"));
        }
        Ok(Self {
            n_tx,
            n_rx,
            model,
            seed,
        })
    }

    pub fn draw<R: RngCore + ?Sized>(n_tx: usize, n_rx: usize, model: FadingModel, rng: &mut R) -> Result<Self> {
        Self::new(n_tx, n_rx, model, rng.random())
    }

    pub fn materialize(&self) -> ChannelMatrix {
        let mut gains = vec![0.0; self.n_tx * self.n_rx];
        for (j, col) in gains.chunks_exact_mut(self.n_tx).enumerate() {
            self.fill_column(j, col);
        }
        ChannelMatrix {
            n_tx: self.n_tx,
            n_rx: self.n_rx,
            gains,
        }
    }

    fn fill_column(&self, j: usize, out: &mut [f64]) {
        let mut rng = seed::stream(seed::derive(self.seed, j as u64));
        self.model.fill(&mut rng, out);
    }
}

impl GainColumns for LazyChannel {
    fn n_tx(&self) -> usize {
        self.n_tx
    }

    fn n_rx(&self) -> usize {
        self.n_rx
    }

    fn column<'a>(&'a self, j: usize, scratch: &'a mut Vec<f64>) -> &'a [f64] {
        scratch.resize(self.n_tx, 0.0);
        self.fill_column(j, scratch);
        scratch
    }
}

/// `draw_channel`: an i.i.d. `n_tx × n_rx` matrix, deterministic given `rng`.
pub fn draw_channel<R: RngCore + ?Sized>(
    n_tx: usize,
    n_rx: usize,
    model: &FadingModel,
    rng: &mut R,
) -> Result<ChannelMatrix> {
    ChannelMatrix::draw(n_tx, n_rx, model, rng)
}

/// SINR of link `i → j` when the transmitters in `active` are on:
/// `γ_{i,j} / (1/ρ + Σ_{t ∈ active, t ≠ i} γ_{t,j})`.
pub fn sinr<C: GainColumns + ?Sized>(h: &C, active: &[usize], i: usize, j: usize, rho: f64) -> Result<f64> {
    if !active.contains(&i) {
        return Err(Error::domain(format!("transmitter {i} is not in the active set")));
    }
    if j >= h.n_rx() {
        return Err(Error::domain(format!("receiver {j} out of range")));
    }
    let mut scratch = Vec::new();
    let col = h.column(j, &mut scratch);
    Ok(sinr_in_column(col, active, i, rho))
}

/// [`sinr`] on an already extracted receiver column. `i` is assumed active.
#[inline]
pub fn sinr_in_column(col: &[f64], active: &[usize], i: usize, rho: f64) -> f64 {
    let interference: CompensatedSum = active.iter().filter(|&&t| t != i).map(|&t| col[t]).collect();
    col[i] / (1.0 / rho + interference.value())
}

/// One scheduling slot: who transmitted, which links succeeded and what was
/// delivered.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScheduleOutcome {
    /// Sorted, distinct transmitter indices.
    pub active_tx: Vec<usize>,
    /// `(tx, rx)` links that met the threshold.
    pub successes: Vec<(usize, usize)>,
    pub delivered_bits: f64,
}

impl ScheduleOutcome {
    /// Builds an outcome crediting `r0` once per distinct successful transmitter.
    pub fn new(mut active_tx: Vec<usize>, successes: Vec<(usize, usize)>, r0: f64) -> Self {
        active_tx.sort_unstable();
        active_tx.dedup();
        debug_assert!(successes.iter().all(|(t, _)| active_tx.binary_search(t).is_ok()));
        let mut packets: Vec<usize> = successes.iter().map(|&(t, _)| t).collect();
        packets.sort_unstable();
        packets.dedup();
        Self {
            delivered_bits: r0 * packets.len() as f64,
            active_tx,
            successes,
        }
    }

    pub fn distinct_packets(&self) -> usize {
        let mut packets: Vec<usize> = self.successes.iter().map(|&(t, _)| t).collect();
        packets.sort_unstable();
        packets.dedup();
        packets.len()
    }
}
