//! Monte Carlo simulator and analytic-bound engine for throughput scaling of
//! ad hoc wireless networks under the random connection model.
//!
//! The crate is organized bottom-up:
//!
//! * [`fading`]: power-gain laws (Rayleigh, log-normal, Nakagami, the
//!   extremal finite-variance law, Pareto laws).
//! * [`channel`]: i.i.d. channel realizations and the SINR test.
//! * [`genie`]: exhaustive maximum-valid-set search for single-hop and
//!   two-hop schemes.
//! * [`relay`]: two-hop opportunistic relaying.
//! * [`bounds`]: closed-form inequalities to overlay on simulation.
//! * [`experiments`]: the trial harness, estimators and scaling fits.
//! * [`report`]: CSV/JSON serialization of results.
//! * [`verify`]: the acceptance criteria, runnable from tests and the CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod channel;
pub mod error;
pub mod experiments;
pub mod fading;
pub mod genie;
pub mod matching;
pub mod relay;
pub mod report;
pub mod seed;
pub mod verify;

pub use channel::{draw_channel, sinr, ChannelMatrix, GainColumns, LazyChannel, LinkParams, ScheduleOutcome};
pub use error::{Error, Result};
pub use experiments::{ExperimentConfig, MRule, RunOutput, ScalingFit, Scheme, TrialResult};
pub use fading::{ExtremalMv, FadingModel, FadingSpec, Moment, MomentReport};
pub use genie::{GenieLimits, GenieMode, GenieResult};
pub use relay::{HopReport, RelayConfig};
