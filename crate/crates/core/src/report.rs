//! Result files: trial CSV, per-hop CSV and the versioned summary JSON.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::experiments::{ExperimentConfig, NSummary, RunOutput, ScalingFit, TrialResult};

pub const SCHEMA_VERSION: u32 = 1;
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:?}")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_f(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

pub const RESULTS_HEADER: [&str; 12] = [
    "n",
    "m",
    "trial_index",
    "throughput_bits",
    "distinct_event",
    "per_link_success_rate",
    "scheduled_sources",
    "max_gain",
    "r1",
    "r2",
    "first_hop_successes",
    "second_hop_successes",
];

/// One row per trial, in `(n, trial_index)` order. Inapplicable fields are empty.
pub fn write_results_csv<W: Write>(trials: &[TrialResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULTS_HEADER)?;
    for t in trials {
        w.write_record([
            t.n.to_string(),
            t.m.to_string(),
            t.trial_index.to_string(),
            fmt_float(t.throughput_bits),
            opt(t.distinct_event),
            fmt_float(t.per_link_success_rate),
            opt(t.scheduled_sources),
            opt_f(t.max_gain),
            opt_f(t.r1),
            opt_f(t.r2),
            opt(t.first_hop_successes),
            opt(t.second_hop_successes),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Two rows per relay trial, one per hop. Trials without hop data are skipped.
pub fn write_hops_csv<W: Write>(trials: &[TrialResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "trial",
        "hop",
        "m",
        "distinct_event",
        "successes",
        "throughput_bits",
    ])?;
    for t in trials {
        let hops = [
            (1, t.distinct_event, t.first_hop_successes, t.r1),
            (2, None, t.second_hop_successes, t.r2),
        ];
        for (hop, event, successes, bits) in hops {
            let (Some(successes), Some(bits)) = (successes, bits) else {
                continue;
            };
            w.write_record([
                t.n.to_string(),
                t.trial_index.to_string(),
                hop.to_string(),
                t.m.to_string(),
                opt(event),
                successes.to_string(),
                fmt_float(bits),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `index,value` rows.
pub fn write_samples_csv<W: Write>(samples: &[f64], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "value"])?;
    for (k, &x) in samples.iter().enumerate() {
        w.write_record([k.to_string(), fmt_float(x)])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub artifact_version: String,
    pub config: ExperimentConfig,
    /// Relay counts are rounded to the nearest integer where the rule
    /// produces a fraction.
    pub m_rounding: String,
    pub per_n: Vec<NSummary>,
    pub fit: Option<ScalingFit>,
}

impl Summary {
    pub fn new(config: &ExperimentConfig, output: &RunOutput) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            artifact_version: ARTIFACT_VERSION.to_string(),
            config: config.clone(),
            m_rounding: "nearest".into(),
            per_n: output.summaries.clone(),
            fit: output.fit.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
