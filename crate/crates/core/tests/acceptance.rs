//! Acceptance suite. Prints one PASS/FAIL line per criterion, then the
//! individual checks, and exits nonzero if any criterion fails.
//!
//! `SCALING_LAB_QUICK=1` selects reduced trial counts; `SCALING_LAB_SEED`
//! overrides the base seed.

use std::process::ExitCode;

use scaling_lab::verify::{self, Mode};

fn main() -> ExitCode {
    let mode = match std::env::var("SCALING_LAB_QUICK") {
        Ok(v) if !v.is_empty() && v != "0" => Mode::Quick,
        _ => Mode::Full,
    };
    let seed = std::env::var("SCALING_LAB_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(verify::DEFAULT_SEED);
    let workers = std::env::var("SCALING_LAB_WORKERS").ok().and_then(|s| s.parse().ok());

    println!("acceptance suite: mode {mode:?}, seed {seed}");
    let report = match verify::run_suite(mode, seed, workers, |c| println!("{}", c.line())) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("acceptance suite aborted: {e}");
            return ExitCode::FAILURE;
        }
    };
    println!();
    print!("{}", report.table());
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
