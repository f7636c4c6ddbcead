use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::{json, Map, Value};

use scaling_lab::bounds::BoundCurve;
use scaling_lab::experiments::{self, ExperimentConfig, MRule, Scheme};
use scaling_lab::report::{self, Summary};
use scaling_lab::verify::{self, Mode};
use scaling_lab::{seed, FadingModel, FadingSpec, GenieLimits, GenieMode, Moment};

use crate::args::{
    BoundKindArg, BoundsArgs, ExperimentArgs, GenieArgs, GenieModeArg, RelayArgs, RelaySchemeArg, RunArgs, SampleArgs,
    VerifyArgs,
};
use crate::grid;
use crate::manifest::{RunManifest, SeedSource};
use crate::CliError;

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

fn random_seed() -> u64 {
    rand::random()
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

/// Loads `--config` (an experiment config or a manifest wrapping one).
fn load_config_value(path: &Path) -> Result<Map<String, Value>, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {} is not valid JSON: {e}", path.display())))?;
    let value = match value {
        Value::Object(mut m) if m.contains_key("schema_version") && m.contains_key("config") => {
            m.remove("config").unwrap_or(Value::Null)
        }
        other => other,
    };
    match value {
        Value::Object(m) => Ok(m),
        _ => Err(CliError::Usage("config must be a JSON object".into())),
    }
}

/// Config file first, then command defaults for missing fields, then flags.
fn build_config(
    args: &ExperimentArgs,
    defaults: &[(&str, Value)],
    forced: &[(&str, Value)],
) -> Result<(ExperimentConfig, SeedSource), CliError> {
    let mut map = match &args.config {
        Some(p) => load_config_value(p)?,
        None => Map::new(),
    };
    for (k, v) in defaults {
        map.entry(k.to_string()).or_insert_with(|| v.clone());
    }
    for (k, v) in forced {
        map.insert(k.to_string(), v.clone());
    }
    if !map.contains_key("m_rule") && map.get("scheme") == Some(&to_value(&Scheme::ParetoLinear)) {
        map.insert("m_rule".into(), to_value(&MRule::EqualN));
    }
    if let Some(spec) = args.model.spec().map_err(CliError::Usage)? {
        map.insert("model".into(), to_value(&spec));
    }
    if let Some(g) = &args.n_grid {
        map.insert("n_grid".into(), json!(grid::parse_counts(g)?));
    }
    if let Some(r) = args.rho {
        map.insert("rho".into(), json!(r));
    }
    if let Some(b) = args.beta0 {
        map.insert("beta0".into(), json!(b));
    }
    if let Some(t) = args.trials {
        map.insert("trials".into(), json!(t));
    }
    let source = if let Some(s) = args.seed {
        map.insert("base_seed".into(), json!(s));
        SeedSource::Flag
    } else if map.contains_key("base_seed") {
        SeedSource::Config
    } else {
        let s = random_seed();
        eprintln!("no --seed given; using random seed {s}");
        map.insert("base_seed".into(), json!(s));
        SeedSource::Random
    };
    let cfg: ExperimentConfig = serde_json::from_value(Value::Object(map))
        .map_err(|e| CliError::Usage(format!("invalid configuration: {e}")))?;
    cfg.validate()?;
    Ok((cfg, source))
}

fn execute(
    command: &str,
    cfg: &ExperimentConfig,
    source: SeedSource,
    out_dir: &Path,
    workers: Option<usize>,
    hops: bool,
) -> Result<(), CliError> {
    let started = now();
    let output = experiments::run(cfg, workers)?;
    let finished = now();

    fs::create_dir_all(out_dir)?;
    let mut files = vec!["results.csv".to_string(), "summary.json".to_string()];
    report::write_results_csv(
        &output.trials,
        BufWriter::new(File::create(out_dir.join("results.csv"))?),
    )?;
    if hops {
        report::write_hops_csv(&output.trials, BufWriter::new(File::create(out_dir.join("hops.csv"))?))?;
        files.push("hops.csv".into());
    }
    fs::write(out_dir.join("summary.json"), Summary::new(cfg, &output).to_json()?)?;
    files.push("manifest.json".into());
    let manifest = RunManifest::new(
        command,
        cfg,
        source,
        workers,
        started,
        finished,
        output.summaries.clone(),
        output.fit.clone(),
        files,
    );
    fs::write(
        out_dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).map_err(scaling_lab::Error::from)?,
    )?;

    let mut out = io::stdout().lock();
    writeln!(out, "scheme {} seed {}", cfg.scheme.as_str(), cfg.base_seed)?;
    writeln!(
        out,
        "{:>8} {:>10} {:>14} {:>12} {:>14} {:>10}",
        "n", "m", "mean_bits", "std_err", "median_bits", "link_p"
    )?;
    for s in &output.summaries {
        writeln!(
            out,
            "{:>8} {:>10.3} {:>14.6} {:>12.6} {:>14.6} {:>10.6}",
            s.n, s.m, s.mean_throughput, s.std_err, s.median_throughput, s.per_link_success_rate
        )?;
    }
    if let Some(f) = &output.fit {
        writeln!(
            out,
            "slope {:.4} (95% CI [{:.4}, {:.4}]), r2 {:.4}",
            f.slope, f.ci_low, f.ci_high, f.r_squared
        )?;
    }
    writeln!(out, "wrote {}", out_dir.display())?;
    Ok(())
}

pub fn genie(a: GenieArgs, workers: Option<usize>) -> Result<(), CliError> {
    let scheme = match a.mode {
        GenieModeArg::Single => Scheme::GenieSingle,
        GenieModeArg::TwoHop => Scheme::GenieTwoHop,
    };
    let mut forced = vec![("scheme", to_value(&scheme))];
    if a.force_exponential {
        forced.push(("genie_limits", to_value(&GenieLimits::accept_exponential())));
    }
    if let Some(n) = a.n {
        forced.push(("n_grid", json!([n])));
    }
    let defaults = [
        ("model", to_value(&FadingSpec::Rayleigh { mean: 1.0 })),
        ("trials", json!(100)),
    ];
    let (cfg, source) = build_config(&a.exp, &defaults, &forced).map_err(|e| match e {
        CliError::Usage(msg) if msg.contains("exhaustive limit") => {
            CliError::Usage(format!("{msg}; pass --force-exponential to accept exponential cost"))
        }
        other => other,
    })?;
    execute("genie", &cfg, source, &a.exp.out, workers, false)
}

pub fn relay(a: RelayArgs, workers: Option<usize>) -> Result<(), CliError> {
    let scheme = a.scheme.map(|s| match s {
        RelaySchemeArg::Opportunistic => Scheme::OpportunisticTwoHop,
        RelaySchemeArg::ParetoLinear => Scheme::ParetoLinear,
    });
    let pareto = scheme == Some(Scheme::ParetoLinear);
    let defaults = [
        ("scheme", to_value(&Scheme::OpportunisticTwoHop)),
        (
            "model",
            if pareto {
                to_value(&FadingSpec::ParetoPathloss { alpha: 4.0 })
            } else {
                to_value(&FadingSpec::ExtremalMv {
                    mu: 1.0,
                    sigma: 1.0,
                    pop: None,
                })
            },
        ),
        ("trials", json!(100)),
    ];
    let mut forced = Vec::new();
    if let Some(s) = scheme {
        forced.push(("scheme", to_value(&s)));
    }
    if let Some(r) = a.m_rule {
        forced.push(("m_rule", to_value(&r)));
    }
    let (cfg, source) = build_config(&a.exp, &defaults, &forced)?;
    if !matches!(cfg.scheme, Scheme::OpportunisticTwoHop | Scheme::ParetoLinear) {
        return Err(CliError::Usage(format!(
            "relay runs relaying schemes; config names `{}` (use `run` instead)",
            cfg.scheme.as_str()
        )));
    }
    execute("relay", &cfg, source, &a.exp.out, workers, a.hops)
}

pub fn run(a: RunArgs, workers: Option<usize>) -> Result<(), CliError> {
    let forced: Vec<(&str, Value)> = a.m_rule.iter().map(|r| ("m_rule", to_value(r))).collect();
    let (cfg, source) = build_config(&a.exp, &[], &forced)?;
    let hops = matches!(cfg.scheme, Scheme::OpportunisticTwoHop | Scheme::ParetoLinear);
    execute("run", &cfg, source, &a.exp.out, workers, hops)
}

pub fn sample(a: SampleArgs) -> Result<(), CliError> {
    let spec = a
        .model
        .spec()
        .map_err(CliError::Usage)?
        .ok_or_else(|| CliError::Usage("sample needs --model".into()))?;
    if let FadingSpec::ExtremalMv { pop: None, .. } = spec {
        return Err(CliError::Usage("--model extremal needs --pop for sampling".into()));
    }
    if a.n_samples == 0 {
        return Err(CliError::Usage("--n-samples must be >= 1".into()));
    }
    let model = FadingModel::new(spec)?;
    let seed_value = a.seed.unwrap_or_else(|| {
        let s = random_seed();
        eprintln!("no --seed given; using random seed {s}");
        s
    });
    let mut rng = seed::stream(seed_value);
    let mut xs = vec![0.0; a.n_samples];
    model.fill(&mut rng, &mut xs);

    let summary = sample_summary(&model, &xs, seed_value);
    let text = serde_json::to_string_pretty(&summary).map_err(scaling_lab::Error::from)?;
    match &a.out {
        Some(path) => {
            report::write_samples_csv(&xs, BufWriter::new(File::create(path)?))?;
            println!("{text}");
        }
        None => {
            report::write_samples_csv(&xs, io::stdout().lock())?;
            eprintln!("{text}");
        }
    }
    Ok(())
}

fn moment_value(m: Moment) -> Value {
    match m {
        Moment::Finite(x) => json!(x),
        Moment::Infinite => json!("infinite"),
    }
}

fn sample_summary(model: &FadingModel, xs: &[f64], seed_value: u64) -> Value {
    let (mean, _) = experiments::mean_and_se(xs);
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
    } else {
        0.0
    };
    let moments = model.moments();
    let mut s = json!({
        "family": model.spec().family_name(),
        "model": to_value(&model.spec()),
        "seed": seed_value,
        "n_samples": xs.len(),
        "empirical_mean": mean,
        "empirical_variance": var,
        "mean": moment_value(moments.mean),
        "variance": moment_value(moments.variance),
    });

    if let Some(law) = model.as_extremal() {
        let pop = law.pop() as usize;
        let maxima: Vec<f64> = xs
            .chunks_exact(pop)
            .map(|c| c.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
            .collect();
        let n = pop as f64;
        let spread = (n - 1.0) / (2.0 * n - 1.0).sqrt();
        let expected = law.extreme_mean();
        let frac = |t: f64| {
            if maxima.is_empty() {
                Value::Null
            } else {
                json!(maxima.iter().filter(|&&m| m > t).count() as f64 / maxima.len() as f64)
            }
        };
        s["extreme"] = json!({
            "population": pop,
            "blocks": maxima.len(),
            "mean_block_max": if maxima.is_empty() { Value::Null } else { json!(experiments::mean_and_se(&maxima).0) },
            "expected_max": expected,
            "threshold_spread": spread,
            "exceedance_spread": frac(spread),
            "exceedance_spread_exact": 1.0 - law.max_cdf(spread),
            "exceedance_expected_max": frac(expected),
            "exceedance_expected_max_exact": 1.0 - law.max_cdf(expected),
        });
    }

    if let Some(nu) = model.tail_index() {
        if let Ok(t) = model.quantile(0.9) {
            let above = |x: f64| xs.iter().filter(|&&v| v > x).count() as f64;
            let a1 = above(t);
            s["tail"] = json!({
                "tail_index": nu,
                "t": t,
                "ratio_empirical": if a1 > 0.0 { json!(above(2.0 * t) / a1) } else { Value::Null },
                "ratio_theory": (1.0 - model.cdf(2.0 * t)) / (1.0 - model.cdf(t)),
            });
        }
    }
    s
}

pub fn bounds(a: BoundsArgs) -> Result<(), CliError> {
    let need_n = || a.n.ok_or_else(|| CliError::Usage("this bound needs --n".into()));
    let curve = match a.bound {
        BoundKindArg::Feige => BoundCurve::feige(&grid::parse_f64(&a.grid)?)?,
        BoundKindArg::SinrUpper => {
            BoundCurve::sinr_upper(&grid::parse_counts(&a.grid)?, a.mu, a.sigma2, a.beta0, a.rho)?
        }
        BoundKindArg::Distinct => BoundCurve::all_distinct(need_n()?, &grid::parse_counts(&a.grid)?)?,
        BoundKindArg::GenieSingle | BoundKindArg::GenieTwoHop => {
            let mode = if a.bound == BoundKindArg::GenieSingle {
                GenieMode::Single
            } else {
                GenieMode::TwoHop
            };
            let ms = grid::parse_counts(&a.grid)?;
            match a.p_bound {
                Some(p) => BoundCurve::genie_upper(need_n()?, &ms, p, mode)?,
                None => BoundCurve::genie_composed(need_n()?, &ms, a.mu, a.sigma2, a.beta0, a.rho, mode)?,
            }
        }
    };
    match &a.out {
        Some(p) => curve.write_csv(BufWriter::new(File::create(p)?))?,
        None => curve.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

pub fn verify(a: VerifyArgs, workers: Option<usize>) -> Result<(), CliError> {
    let mode = if a.quick { Mode::Quick } else { Mode::Full };
    let seed_value = a.seed.unwrap_or(verify::DEFAULT_SEED);
    let ids: Vec<u8> = if a.criteria.is_empty() {
        verify::CRITERIA.iter().map(|c| c.0).collect()
    } else {
        a.criteria.clone()
    };
    if let Some(bad) = ids.iter().find(|&&id| !(1..=9).contains(&id)) {
        return Err(CliError::Usage(format!("unknown criterion {bad}; ids are 1 to 9")));
    }
    println!("acceptance suite: mode {mode:?}, seed {seed_value}");
    let mut criteria = Vec::new();
    for id in ids {
        let r = verify::run_criterion(id, mode, seed_value, workers)?;
        println!("{}", r.line());
        criteria.push(r);
    }
    let report = verify::SuiteReport {
        mode,
        seed: seed_value,
        criteria,
    };
    println!();
    print!("{}", report.table());
    fs::write(&a.json, report.to_json()?)?;
    println!("JSON report: {}", a.json.display());
    if report.all_passed() {
        Ok(())
    } else {
        Err(CliError::VerificationFailed)
    }
}
