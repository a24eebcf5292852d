//! Batch experiments and their reports.
//!
//! Each trial draws from `substream(seed, trial)`, so a trial sees the same keys
//! for every `n` of a run and results do not depend on the worker count: trials
//! are evaluated in parallel, collected in index order, and only then reduced.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use crate::coupling::{
    coefficient_error, decomposition_residuals, default_delta, perturbation_b, resample_fixed_point,
    sample_coupled_with, sample_limit, truncation_error_bound, CouplingOutcome, TailCompletion,
};
use crate::error::{Error, Result};
use crate::formulas::{self, ExactValues, EULER_GAMMA, LIMIT_VARIANCE};
use crate::oracle::enumerate_exact;
use crate::rng::{substream, MasterSeed};
use crate::stats::{ks_distance, ks_two_sample, normal_cdf, EmpiricalCdf, MomentAccumulator, SummaryFragment};

/// Pass/fail thresholds of the experiments.
pub mod thresholds {
    /// Sample size at which the large-`n` thresholds apply.
    pub const LARGE_N: u64 = 10_000;
    pub const CLT_KS_MAX: f64 = 0.08;
    pub const CLT_SKEW_MAX: f64 = 0.3;
    pub const L3_RATIO_MIN: f64 = 0.75;
    pub const L3_RATIO_MAX: f64 = 1.25;
    pub const BN_SPREAD_MAX: f64 = 2.0;
    pub const COEFF_L3_MAX: f64 = 0.1;
    pub const FIXED_POINT_ITERATIONS: usize = 20;
    pub const FIXED_POINT_KS_MAX: f64 = 0.01;
    pub const FIXED_POINT_DELTA: f64 = 1e-4;
    pub const RESIDUAL_MAX: f64 = 1e-9;
    pub const FORMULA_EXPANSION_MAX: f64 = 0.05;
    /// Standard errors allowed for mean and variance checks.
    pub const SE_MULTIPLIER: f64 = 3.0;
}

use thresholds::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Enumerate,
    MeanCheck,
    VarianceProfile,
    Clt,
    L3,
    BnDecay,
    CoeffConvergence,
    FixedPoint,
    CouplingAudit,
    Formulas,
}

impl Experiment {
    pub fn default_n_values(self) -> Vec<u64> {
        match self {
            Experiment::Enumerate => vec![8],
            Experiment::MeanCheck => (1..=8).collect(),
            Experiment::VarianceProfile => vec![16, 256, 4096],
            Experiment::Clt | Experiment::L3 | Experiment::BnDecay | Experiment::CoeffConvergence => {
                vec![100, 1_000, 10_000]
            }
            Experiment::FixedPoint => vec![],
            Experiment::CouplingAudit => vec![1_000],
            Experiment::Formulas => vec![1_000, 10_000, 100_000, 1_000_000],
        }
    }

    pub fn default_trials(self) -> u64 {
        match self {
            Experiment::Clt | Experiment::L3 | Experiment::BnDecay | Experiment::CoeffConvergence => 4_000,
            Experiment::CouplingAudit => 1_000,
            _ => 100_000,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Jsonl,
    Csv,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub seed: MasterSeed,
    pub subcommand: Experiment,
    pub n_values: Vec<u64>,
    pub trials: u64,
    pub delta: Option<f64>,
    pub output_path: Option<PathBuf>,
    pub workers: usize,
    pub format: OutputFormat,
    /// Size of a shared pool of limit samples used to complete fringe slots;
    /// `None` grows every slot from fresh uniforms.
    pub tail_pool: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(subcommand: Experiment, seed: u64) -> Self {
        ExperimentConfig {
            seed: MasterSeed(seed),
            subcommand,
            n_values: subcommand.default_n_values(),
            trials: subcommand.default_trials(),
            delta: None,
            output_path: None,
            workers: 1,
            format: OutputFormat::default(),
            tail_pool: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.workers < 1 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if let Some(d) = self.delta {
            if !(d > 0.0) {
                return Err(Error::Config(format!("delta must be positive, got {d}")));
            }
        }
        let needs_n = !matches!(self.subcommand, Experiment::FixedPoint);
        if needs_n && self.n_values.is_empty() {
            return Err(Error::Config("--n needs at least one value".into()));
        }
        match self.subcommand {
            Experiment::Enumerate | Experiment::MeanCheck => {
                if let Some(&n) = self.n_values.iter().find(|&&n| !(1..=10).contains(&n)) {
                    return Err(Error::Config(format!("enumeration needs 1 <= n <= 10, got {n}")));
                }
            }
            Experiment::Clt | Experiment::L3 => {
                if let Some(&n) = self.n_values.iter().find(|&&n| n < 2) {
                    return Err(Error::Config(format!("n must be at least 2, got {n}")));
                }
            }
            Experiment::BnDecay | Experiment::CoeffConvergence | Experiment::VarianceProfile => {
                if let Some(&n) = self.n_values.iter().find(|&&n| n < 1) {
                    return Err(Error::Config(format!("n must be at least 1, got {n}")));
                }
            }
            _ => {}
        }
        if self.tail_pool == Some(0) {
            return Err(Error::Config("tail pool must be non-empty".into()));
        }
        Ok(())
    }

    fn max_n(&self) -> u64 {
        self.n_values.iter().copied().max().unwrap_or(0)
    }
}

/// One pass/fail check; `pass` is `lower <= value <= upper`.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub n: Option<u64>,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub pass: bool,
}

impl Check {
    pub fn within(name: &str, n: Option<u64>, value: f64, lower: Option<f64>, upper: Option<f64>) -> Self {
        let pass = value.is_finite()
            && lower.map_or(true, |l| value >= l)
            && upper.map_or(true, |u| value <= u);
        Check {
            name: name.to_string(),
            n,
            value,
            lower,
            upper,
            pass,
        }
    }

    pub fn at_most(name: &str, n: Option<u64>, value: f64, upper: f64) -> Self {
        Self::within(name, n, value, None, Some(upper))
    }

    /// `|value - target| <= tolerance`, stored as a bracket.
    pub fn near(name: &str, n: Option<u64>, value: f64, target: f64, tolerance: f64) -> Self {
        Self::within(name, n, value, Some(target - tolerance), Some(target + tolerance))
    }
}

/// Number of adjacent pairs that fail to strictly decrease.
pub fn decrease_violations(values: &[f64]) -> usize {
    values.windows(2).filter(|w| !(w[1] < w[0])).count()
}

#[derive(Clone, Debug, Serialize)]
pub struct NRecord {
    pub n: u64,
    pub delta: Option<f64>,
    pub trials: u64,
    pub summary: Option<SummaryFragment>,
    pub values: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub records: Vec<NRecord>,
    pub checks: Vec<Check>,
    pub wall_clock_secs: f64,
    pub version: String,
    /// Per-row output (CSV lines or JSON objects); written out by [`write_rows`].
    #[serde(skip)]
    pub rows: Vec<Row>,
}

impl ExperimentReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Clone, Debug)]
pub enum Row {
    Json(serde_json::Value),
    Csv(Vec<String>),
}

/// Everything computed for one coupled trial.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    #[serde(flatten)]
    pub outcome: CouplingOutcome,
    /// `Y_n - Y_trunc`
    pub error: f64,
    /// `(Y_n - Y_trunc) / sigma(n)`
    pub x_n: f64,
    /// `sqrt(n / (2 log n)) (Y_n - Y_trunc)`; absent for `n < 2`.
    pub scaled: Option<f64>,
    pub b_n: Option<f64>,
    pub a0_abs_err: Option<f64>,
    pub a1_abs_err: Option<f64>,
    pub residual_max: Option<f64>,
}

/// Truncation threshold for `n`, warning when an explicit choice is coarse.
pub fn resolve_delta(n: u64, requested: Option<f64>, exact: &ExactValues) -> f64 {
    match requested {
        None => default_delta(n, exact),
        Some(d) => {
            let err = truncation_error_bound(d);
            if err > 0.1 * exact.sigma(n) {
                log::warn!(
                    "delta = {d:e} allows truncation error {err:.3e}, over 10% of sigma({n}) = {:.3e}",
                    exact.sigma(n)
                );
            }
            d
        }
    }
}

fn in_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    Ok(pool.install(job))
}

/// `trials` coupled samples at size `n`, in trial order.
pub fn coupled_batch(
    seed: MasterSeed,
    n: u64,
    trials: u64,
    delta: f64,
    exact: &ExactValues,
    tail: &TailCompletion,
    workers: usize,
) -> Result<Vec<TrialRecord>> {
    let scale = formulas::clt_scale(n as f64).ok();
    let sigma = exact.sigma(n);
    in_pool(workers, || {
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut stream = substream(seed, t);
                let outcome = sample_coupled_with(&mut stream, n, delta, exact, tail)?;
                let error = outcome.y_n - outcome.y_trunc;
                let (b_n, a_err, residual) = if n >= 1 {
                    (
                        Some(perturbation_b(&outcome, exact)?),
                        Some(coefficient_error(&outcome, exact, 1)?),
                        Some(decomposition_residuals(&outcome, exact)?.max_abs()),
                    )
                } else {
                    (None, None, None)
                };
                Ok(TrialRecord {
                    trial: t,
                    outcome,
                    error,
                    x_n: error / sigma,
                    scaled: scale.map(|s| s * error),
                    b_n,
                    a0_abs_err: a_err.map(|e| e.0),
                    a1_abs_err: a_err.map(|e| e.1),
                    residual_max: residual,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?
}

/// Per trial, `(sqrt(n / (2 log n)) (Y_n - Y_trunc), (Y_n - Y_trunc) / sigma(n))`.
pub fn scaled_residual_batch(
    n: u64,
    trials: u64,
    delta: f64,
    seed: MasterSeed,
    exact: &ExactValues,
) -> Result<Vec<(f64, f64)>> {
    formulas::clt_scale(n as f64)?;
    let batch = coupled_batch(seed, n, trials, delta, exact, &TailCompletion::Fresh, 1)?;
    Ok(batch.iter().map(|r| (r.scaled.unwrap_or(f64::NAN), r.x_n)).collect())
}

/// `trials` draws of the truncated limit; trial `t` uses `substream(seed, t)`.
pub fn limit_batch(seed: MasterSeed, trials: u64, delta: f64, workers: usize) -> Result<Vec<f64>> {
    in_pool(workers, || {
        (0..trials)
            .into_par_iter()
            .map(|t| sample_limit(&mut substream(seed, t), delta))
            .collect::<Result<Vec<_>>>()
    })?
}

/// Iterates the fixed-point map from the all-zero population. Iteration `k`
/// draws from `substream(seed, offset + k)`.
pub fn fixed_point_population(seed: MasterSeed, offset: u64, m: usize, iterations: usize) -> Result<Vec<f64>> {
    let mut population = vec![0.0; m];
    for k in 0..iterations {
        let mut stream = substream(seed, offset + k as u64);
        population = resample_fixed_point(&population, &mut stream, m)?;
    }
    Ok(population)
}

/// `(sum x^p / m)^{1/p}` of non-negative values.
fn lp_mean(values: impl Iterator<Item = f64>, p: i32) -> f64 {
    let (mut s, mut m) = (0.0, 0usize);
    for v in values {
        s += v.abs().powi(p);
        m += 1;
    }
    (s / m as f64).powf(1.0 / p as f64)
}

pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let started = Instant::now();
    let mut report = ExperimentReport {
        config: config.clone(),
        records: vec![],
        checks: vec![],
        wall_clock_secs: 0.0,
        version: env!("CARGO_PKG_VERSION").to_string(),
        rows: vec![],
    };
    match config.subcommand {
        Experiment::Enumerate => run_enumerate(config, &mut report)?,
        Experiment::MeanCheck => run_mean_check(config, &mut report)?,
        Experiment::Formulas => run_formulas(config, &mut report)?,
        Experiment::FixedPoint => run_fixed_point(config, &mut report)?,
        _ => run_coupled(config, &mut report)?,
    }
    report.wall_clock_secs = started.elapsed().as_secs_f64();
    Ok(report)
}

fn run_enumerate(config: &ExperimentConfig, report: &mut ExperimentReport) -> Result<()> {
    report.rows.push(Row::Csv(vec!["n".into(), "comparisons".into(), "count".into()]));
    for &n in &config.n_values {
        let dist = enumerate_exact(n as usize)?;
        for (k, c) in &dist.counts {
            report.rows.push(Row::Csv(vec![n.to_string(), k.to_string(), c.to_string()]));
        }
        let mean = dist.exact_mean();
        report.rows.push(Row::Csv(vec![n.to_string(), "exact_mean".into(), mean.to_string()]));
        let matches = mean == formulas::mean_kn_exact(n);
        report.checks.push(Check::within("exact_mean_matches_formula", Some(n), matches as u8 as f64, Some(1.0), None));
        let mut values = BTreeMap::new();
        values.insert("permutations".into(), dist.total() as f64);
        report.records.push(NRecord { n, delta: None, trials: dist.total(), summary: None, values });
    }
    Ok(())
}

fn run_mean_check(config: &ExperimentConfig, report: &mut ExperimentReport) -> Result<()> {
    for &n in &config.n_values {
        let dist = enumerate_exact(n as usize)?;
        let mean = dist.exact_mean();
        let formula = formulas::mean_kn_exact(n);
        report.rows.push(Row::Json(json!({
            "n": n,
            "enumerated_mean": mean.to_string(),
            "formula_mean": formula.to_string(),
        })));
        report.checks.push(Check::within("exact_mean_matches_formula", Some(n), (mean == formula) as u8 as f64, Some(1.0), None));
    }
    Ok(())
}

fn run_formulas(config: &ExperimentConfig, report: &mut ExperimentReport) -> Result<()> {
    let exact = ExactValues::new(config.max_n() as usize);
    for &n in &config.n_values {
        let sigma_sq = exact.sigma_sq(n);
        let row = json!({
            "n": n,
            "mu": exact.mean_kn(n),
            "sigma_sq": sigma_sq,
            "sigma": exact.sigma(n),
            "clt_scale": formulas::clt_scale(n as f64).ok(),
            "l3_prediction": formulas::l3_prediction(n as f64).ok(),
        });
        report.rows.push(Row::Json(row));
        report.checks.push(Check::within("sigma_positive", Some(n), sigma_sq, Some(f64::MIN_POSITIVE), None));
        if n >= 1_000 {
            let x = n as f64;
            let gap = x * sigma_sq - (2.0 * x.ln() + 2.0 * EULER_GAMMA - 3.0);
            report.checks.push(Check::near("n_sigma_sq_expansion", Some(n), gap, 0.0, FORMULA_EXPANSION_MAX));
        }
    }
    Ok(())
}

fn run_fixed_point(config: &ExperimentConfig, report: &mut ExperimentReport) -> Result<()> {
    let delta = config.delta.unwrap_or(FIXED_POINT_DELTA);
    let m = config.trials as usize;
    let population = fixed_point_population(config.seed, config.trials, m, FIXED_POINT_ITERATIONS)?;
    let direct = limit_batch(config.seed, config.trials, delta, config.workers)?;
    let ks = ks_two_sample(&EmpiricalCdf::new(population.clone())?, &EmpiricalCdf::new(direct.clone())?);
    let mut summary = SummaryFragment::from_accumulator(&MomentAccumulator::from_samples(&population));
    summary.ks = Some(ks);
    summary.threshold = Some(FIXED_POINT_KS_MAX);
    let mut values = BTreeMap::new();
    values.insert("direct_variance".into(), MomentAccumulator::from_samples(&direct).variance());
    values.insert("limit_variance".into(), LIMIT_VARIANCE);
    report.records.push(NRecord { n: 0, delta: Some(delta), trials: config.trials, summary: Some(summary), values });
    report.checks.push(Check::at_most("two_sample_ks", None, ks, FIXED_POINT_KS_MAX));
    Ok(())
}

fn run_coupled(config: &ExperimentConfig, report: &mut ExperimentReport) -> Result<()> {
    let exact = ExactValues::new(config.max_n() as usize + 1);
    let tail = match config.tail_pool {
        None => TailCompletion::Fresh,
        Some(size) => {
            log::warn!("tail pool of {size} shared limit samples: trials are no longer independent");
            let d = config.delta.unwrap_or(FIXED_POINT_DELTA);
            // Pool draws use trial indices past every coupled trial.
            let pool_seed = MasterSeed(config.seed.0 ^ 0x9e37_79b9_7f4a_7c15);
            TailCompletion::Pool(limit_batch(pool_seed, size as u64, d, config.workers)?)
        }
    };

    let mut series: Vec<(u64, f64)> = vec![];
    for &n in &config.n_values {
        let delta = resolve_delta(n, config.delta, &exact);
        let batch = coupled_batch(config.seed, n, config.trials, delta, &exact, &tail, config.workers)?;
        let errors = MomentAccumulator::from_samples(batch.iter().map(|r| &r.error));
        let mut summary = SummaryFragment::from_accumulator(&errors);
        let mut values = BTreeMap::new();
        values.insert("sigma_sq".into(), exact.sigma_sq(n));
        let se = SE_MULTIPLIER;

        match config.subcommand {
            Experiment::VarianceProfile => {
                let tol = se * summary.variance_se + delta * LIMIT_VARIANCE;
                report.checks.push(Check::near("variance_matches_exact", Some(n), summary.variance, exact.sigma_sq(n), tol));
                report.checks.push(Check::near("mean_zero", Some(n), errors.mean, 0.0, se * errors.mean_se()));
            }
            Experiment::Clt => {
                let scaled: Vec<f64> = batch.iter().filter_map(|r| r.scaled).collect();
                let ks = ks_distance(&EmpiricalCdf::new(scaled)?, normal_cdf);
                let xs = MomentAccumulator::from_samples(batch.iter().map(|r| &r.x_n));
                let allowance = delta * LIMIT_VARIANCE / exact.sigma_sq(n);
                summary.ks = Some(ks);
                values.insert("x_n_variance".into(), xs.variance());
                values.insert("x_n_variance_se".into(), xs.variance_se()?);
                report.checks.push(Check::near("mean_zero", Some(n), errors.mean, 0.0, se * errors.mean_se()));
                report.checks.push(Check::near("x_n_unit_variance", Some(n), xs.variance(), 1.0, se * xs.variance_se()? + allowance));
                if n >= LARGE_N {
                    summary.threshold = Some(CLT_KS_MAX);
                    report.checks.push(Check::at_most("ks_to_normal", Some(n), ks, CLT_KS_MAX));
                    report.checks.push(Check::at_most("abs_skewness", Some(n), errors.skewness().abs(), CLT_SKEW_MAX));
                }
                series.push((n, ks));
            }
            Experiment::L3 => {
                let predicted = formulas::l3_prediction(n as f64)?;
                let ratio = errors.abs3() / predicted;
                values.insert("l3_prediction".into(), predicted);
                values.insert("ratio".into(), ratio);
                if n >= LARGE_N {
                    report.checks.push(Check::within("l3_ratio", Some(n), ratio, Some(L3_RATIO_MIN), Some(L3_RATIO_MAX)));
                }
                series.push((n, (ratio - 1.0).abs()));
            }
            Experiment::BnDecay => {
                let norm = lp_mean(batch.iter().filter_map(|r| r.b_n), 3);
                values.insert("b_l3".into(), norm);
                values.insert("b_l3_times_sqrt_log_n".into(), norm * (n as f64).ln().sqrt());
                series.push((n, norm));
            }
            Experiment::CoeffConvergence => {
                let e0 = lp_mean(batch.iter().filter_map(|r| r.a0_abs_err), 3);
                let e1 = lp_mean(batch.iter().filter_map(|r| r.a1_abs_err), 3);
                values.insert("a0_l3_error".into(), e0);
                values.insert("a1_l3_error".into(), e1);
                if n >= LARGE_N {
                    report.checks.push(Check::at_most("a0_l3_error", Some(n), e0, COEFF_L3_MAX));
                    report.checks.push(Check::at_most("a1_l3_error", Some(n), e1, COEFF_L3_MAX));
                }
                series.push((n, e0.max(e1)));
            }
            Experiment::CouplingAudit => {
                let worst = batch.iter().filter_map(|r| r.residual_max).fold(0.0, f64::max);
                let over = batch.iter().filter(|r| r.outcome.discarded_mass_sq > delta).count();
                values.insert("max_residual".into(), worst);
                if n >= 1 {
                    report.checks.push(Check::at_most("max_identity_residual", Some(n), worst, RESIDUAL_MAX));
                }
                report.checks.push(Check::at_most("discarded_mass_over_delta", Some(n), over as f64, 0.0));
                for r in &batch {
                    report.rows.push(Row::Json(serde_json::to_value(r)?));
                }
            }
            _ => unreachable!(),
        }
        report.records.push(NRecord { n, delta: Some(delta), trials: config.trials, summary: Some(summary), values });
    }

    series.sort_by_key(|&(n, _)| n);
    let seq: Vec<f64> = series.iter().map(|&(_, v)| v).collect();
    match config.subcommand {
        Experiment::Clt => report.checks.push(Check::at_most("ks_strictly_decreasing_violations", None, decrease_violations(&seq) as f64, 0.0)),
        Experiment::L3 => report.checks.push(Check::at_most("ratio_toward_one_violations", None, decrease_violations(&seq) as f64, 0.0)),
        Experiment::CoeffConvergence => report.checks.push(Check::at_most("l3_error_decreasing_violations", None, decrease_violations(&seq) as f64, 0.0)),
        Experiment::BnDecay => {
            report.checks.push(Check::at_most("b_l3_decreasing_violations", None, decrease_violations(&seq) as f64, 0.0));
            let scaled: Vec<f64> = series.iter().map(|&(n, v)| v * (n as f64).ln().sqrt()).collect();
            let hi = scaled.iter().copied().fold(f64::MIN, f64::max);
            let lo = scaled.iter().copied().fold(f64::MAX, f64::min);
            report.checks.push(Check::at_most("b_l3_sqrt_log_spread", None, hi / lo, BN_SPREAD_MAX));
        }
        _ => {}
    }
    Ok(())
}

fn header(config: &ExperimentConfig) -> serde_json::Value {
    json!({
        "seed": config.seed.0,
        "subcommand": config.subcommand,
        "n_values": config.n_values,
        "trials": config.trials,
        "delta": config.delta,
        "workers": config.workers,
        "version": env!("CARGO_PKG_VERSION"),
    })
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Flattens a JSON object's values into CSV fields, keys in sorted order.
fn json_to_csv(value: &serde_json::Value, with_keys: bool) -> Vec<String> {
    match value {
        serde_json::Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            keys.into_iter()
                .map(|k| {
                    if with_keys {
                        k.clone()
                    } else {
                        match &map[k] {
                            serde_json::Value::String(s) => s.clone(),
                            serde_json::Value::Null => String::new(),
                            v => v.to_string(),
                        }
                    }
                })
                .collect()
        }
        v => vec![v.to_string()],
    }
}

/// Writes the header line followed by the report rows.
pub fn write_rows<W: Write>(report: &ExperimentReport, format: OutputFormat, out: &mut W) -> Result<()> {
    let head = header(&report.config);
    match format {
        OutputFormat::Jsonl => writeln!(out, "{}", json!({ "header": head }))?,
        OutputFormat::Csv => writeln!(out, "# {}", head)?,
    }
    let mut csv_header_done = false;
    for row in &report.rows {
        match (row, format) {
            (Row::Json(v), OutputFormat::Jsonl) => writeln!(out, "{v}")?,
            (Row::Json(v), OutputFormat::Csv) => {
                if !csv_header_done {
                    writeln!(out, "{}", json_to_csv(v, true).join(","))?;
                    csv_header_done = true;
                }
                let fields: Vec<String> = json_to_csv(v, false).iter().map(|f| csv_escape(f)).collect();
                writeln!(out, "{}", fields.join(","))?;
            }
            (Row::Csv(fields), OutputFormat::Csv) => {
                let fields: Vec<String> = fields.iter().map(|f| csv_escape(f)).collect();
                writeln!(out, "{}", fields.join(","))?;
            }
            (Row::Csv(fields), OutputFormat::Jsonl) => writeln!(out, "{}", json!(fields))?,
        }
    }
    Ok(())
}
