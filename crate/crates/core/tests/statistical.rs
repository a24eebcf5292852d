//! Monte Carlo checks on the sampling layer. Tolerances are a few standard
//! errors; seeds are fixed so the outcomes are reproducible.

use quicksort_limit::coupling::{extend_and_truncate, sample_coupled, sample_limit};
use quicksort_limit::formulas::{ExactValues, LIMIT_VARIANCE};
use quicksort_limit::rng::{substream, MasterSeed};
use quicksort_limit::stats::MomentAccumulator;

const RUNS: u64 = 20_000;

#[test]
fn truncated_series_is_centred() {
    let mut acc = MomentAccumulator::new();
    for t in 0..RUNS {
        let (sum, _) = extend_and_truncate(1.0, &mut substream(MasterSeed(11), t), 1e-3).unwrap();
        acc.accumulate(sum);
    }
    assert!(acc.mean.abs() <= 4.0 * acc.mean_se(), "mean {} se {}", acc.mean, acc.mean_se());
}

#[test]
fn limit_samples_have_the_limit_variance() {
    let xs: Vec<f64> = (0..RUNS)
        .map(|t| sample_limit(&mut substream(MasterSeed(12), t), 1e-3).unwrap())
        .collect();
    let acc = MomentAccumulator::from_samples(&xs);
    let se = acc.variance_se().unwrap();
    // Truncation at 1e-3 removes at most ~1e-3 * LIMIT_VARIANCE of variance in expectation.
    assert!((acc.variance() - LIMIT_VARIANCE).abs() <= 4.0 * se + 1e-3, "var {} se {se}", acc.variance());
    assert!(acc.mean.abs() <= 4.0 * acc.mean_se());
}

#[test]
fn finer_truncation_changes_little() {
    // Streams are consumed depth first, so a finer cutoff reshuffles later
    // draws; the two runs are compared in distribution only.
    let runs = RUNS / 2;
    let coarse: Vec<f64> = (0..runs)
        .map(|t| sample_limit(&mut substream(MasterSeed(13), t), 1e-2).unwrap())
        .collect();
    let fine: Vec<f64> = (0..runs)
        .map(|t| sample_limit(&mut substream(MasterSeed(13), runs + t), 1e-4).unwrap())
        .collect();
    let (c, f) = (MomentAccumulator::from_samples(&coarse), MomentAccumulator::from_samples(&fine));
    let se = c.variance_se().unwrap().hypot(f.variance_se().unwrap());
    // The coarse cut loses at most about 1e-2 * LIMIT_VARIANCE of variance.
    assert!(
        (c.variance() - f.variance()).abs() <= 4.0 * se + 1e-2 * LIMIT_VARIANCE,
        "{} vs {} (se {se})",
        c.variance(),
        f.variance()
    );
    assert!(f.variance() >= c.variance() - 4.0 * se);
}

#[test]
fn left_size_is_binomial_given_root() {
    let n = 60u64;
    let exact = ExactValues::new(100);
    let mut z = MomentAccumulator::new();
    let mut bins = [(0.0f64, 0.0f64, 0u64); 5];
    for t in 0..RUNS {
        let o = sample_coupled(&mut substream(MasterSeed(14), t), n, 0.05, &exact).unwrap();
        let m = (n - 1) as f64;
        let p = o.u1;
        z.accumulate((o.i_n as f64 - m * p) / (m * p * (1.0 - p)).sqrt().max(1e-9));
        let b = ((p * 5.0) as usize).min(4);
        bins[b].0 += o.i_n as f64 / m;
        bins[b].1 += p;
        bins[b].2 += 1;
    }
    assert!(z.mean.abs() <= 4.0 * z.mean_se(), "z mean {}", z.mean);
    // Standardized binomial: unit variance, up to heavy tails near p = 0 or 1.
    assert!((z.variance() - 1.0).abs() < 0.1, "z var {}", z.variance());
    for (frac, p, count) in bins {
        let c = count as f64;
        // Per-bin spread of I/(n-1) is at most 0.5/sqrt(n-1) around p.
        assert!((frac / c - p / c).abs() <= 4.0 * 0.5 / ((n - 1) as f64 * c).sqrt(), "bin {}", p / c);
    }
}
