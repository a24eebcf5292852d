//! Streaming moments and Kolmogorov–Smirnov distances.

use serde::Serialize;
use statrs::function::erf::erfc;
use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};

/// Single-pass count, mean and central moment sums up to order four, plus the
/// sum of `|x|^3` about zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct MomentAccumulator {
    pub count: u64,
    pub mean: f64,
    /// Sums of `(x - mean)^k` for k = 2, 3, 4.
    pub central_m2: f64,
    pub central_m3: f64,
    pub central_m4: f64,
    pub abs3_sum: f64,
}

impl MomentAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_samples<'a, I: IntoIterator<Item = &'a f64>>(xs: I) -> Self {
        let mut acc = Self::new();
        for &x in xs {
            acc.accumulate(x);
        }
        acc
    }

    pub fn accumulate(&mut self, x: f64) {
        let n1 = self.count as f64;
        self.count += 1;
        let n = self.count as f64;
        let delta = x - self.mean;
        let delta_n = delta / n;
        let delta_n2 = delta_n * delta_n;
        let term1 = delta * delta_n * n1;
        self.central_m4 += term1 * delta_n2 * (n * n - 3.0 * n + 3.0)
            + 6.0 * delta_n2 * self.central_m2
            - 4.0 * delta_n * self.central_m3;
        self.central_m3 += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * self.central_m2;
        self.central_m2 += term1;
        self.mean += delta_n;
        self.abs3_sum += x.abs().powi(3);
    }

    pub fn merge(&self, other: &Self) -> Self {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let d = other.mean - self.mean;
        let d2 = d * d;
        let m2 = self.central_m2 + other.central_m2 + d2 * na * nb / n;
        let m3 = self.central_m3
            + other.central_m3
            + d2 * d * na * nb * (na - nb) / (n * n)
            + 3.0 * d * (na * other.central_m2 - nb * self.central_m2) / n;
        let m4 = self.central_m4
            + other.central_m4
            + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * other.central_m2 + nb * nb * self.central_m2) / (n * n)
            + 4.0 * d * (na * other.central_m3 - nb * self.central_m3) / n;
        MomentAccumulator {
            count: self.count + other.count,
            mean: self.mean + d * nb / n,
            central_m2: m2,
            central_m3: m3,
            central_m4: m4,
            abs3_sum: self.abs3_sum + other.abs3_sum,
        }
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        (self.central_m2 / (self.count as f64 - 1.0)).max(0.0)
    }

    /// Standard error of the mean.
    pub fn mean_se(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }

    pub fn skewness(&self) -> f64 {
        let n = self.count as f64;
        n.sqrt() * self.central_m3 / self.central_m2.powf(1.5)
    }

    pub fn excess_kurtosis(&self) -> f64 {
        let n = self.count as f64;
        n * self.central_m4 / (self.central_m2 * self.central_m2) - 3.0
    }

    /// `(mean |x|^3)^{1/3}` about zero.
    pub fn abs3(&self) -> f64 {
        (self.abs3_sum / self.count as f64).cbrt()
    }

    /// Standard error of the sample variance, `sqrt((m4 - m2^2) / count)`
    /// from the plug-in central moments.
    pub fn variance_se(&self) -> Result<f64> {
        if self.count < 2 {
            return Err(Error::Config("variance_se needs at least two samples".into()));
        }
        let n = self.count as f64;
        let m2 = self.central_m2 / n;
        let m4 = self.central_m4 / n;
        Ok(((m4 - m2 * m2).max(0.0) / n).sqrt())
    }
}

/// `(sum |x|^3 / m)^{1/3}`, centred at zero.
pub fn abs_third_moment(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty);
    }
    let s: f64 = samples.iter().map(|x| x.abs().powi(3)).sum();
    Ok((s / samples.len() as f64).cbrt())
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Sorted sample.
#[derive(Clone, Debug)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(&bad) = samples.iter().find(|x| x.is_nan()) {
            return Err(crate::error::domain("sample", bad, "not NaN"));
        }
        samples.sort_by(f64::total_cmp);
        Ok(EmpiricalCdf { sorted: samples })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of the sample `<= x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }
}

/// `sup_x |F_m(x) - F(x)|` against a continuous reference.
pub fn ks_distance<F: Fn(f64) -> f64>(cdf: &EmpiricalCdf, reference: F) -> f64 {
    let m = cdf.len() as f64;
    cdf.sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = reference(x);
            ((i as f64 + 1.0) / m - f).abs().max((i as f64 / m - f).abs())
        })
        .fold(0.0, f64::max)
}

/// `sup_x |F_a(x) - F_b(x)|` by merging the two sorted samples.
pub fn ks_two_sample(a: &EmpiricalCdf, b: &EmpiricalCdf) -> f64 {
    let (xa, xb) = (&a.sorted, &b.sorted);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut best: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        best = best.max((i as f64 / na - j as f64 / nb).abs());
    }
    best
}

/// Report fragment for one batch.
#[derive(Clone, Debug, Serialize)]
pub struct SummaryFragment {
    pub count: u64,
    pub mean: f64,
    pub variance: f64,
    pub variance_se: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub abs3: f64,
    pub ks: Option<f64>,
    pub threshold: Option<f64>,
}

impl SummaryFragment {
    pub fn from_accumulator(acc: &MomentAccumulator) -> Self {
        SummaryFragment {
            count: acc.count,
            mean: acc.mean,
            variance: acc.variance(),
            variance_se: acc.variance_se().unwrap_or(f64::NAN),
            skewness: acc.skewness(),
            excess_kurtosis: acc.excess_kurtosis(),
            abs3: acc.abs3(),
            ks: None,
            threshold: None,
        }
    }
}
