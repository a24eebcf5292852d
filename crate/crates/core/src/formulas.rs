//! Closed-form quantities for the normalized Quicksort comparison count.
//!
//! Notation: `mu(n)` is the mean number of comparisons on `n` keys,
//! `sigma_sq(n)` the exact variance of `Y_n - Y`, and `cost_c` the toll
//! function of the limit's fixed-point equation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `pi^2 / 6`
pub const ZETA2: f64 = PI * PI / 6.0;

/// `Var(Y) = 7 - 2 pi^2 / 3`, the exact variance at `n = 0`.
pub const LIMIT_VARIANCE: f64 = 7.0 - 2.0 * PI * PI / 3.0;

/// Past this index harmonic numbers switch to their asymptotic expansion.
pub const DEFAULT_TABLE_MAX: usize = 1_000_000;

const TAIL_EXPLICIT_TERMS: u64 = 10_000;

/// Neumaier compensated sum.
#[derive(Clone, Copy, Debug, Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

fn harmonic_asymptotic(n: u64) -> f64 {
    let x = n as f64;
    let x2 = x * x;
    x.ln() + EULER_GAMMA + 0.5 / x - 1.0 / (12.0 * x2) + 1.0 / (120.0 * x2 * x2)
}

/// `H_n`, with `H_0 = 0`.
pub fn harmonic(n: u64) -> f64 {
    if n as usize > DEFAULT_TABLE_MAX {
        return harmonic_asymptotic(n);
    }
    let mut acc = CompensatedSum::default();
    for k in 1..=n {
        acc.add(1.0 / k as f64);
    }
    acc.value()
}

/// `H_n^{(2)} = sum_{k<=n} 1/k^2`.
pub fn harmonic2(n: u64) -> f64 {
    if n as usize > DEFAULT_TABLE_MAX {
        return ZETA2 - zeta2_tail(n);
    }
    let mut acc = CompensatedSum::default();
    for k in 1..=n {
        let k = k as f64;
        acc.add(1.0 / (k * k));
    }
    acc.value()
}

/// `sum_{k > n} 1/k^2`: ten thousand explicit terms summed from the small end,
/// then the Euler–Maclaurin remainder.
pub fn zeta2_tail(n: u64) -> f64 {
    let m = (n + TAIL_EXPLICIT_TERMS) as f64;
    let mut acc = CompensatedSum::default();
    acc.add(1.0 / m - 1.0 / (2.0 * m * m) + 1.0 / (6.0 * m * m * m) - 1.0 / (30.0 * m.powi(5)));
    for k in (n + 1..=n + TAIL_EXPLICIT_TERMS).rev() {
        let k = k as f64;
        acc.add(1.0 / (k * k));
    }
    acc.value()
}

/// `mu(n) = E[K_n] = 2(n+1)H_n - 4n`.
pub fn mean_kn(n: u64) -> f64 {
    2.0 * (n as f64 + 1.0) * harmonic(n) - 4.0 * n as f64
}

/// `mu(n)` as an exact rational.
pub fn mean_kn_exact(n: u64) -> BigRational {
    let mut h = BigRational::zero();
    for k in 1..=n {
        h += BigRational::new(BigInt::one(), BigInt::from(k));
    }
    BigRational::from_integer(BigInt::from(2 * (n + 1))) * h
        - BigRational::from_integer(BigInt::from(4 * n))
}

/// Toll function `C(x) = 1 + 2x log x + 2(1-x) log(1-x)` with `0 log 0 = 0`.
#[inline]
pub fn cost_c_unchecked(x: f64) -> f64 {
    let a = if x > 0.0 { x * x.ln() } else { 0.0 };
    let y = 1.0 - x;
    let b = if y > 0.0 { y * (-x).ln_1p() } else { 0.0 };
    1.0 + 2.0 * (a + b)
}

/// [`cost_c_unchecked`] with the domain `[0, 1]` enforced.
pub fn cost_c(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(domain("x", x, "0 <= x <= 1"));
    }
    Ok(cost_c_unchecked(x))
}

fn sigma_sq_from(n: u64, h: f64, tail: f64) -> f64 {
    let m = n as f64 + 1.0;
    let v = (2.0 * h + 1.0 + 6.0 / m) / m - 4.0 * tail;
    assert!(v > 0.0, "sigma^2({n}) = {v} is not positive");
    v
}

/// Exact `Var(Y_n - Y)`.
pub fn sigma_sq(n: u64) -> f64 {
    sigma_sq_from(n, harmonic(n), zeta2_tail(n))
}

pub fn sigma(n: u64) -> f64 {
    sigma_sq(n).sqrt()
}

/// `sqrt(n / (2 log n))`, the normalization in the central limit theorem.
pub fn clt_scale(n: f64) -> Result<f64> {
    if !(n >= 2.0) {
        return Err(domain("n", n, "n >= 2"));
    }
    Ok((n / (2.0 * n.ln())).sqrt())
}

/// Predicted `||Y_n - Y||_3 ~ 2 pi^{-1/6} sqrt(log n / n)`.
pub fn l3_prediction(n: f64) -> Result<f64> {
    if !(n >= 2.0) {
        return Err(domain("n", n, "n >= 2"));
    }
    Ok(2.0 * PI.powf(-1.0 / 6.0) * (n.ln() / n).sqrt())
}

/// Memoized evaluator. Tables run up to `n_max`; indices past it fall back to
/// the direct functions above.
#[derive(Clone, Debug)]
pub struct ExactValues {
    harmonic: Vec<f64>,
    harmonic2: Vec<f64>,
    tail: Vec<f64>,
    sigma: Vec<f64>,
}

impl Default for ExactValues {
    fn default() -> Self {
        Self::new(DEFAULT_TABLE_MAX)
    }
}

impl ExactValues {
    pub fn new(n_max: usize) -> Self {
        let n_max = n_max.min(DEFAULT_TABLE_MAX);
        let mut harmonic = Vec::with_capacity(n_max + 1);
        let mut harmonic2 = Vec::with_capacity(n_max + 1);
        let (mut h, mut h2) = (CompensatedSum::default(), CompensatedSum::default());
        harmonic.push(0.0);
        harmonic2.push(0.0);
        for k in 1..=n_max {
            let x = k as f64;
            h.add(1.0 / x);
            h2.add(1.0 / (x * x));
            harmonic.push(h.value());
            harmonic2.push(h2.value());
        }

        let mut tail = vec![0.0; n_max + 1];
        let mut t = CompensatedSum::default();
        t.add(zeta2_tail(n_max as u64));
        tail[n_max] = t.value();
        for k in (0..n_max).rev() {
            let x = (k + 1) as f64;
            t.add(1.0 / (x * x));
            tail[k] = t.value();
        }

        let sigma = (0..=n_max)
            .map(|k| sigma_sq_from(k as u64, harmonic[k], tail[k]).sqrt())
            .collect();

        ExactValues {
            harmonic,
            harmonic2,
            tail,
            sigma,
        }
    }

    pub fn n_max(&self) -> usize {
        self.harmonic.len() - 1
    }

    pub fn harmonic(&self, n: u64) -> f64 {
        match self.harmonic.get(n as usize) {
            Some(&h) => h,
            None => harmonic(n),
        }
    }

    pub fn harmonic2(&self, n: u64) -> f64 {
        match self.harmonic2.get(n as usize) {
            Some(&h) => h,
            None => harmonic2(n),
        }
    }

    pub fn zeta2_tail(&self, n: u64) -> f64 {
        match self.tail.get(n as usize) {
            Some(&t) => t,
            None => zeta2_tail(n),
        }
    }

    pub fn mean_kn(&self, n: u64) -> f64 {
        2.0 * (n as f64 + 1.0) * self.harmonic(n) - 4.0 * n as f64
    }

    pub fn sigma_sq(&self, n: u64) -> f64 {
        match self.sigma.get(n as usize) {
            Some(&s) => s * s,
            None => sigma_sq_from(n, self.harmonic(n), self.zeta2_tail(n)),
        }
    }

    pub fn sigma(&self, n: u64) -> f64 {
        match self.sigma.get(n as usize) {
            Some(&s) => s,
            None => self.sigma_sq(n).sqrt(),
        }
    }

    /// `C_n(i) = (mu(i-1) + mu(n-i) - mu(n) + n - 1) / n` for `1 <= i <= n`.
    pub fn toll_cn(&self, n: u64, i: u64) -> Result<f64> {
        if n == 0 || i == 0 || i > n {
            return Err(domain("i", i as f64, "1 <= i <= n"));
        }
        Ok(self.toll_cn_unchecked(n, i))
    }

    #[inline]
    pub(crate) fn toll_cn_unchecked(&self, n: u64, i: u64) -> f64 {
        (self.mean_kn(i - 1) + self.mean_kn(n - i) - self.mean_kn(n) + n as f64 - 1.0) / n as f64
    }

    pub fn cost_c(&self, x: f64) -> Result<f64> {
        cost_c(x)
    }

    pub fn clt_scale(&self, n: u64) -> Result<f64> {
        clt_scale(n as f64)
    }

    pub fn l3_prediction(&self, n: u64) -> Result<f64> {
        l3_prediction(n as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Five-point Gauss–Legendre on a uniform partition of [0, 1], refined
    /// geometrically near the endpoints where `x log x` is not smooth.
    fn integrate_cost_c() -> f64 {
        const NODES: [f64; 5] = [
            0.0,
            -0.538_469_310_105_683_1,
            0.538_469_310_105_683_1,
            -0.906_179_845_938_664,
            0.906_179_845_938_664,
        ];
        const WEIGHTS: [f64; 5] = [
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_5,
            0.478_628_670_499_366_5,
            0.236_926_885_056_189_1,
            0.236_926_885_056_189_1,
        ];
        let mut edges = vec![0.0];
        let mut x: f64 = 1e-40;
        while x < 0.5 {
            edges.push(x);
            x *= 2.0;
        }
        edges.push(0.5);
        let mut right: Vec<f64> = edges.iter().rev().map(|e| 1.0 - e).collect();
        right.remove(0);
        edges.extend(right);
        let mut total = 0.0;
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            for (t, wt) in NODES.iter().zip(WEIGHTS) {
                total += wt * half * cost_c_unchecked(mid + half * t);
            }
        }
        total
    }

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic(0), 0.0);
        assert_eq!(harmonic(1), 1.0);
        assert_relative_eq!(harmonic(3), 11.0 / 6.0, max_relative = 1e-15);
        assert_eq!(harmonic2(2), 1.25);
    }

    #[test]
    fn asymptotic_harmonic_meets_the_summed_one() {
        let n = DEFAULT_TABLE_MAX as u64;
        assert_relative_eq!(harmonic_asymptotic(n), harmonic(n), max_relative = 1e-14);
    }

    #[test]
    fn zeta_tail_values() {
        assert_relative_eq!(zeta2_tail(0), ZETA2, max_relative = 1e-14);
        assert_relative_eq!(zeta2_tail(1), ZETA2 - 1.0, max_relative = 1e-13);
        let n = 1e6;
        let expect = 1.0 / n - 1.0 / (2.0 * n * n) + 1.0 / (6.0 * n * n * n);
        assert_relative_eq!(zeta2_tail(1_000_000), expect, max_relative = 1e-12);
    }

    #[test]
    fn mean_small_values() {
        assert_eq!(mean_kn(0), 0.0);
        assert_eq!(mean_kn(1), 0.0);
        assert_relative_eq!(mean_kn(2), 1.0, epsilon = 1e-14);
        assert_relative_eq!(mean_kn(3), 8.0 / 3.0, epsilon = 1e-14);
        assert_eq!(mean_kn_exact(3), BigRational::new(8.into(), 3.into()));
        assert_eq!(mean_kn_exact(1), BigRational::zero());
    }

    #[test]
    fn mean_recurrences() {
        let ev = ExactValues::new(2000);
        for n in 0..=1000u64 {
            let lhs = (n as f64 + 1.0) * ev.mean_kn(n + 1);
            let rhs = (n as f64 + 2.0) * ev.mean_kn(n) + 2.0 * n as f64;
            assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0), "n = {n}");
        }
        for n in 1..=1000u64 {
            let s: f64 = (1..=n).map(|i| ev.mean_kn(i - 1) + ev.mean_kn(n - i)).sum();
            let rhs = n as f64 - 1.0 + s / n as f64;
            assert!((ev.mean_kn(n) - rhs).abs() <= 1e-9 * rhs.abs().max(1.0), "n = {n}");
        }
    }

    #[test]
    fn cost_c_values() {
        assert_eq!(cost_c(0.0).unwrap(), 1.0);
        assert_eq!(cost_c(1.0).unwrap(), 1.0);
        assert_relative_eq!(cost_c(0.5).unwrap(), 1.0 - 2.0 * 2f64.ln(), max_relative = 1e-15);
        assert!(cost_c(-0.1).is_err());
        assert!(cost_c(1.5).is_err());
        assert!(cost_c(f64::NAN).is_err());
    }

    #[test]
    fn cost_c_integrates_to_zero() {
        assert!(integrate_cost_c().abs() <= 1e-10, "{}", integrate_cost_c());
    }

    #[test]
    fn toll_cn_values() {
        let ev = ExactValues::new(200);
        assert!(ev.toll_cn(2, 1).unwrap().abs() < 1e-14);
        assert_relative_eq!(ev.toll_cn(3, 2).unwrap(), -2.0 / 9.0, epsilon = 1e-14);
        assert!(ev.toll_cn(3, 0).is_err());
        assert!(ev.toll_cn(3, 4).is_err());
        for n in 1..=100u64 {
            let avg: f64 = (1..=n).map(|i| ev.toll_cn(n, i).unwrap()).sum::<f64>() / n as f64;
            assert!(avg.abs() <= 1e-12, "n = {n}: {avg}");
        }
    }

    #[test]
    fn sigma_values() {
        assert_relative_eq!(sigma_sq(0), LIMIT_VARIANCE, max_relative = 1e-13);
        assert_relative_eq!(sigma_sq(0), 0.420_263_732_607, epsilon = 1e-11);
        assert_relative_eq!(sigma_sq(1), sigma_sq(0), max_relative = 1e-12);
        for n in [1_000u64, 10_000, 100_000, 1_000_000] {
            let x = n as f64;
            let gap = x * sigma_sq(n) - (2.0 * x.ln() + 2.0 * EULER_GAMMA - 3.0);
            assert!(gap.abs() <= 0.05, "n = {n}: {gap}");
        }
    }

    #[test]
    fn scales() {
        assert_relative_eq!(clt_scale(1e4).unwrap(), 23.300, epsilon = 5e-4);
        let e2 = std::f64::consts::E.powi(2);
        assert_relative_eq!(clt_scale(e2).unwrap(), (e2 / 4.0).sqrt(), max_relative = 1e-15);
        let norm3 = (2.0 * (2.0 / PI).sqrt()).powf(1.0 / 3.0);
        for n in [2.0, 10.0, 1e4, 1e9] {
            let direct = (2.0 * f64::ln(n) / n).sqrt() * norm3;
            assert_relative_eq!(l3_prediction(n).unwrap(), direct, max_relative = 1e-12);
        }
        assert!(clt_scale(1.0).is_err());
        assert!(l3_prediction(1.5).is_err());
    }

    #[test]
    fn memoized_matches_direct() {
        let ev = ExactValues::default();
        for n in [0u64, 1, 2, 17, 999, 65_536, 500_000, 1_000_000, 2_000_000] {
            assert_relative_eq!(ev.harmonic(n), harmonic(n), max_relative = 1e-14);
            assert_relative_eq!(ev.harmonic2(n), harmonic2(n), max_relative = 1e-14);
            assert_relative_eq!(ev.zeta2_tail(n), zeta2_tail(n), max_relative = 1e-14);
            assert_relative_eq!(ev.sigma_sq(n), sigma_sq(n), max_relative = 1e-12);
        }
    }
}
