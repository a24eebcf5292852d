//! Joint realization of `Y_n` and its almost-sure limit `Y` on one key sequence.
//!
//! The first `n` uniforms build a search tree, which fixes `K_n` and the tolls of
//! all occupied nodes. Every fringe slot is then grown further with fresh
//! uniforms, splitting intervals until they drop below the truncation threshold
//! `delta`. The accumulated tolls form a truncated version of the limit series;
//! what is cut off is a sum `sum_e phi_e Y_e` of independent copies of `Y` with
//! `sum_e phi_e^2 <= delta`.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::formulas::{cost_c_unchecked, ExactValues, LIMIT_VARIANCE};
use crate::rng::UniformSource;
use crate::tree::{RootSide, SearchTree};

/// Truncation threshold keeping the truncation error within 5% of `sigma(n)`.
pub fn default_delta(n: u64, exact: &ExactValues) -> f64 {
    let bound = 0.05 * exact.sigma(n) / 0.65;
    (bound * bound).min(1e-4)
}

/// L2 size of the part of `Y` dropped at threshold `delta`, at most.
pub fn truncation_error_bound(delta: f64) -> f64 {
    (LIMIT_VARIANCE * delta).sqrt()
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0) {
        return Err(domain("delta", delta, "delta > 0"));
    }
    Ok(())
}

/// Depth-first growth below an interval of the given length.
/// `stack` only ever holds pending right siblings along the current path.
fn extend_with_stack<S: UniformSource>(
    length: f64,
    stream: &mut S,
    delta: f64,
    stack: &mut Vec<f64>,
) -> (f64, f64) {
    let mut sum = 0.0;
    let mut discarded = 0.0;
    stack.clear();
    let mut current = Some(length);
    while let Some(phi) = current.or_else(|| stack.pop()) {
        if phi < delta {
            discarded += phi * phi;
            current = None;
            continue;
        }
        let split = stream.next_uniform();
        sum += phi * cost_c_unchecked(split);
        stack.push(phi * (1.0 - split));
        current = Some(phi * split);
    }
    (sum, discarded)
}

/// Grows the subtree below an interval of `length`, returning the partial toll
/// sum and `sum phi^2` over the abandoned intervals.
pub fn extend_and_truncate<S: UniformSource>(
    length: f64,
    stream: &mut S,
    delta: f64,
) -> Result<(f64, f64)> {
    check_delta(delta)?;
    if !(length > 0.0 && length <= 1.0) {
        return Err(domain("length", length, "0 < length <= 1"));
    }
    Ok(extend_with_stack(length, stream, delta, &mut Vec::new()))
}

/// One draw of the limit `Y`, truncated at `delta`.
pub fn sample_limit<S: UniformSource>(stream: &mut S, delta: f64) -> Result<f64> {
    extend_and_truncate(1.0, stream, delta).map(|(s, _)| s)
}

/// How the series below each fringe slot is completed.
#[derive(Clone, Debug, Default)]
pub enum TailCompletion {
    /// Fresh uniforms, split down to `delta`. Unbiased and independent across trials.
    #[default]
    Fresh,
    /// Attach `phi_e * Y_e` with `Y_e` drawn from a precomputed pool of limit
    /// samples. Much faster, but trials sharing a pool are correlated.
    Pool(Vec<f64>),
}

/// One sample path's joint realization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CouplingOutcome {
    pub n: u64,
    pub k_n: u64,
    pub y_n: f64,
    pub y_trunc: f64,
    pub y0_trunc: f64,
    pub y1_trunc: f64,
    pub u1: f64,
    pub i_n: u64,
    pub y_n0: f64,
    pub y_n1: f64,
    pub delta: f64,
    pub discarded_mass_sq: f64,
}

pub fn sample_coupled<S: UniformSource>(
    stream: &mut S,
    n: u64,
    delta: f64,
    exact: &ExactValues,
) -> Result<CouplingOutcome> {
    sample_coupled_with(stream, n, delta, exact, &TailCompletion::Fresh)
}

pub fn sample_coupled_with<S: UniformSource>(
    stream: &mut S,
    n: u64,
    delta: f64,
    exact: &ExactValues,
    tail: &TailCompletion,
) -> Result<CouplingOutcome> {
    check_delta(delta)?;
    if let TailCompletion::Pool(pool) = tail {
        if pool.is_empty() {
            return Err(Error::Empty);
        }
    }
    // The root is always realized; for n = 0 it is the first extension node.
    let mut tree = SearchTree::with_capacity(n.max(1) as usize);
    for _ in 0..n.max(1) {
        tree.insert_key(stream.next_uniform())?;
    }
    let u1 = tree.root_key().expect("tree has a root");

    let mut left = tree.toll_sum_left();
    let mut right = tree.toll_sum_right();
    let mut discarded = 0.0;
    let mut stack = Vec::new();
    for slot in tree.fringe() {
        let part = match tail {
            TailCompletion::Fresh => {
                let (s, d) = extend_with_stack(slot.length, stream, delta, &mut stack);
                discarded += d;
                s
            }
            TailCompletion::Pool(pool) => {
                let j = ((stream.next_uniform() * pool.len() as f64) as usize).min(pool.len() - 1);
                slot.length * pool[j]
            }
        };
        match slot.root_side {
            RootSide::Left => left += part,
            RootSide::Right => right += part,
            RootSide::IsRoot => unreachable!("non-empty tree has no root-level slot"),
        }
    }

    let (k_n, i_n, y_n, y_n0, y_n1) = if n == 0 {
        (0, 0, 0.0, 0.0, 0.0)
    } else {
        let k = tree.internal_path_length();
        let i = tree.left_count();
        let y = (k as f64 - exact.mean_kn(n)) / (n as f64 + 1.0);
        let y0 = (tree.left_ipl() as f64 - exact.mean_kn(i)) / (i as f64 + 1.0);
        let y1 = (tree.right_ipl() as f64 - exact.mean_kn(n - 1 - i)) / (n - i) as f64;
        (k, i, y, y0, y1)
    };

    Ok(CouplingOutcome {
        n,
        k_n,
        y_n,
        y_trunc: cost_c_unchecked(u1) + left + right,
        y0_trunc: left / u1,
        y1_trunc: right / (1.0 - u1),
        u1,
        i_n,
        y_n0,
        y_n1,
        delta,
        discarded_mass_sq: discarded,
    })
}

/// Residuals of the pathwise identities on one outcome; all vanish up to rounding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Residuals {
    /// `Y - (U_1 Y^(0) + (1 - U_1) Y^(1) + C(U_1))`
    pub rec_y: f64,
    /// `Y_n` minus its split into the two subtree counts plus `C_n(I_n + 1)`.
    pub rec_yn: f64,
    /// `Y_n - Y` minus its five-term expansion.
    pub rec_bifi: f64,
    /// `X_n - A_0 Z_0 - A_1 Z_1 - b`
    pub basic_eqn: f64,
}

impl Residuals {
    pub fn max_abs(&self) -> f64 {
        self.rec_y
            .abs()
            .max(self.rec_yn.abs())
            .max(self.rec_bifi.abs())
            .max(self.basic_eqn.abs())
    }
}

fn require_n(o: &CouplingOutcome) -> Result<()> {
    if o.n == 0 {
        return Err(domain("n", 0.0, "n >= 1"));
    }
    Ok(())
}

/// Weights `(I_n + 1)/(n + 1)` and `(n - I_n)/(n + 1)`.
fn split_weights(o: &CouplingOutcome) -> (f64, f64) {
    let m = o.n as f64 + 1.0;
    ((o.i_n as f64 + 1.0) / m, (o.n - o.i_n) as f64 / m)
}

fn toll_term(o: &CouplingOutcome, exact: &ExactValues) -> f64 {
    o.n as f64 / (o.n as f64 + 1.0) * exact.toll_cn_unchecked(o.n, o.i_n + 1)
}

/// `A_0^(n)` and `A_1^(n)`.
pub fn coefficients(o: &CouplingOutcome, exact: &ExactValues) -> Result<(f64, f64)> {
    require_n(o)?;
    let (w0, w1) = split_weights(o);
    let s = exact.sigma(o.n);
    Ok((
        w0 * exact.sigma(o.i_n) / s,
        w1 * exact.sigma(o.n - 1 - o.i_n) / s,
    ))
}

/// The perturbation term `b^(n)`, evaluated with the truncated subtree limits.
pub fn perturbation_b(o: &CouplingOutcome, exact: &ExactValues) -> Result<f64> {
    require_n(o)?;
    let s = exact.sigma(o.n);
    assert!(s > 0.0);
    let (w0, w1) = split_weights(o);
    let inner = (w0 - o.u1) * o.y0_trunc + (w1 - (1.0 - o.u1)) * o.y1_trunc + toll_term(o, exact)
        - cost_c_unchecked(o.u1);
    Ok(inner / s)
}

pub fn decomposition_residuals(o: &CouplingOutcome, exact: &ExactValues) -> Result<Residuals> {
    require_n(o)?;
    let (w0, w1) = split_weights(o);
    let c_u1 = cost_c_unchecked(o.u1);
    let toll = toll_term(o, exact);

    let rec_y = o.y_trunc - (o.u1 * o.y0_trunc + (1.0 - o.u1) * o.y1_trunc + c_u1);
    let rec_yn = o.y_n - (w0 * o.y_n0 + w1 * o.y_n1 + toll);
    let bifi_rhs = w0 * (o.y_n0 - o.y0_trunc)
        + w1 * (o.y_n1 - o.y1_trunc)
        + (w0 - o.u1) * o.y0_trunc
        + (w1 - (1.0 - o.u1)) * o.y1_trunc
        + toll
        - c_u1;
    let rec_bifi = (o.y_n - o.y_trunc) - bifi_rhs;

    let s = exact.sigma(o.n);
    let x_n = (o.y_n - o.y_trunc) / s;
    let z0 = (o.y_n0 - o.y0_trunc) / exact.sigma(o.i_n);
    let z1 = (o.y_n1 - o.y1_trunc) / exact.sigma(o.n - 1 - o.i_n);
    let (a0, a1) = coefficients(o, exact)?;
    let basic_eqn = x_n - a0 * z0 - a1 * z1 - perturbation_b(o, exact)?;

    Ok(Residuals {
        rec_y,
        rec_yn,
        rec_bifi,
        basic_eqn,
    })
}

/// Per-trial `|A_0 - sqrt(U_1)|^p` and `|A_1 - sqrt(1 - U_1)|^p`.
pub fn coefficient_error(o: &CouplingOutcome, exact: &ExactValues, p: u32) -> Result<(f64, f64)> {
    if !(1..=3).contains(&p) {
        return Err(domain("p", p as f64, "p in {1, 2, 3}"));
    }
    let (a0, a1) = coefficients(o, exact)?;
    let p = p as i32;
    Ok((
        (a0 - o.u1.sqrt()).abs().powi(p),
        (a1 - (1.0 - o.u1).sqrt()).abs().powi(p),
    ))
}

/// Gap in the one-step martingale identity of `Y_n` under the tree-shape
/// filtration: the next key falls into each of the `n + 1` fringe slots with
/// equal probability, so `E[K_{n+1} | shape] = K_n + EPL / (n + 1)`.
pub fn martingale_step_residual(tree: &SearchTree, exact: &ExactValues) -> f64 {
    let n = tree.len() as u64;
    let k = tree.internal_path_length() as f64;
    let epl = tree.external_path_length() as f64;
    let next = (k + epl / (n as f64 + 1.0) - exact.mean_kn(n + 1)) / (n as f64 + 2.0);
    next - (k - exact.mean_kn(n)) / (n as f64 + 1.0)
}

/// One step of the fixed-point map: `m` draws of `U y' + (1 - U) y'' + C(U)`
/// with `y', y''` resampled from `population`.
pub fn resample_fixed_point<S: UniformSource>(
    population: &[f64],
    stream: &mut S,
    m: usize,
) -> Result<Vec<f64>> {
    if m == 0 {
        return Ok(Vec::new());
    }
    if population.is_empty() {
        return Err(Error::Empty);
    }
    let len = population.len();
    let pick = |s: &mut S| population[((s.next_uniform() * len as f64) as usize).min(len - 1)];
    Ok((0..m)
        .map(|_| {
            let u = stream.next_uniform();
            let a = pick(stream);
            let b = pick(stream);
            u * a + (1.0 - u) * b + cost_c_unchecked(u)
        })
        .collect())
}
