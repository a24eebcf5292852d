//! Ground-truth comparison counts by running first-element-pivot Quicksort.
//!
//! Partitioning keeps the relative order of the elements in both sublists, and
//! every non-pivot element costs exactly one comparison per pass.

use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub const MAX_ENUMERATION: usize = 10;

fn check_distinct<T: PartialOrd + Copy>(items: &[T]) -> Result<()> {
    let mut sorted = items.to_vec();
    let mut bad = false;
    sorted.sort_by(|a, b| {
        a.partial_cmp(b).unwrap_or_else(|| {
            bad = true;
            std::cmp::Ordering::Equal
        })
    });
    if bad || sorted.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::DuplicateKey);
    }
    Ok(())
}

/// Splits `items` around its first element, preserving order within both parts.
pub fn partition<T: PartialOrd + Copy>(items: &[T]) -> Result<(T, Vec<T>, Vec<T>)> {
    let (&pivot, rest) = items.split_first().ok_or(Error::Empty)?;
    check_distinct(items)?;
    let (lower, upper) = rest.iter().partition(|&&x| x <= pivot);
    Ok((pivot, lower, upper))
}

/// Number of key comparisons Quicksort spends on `items`.
pub fn quicksort_comparisons<T: PartialOrd + Copy>(items: &[T]) -> Result<u64> {
    check_distinct(items)?;
    let mut buf = items.to_vec();
    let mut scratch = Vec::with_capacity(buf.len());
    Ok(count_unchecked(&mut buf, &mut scratch))
}

/// Sorts `buf` in place by Quicksort and returns the comparison count.
/// Iterative over an explicit range stack so sorted inputs cannot blow the call stack.
fn count_unchecked<T: PartialOrd + Copy>(buf: &mut [T], scratch: &mut Vec<T>) -> u64 {
    let mut total = 0u64;
    let mut ranges = vec![(0usize, buf.len())];
    while let Some((lo, hi)) = ranges.pop() {
        let len = hi - lo;
        if len < 2 {
            continue;
        }
        total += (len - 1) as u64;
        let pivot = buf[lo];
        scratch.clear();
        scratch.extend(buf[lo + 1..hi].iter().copied().filter(|&x| x <= pivot));
        let n_lower = scratch.len();
        scratch.extend(buf[lo + 1..hi].iter().copied().filter(|&x| x > pivot));
        buf[lo..lo + n_lower].copy_from_slice(&scratch[..n_lower]);
        buf[lo + n_lower] = pivot;
        buf[lo + n_lower + 1..hi].copy_from_slice(&scratch[n_lower..]);
        ranges.push((lo, lo + n_lower));
        ranges.push((lo + n_lower + 1, hi));
    }
    total
}

/// Exact law of `K_n` over all `n!` rank permutations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactDistribution {
    pub n: usize,
    pub counts: BTreeMap<u64, u64>,
}

impl ExactDistribution {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// `sum_k k * counts[k] / n!`
    pub fn exact_mean(&self) -> BigRational {
        let num: u64 = self.counts.iter().map(|(k, c)| k * c).sum();
        BigRational::new(BigInt::from(num), BigInt::from(self.total()))
    }
}

/// Enumerates every permutation of `1..=n` (Heap's algorithm) and tallies the
/// comparison counts.
pub fn enumerate_exact(n: usize) -> Result<ExactDistribution> {
    if !(1..=MAX_ENUMERATION).contains(&n) {
        return Err(Error::EnumerationRange(n));
    }
    let mut perm: Vec<u8> = (1..=n as u8).collect();
    let mut work = perm.clone();
    let mut scratch = Vec::with_capacity(n);
    let mut counts = BTreeMap::new();
    let mut tally = |p: &[u8]| {
        work.copy_from_slice(p);
        *counts.entry(count_unchecked(&mut work, &mut scratch)).or_insert(0u64) += 1;
    };

    tally(&perm);
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            tally(&perm);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(ExactDistribution { n, counts })
}
