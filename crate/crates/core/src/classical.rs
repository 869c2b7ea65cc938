//! Classical OR with a one-sided noisy oracle: a query on a 1 reports 1
//! with probability `α` and a query on a 0 always reports 0.

use alloc::vec::Vec;

use core::f64::consts::LN_10;
use num_rational::Ratio;
use num_traits::{CheckedDiv, CheckedMul};
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::error::{out_of_range, Result};
use crate::oracle::classical_noisy_query;
use crate::rng::{from_seed, substream};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalNoisyConfig {
    pub n: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl ClassicalNoisyConfig {
    pub fn new(n: usize, alpha: f64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(out_of_range("n", "must be at least 1"));
        }
        check_alpha(alpha)?;
        Ok(Self { n, alpha, seed })
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(out_of_range("alpha", alloc::format!("{alpha} is not in (0, 1]")));
    }
    Ok(())
}

/// Queries per index, `⌈ln 10 / α⌉`, so a single 1 is missed with
/// probability `(1−α)^reps ≤ 1/10`.
pub fn repetitions(alpha: f64) -> Result<u64> {
    check_alpha(alpha)?;
    Ok((LN_10 / alpha).ceil() as u64)
}

/// Queries every index [`repetitions`] times and answers 1 at the first
/// observed 1. Returns the answer and the number of queries made.
pub fn noisy_or_upper_with<R: Rng + ?Sized>(x: &[bool], alpha: f64, rng: &mut R) -> Result<(bool, u64)> {
    let reps = repetitions(alpha)?;
    let mut queries = 0;
    for i in 0..x.len() {
        for _ in 0..reps {
            queries += 1;
            if classical_noisy_query(x, i, alpha, rng)? {
                return Ok((true, queries));
            }
        }
    }
    Ok((false, queries))
}

pub fn noisy_or_upper(x: &[bool], alpha: f64, seed: u64) -> Result<(bool, u64)> {
    noisy_or_upper_with(x, alpha, &mut from_seed(seed))
}

/// One trial of the lower-bound experiment: a uniformly random weight-1
/// input of length `n`, indices `0..T` queried once each. True when every
/// answer is 0.
pub fn lower_bound_trial<R: Rng + ?Sized>(n: usize, alpha: f64, queries: usize, rng: &mut R) -> Result<bool> {
    let marked = rng.random_range(0..n);
    let mut x = Vec::new();
    x.resize(n, false);
    x[marked] = true;
    for i in 0..queries {
        if classical_noisy_query(&x, i, alpha, rng)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `1 − αT/n`, which is also the exact all-zero probability.
pub fn analytic_bound(n: usize, alpha: f64, queries: usize) -> f64 {
    1.0 - alpha * queries as f64 / n as f64
}

/// `Π_{k=1}^{T} (1 − α/(n−k+1))`. Equals the all-zero probability
/// `1 − αT/n` at `α = 1` and lies below it otherwise.
pub fn product_formula(n: usize, alpha: f64, queries: usize) -> f64 {
    (1..=queries).map(|k| 1.0 - alpha / (n - k + 1) as f64).product()
}

/// [`product_formula`] in exact arithmetic for `α = num/den`; `None` on
/// overflow.
pub fn product_formula_exact(n: usize, alpha: Ratio<i128>, queries: usize) -> Option<Ratio<i128>> {
    let one = Ratio::from_integer(1);
    (1..=queries).try_fold(one, |acc: Ratio<i128>, k| {
        let factor = one - alpha.checked_div(&Ratio::from_integer((n - k + 1) as i128))?;
        acc.checked_mul(&factor)
    })
}

/// `(1 − α/n)^T` exactly; `None` on overflow.
pub fn power_bound_exact(n: usize, alpha: Ratio<i128>, queries: usize) -> Option<Ratio<i128>> {
    let one = Ratio::from_integer(1);
    let base = one - alpha.checked_div(&Ratio::from_integer(n as i128))?;
    (0..queries).try_fold(one, |acc: Ratio<i128>, _| acc.checked_mul(&base))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundResult {
    pub empirical_all_zero: f64,
    pub analytic_bound: f64,
    pub product: f64,
}

/// Empirical probability that `T` distinct queries all return 0, with the
/// analytic bound `1 − αT/n` and the product formula.
pub fn noisy_or_lower_experiment(n: usize, alpha: f64, queries: usize, trials: u64, seed: u64) -> Result<LowerBoundResult> {
    ClassicalNoisyConfig::new(n, alpha, seed)?;
    if queries > n {
        return Err(out_of_range("T", alloc::format!("{queries} exceeds n = {n}")));
    }
    if trials == 0 {
        return Err(crate::error::Error::EmptySamples);
    }
    let mut zeros = 0u64;
    for i in 0..trials {
        zeros += u64::from(lower_bound_trial(n, alpha, queries, &mut substream(seed, i))?);
    }
    Ok(LowerBoundResult {
        empirical_all_zero: zeros as f64 / trials as f64,
        analytic_bound: analytic_bound(n, alpha, queries),
        product: product_formula(n, alpha, queries),
    })
}
