//! Critical-parameter solvers: invert the scaling law at a target deviation
//! (zero by default) for one of `K`, `P` or `p`.

use num_rational::BigRational;

use super::{
    check_scaling_args, check_solver_channel, critical_edge_prob_unchecked, key_share_prob_exact,
    key_share_prob_f64, Arithmetic,
};
use crate::error::{Error, Result};
use crate::params::{check_key_params, check_ring_pool};

/// Solver outcome. An unreachable threshold is an answer, not an error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Solution<T> {
    Value(T),
    Infeasible,
}

impl<T> Solution<T> {
    pub fn value(self) -> Option<T> {
        match self {
            Solution::Value(v) => Some(v),
            Solution::Infeasible => None,
        }
    }
}

/// The edge probability a solver must reach:
/// `(ln n + (k-1) ln ln n + offset) / n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalTarget {
    pub n: usize,
    pub k: usize,
    pub offset: f64,
}

impl CriticalTarget {
    pub fn new(n: usize, k: usize) -> Self {
        CriticalTarget { n, k, offset: 0.0 }
    }

    pub fn with_offset(self, offset: f64) -> Self {
        CriticalTarget { offset, ..self }
    }

    pub fn threshold(&self) -> Result<f64> {
        check_scaling_args(self.n, self.k)?;
        if !self.offset.is_finite() {
            return Err(Error::invalid("alpha offset must be finite"));
        }
        Ok(critical_edge_prob_unchecked(self.n, self.k, self.offset))
    }
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

/// Whether `p * s(K, P, q) >= threshold`, evaluated in the given arithmetic.
/// In exact mode `p` and `threshold` are taken at their exact binary values.
pub fn meets_threshold(
    threshold: f64,
    ring_size: u64,
    pool_size: u64,
    q: u64,
    p: f64,
    mode: Arithmetic,
) -> Result<bool> {
    Ok(match mode {
        Arithmetic::Exact => {
            exact(p) * key_share_prob_exact(ring_size, pool_size, q)? >= exact(threshold)
        }
        Arithmetic::Float => p * key_share_prob_f64(ring_size, pool_size, q)? >= threshold,
    })
}

/// Smallest `K` in `[q, P]` whose edge probability reaches the target.
/// `s` is nondecreasing in `K`, so a galloping search followed by bisection
/// finds it while keeping the evaluated rings small.
pub fn critical_key_ring_size(
    target: &CriticalTarget,
    pool_size: u64,
    q: u64,
    p: f64,
    mode: Arithmetic,
) -> Result<Solution<u64>> {
    let threshold = target.threshold()?;
    check_solver_channel(p)?;
    if q == 0 || q > pool_size {
        return Err(Error::invalid(format!(
            "need 1 <= q <= P (got q={q}, P={pool_size})"
        )));
    }
    let meets = |ring: u64| meets_threshold(threshold, ring, pool_size, q, p, mode);

    if meets(q)? {
        return Ok(Solution::Value(q));
    }
    // Invariant: !meets(below) and meets(above).
    let mut below = q;
    let mut step = 1u64;
    let mut above = loop {
        let candidate = below.saturating_add(step).min(pool_size);
        if meets(candidate)? {
            break candidate;
        }
        if candidate == pool_size {
            return Ok(Solution::Infeasible);
        }
        below = candidate;
        step = step.saturating_mul(2);
    };
    while above - below > 1 {
        let mid = below + (above - below) / 2;
        if meets(mid)? {
            above = mid;
        } else {
            below = mid;
        }
    }
    Ok(Solution::Value(above))
}

/// Largest `P` in `[K, ceiling]` whose edge probability still reaches the
/// target. `s` is nonincreasing in `P` and largest at `P = K`.
pub fn critical_pool_size(
    target: &CriticalTarget,
    ring_size: u64,
    q: u64,
    p: f64,
    ceiling: u64,
    mode: Arithmetic,
) -> Result<Solution<u64>> {
    let threshold = target.threshold()?;
    check_solver_channel(p)?;
    check_key_params(ring_size, ring_size, q)?;
    if ceiling < ring_size {
        return Err(Error::invalid(format!(
            "pool search ceiling {ceiling} is below key ring size K={ring_size}"
        )));
    }
    let meets = |pool: u64| meets_threshold(threshold, ring_size, pool, q, p, mode);

    if !meets(ring_size)? {
        return Ok(Solution::Infeasible);
    }
    // Invariant: meets(good) and !meets(bad).
    let mut good = ring_size;
    let mut step = 1u64;
    let mut bad = loop {
        let candidate = good.saturating_add(step).min(ceiling);
        if candidate == good {
            return Ok(Solution::Value(good));
        }
        if !meets(candidate)? {
            break candidate;
        }
        if candidate == ceiling {
            return Ok(Solution::Value(ceiling));
        }
        good = candidate;
        step = step.saturating_mul(2);
    };
    while bad - good > 1 {
        let mid = good + (bad - good) / 2;
        if meets(mid)? {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(Solution::Value(good))
}

/// Smallest channel probability (on the `f64` grid) whose edge probability
/// reaches the target; infeasible when it would exceed 1. A target at or
/// below zero is met by `p = 0`.
pub fn critical_channel_prob(
    target: &CriticalTarget,
    ring_size: u64,
    pool_size: u64,
    q: u64,
    mode: Arithmetic,
) -> Result<Solution<f64>> {
    let threshold = target.threshold()?;
    check_key_params(ring_size, pool_size, q)?;
    check_ring_pool(ring_size, pool_size)?;
    if threshold <= 0.0 {
        return Ok(Solution::Value(0.0));
    }

    let s_float = key_share_prob_f64(ring_size, pool_size, q)?;
    let s_exact = match mode {
        Arithmetic::Exact => Some(key_share_prob_exact(ring_size, pool_size, q)?),
        Arithmetic::Float => None,
    };
    let threshold_exact = exact(threshold);
    let meets = |p: f64| match &s_exact {
        Some(s) => exact(p) * s >= threshold_exact,
        None => p * s_float >= threshold,
    };

    if s_float == 0.0 && s_exact.is_none() {
        return Ok(Solution::Infeasible);
    }
    let mut p = threshold / s_float;
    if !p.is_finite() || p > 2.0 {
        return Ok(Solution::Infeasible);
    }
    // The quotient can land an ulp or two either side of the boundary.
    while !meets(p) {
        p = p.next_up();
    }
    while p > 0.0 && meets(p.next_down()) {
        p = p.next_down();
    }
    if p > 1.0 {
        return Ok(Solution::Infeasible);
    }
    Ok(Solution::Value(p))
}
