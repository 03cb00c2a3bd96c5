//! Link probabilities of the q-composite model.
//!
//! Two rings of `K` keys drawn uniformly from a pool of `P` overlap in `u`
//! keys with hypergeometric probability `C(K,u) C(P-K,K-u) / C(P,K)`. The
//! key-sharing probability `s` is the tail of that distribution from `q`
//! upward, and the secure-link probability is `t = p * s`.
//!
//! Every quantity has two backends, chosen explicitly by the caller:
//! exact big rationals ([`Arithmetic::Exact`]) and log-space floating point
//! ([`Arithmetic::Float`]).

mod binomial;
mod solver;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::params::{check_channel_prob, check_key_params, check_ring_pool, ModelParams};

pub use binomial::{choose_exact, ln_choose, parse_rational};
pub use solver::{
    critical_channel_prob, critical_key_ring_size, critical_pool_size, meets_threshold,
    CriticalTarget, Solution,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Arithmetic {
    #[default]
    Exact,
    Float,
}

/// A probability computed by one of the two backends.
#[derive(Clone, Debug, PartialEq)]
pub enum Prob {
    Exact(BigRational),
    Float(f64),
}

impl Prob {
    pub fn to_f64(&self) -> f64 {
        match self {
            Prob::Exact(r) => rational_to_f64(r),
            Prob::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Prob::Exact(r) => Some(r),
            Prob::Float(_) => None,
        }
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prob::Exact(r) => write!(f, "{r}"),
            Prob::Float(x) => write!(f, "{x}"),
        }
    }
}

/// Converts a rational to the nearest-ish `f64`, including values whose
/// numerator and denominator individually overflow `f64`.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(x) = r.to_f64() {
        if x.is_finite() && (x != 0.0 || r.is_zero()) {
            return x;
        }
    }
    // Fall back to scaling both parts down to 64 significant bits.
    let (numer, denom) = (r.numer(), r.denom());
    let nb = numer.bits() as i64;
    let db = denom.bits() as i64;
    let ns = (nb - 64).max(0);
    let ds = (db - 64).max(0);
    let n = (numer >> ns as usize).to_f64().unwrap_or(0.0);
    let d = (denom >> ds as usize).to_f64().unwrap_or(1.0);
    n / d * 2f64.powi((ns - ds) as i32)
}

fn check_overlap_args(ring_size: u64, pool_size: u64, overlap: u64) -> Result<()> {
    check_ring_pool(ring_size, pool_size)?;
    if overlap > ring_size {
        return Err(Error::invalid(format!(
            "overlap u={overlap} exceeds key ring size K={ring_size}"
        )));
    }
    Ok(())
}

/// Smallest overlap two K-subsets of a P-pool can have.
fn min_overlap(ring_size: u64, pool_size: u64) -> u64 {
    (2 * ring_size).saturating_sub(pool_size)
}

/// Probability that two independent uniform `K`-subsets of a `P`-pool share
/// exactly `u` keys. Zero outside the support `[max(0, 2K-P), K]`.
pub fn overlap_pmf(ring_size: u64, pool_size: u64, overlap: u64, mode: Arithmetic) -> Result<Prob> {
    Ok(match mode {
        Arithmetic::Exact => Prob::Exact(overlap_pmf_exact(ring_size, pool_size, overlap)?),
        Arithmetic::Float => Prob::Float(overlap_pmf_f64(ring_size, pool_size, overlap)?),
    })
}

pub fn overlap_pmf_exact(ring_size: u64, pool_size: u64, overlap: u64) -> Result<BigRational> {
    check_overlap_args(ring_size, pool_size, overlap)?;
    Ok(binomial::ratio(
        overlap_count(ring_size, pool_size, overlap),
        choose_exact(pool_size, ring_size),
    ))
}

pub fn overlap_pmf_f64(ring_size: u64, pool_size: u64, overlap: u64) -> Result<f64> {
    check_overlap_args(ring_size, pool_size, overlap)?;
    Ok(pmf_f64_unchecked(ring_size, pool_size, overlap))
}

/// Number of K-subsets meeting a fixed K-subset in exactly `u` keys.
fn overlap_count(ring_size: u64, pool_size: u64, overlap: u64) -> BigUint {
    if overlap < min_overlap(ring_size, pool_size) {
        return BigUint::zero();
    }
    choose_exact(ring_size, overlap) * choose_exact(pool_size - ring_size, ring_size - overlap)
}

fn pmf_f64_unchecked(ring_size: u64, pool_size: u64, overlap: u64) -> f64 {
    if overlap < min_overlap(ring_size, pool_size) {
        return 0.0;
    }
    (ln_choose(ring_size, overlap) + ln_choose(pool_size - ring_size, ring_size - overlap)
        - ln_choose(pool_size, ring_size))
    .exp()
}

/// `pmf(u + 1) / pmf(u)` for `u` inside the support and below `K`.
fn pmf_step(ring_size: u64, pool_size: u64, overlap: u64) -> f64 {
    let left = (ring_size - overlap) as f64;
    let spare = (pool_size + overlap + 1 - 2 * ring_size) as f64;
    left * left / ((overlap + 1) as f64 * spare)
}

/// Key-sharing probability `s(K, P, q)`: the chance that two rings share at
/// least `q` keys.
pub fn key_share_prob(ring_size: u64, pool_size: u64, q: u64, mode: Arithmetic) -> Result<Prob> {
    Ok(match mode {
        Arithmetic::Exact => Prob::Exact(key_share_prob_exact(ring_size, pool_size, q)?),
        Arithmetic::Float => Prob::Float(key_share_prob_f64(ring_size, pool_size, q)?),
    })
}

pub fn key_share_prob_exact(ring_size: u64, pool_size: u64, q: u64) -> Result<BigRational> {
    check_key_params(ring_size, pool_size, q)?;
    let total = choose_exact(pool_size, ring_size);
    let count = |u: u64| overlap_count(ring_size, pool_size, u);
    // Sum whichever side of the distribution has fewer terms.
    let numer = if q <= ring_size - q + 1 {
        let below: BigUint = (0..q).map(count).sum();
        &total - below
    } else {
        (q..=ring_size).map(count).sum()
    };
    Ok(binomial::ratio(numer, total))
}

pub fn key_share_prob_f64(ring_size: u64, pool_size: u64, q: u64) -> Result<f64> {
    check_key_params(ring_size, pool_size, q)?;
    let lo = q.max(min_overlap(ring_size, pool_size));
    if lo > ring_size {
        return Ok(0.0);
    }
    // Start at the mode (clamped to the summed range) and walk outwards;
    // terms decay monotonically on both sides of it.
    let mode = ((ring_size + 1) as f64 * (ring_size + 1) as f64 / (pool_size + 2) as f64) as u64;
    let centre = mode.clamp(lo, ring_size);
    let peak = pmf_f64_unchecked(ring_size, pool_size, centre);
    if peak == 0.0 {
        return Ok(0.0);
    }
    let mut total = peak;
    let mut term = peak;
    for u in centre..ring_size {
        term *= pmf_step(ring_size, pool_size, u);
        total += term;
        if term <= total * 1e-18 {
            break;
        }
    }
    term = peak;
    for u in (lo..centre).rev() {
        term /= pmf_step(ring_size, pool_size, u);
        total += term;
        if term <= total * 1e-18 {
            break;
        }
    }
    Ok(total.min(1.0))
}

/// Secure-link probability `t = p * s`.
pub fn edge_prob(params: &ModelParams, mode: Arithmetic) -> Result<Prob> {
    Ok(match mode {
        Arithmetic::Exact => {
            let p = BigRational::from_float(params.p)
                .ok_or_else(|| Error::invalid("channel probability is not finite"))?;
            Prob::Exact(edge_prob_exact(params.ring_size, params.pool_size, params.q, &p)?)
        }
        Arithmetic::Float => Prob::Float(edge_prob_f64(params)?),
    })
}

pub fn edge_prob_f64(params: &ModelParams) -> Result<f64> {
    params.validate()?;
    Ok(params.p * key_share_prob_f64(params.ring_size, params.pool_size, params.q)?)
}

/// Exact `t` for a channel probability given as a rational (e.g. parsed
/// from decimal text).
pub fn edge_prob_exact(ring_size: u64, pool_size: u64, q: u64, p: &BigRational) -> Result<BigRational> {
    if p < &BigRational::zero() || p > &BigRational::one() {
        return Err(Error::invalid(format!("channel probability p={p} is outside [0, 1]")));
    }
    Ok(p * key_share_prob_exact(ring_size, pool_size, q)?)
}

/// Upper bound `C(K,q)^2 / C(P,q)` on `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShareBound {
    pub value: Prob,
    /// Set when the bound exceeds 1 and says nothing.
    pub vacuous: bool,
}

pub fn bloznelis_bound(ring_size: u64, pool_size: u64, q: u64, mode: Arithmetic) -> Result<ShareBound> {
    let value = match mode {
        Arithmetic::Exact => Prob::Exact(bloznelis_bound_exact(ring_size, pool_size, q)?),
        Arithmetic::Float => Prob::Float(bloznelis_bound_f64(ring_size, pool_size, q)?),
    };
    let vacuous = match &value {
        Prob::Exact(r) => r > &BigRational::one(),
        Prob::Float(x) => *x > 1.0,
    };
    Ok(ShareBound { value, vacuous })
}

pub fn bloznelis_bound_exact(ring_size: u64, pool_size: u64, q: u64) -> Result<BigRational> {
    check_key_params(ring_size, pool_size, q)?;
    let ring = choose_exact(ring_size, q);
    Ok(binomial::ratio(&ring * &ring, choose_exact(pool_size, q)))
}

pub fn bloznelis_bound_f64(ring_size: u64, pool_size: u64, q: u64) -> Result<f64> {
    check_key_params(ring_size, pool_size, q)?;
    Ok((2.0 * ln_choose(ring_size, q) - ln_choose(pool_size, q)).exp())
}

/// Large-pool approximation `(K^2/P)^q / q!` of `s`. Only asymptotically
/// accurate (K growing with K^2/P vanishing); at small K it can be far off.
pub fn approx_key_share_prob(ring_size: u64, pool_size: u64, q: u64, mode: Arithmetic) -> Result<Prob> {
    Ok(match mode {
        Arithmetic::Exact => Prob::Exact(approx_key_share_prob_exact(ring_size, pool_size, q)?),
        Arithmetic::Float => Prob::Float(approx_key_share_prob_f64(ring_size, pool_size, q)?),
    })
}

pub fn approx_key_share_prob_exact(ring_size: u64, pool_size: u64, q: u64) -> Result<BigRational> {
    check_key_params(ring_size, pool_size, q)?;
    let base = BigRational::new(
        BigInt::from(ring_size) * BigInt::from(ring_size),
        BigInt::from(pool_size),
    );
    let mut acc = BigRational::one();
    for i in 1..=q {
        acc = acc * &base / BigInt::from(i);
    }
    Ok(acc)
}

pub fn approx_key_share_prob_f64(ring_size: u64, pool_size: u64, q: u64) -> Result<f64> {
    check_key_params(ring_size, pool_size, q)?;
    let base = ring_size as f64 * ring_size as f64 / pool_size as f64;
    Ok((1..=q).fold(1.0, |acc, i| acc * base / i as f64))
}

/// Edge probability `t` together with its deviation `alpha` from the
/// k-connectivity critical scaling `(ln n + (k-1) ln ln n) / n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingPoint {
    pub n: usize,
    pub k: usize,
    pub t: f64,
    pub alpha: f64,
}

impl ScalingPoint {
    /// Rebuilds `t` from `alpha`.
    pub fn edge_prob_from_alpha(&self) -> f64 {
        critical_edge_prob_unchecked(self.n, self.k, self.alpha)
    }
}

fn check_scaling_args(n: usize, k: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::invalid(format!(
            "scaling needs n >= 3 so that ln ln n is positive (got n={n})"
        )));
    }
    if k == 0 {
        return Err(Error::invalid("connectivity order k must be at least 1"));
    }
    Ok(())
}

fn critical_log_terms(n: usize, k: usize) -> f64 {
    let ln_n = (n as f64).ln();
    ln_n + (k - 1) as f64 * ln_n.ln()
}

fn critical_edge_prob_unchecked(n: usize, k: usize, alpha: f64) -> f64 {
    (critical_log_terms(n, k) + alpha) / n as f64
}

/// `(ln n + (k-1) ln ln n + alpha) / n`.
pub fn critical_edge_prob(n: usize, k: usize, alpha: f64) -> Result<f64> {
    check_scaling_args(n, k)?;
    Ok(critical_edge_prob_unchecked(n, k, alpha))
}

pub fn alpha_of(params: &ModelParams, k: usize) -> Result<ScalingPoint> {
    check_scaling_args(params.n, k)?;
    let t = edge_prob_f64(params)?;
    Ok(ScalingPoint {
        n: params.n,
        k,
        t,
        alpha: alpha_for_edge_prob(params.n, k, t),
    })
}

pub(crate) fn alpha_for_edge_prob(n: usize, k: usize, t: f64) -> f64 {
    n as f64 * t - critical_log_terms(n, k)
}

/// Channel probability that puts the model at deviation `alpha`, or `None`
/// when no `p` in `[0, 1]` does.
pub fn channel_prob_for_alpha(
    n: usize,
    ring_size: u64,
    pool_size: u64,
    q: u64,
    k: usize,
    alpha: f64,
) -> Result<Option<f64>> {
    let t = critical_edge_prob(n, k, alpha)?;
    let s = key_share_prob_f64(ring_size, pool_size, q)?;
    let p = t / s;
    Ok((0.0..=1.0).contains(&p).then_some(p))
}

pub(crate) fn check_solver_channel(p: f64) -> Result<()> {
    check_channel_prob(p)?;
    if p == 0.0 {
        return Err(Error::invalid("channel probability p must be positive"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn pmf_examples() {
        assert_eq!(overlap_pmf_exact(1, 2, 1).unwrap(), q(1, 2));
        assert_eq!(overlap_pmf_exact(2, 4, 2).unwrap(), q(1, 6));
        assert_eq!(overlap_pmf_exact(3, 10, 2).unwrap(), q(21, 120));
        assert!(close(overlap_pmf_f64(3, 10, 2).unwrap(), 21.0 / 120.0, 1e-13));
    }

    #[test]
    fn pmf_outside_support_is_zero() {
        // K=3, P=4: any two 3-subsets share at least 2 keys.
        assert_eq!(overlap_pmf_exact(3, 4, 1).unwrap(), q(0, 1));
        assert_eq!(overlap_pmf_exact(3, 4, 0).unwrap(), q(0, 1));
        assert_eq!(overlap_pmf_f64(3, 4, 1).unwrap(), 0.0);
        assert_eq!(overlap_pmf_exact(3, 4, 2).unwrap(), q(3, 4));
    }

    #[test]
    fn pmf_rejects_bad_arguments() {
        assert!(overlap_pmf_exact(3, 2, 1).is_err());
        assert!(overlap_pmf_exact(2, 4, 3).is_err());
        assert!(overlap_pmf_f64(0, 4, 0).is_err());
    }

    #[test]
    fn share_prob_examples() {
        assert_eq!(key_share_prob_exact(1, 2, 1).unwrap(), q(1, 2));
        assert_eq!(key_share_prob_exact(2, 4, 2).unwrap(), q(1, 6));
        assert_eq!(key_share_prob_exact(3, 10, 2).unwrap(), q(11, 60));
        assert_eq!(key_share_prob_exact(2, 4, 1).unwrap(), q(5, 6));
        assert!(close(key_share_prob_f64(3, 10, 2).unwrap(), 11.0 / 60.0, 1e-13));
        assert!(key_share_prob_exact(2, 4, 3).is_err());
        assert!(key_share_prob_exact(2, 4, 0).is_err());
    }

    #[test]
    fn share_prob_float_handles_dense_rings() {
        // K close to P: s is essentially 1 and the low-overlap terms underflow.
        let s = key_share_prob_f64(5000, 10_000, 2).unwrap();
        assert_eq!(s, 1.0);
        let s = key_share_prob_f64(10, 10, 10).unwrap();
        assert_eq!(s, 1.0);
        // Tiny s well below 1e-300 flushes to zero rather than panicking.
        assert!(key_share_prob_f64(200, 1_000_000_000, 200).unwrap() < 1e-300);
    }

    #[test]
    fn edge_prob_examples() {
        let params = ModelParams::new(10, 1, 2, 1, 0.5).unwrap();
        assert_eq!(edge_prob_f64(&params).unwrap(), 0.25);
        assert_eq!(edge_prob(&params, Arithmetic::Exact).unwrap(), Prob::Exact(q(1, 4)));
        let params = ModelParams::new(10, 2, 4, 2, 1.0).unwrap();
        assert_eq!(edge_prob(&params, Arithmetic::Exact).unwrap(), Prob::Exact(q(1, 6)));
        assert_eq!(edge_prob_exact(3, 10, 2, &q(3, 10)).unwrap(), q(11, 200));
        let params = ModelParams::new(10, 3, 10, 2, 0.3).unwrap();
        assert!(close(edge_prob_f64(&params).unwrap(), 0.055, 1e-14));
    }

    #[test]
    fn edge_prob_is_the_product() {
        let params = ModelParams::new(10, 7, 91, 3, 0.37).unwrap();
        let s = key_share_prob_f64(7, 91, 3).unwrap();
        assert_eq!(edge_prob_f64(&params).unwrap().to_bits(), (0.37 * s).to_bits());
    }

    #[test]
    fn bound_examples() {
        assert_eq!(bloznelis_bound_exact(1, 2, 1).unwrap(), q(1, 2));
        assert_eq!(bloznelis_bound_exact(2, 4, 2).unwrap(), q(1, 6));
        assert_eq!(bloznelis_bound_exact(3, 10, 2).unwrap(), q(1, 5));
        assert!(bloznelis_bound_exact(3, 10, 2).unwrap() >= q(11, 60));
        let b = bloznelis_bound(10, 12, 1, Arithmetic::Exact).unwrap();
        assert!(b.vacuous);
        assert_eq!(b.value, Prob::Exact(q(100, 12)));
        assert!(bloznelis_bound(10, 12, 1, Arithmetic::Float).unwrap().vacuous);
        assert!(!bloznelis_bound(3, 10, 2, Arithmetic::Float).unwrap().vacuous);
    }

    #[test]
    fn approximation_examples() {
        assert_eq!(approx_key_share_prob_exact(1, 2, 1).unwrap(), q(1, 2));
        assert_eq!(approx_key_share_prob_f64(1, 2, 1).unwrap(), 0.5);
        assert_eq!(approx_key_share_prob_exact(2, 4, 1).unwrap(), q(1, 1));
        assert_ne!(key_share_prob_exact(2, 4, 1).unwrap(), q(1, 1));
        assert_eq!(approx_key_share_prob_exact(40, 10_000, 2).unwrap(), q(8, 625));
        assert!(close(approx_key_share_prob_f64(40, 10_000, 2).unwrap(), 0.0128, 1e-14));
        // At K=40 the approximation still overshoots by about 16%.
        let exact = rational_to_f64(&key_share_prob_exact(40, 10_000, 2).unwrap());
        let ratio = 0.0128 / exact;
        assert!((ratio - 1.157_780_541_206_386_6).abs() < 1e-12, "ratio {ratio}");
        // It converges once K^2/P is small.
        let exact = rational_to_f64(&key_share_prob_exact(100, 1_000_000, 2).unwrap());
        let ratio = approx_key_share_prob_f64(100, 1_000_000, 2).unwrap() / exact;
        assert!((0.95..=1.05).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn alpha_examples() {
        let n = 1000usize;
        let s = key_share_prob_f64(1, 2, 1).unwrap();
        let p = (n as f64).ln() / (n as f64 * s);
        let point = alpha_of(&ModelParams::new(n, 1, 2, 1, p).unwrap(), 1).unwrap();
        assert!(point.alpha.abs() < 1e-12, "{}", point.alpha);

        let point = alpha_of(&ModelParams::new(1000, 1, 2, 1, 0.02).unwrap(), 1).unwrap();
        assert!((point.alpha - (10.0 - 1000f64.ln())).abs() < 1e-12);
        assert!((point.alpha - 3.0922).abs() < 1e-4);

        let point = alpha_of(&ModelParams::new(100, 2, 4, 2, 0.0).unwrap(), 2).unwrap();
        assert_eq!(point.t, 0.0);
        assert!((point.alpha + 6.132_35).abs() < 1e-5);

        let point = alpha_of(&ModelParams::new(100, 3, 10, 2, 0.3).unwrap(), 2).unwrap();
        assert!((point.alpha + 0.632_35).abs() < 1e-5);
    }

    #[test]
    fn alpha_needs_three_nodes() {
        assert!(alpha_of(&ModelParams::new(2, 1, 2, 1, 0.5).unwrap(), 1).is_err());
        assert!(alpha_of(&ModelParams::new(3, 1, 2, 1, 0.5).unwrap(), 0).is_err());
        assert!(critical_edge_prob(2, 1, 0.0).is_err());
    }

    #[test]
    fn channel_prob_for_alpha_marks_infeasible() {
        assert!(channel_prob_for_alpha(10, 1, 100, 1, 1, 0.0).unwrap().is_none());
        let p = channel_prob_for_alpha(10, 1, 2, 1, 1, 0.0).unwrap().unwrap();
        assert!((p - 10f64.ln() / 10.0 / 0.5).abs() < 1e-15);
        assert!(channel_prob_for_alpha(10, 1, 2, 1, 1, -100.0).unwrap().is_none());
    }

    #[test]
    fn huge_rationals_convert() {
        let r = overlap_pmf_exact(200, 1_000_000, 3).unwrap();
        let f = overlap_pmf_f64(200, 1_000_000, 3).unwrap();
        assert!(close(rational_to_f64(&r), f, 1e-10));
    }
}
