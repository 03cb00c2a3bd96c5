use crate::error::{Error, Result};

/// One point of the model: `n` sensors, rings of `ring_size` keys drawn from
/// `pool_size` keys, overlap threshold `q`, channel-on probability `p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub n: usize,
    pub ring_size: u64,
    pub pool_size: u64,
    pub q: u64,
    pub p: f64,
}

impl ModelParams {
    pub fn new(n: usize, ring_size: u64, pool_size: u64, q: u64, p: f64) -> Result<Self> {
        let params = ModelParams {
            n,
            ring_size,
            pool_size,
            q,
            p,
        };
        params.validate()?;
        Ok(params)
    }

    /// Checks `n >= 1`, `1 <= q <= K <= P` and `0 <= p <= 1`.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("node count n must be at least 1"));
        }
        check_key_params(self.ring_size, self.pool_size, self.q)?;
        check_channel_prob(self.p)
    }
}

pub(crate) fn check_ring_pool(ring_size: u64, pool_size: u64) -> Result<()> {
    if ring_size == 0 {
        return Err(Error::invalid("key ring size K must be at least 1"));
    }
    if ring_size > pool_size {
        return Err(Error::invalid(format!(
            "key ring size K={ring_size} exceeds pool size P={pool_size}"
        )));
    }
    Ok(())
}

pub(crate) fn check_key_params(ring_size: u64, pool_size: u64, q: u64) -> Result<()> {
    check_ring_pool(ring_size, pool_size)?;
    if q == 0 {
        return Err(Error::invalid("overlap threshold q must be at least 1"));
    }
    if q > ring_size {
        return Err(Error::invalid(format!(
            "overlap threshold q={q} exceeds key ring size K={ring_size}"
        )));
    }
    Ok(())
}

pub(crate) fn check_channel_prob(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!(
            "channel probability p={p} is outside [0, 1]"
        )));
    }
    Ok(())
}
