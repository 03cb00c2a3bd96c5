//! Seeded samplers for the model's components.
//!
//! Every random draw is keyed by the master seed, a stream label and a
//! counter (trial, node or node pair), so outputs do not depend on
//! evaluation order or on how trials are spread over threads.
//!
//! Key rings come from a ChaCha8 stream per node. Channel states come from
//! a stateless hash of the node pair, which lets the intersection sampler
//! visit only the edges of the q-intersection graph while producing exactly
//! the channel states the full-pair sampler [`sample_er_graph`] would.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::params::{check_channel_prob, check_ring_pool, ModelParams};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

const LABEL_POINT: u64 = 0x0070_6f69_6e74;
const LABEL_TRIAL: u64 = 0x0074_7269_616c;
const LABEL_RINGS: u64 = 0x0072_696e_6773;
const LABEL_CHANNEL: u64 = 0x6368_616e;

/// SplitMix64 output function.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stateless counter-based generator: a well-mixed 64-bit word for
/// `(key, counter)`.
pub fn counter_u64(key: u64, counter: u64) -> u64 {
    let z = mix64(key ^ counter.wrapping_mul(GOLDEN));
    mix64(z ^ key.rotate_left(32).wrapping_add(GOLDEN))
}

/// Maps a word to `[0, 1)` with 53 bits of precision.
fn unit_interval(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Master seed plus a derivation path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Seed(u64);

impl Seed {
    pub fn new(master: u64) -> Self {
        Seed(master)
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    fn derive(self, label: u64, index: u64) -> Seed {
        Seed(counter_u64(self.0 ^ mix64(label), index))
    }

    /// Seed of the `index`-th point of a sweep.
    pub fn point(self, index: u64) -> Seed {
        self.derive(LABEL_POINT, index)
    }

    /// Seed of the `index`-th trial at a point.
    pub fn trial(self, index: u64) -> Seed {
        self.derive(LABEL_TRIAL, index)
    }

    fn ring_stream(self) -> ChaCha8Rng {
        let base = self.derive(LABEL_RINGS, 0).0;
        let mut bytes = [0u8; 32];
        for (i, chunk) in bytes.chunks_exact_mut(8).enumerate() {
            chunk.copy_from_slice(&counter_u64(base, i as u64).to_le_bytes());
        }
        ChaCha8Rng::from_seed(bytes)
    }

    fn channel_key(self) -> u64 {
        self.derive(LABEL_CHANNEL, 0).0
    }
}

/// Whether the channel between `i < j` is on.
fn channel_on(key: u64, i: usize, j: usize, p: f64) -> bool {
    let pair = ((i as u64) << 32) | j as u64;
    unit_interval(counter_u64(key, pair)) < p
}

/// Each node's key ring: `K` distinct identifiers in `[0, P)`, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyAssignment {
    pool_size: u64,
    rings: Vec<Vec<u64>>,
}

impl KeyAssignment {
    /// Wraps explicit rings, checking sizes and identifiers.
    pub fn new(pool_size: u64, rings: Vec<Vec<u64>>) -> Result<Self> {
        let ring_size = rings.first().map_or(0, Vec::len);
        let mut sorted = Vec::with_capacity(rings.len());
        for (node, mut ring) in rings.into_iter().enumerate() {
            ring.sort_unstable();
            ring.dedup();
            if ring.len() != ring_size {
                return Err(Error::invalid(format!(
                    "ring of node {node} has {} distinct keys, expected {ring_size}",
                    ring.len()
                )));
            }
            if ring.last().is_some_and(|&key| key >= pool_size) {
                return Err(Error::invalid(format!(
                    "ring of node {node} holds a key outside [0, {pool_size})"
                )));
            }
            sorted.push(ring);
        }
        Ok(KeyAssignment {
            pool_size,
            rings: sorted,
        })
    }

    pub fn pool_size(&self) -> u64 {
        self.pool_size
    }

    pub fn node_count(&self) -> usize {
        self.rings.len()
    }

    pub fn rings(&self) -> &[Vec<u64>] {
        &self.rings
    }

    pub fn ring(&self, node: usize) -> &[u64] {
        &self.rings[node]
    }
}

/// Uniform `k`-subset of `[0, pool)`, sorted. Partial Fisher–Yates when the
/// ring covers a good share of the pool, Floyd's algorithm otherwise.
fn sample_subset<R: Rng>(rng: &mut R, pool: u64, k: u64) -> Vec<u64> {
    if pool <= 8 * k {
        let mut items: Vec<u64> = (0..pool).collect();
        for i in 0..k as usize {
            let j = rng.random_range(i..pool as usize);
            items.swap(i, j);
        }
        items.truncate(k as usize);
        items.sort_unstable();
        items
    } else {
        let mut chosen: Vec<u64> = Vec::with_capacity(k as usize);
        for j in pool - k..pool {
            let t = rng.random_range(0..=j);
            let pick = match chosen.binary_search(&t) {
                Ok(_) => j,
                Err(_) => t,
            };
            // Either way `pick` is not in `chosen` yet.
            let pos = chosen.binary_search(&pick).unwrap_err();
            chosen.insert(pos, pick);
        }
        chosen
    }
}

pub fn sample_key_rings(params: &ModelParams, seed: Seed) -> Result<KeyAssignment> {
    check_ring_pool(params.ring_size, params.pool_size)?;
    let base = seed.ring_stream();
    let rings = (0..params.n)
        .map(|node| {
            let mut rng = base.clone();
            rng.set_stream(node as u64);
            sample_subset(&mut rng, params.pool_size, params.ring_size)
        })
        .collect();
    Ok(KeyAssignment {
        pool_size: params.pool_size,
        rings,
    })
}

/// Edge `{i, j}` iff rings `i` and `j` share at least `q` keys.
pub fn build_q_intersection_graph(rings: &KeyAssignment, q: u64) -> Result<Graph> {
    if q == 0 {
        return Err(Error::invalid("overlap threshold q must be at least 1"));
    }
    let n = rings.node_count();
    // Inverted index: (key, holder) sorted by key then node.
    let mut holders: Vec<(u64, u32)> = rings
        .rings
        .iter()
        .enumerate()
        .flat_map(|(node, ring)| ring.iter().map(move |&key| (key, node as u32)))
        .collect();
    holders.sort_unstable();

    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut shared = vec![0u32; n];
    let mut touched: Vec<u32> = Vec::new();
    for (i, ring) in rings.rings.iter().enumerate() {
        for &key in ring {
            let start = holders.partition_point(|&h| h <= (key, i as u32));
            for &(k2, j) in &holders[start..] {
                if k2 != key {
                    break;
                }
                if shared[j as usize] == 0 {
                    touched.push(j);
                }
                shared[j as usize] += 1;
            }
        }
        for j in touched.drain(..) {
            if u64::from(shared[j as usize]) >= q {
                adj[i].push(j);
                adj[j as usize].push(i as u32);
            }
            shared[j as usize] = 0;
        }
    }
    Ok(Graph::from_raw_adjacency(adj))
}

/// Erdős–Rényi graph: every pair independently present with probability
/// `p`. Enumerates all pairs.
pub fn sample_er_graph(n: usize, p: f64, seed: Seed) -> Result<Graph> {
    check_channel_prob(p)?;
    let key = seed.channel_key();
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if channel_on(key, i, j, p) {
                adj[i].push(j as u32);
                adj[j].push(i as u32);
            }
        }
    }
    Ok(Graph::from_raw_adjacency(adj))
}

/// Network topology for one deployment: q-intersection graph of fresh key
/// rings, intersected with the on/off channel graph.
pub fn generate_network(params: &ModelParams, seed: Seed) -> Result<Graph> {
    params.validate()?;
    let rings = sample_key_rings(params, seed)?;
    let keyed = build_q_intersection_graph(&rings, params.q)?;
    Ok(overlay_channels(&keyed, params.p, seed))
}

/// Applies the channel states of `seed` to the edges of `keyed` only.
pub(crate) fn overlay_channels(keyed: &Graph, p: f64, seed: Seed) -> Graph {
    if p >= 1.0 {
        return keyed.clone();
    }
    let key = seed.channel_key();
    keyed.retain_edges(|i, j| channel_on(key, i, j, p))
}
