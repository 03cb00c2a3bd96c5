//! Random graph model of a wireless sensor network secured by q-composite
//! key predistribution over unreliable (on/off) channels.
//!
//! Each of `n` sensors receives a uniformly random ring of `K` distinct keys
//! out of a pool of `P`. Two sensors can set up a secure link when their
//! rings overlap in at least `q` keys *and* the channel between them is on,
//! which happens independently with probability `p`. The resulting topology
//! is the intersection of a uniform q-intersection graph with an
//! Erdős–Rényi graph.
//!
//! The crate provides:
//!
//! * [`probability`]: exact (big rational) and log-space evaluation of the
//!   overlap distribution, the link probabilities `s` and `t`, the scaling
//!   deviation `alpha`, and solvers for critical parameters.
//! * [`graph`] and [`sampling`]: the graph type, its edge-list format, and
//!   seeded, order-independent samplers for every component of the model.
//! * [`connectivity`]: minimum degree, connectivity, node connectivity and
//!   the "min degree at least k but not k-connected" event.
//! * [`experiment`]: a deterministic Monte Carlo harness with CSV output.

pub mod connectivity;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod params;
pub mod probability;
pub mod sampling;

pub use error::{Error, Result};
pub use graph::Graph;
pub use params::ModelParams;
pub use sampling::Seed;
