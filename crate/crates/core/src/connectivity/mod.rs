//! Minimum degree, connectivity and node connectivity.
//!
//! Node connectivity `kappa` is the smallest number of nodes whose removal
//! disconnects what remains; it is `n - 1` for complete graphs, and 0 for
//! a single node or a disconnected graph. A graph is k-connected iff
//! `kappa >= k`.

mod brute;
mod flow;

pub use brute::node_connectivity_bruteforce;

use crate::error::{Error, Result};
use crate::graph::Graph;
use flow::SplitNetwork;

pub fn min_degree(g: &Graph) -> usize {
    (0..g.node_count()).map(|v| g.degree(v)).min().unwrap_or(0)
}

pub fn component_count(g: &Graph) -> usize {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut stack = Vec::new();
    let mut components = 0;
    for root in 0..n {
        if seen[root] {
            continue;
        }
        components += 1;
        seen[root] = true;
        stack.push(root);
        while let Some(v) = stack.pop() {
            for &w in g.neighbors(v) {
                let w = w as usize;
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    components
}

/// True iff a traversal from node 0 reaches every node.
pub fn is_connected(g: &Graph) -> bool {
    component_count(g) <= 1
}

/// Whether removing some single node disconnects a connected graph
/// (iterative Tarjan low-link).
fn has_cut_vertex(g: &Graph) -> bool {
    let n = g.node_count();
    if n < 3 {
        return false;
    }
    let mut order = vec![u32::MAX; n];
    let mut low = vec![0u32; n];
    let mut clock = 0u32;
    // (node, parent, next neighbour index)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    let root = 0;
    order[root] = clock;
    low[root] = clock;
    clock += 1;
    stack.push((root, usize::MAX, 0));
    let mut root_children = 0;
    while let Some(frame) = stack.last_mut() {
        let (v, parent, next) = *frame;
        if let Some(&w) = g.neighbors(v).get(next) {
            frame.2 += 1;
            let w = w as usize;
            if order[w] == u32::MAX {
                order[w] = clock;
                low[w] = clock;
                clock += 1;
                if v == root {
                    root_children += 1;
                }
                stack.push((w, v, 0));
            } else if w != parent {
                low[v] = low[v].min(order[w]);
            }
        } else {
            stack.pop();
            if parent != usize::MAX {
                low[parent] = low[parent].min(low[v]);
                if parent != root && low[v] >= order[parent] {
                    return true;
                }
            }
        }
    }
    root_children > 1
}

/// Exact node connectivity.
pub fn node_connectivity(g: &Graph) -> usize {
    connectivity_up_to(g, usize::MAX)
}

/// `min(kappa(g), limit)`; flows stop as soon as `limit` paths are found.
fn connectivity_up_to(g: &Graph, limit: usize) -> usize {
    let n = g.node_count();
    if n <= 1 || limit == 0 {
        return 0;
    }
    if g.is_complete() {
        return (n - 1).min(limit);
    }
    let delta = min_degree(g);
    if delta == 0 || !is_connected(g) {
        return 0;
    }
    if limit == 1 {
        return 1;
    }
    if has_cut_vertex(g) {
        return 1;
    }
    // Now 2 <= kappa <= delta.
    let floor = 2;
    let mut best = delta.min(limit);
    if best <= floor {
        return best;
    }

    // A minimum cut either misses a minimum-degree node v, and then
    // separates v from some non-neighbour, or contains v, and then
    // separates two of v's neighbours.
    let v = (0..n).min_by_key(|&u| g.degree(u)).unwrap();
    let mut net = SplitNetwork::new(g);
    let neighbours = g.neighbors(v);
    let mut is_neighbour = vec![false; n];
    for &w in neighbours {
        is_neighbour[w as usize] = true;
    }
    for (t, &adjacent) in is_neighbour.iter().enumerate() {
        if t == v || adjacent {
            continue;
        }
        best = best.min(net.local_connectivity(v, t, best));
        if best == floor {
            return best;
        }
    }
    for (i, &x) in neighbours.iter().enumerate() {
        for &y in &neighbours[i + 1..] {
            let (x, y) = (x as usize, y as usize);
            if g.has_edge(x, y) {
                continue;
            }
            best = best.min(net.local_connectivity(x, y, best));
            if best == floor {
                return best;
            }
        }
    }
    best
}

pub fn is_k_connected(g: &Graph, k: usize) -> Result<bool> {
    if k == 0 {
        return Err(Error::invalid("connectivity order k must be at least 1"));
    }
    if min_degree(g) < k {
        return Ok(false);
    }
    Ok(connectivity_up_to(g, k) >= k)
}

/// Everything the zero-one law talks about, for one graph and order `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConnectivityReport {
    pub min_degree: usize,
    pub kappa: usize,
    pub component_count: usize,
    pub k_connected: bool,
    /// Minimum degree at least `k` but not k-connected.
    pub f_event: bool,
    /// `Some(kappa)` when `kappa < k` and the minimum degree exceeds
    /// `kappa`, i.e. the graph lies in the per-level event at level
    /// `kappa`.
    pub f_level: Option<usize>,
}

pub fn analyze(g: &Graph, k: usize) -> Result<ConnectivityReport> {
    if k == 0 {
        return Err(Error::invalid("connectivity order k must be at least 1"));
    }
    let min_degree = min_degree(g);
    let kappa = node_connectivity(g);
    let k_connected = kappa >= k;
    Ok(ConnectivityReport {
        min_degree,
        kappa,
        component_count: component_count(g),
        k_connected,
        f_event: min_degree >= k && !k_connected,
        f_level: (kappa < k && min_degree > kappa).then_some(kappa),
    })
}
