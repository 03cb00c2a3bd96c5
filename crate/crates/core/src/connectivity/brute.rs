use crate::error::{Error, Result};
use crate::graph::Graph;

const MAX_NODES: usize = 10;

/// Node connectivity by trying every node subset in order of size. Only
/// meant as a reference for small graphs (`n <= 10`).
pub fn node_connectivity_bruteforce(g: &Graph) -> Result<usize> {
    let n = g.node_count();
    if n > MAX_NODES {
        return Err(Error::invalid(format!(
            "brute-force connectivity is limited to {MAX_NODES} nodes (got {n})"
        )));
    }
    if n <= 1 {
        return Ok(0);
    }
    let adj: Vec<u16> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u16, |m, &w| m | 1 << w))
        .collect();
    let all: u16 = ((1u32 << n) - 1) as u16;
    for size in 0..=n - 2 {
        for removed in 0..=all {
            if removed.count_ones() as usize == size && !connected_within(&adj, all & !removed) {
                return Ok(size);
            }
        }
    }
    Ok(n - 1)
}

fn connected_within(adj: &[u16], alive: u16) -> bool {
    if alive == 0 {
        return true;
    }
    let start = alive.trailing_zeros() as usize;
    let mut reached = 1u16 << start;
    let mut frontier = reached;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let fresh = adj[v] & alive & !reached;
        reached |= fresh;
        frontier |= fresh;
    }
    reached == alive
}
