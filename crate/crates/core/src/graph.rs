//! Undirected simple graphs on nodes `0..n` and their edge-list text format.
//!
//! The text format is one header line `n m` followed by `m` lines `i j`
//! with `i < j`, sorted lexicographically, LF line endings.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Sorted neighbour lists; symmetric, no self-loops, no parallel edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
    edge_count: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        assert!(n <= u32::MAX as usize, "node count exceeds u32 labels");
        Graph {
            adj: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    pub fn complete(n: usize) -> Self {
        assert!(n <= u32::MAX as usize, "node count exceeds u32 labels");
        let adj = (0..n)
            .map(|i| (0..n as u32).filter(|&j| j as usize != i).collect())
            .collect();
        Graph {
            adj,
            edge_count: n * n.saturating_sub(1) / 2,
        }
    }

    /// Builds a graph from unordered pairs. Duplicate pairs collapse;
    /// self-loops and out-of-range labels are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::invalid(format!(
                    "edge ({a}, {b}) has an endpoint outside 0..{n}"
                )));
            }
            if a == b {
                return Err(Error::invalid(format!("self-loop at node {a}")));
            }
            adj[a].push(b as u32);
            adj[b].push(a as u32);
        }
        Ok(Self::from_raw_adjacency(adj))
    }

    /// Sorts and dedups each list. Callers guarantee symmetry.
    pub(crate) fn from_raw_adjacency(mut adj: Vec<Vec<u32>>) -> Self {
        let mut twice = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            twice += list.len();
        }
        Graph {
            adj,
            edge_count: twice / 2,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.adj.len() && b < self.adj.len() && self.adj[a].binary_search(&(b as u32)).is_ok()
    }

    pub fn is_complete(&self) -> bool {
        let n = self.node_count();
        self.edge_count == n * n.saturating_sub(1) / 2
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(i, list)| {
            list.iter()
                .map(|&j| j as usize)
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    /// Keeps only the edges for which `keep(i, j)` holds (`i < j`).
    pub fn retain_edges<F>(&self, mut keep: F) -> Graph
    where
        F: FnMut(usize, usize) -> bool,
    {
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); self.node_count()];
        for (i, j) in self.edges() {
            if keep(i, j) {
                adj[i].push(j as u32);
                adj[j].push(i as u32);
            }
        }
        Self::from_raw_adjacency(adj)
    }

    /// Edge-set intersection of two graphs on the same node set.
    pub fn intersect(&self, other: &Graph) -> Result<Graph> {
        if self.node_count() != other.node_count() {
            return Err(Error::DimensionMismatch {
                left: self.node_count(),
                right: other.node_count(),
            });
        }
        let adj: Vec<Vec<u32>> = self
            .adj
            .iter()
            .zip(&other.adj)
            .map(|(a, b)| sorted_intersection(a, b))
            .collect();
        Ok(Self::from_raw_adjacency(adj))
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(16 + self.edge_count * 12);
        writeln!(out, "{} {}", self.node_count(), self.edge_count).unwrap();
        for (i, j) in self.edges() {
            writeln!(out, "{i} {j}").unwrap();
        }
        out
    }

    pub fn write_edge_list(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_edge_list()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Parses the edge-list format strictly: header counts must match and
    /// pairs must be `i < j` in strictly increasing order.
    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let (n, m) = parse_pair(header, 1)?;
        let mut edges = Vec::with_capacity(m);
        let mut last: Option<(usize, usize)> = None;
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.is_empty() {
                continue;
            }
            let (i, j) = parse_pair(line, lineno)?;
            if i >= j || j >= n {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected i < j < {n}, got {i} {j}"),
                });
            }
            if last.is_some_and(|prev| prev >= (i, j)) {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "edges are not strictly sorted".into(),
                });
            }
            last = Some((i, j));
            edges.push((i, j));
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Graph::from_edges(n, edges)
    }
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let bad = || Error::Parse {
        line: lineno,
        msg: format!("expected two integers, got {line:?}"),
    };
    let mut fields = line.split(' ');
    let a = fields.next().and_then(|f| f.parse().ok()).ok_or_else(bad)?;
    let b = fields.next().and_then(|f| f.parse().ok()).ok_or_else(bad)?;
    if fields.next().is_some() {
        return Err(bad());
    }
    Ok((a, b))
}

fn sorted_intersection(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Small named graphs used by tests and examples.
pub mod catalog {
    use super::Graph;

    pub fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3);
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    /// Hub 0 joined to nodes `1..n`.
    pub fn star(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (0, i))).unwrap()
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        Graph::from_edges(a + b, (0..a).flat_map(|i| (a..a + b).map(move |j| (i, j)))).unwrap()
    }

    /// Two cliques on `size` nodes each that share their last/first `shared`
    /// nodes.
    pub fn cliques_sharing(size: usize, shared: usize) -> Graph {
        assert!(shared <= size);
        let n = 2 * size - shared;
        let second = size - shared;
        let clique = |lo: usize| {
            (lo..lo + size).flat_map(move |i| (i + 1..lo + size).map(move |j| (i, j)))
        };
        Graph::from_edges(n, clique(0).chain(clique(second))).unwrap()
    }
}
