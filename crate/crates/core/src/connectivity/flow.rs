//! Local vertex connectivity by unit-capacity max-flow on the split graph.
//!
//! Node `v` becomes `v_in = 2v` and `v_out = 2v + 1` joined by a unit arc;
//! each undirected edge `{a, b}` becomes arcs `a_out -> b_in` and
//! `b_out -> a_in`. The number of internally vertex-disjoint `s`-`t` paths
//! equals the max flow from `s_out` to `t_in`.

use crate::graph::Graph;

pub(super) struct SplitNetwork {
    /// CSR offsets into `head`/`residual`/`twin`, indexed by split node.
    start: Vec<usize>,
    head: Vec<u32>,
    residual: Vec<u8>,
    capacity: Vec<u8>,
    twin: Vec<u32>,
    /// Arcs whose residual differs from the initial state.
    dirty: Vec<u32>,
    seen: Vec<u32>,
    stamp: u32,
    via_fwd: Vec<u32>,
    via_back: Vec<u32>,
}

impl SplitNetwork {
    pub(super) fn new(g: &Graph) -> Self {
        let n = g.node_count();
        let nodes = 2 * n;
        // Out-degree per split node, counting the zero-capacity twins.
        let mut count = vec![0usize; nodes];
        for v in 0..n {
            count[2 * v] += 1; // v_in -> v_out
            count[2 * v + 1] += 1; // twin
            for &w in g.neighbors(v) {
                count[2 * v + 1] += 1; // v_out -> w_in
                count[2 * w as usize] += 1; // twin
            }
        }
        let mut start = vec![0usize; nodes + 1];
        for i in 0..nodes {
            start[i + 1] = start[i] + count[i];
        }
        let arcs = start[nodes];
        let mut head = vec![0u32; arcs];
        let mut residual = vec![0u8; arcs];
        let mut twin = vec![0u32; arcs];
        let mut fill = start[..nodes].to_vec();
        let mut add = |from: usize, to: usize| {
            let a = fill[from];
            fill[from] += 1;
            let b = fill[to];
            fill[to] += 1;
            head[a] = to as u32;
            residual[a] = 1;
            twin[a] = b as u32;
            head[b] = from as u32;
            residual[b] = 0;
            twin[b] = a as u32;
        };
        for v in 0..n {
            add(2 * v, 2 * v + 1);
            for &w in g.neighbors(v) {
                add(2 * v + 1, 2 * w as usize);
            }
        }
        SplitNetwork {
            start,
            head,
            capacity: residual.clone(),
            residual,
            twin,
            dirty: Vec::new(),
            seen: vec![0; nodes],
            stamp: 0,
            via_fwd: vec![0; nodes],
            via_back: vec![0; nodes],
        }
    }

    fn reset(&mut self) {
        for &a in &self.dirty {
            let a = a as usize;
            let b = self.twin[a] as usize;
            self.residual[a] = self.capacity[a];
            self.residual[b] = self.capacity[b];
        }
        self.dirty.clear();
    }

    /// Number of internally disjoint paths between non-adjacent `s` and
    /// `t`, counted up to `cap`.
    pub(super) fn local_connectivity(&mut self, s: usize, t: usize, cap: usize) -> usize {
        let source = 2 * s + 1;
        let sink = 2 * t;
        let mut flow = 0;
        while flow < cap && self.augment(source, sink) {
            flow += 1;
        }
        self.reset();
        flow
    }

    fn next_stamp(&mut self) -> u32 {
        // Forward marks use odd stamps, backward marks the following even one.
        self.stamp = self.stamp.wrapping_add(2);
        if self.stamp < 2 {
            self.seen.iter_mut().for_each(|x| *x = 0);
            self.stamp = 2;
        }
        self.stamp
    }

    /// Finds one shortest residual path by bidirectional BFS and pushes a
    /// unit of flow along it.
    fn augment(&mut self, source: usize, sink: usize) -> bool {
        let back_mark = self.next_stamp();
        let fwd_mark = back_mark - 1;
        self.seen[source] = fwd_mark;
        self.seen[sink] = back_mark;
        let mut fwd = vec![source as u32];
        let mut back = vec![sink as u32];
        let mut next = Vec::new();

        let meet = 'search: loop {
            if fwd.is_empty() || back.is_empty() {
                return false;
            }
            next.clear();
            if fwd.len() <= back.len() {
                for &u in &fwd {
                    let u = u as usize;
                    for a in self.start[u]..self.start[u + 1] {
                        if self.residual[a] == 0 {
                            continue;
                        }
                        let w = self.head[a] as usize;
                        if self.seen[w] == back_mark {
                            self.via_fwd[w] = a as u32;
                            break 'search w;
                        }
                        if self.seen[w] != fwd_mark {
                            self.seen[w] = fwd_mark;
                            self.via_fwd[w] = a as u32;
                            next.push(w as u32);
                        }
                    }
                }
                std::mem::swap(&mut fwd, &mut next);
            } else {
                for &w in &back {
                    let w = w as usize;
                    // Predecessors of w: arcs u -> w are the twins of the
                    // arcs stored at w.
                    for b in self.start[w]..self.start[w + 1] {
                        let a = self.twin[b] as usize;
                        if self.residual[a] == 0 {
                            continue;
                        }
                        let u = self.head[b] as usize;
                        if self.seen[u] == fwd_mark {
                            self.via_back[u] = a as u32;
                            break 'search u;
                        }
                        if self.seen[u] != back_mark {
                            self.seen[u] = back_mark;
                            self.via_back[u] = a as u32;
                            next.push(u as u32);
                        }
                    }
                }
                std::mem::swap(&mut back, &mut next);
            }
        };

        // The meeting arc is recorded on one side; walk both halves.
        let (mut x, mut y) = if self.seen[meet] == back_mark {
            // Found from the forward side: via_fwd[meet] enters meet.
            let a = self.via_fwd[meet] as usize;
            self.push_unit(a);
            (self.head[self.twin[a] as usize] as usize, meet)
        } else {
            let a = self.via_back[meet] as usize;
            self.push_unit(a);
            (meet, self.head[a] as usize)
        };
        while x != source {
            let a = self.via_fwd[x] as usize;
            self.push_unit(a);
            x = self.head[self.twin[a] as usize] as usize;
        }
        while y != sink {
            let a = self.via_back[y] as usize;
            self.push_unit(a);
            y = self.head[a] as usize;
        }
        true
    }

    fn push_unit(&mut self, a: usize) {
        self.residual[a] -= 1;
        self.residual[self.twin[a] as usize] += 1;
        self.dirty.push(a as u32);
    }
}
