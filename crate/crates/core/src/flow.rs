//! Dinic maximum flow, vertex-minimal mincuts and isolating cuts.

use std::collections::VecDeque;
use std::ops::{Add, Sub};

use thiserror::Error;

use crate::graph::{contract, VertexSet, Weight, WeightedGraph};

/// Exact integer capacity.
pub trait Cap: Copy + Ord + Add<Output = Self> + Sub<Output = Self> + std::fmt::Debug {
    const ZERO: Self;
    const INF: Self;
}

impl Cap for i64 {
    const ZERO: Self = 0;
    const INF: Self = i64::MAX / 4;
}

impl Cap for i128 {
    const ZERO: Self = 0;
    const INF: Self = i128::MAX / 4;
}

#[derive(Debug, Clone)]
struct Arc<C> {
    to: usize,
    cap: C,
}

/// Residual network. Arcs are stored in pairs `2i`, `2i+1`.
#[derive(Debug, Clone)]
pub struct FlowNetwork<C: Cap> {
    n: usize,
    arcs: Vec<Arc<C>>,
    initial: Vec<C>,
    adj: Vec<Vec<usize>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl<C: Cap> FlowNetwork<C> {
    pub fn new(n: usize) -> Self {
        FlowNetwork {
            n,
            arcs: Vec::new(),
            initial: Vec::new(),
            adj: vec![Vec::new(); n],
            level: vec![0; n],
            iter: vec![0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Directed arc `u → v`; returns the pair index.
    pub fn add_arc(&mut self, u: usize, v: usize, c: C) -> usize {
        self.add_pair(u, v, c, C::ZERO)
    }

    /// Undirected edge with capacity `c` in both directions.
    pub fn add_edge(&mut self, u: usize, v: usize, c: C) -> usize {
        self.add_pair(u, v, c, c)
    }

    fn add_pair(&mut self, u: usize, v: usize, cf: C, cb: C) -> usize {
        let id = self.arcs.len() / 2;
        self.adj[u].push(self.arcs.len());
        self.arcs.push(Arc { to: v, cap: cf });
        self.adj[v].push(self.arcs.len());
        self.arcs.push(Arc { to: u, cap: cb });
        self.initial.push(cf);
        self.initial.push(cb);
        id
    }

    /// Net flow along pair `id` in its forward direction.
    pub fn flow(&self, id: usize) -> C {
        self.initial[2 * id] - self.arcs[2 * id].cap
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut q = VecDeque::new();
        q.push_back(s);
        while let Some(x) = q.pop_front() {
            for &a in &self.adj[x] {
                let y = self.arcs[a].to;
                if self.arcs[a].cap > C::ZERO && self.level[y] < 0 {
                    self.level[y] = self.level[x] + 1;
                    q.push_back(y);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, x: usize, t: usize, f: C) -> C {
        if x == t {
            return f;
        }
        while self.iter[x] < self.adj[x].len() {
            let a = self.adj[x][self.iter[x]];
            let y = self.arcs[a].to;
            if self.arcs[a].cap > C::ZERO && self.level[y] == self.level[x] + 1 {
                let d = self.dfs(y, t, f.min(self.arcs[a].cap));
                if d > C::ZERO {
                    self.arcs[a].cap = self.arcs[a].cap - d;
                    self.arcs[a ^ 1].cap = self.arcs[a ^ 1].cap + d;
                    return d;
                }
            }
            self.iter[x] += 1;
        }
        C::ZERO
    }

    /// Augments to a maximum `s → t` flow and returns the added value.
    pub fn max_flow(&mut self, s: usize, t: usize) -> C {
        assert_ne!(s, t);
        let mut total = C::ZERO;
        while self.bfs(s, t) {
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, C::INF);
                if f == C::ZERO {
                    break;
                }
                total = total + f;
            }
        }
        total
    }

    /// Vertices reachable from `s` in the residual network.
    pub fn residual_reach(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &a in &self.adj[x] {
                let y = self.arcs[a].to;
                if self.arcs[a].cap > C::ZERO && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlowError {
    #[error("sources and sinks must be nonempty")]
    EmptyTerminals,
    #[error("vertex {0} is both a source and a sink")]
    Overlap(usize),
    #[error("isolating cuts need at least two groups")]
    TooFewGroups,
    #[error("vertex {0} out of range")]
    BadVertex(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinCutResult {
    pub value: Weight,
    /// Vertex-minimal source side.
    pub s_side: VertexSet,
}

fn network_of(g: &WeightedGraph, extra: usize) -> FlowNetwork<i64> {
    let mut net = FlowNetwork::new(g.n() + extra);
    for e in g.edges() {
        net.add_edge(e.u, e.v, e.w);
    }
    net
}

/// Exact mincut between the merged sources and merged sinks, with the
/// residual-reachable (vertex-minimal) source side.
pub fn max_flow_mincut(g: &WeightedGraph, sources: &[usize], sinks: &[usize]) -> Result<MinCutResult, FlowError> {
    if sources.is_empty() || sinks.is_empty() {
        return Err(FlowError::EmptyTerminals);
    }
    let n = g.n();
    let mut mark = vec![0u8; n];
    for &s in sources {
        if s >= n {
            return Err(FlowError::BadVertex(s));
        }
        mark[s] = 1;
    }
    for &t in sinks {
        if t >= n {
            return Err(FlowError::BadVertex(t));
        }
        if mark[t] == 1 {
            return Err(FlowError::Overlap(t));
        }
        mark[t] = 2;
    }
    let mut net = network_of(g, 2);
    let (ss, tt) = (n, n + 1);
    for &s in sources {
        net.add_arc(ss, s, i64::INF);
    }
    for &t in sinks {
        net.add_arc(t, tt, i64::INF);
    }
    let value = net.max_flow(ss, tt);
    let reach = net.residual_reach(ss);
    Ok(MinCutResult { value, s_side: (0..n).filter(|&v| reach[v]).collect() })
}

/// λ(s,t) together with the vertex-minimal s-side.
pub fn st_mincut(g: &WeightedGraph, s: usize, t: usize) -> MinCutResult {
    max_flow_mincut(g, &[s], &[t]).expect("distinct in-range vertices")
}

/// For each group, the vertex-minimal (group, other groups)-mincut. The
/// returned cuts are pairwise disjoint.
pub fn isolating_cuts(g: &WeightedGraph, groups: &[Vec<usize>]) -> Result<Vec<MinCutResult>, FlowError> {
    let h = groups.len();
    if h < 2 {
        return Err(FlowError::TooFewGroups);
    }
    let n = g.n();
    let mut owner = vec![usize::MAX; n];
    for (i, grp) in groups.iter().enumerate() {
        if grp.is_empty() {
            return Err(FlowError::EmptyTerminals);
        }
        for &v in grp {
            if v >= n {
                return Err(FlowError::BadVertex(v));
            }
            if owner[v] != usize::MAX {
                return Err(FlowError::Overlap(v));
            }
            owner[v] = i;
        }
    }
    let bits = usize::BITS - (h - 1).leading_zeros();
    // Each vertex keeps the bit pattern of the only group whose region may hold it.
    let mut alive = vec![true; n];
    let mut side_bits = vec![0usize; n];
    for b in 0..bits {
        let ones: Vec<usize> = (0..n).filter(|&v| owner[v] != usize::MAX && owner[v] >> b & 1 == 1).collect();
        let zeros: Vec<usize> = (0..n).filter(|&v| owner[v] != usize::MAX && owner[v] >> b & 1 == 0).collect();
        let one_side = max_flow_mincut(g, &ones, &zeros)?.s_side;
        let zero_side = max_flow_mincut(g, &zeros, &ones)?.s_side;
        let in_one = one_side.indicator(n);
        let in_zero = zero_side.indicator(n);
        for v in 0..n {
            if in_one[v] {
                side_bits[v] |= 1 << b;
            } else if !in_zero[v] {
                alive[v] = false;
            }
        }
    }
    let mut out = Vec::with_capacity(h);
    for (i, grp) in groups.iter().enumerate() {
        let region: Vec<usize> = (0..n).filter(|&v| alive[v] && side_bits[v] == i).collect();
        let outside: Vec<usize> = (0..n).filter(|&v| !(alive[v] && side_bits[v] == i)).collect();
        let (sub, map) = contract(g, &[outside.clone()]).expect("single part");
        let sink = map.image[outside[0]];
        let srcs: Vec<usize> = grp.iter().map(|&v| map.image[v]).collect();
        let r = max_flow_mincut(&sub, &srcs, &[sink])?;
        let s_side: VertexSet = r.s_side.members().iter().map(|&x| map.origin[x][0]).collect();
        debug_assert!(s_side.members().iter().all(|v| region.contains(v)));
        out.push(MinCutResult { value: r.value, s_side });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::oracle::oracle_all_pairs_mincut;

    #[test]
    fn spec_examples() {
        let r = max_flow_mincut(&fixtures::dumbbell(), &[0], &[3]).unwrap();
        assert_eq!((r.value, r.s_side.members().to_vec()), (1, vec![0, 1, 2]));
        let r = max_flow_mincut(&fixtures::p3(), &[0], &[2]).unwrap();
        assert_eq!((r.value, r.s_side.members().to_vec()), (1, vec![0]));
        let r = max_flow_mincut(&fixtures::k4(), &[0], &[1]).unwrap();
        assert_eq!((r.value, r.s_side.members().to_vec()), (3, vec![0]));
        assert_eq!(max_flow_mincut(&fixtures::k4(), &[0], &[0]), Err(FlowError::Overlap(0)));
    }

    #[test]
    fn isolating_examples() {
        let r = isolating_cuts(&fixtures::star4(), &[vec![1], vec![2], vec![3]]).unwrap();
        for (i, c) in r.iter().enumerate() {
            assert_eq!((c.value, c.s_side.members().to_vec()), (1, vec![i + 1]));
        }
        let r = isolating_cuts(&fixtures::dumbbell(), &[vec![0], vec![3]]).unwrap();
        assert_eq!(r[0].s_side.members(), &[0, 1, 2]);
        assert_eq!(r[1].s_side.members(), &[3, 4, 5]);
        let r = isolating_cuts(&fixtures::p3(), &[vec![0], vec![2]]).unwrap();
        assert_eq!((r[0].value, r[0].s_side.members().to_vec()), (1, vec![0]));
        // The (c, a)-mincut is {b, c} with value 1, not {c} with value 2.
        assert_eq!((r[1].value, r[1].s_side.members().to_vec()), (1, vec![1, 2]));
        assert_eq!(isolating_cuts(&fixtures::p3(), &[vec![0]]), Err(FlowError::TooFewGroups));
    }

    #[test]
    fn minimal_side_matches_oracle() {
        for seed in 0..40 {
            let g = fixtures::random_connected(seed, 9, 18, 6);
            let o = oracle_all_pairs_mincut(&g).unwrap();
            for s in 0..g.n() {
                for t in 0..g.n() {
                    if s != t {
                        let r = st_mincut(&g, s, t);
                        assert_eq!(r.value, o.lambda(s, t));
                        assert_eq!(r.s_side.mask(), o.minimal_mask(s, t));
                    }
                }
            }
        }
    }
}
