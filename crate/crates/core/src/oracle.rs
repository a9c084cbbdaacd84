//! Exhaustive brute-force oracles over all bipartitions (small graphs only).

use thiserror::Error;

use crate::graph::{VertexSet, Weight, WeightedGraph};

pub const DEFAULT_ORACLE_LIMIT: usize = 14;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("graph has {n} vertices, oracle limit is {limit}")]
pub struct OracleLimit {
    pub n: usize,
    pub limit: usize,
}

/// Cut value of every vertex subset, indexed by bit mask.
pub fn cut_table(g: &WeightedGraph) -> Vec<Weight> {
    let n = g.n();
    assert!(n < 63);
    let full = 1usize << n;
    let mut t = vec![0 as Weight; full];
    // Flipping vertex v changes the cut by its edges to the same side minus
    // those to the other side.
    for mask in 1..full {
        let v = mask.trailing_zeros() as usize;
        let prev = mask & (mask - 1);
        let mut delta = 0;
        for &(x, e) in g.adj(v) {
            let w = g.edge(e).w;
            if prev >> x & 1 == 1 {
                delta -= w;
            } else {
                delta += w;
            }
        }
        t[mask] = t[prev] + delta;
    }
    t
}

/// Compares vertex sets given as masks by cardinality, then lexicographically.
pub fn set_order(a: u64, b: u64) -> std::cmp::Ordering {
    a.count_ones().cmp(&b.count_ones()).then_with(|| {
        let (mut x, mut y) = (a, b);
        while x != 0 && y != 0 {
            let (i, j) = (x.trailing_zeros(), y.trailing_zeros());
            if i != j {
                return i.cmp(&j);
            }
            x &= x - 1;
            y &= y - 1;
        }
        std::cmp::Ordering::Equal
    })
}

/// All-pairs λ with the vertex-minimal mincut of every ordered pair.
#[derive(Debug, Clone)]
pub struct ConnectivityMatrix {
    n: usize,
    lambda: Vec<Weight>,
    minimal: Vec<u64>,
    cuts: Vec<Weight>,
}

impl ConnectivityMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self, s: usize, t: usize) -> Weight {
        self.lambda[s * self.n + t]
    }

    /// Vertex-minimal s-side of an (s,t)-mincut, as a mask.
    pub fn minimal_mask(&self, s: usize, t: usize) -> u64 {
        self.minimal[s * self.n + t]
    }

    pub fn minimal_mincut(&self, s: usize, t: usize) -> VertexSet {
        VertexSet::from_mask(self.minimal_mask(s, t))
    }

    /// Every s-side achieving λ(s,t), as masks in increasing order.
    pub fn all_mincuts(&self, s: usize, t: usize) -> Vec<u64> {
        let l = self.lambda(s, t);
        (0..self.cuts.len() as u64)
            .filter(|&m| m >> s & 1 == 1 && m >> t & 1 == 0 && self.cuts[m as usize] == l)
            .collect()
    }

    pub fn cut(&self, mask: u64) -> Weight {
        self.cuts[mask as usize]
    }

    /// λ(U) = min over distinct pairs of U; `None` when |U| < 2.
    pub fn lambda_of(&self, u: &[usize]) -> Option<Weight> {
        let mut best = None;
        for (i, &a) in u.iter().enumerate() {
            for &b in &u[i + 1..] {
                let l = self.lambda(a, b);
                best = Some(best.map_or(l, |x: Weight| x.min(l)));
            }
        }
        best
    }

    /// τ-connected components of `u`, sorted by smallest member.
    pub fn tau_components(&self, u: &[usize], tau: Weight) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut seen = vec![false; self.n];
        let mut sorted = u.to_vec();
        sorted.sort_unstable();
        for &a in &sorted {
            if seen[a] {
                continue;
            }
            let comp: Vec<usize> = sorted.iter().copied().filter(|&b| b == a || self.lambda(a, b) >= tau).collect();
            for &b in &comp {
                seen[b] = true;
            }
            out.push(comp);
        }
        out
    }
}

/// Exhaustive all-pairs mincut oracle, limited to `limit` vertices.
pub fn oracle_all_pairs_mincut_with(g: &WeightedGraph, limit: usize) -> Result<ConnectivityMatrix, OracleLimit> {
    let n = g.n();
    if n > limit || n > 20 {
        return Err(OracleLimit { n, limit });
    }
    let cuts = cut_table(g);
    let mut lambda = vec![Weight::MAX; n * n];
    let mut minimal = vec![0u64; n * n];
    let full = 1u64 << n;
    for mask in 1..full - 1 {
        let c = cuts[mask as usize];
        for s in 0..n {
            if mask >> s & 1 == 0 {
                continue;
            }
            for t in 0..n {
                if mask >> t & 1 == 1 {
                    continue;
                }
                let k = s * n + t;
                if c < lambda[k] || (c == lambda[k] && set_order(mask, minimal[k]).is_lt()) {
                    lambda[k] = c;
                    minimal[k] = mask;
                }
            }
        }
    }
    for s in 0..n {
        lambda[s * n + s] = 0;
    }
    Ok(ConnectivityMatrix { n, lambda, minimal, cuts })
}

pub fn oracle_all_pairs_mincut(g: &WeightedGraph) -> Result<ConnectivityMatrix, OracleLimit> {
    oracle_all_pairs_mincut_with(g, DEFAULT_ORACLE_LIMIT)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fixture_values() {
        let o = oracle_all_pairs_mincut(&fixtures::p3()).unwrap();
        assert_eq!((o.lambda(0, 1), o.lambda(1, 2), o.lambda(0, 2)), (1, 2, 1));
        let o = oracle_all_pairs_mincut(&fixtures::k4()).unwrap();
        for s in 0..4 {
            for t in 0..4 {
                if s != t {
                    assert_eq!(o.lambda(s, t), 3);
                    assert_eq!(o.minimal_mask(s, t), 1 << s);
                }
            }
        }
        let o = oracle_all_pairs_mincut(&fixtures::dumbbell()).unwrap();
        assert_eq!(o.lambda(0, 3), 1);
        assert_eq!(o.lambda(1, 4), 1);
        assert_eq!(o.lambda(0, 1), 2);
        assert_eq!(o.minimal_mask(0, 3), 0b111);
    }

    #[test]
    fn limit() {
        let g = WeightedGraph::new(15);
        assert_eq!(oracle_all_pairs_mincut(&g).unwrap_err(), OracleLimit { n: 15, limit: 14 });
    }

    #[test]
    fn cut_table_matches_direct() {
        let g = fixtures::random_connected(3, 9, 20, 7);
        let t = cut_table(&g);
        for mask in 0..(1u64 << 9) {
            assert_eq!(t[mask as usize], g.cut_mask(mask));
        }
    }
}
