//! Named small graphs and seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Weight, WeightedGraph};

/// Path a–b (1), b–c (2).
pub fn p3() -> WeightedGraph {
    WeightedGraph::from_edges(3, &[(0, 1, 1), (1, 2, 2)])
}

/// Complete graph on 4 vertices, unit weights.
pub fn k4() -> WeightedGraph {
    WeightedGraph::from_edges(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 3, 1), (2, 3, 1)])
}

/// Two unit triangles {0,1,2} and {3,4,5} joined by the bridge 0–3.
pub fn dumbbell() -> WeightedGraph {
    WeightedGraph::from_edges(6, &[(0, 1, 1), (1, 2, 1), (0, 2, 1), (3, 4, 1), (4, 5, 1), (3, 5, 1), (0, 3, 1)])
}

/// Star with center 0 and leaves 1, 2, 3.
pub fn star4() -> WeightedGraph {
    WeightedGraph::from_edges(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1)])
}

/// Unit cycle 0–1–2–3–0.
pub fn c4() -> WeightedGraph {
    WeightedGraph::from_edges(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)])
}

/// Two vertices joined by one edge of weight 10.
pub fn single_edge() -> WeightedGraph {
    WeightedGraph::from_edges(2, &[(0, 1, 10)])
}

pub fn named() -> Vec<(&'static str, WeightedGraph)> {
    vec![
        ("P3", p3()),
        ("K4-unit", k4()),
        ("dumbbell", dumbbell()),
        ("star S4", star4()),
        ("C4", c4()),
        ("single edge", single_edge()),
    ]
}

/// Connected random multigraph: a random spanning tree plus extra edges.
pub fn random_connected(seed: u64, n: usize, m: usize, w_max: Weight) -> WeightedGraph {
    assert!(n >= 1 && (n == 1 || m + 1 >= n));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = WeightedGraph::new(n);
    for v in 1..n {
        let u = rng.gen_range(0..v);
        g.add_edge(u, v, rng.gen_range(1..=w_max));
    }
    while n > 1 && g.m() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            g.add_edge(u, v, rng.gen_range(1..=w_max));
        }
    }
    g
}

/// The standard random corpus: `count` graphs with 2 ≤ n ≤ `n_max`, m ≤ `m_max`,
/// weights ≤ `w_max`, all derived from `seed`.
pub fn corpus(seed: u64, count: usize, n_max: usize, m_max: usize, w_max: Weight) -> Vec<WeightedGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(2..=n_max);
            let lo = n - 1;
            let hi = m_max.max(lo).min(n * (n - 1) / 2 + n);
            let m = rng.gen_range(lo..=hi);
            random_connected(rng.gen(), n, m, w_max)
        })
        .collect()
}
