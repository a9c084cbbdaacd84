//! Undirected weighted multigraphs, contraction, cut evaluation and the
//! edge-list text format.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact edge weight and cut value type.
pub type Weight = i64;

/// Default upper bound on a single edge weight.
pub const DEFAULT_W_MAX: Weight = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: malformed header")]
    MalformedHeader { line: usize },
    #[error("line {line}: duplicate header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: missing header before data")]
    MissingHeader { line: usize },
    #[error("line {line}: malformed record")]
    MalformedLine { line: usize },
    #[error("line {line}: weight {w} outside [1, {max}]")]
    WeightOutOfRange { line: usize, w: i128, max: Weight },
    #[error("line {line}: vertex {v} outside [1, {n}]")]
    VertexOutOfRange { line: usize, v: i128, n: usize },
    #[error("line {line}: self-loop on vertex {v}")]
    SelfLoop { line: usize, v: usize },
    #[error("declared {declared} edges but found {found}")]
    EdgeCountMismatch { declared: usize, found: usize },
    #[error("empty input")]
    Empty,
    #[error("contraction parts overlap at vertex {0}")]
    OverlappingParts(usize),
    #[error("vertex {0} out of range")]
    BadVertex(usize),
    #[error("cut side must be a nonempty proper subset")]
    TrivialCut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: Weight,
}

impl Edge {
    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// Undirected multigraph on vertices `0..n` with positive integer weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(usize, usize)>>,
    terminals: Option<Vec<usize>>,
}

impl WeightedGraph {
    pub fn new(n: usize) -> Self {
        WeightedGraph { n, edges: Vec::new(), adj: vec![Vec::new(); n], terminals: None }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize, Weight)]) -> Self {
        let mut g = WeightedGraph::new(n);
        for &(u, v, w) in edges {
            g.add_edge(u, v, w);
        }
        g
    }

    /// Adds an edge and returns its id. Self-loops are ignored and return `None`.
    pub fn add_edge(&mut self, u: usize, v: usize, w: Weight) -> Option<usize> {
        assert!(u < self.n && v < self.n, "edge endpoint out of range");
        assert!(w >= 1, "edge weights must be positive");
        if u == v {
            return None;
        }
        let id = self.edges.len();
        self.edges.push(Edge { u, v, w });
        self.adj[u].push((v, id));
        self.adj[v].push((u, id));
        Some(id)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> Edge {
        self.edges[id]
    }

    /// `(neighbor, edge id)` pairs incident to `v`.
    pub fn adj(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn terminals(&self) -> Option<&[usize]> {
        self.terminals.as_deref()
    }

    pub fn set_terminals(&mut self, t: Option<Vec<usize>>) {
        self.terminals = t.map(|mut t| {
            t.sort_unstable();
            t.dedup();
            t
        });
    }

    /// Terminal set, or all vertices when none is declared.
    pub fn terminal_set(&self) -> Vec<usize> {
        match &self.terminals {
            Some(t) => t.clone(),
            None => (0..self.n).collect(),
        }
    }

    pub fn degree_weight(&self, v: usize) -> Weight {
        self.adj[v].iter().map(|&(_, e)| self.edges[e].w).sum()
    }

    pub fn total_weight(&self) -> Weight {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn max_weight(&self) -> Weight {
        self.edges.iter().map(|e| e.w).max().unwrap_or(0)
    }

    /// Sum of weights of edges with exactly one endpoint in `side`.
    pub fn cut_of(&self, side: &[bool]) -> Weight {
        self.edges.iter().filter(|e| side[e.u] != side[e.v]).map(|e| e.w).sum()
    }

    /// Cut value of a vertex set, given as a bit mask (n ≤ 64).
    pub fn cut_mask(&self, mask: u64) -> Weight {
        self.edges.iter().filter(|e| ((mask >> e.u) ^ (mask >> e.v)) & 1 == 1).map(|e| e.w).sum()
    }

    /// Connected components as a label per vertex, labels in order of smallest member.
    pub fn components(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            stack.push(s);
            while let Some(x) = stack.pop() {
                for &(y, _) in &self.adj[x] {
                    if comp[y] == usize::MAX {
                        comp[y] = next;
                        stack.push(y);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().iter().all(|&c| c == 0)
    }

    /// Subgraph induced on `verts` (re-densified in the given order).
    pub fn induced(&self, verts: &[usize]) -> WeightedGraph {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in verts.iter().enumerate() {
            pos[v] = i;
        }
        let mut h = WeightedGraph::new(verts.len());
        for e in &self.edges {
            if pos[e.u] != usize::MAX && pos[e.v] != usize::MAX {
                h.add_edge(pos[e.u], pos[e.v], e.w);
            }
        }
        h
    }

    /// Parallel edges merged by summation, ordered by endpoint pair.
    pub fn simplified(&self) -> WeightedGraph {
        let mut acc: BTreeMap<(usize, usize), Weight> = BTreeMap::new();
        for e in &self.edges {
            *acc.entry((e.u.min(e.v), e.u.max(e.v))).or_insert(0) += e.w;
        }
        let mut h = WeightedGraph::new(self.n);
        for ((u, v), w) in acc {
            h.add_edge(u, v, w);
        }
        h.terminals = self.terminals.clone();
        h
    }
}

/// Sorted set of vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new(mut v: Vec<usize>) -> Self {
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn indicator(&self, n: usize) -> Vec<bool> {
        let mut b = vec![false; n];
        for &v in &self.0 {
            b[v] = true;
        }
        b
    }

    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0u64, |m, &v| m | (1u64 << v))
    }

    pub fn from_mask(mask: u64) -> Self {
        VertexSet((0..64).filter(|&i| mask >> i & 1 == 1).collect())
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet::new(iter.into_iter().collect())
    }
}

/// Provenance of a contracted graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionMap {
    /// Original vertex ids represented by each new vertex.
    pub origin: Vec<Vec<usize>>,
    /// New vertex id of each original vertex.
    pub image: Vec<usize>,
}

impl ContractionMap {
    pub fn identity(n: usize) -> Self {
        ContractionMap { origin: (0..n).map(|v| vec![v]).collect(), image: (0..n).collect() }
    }
}

/// Contracts each part into a single vertex. New ids follow the order of
/// each class's smallest original vertex. Parallel edges are merged and
/// self-loops dropped.
pub fn contract(g: &WeightedGraph, parts: &[Vec<usize>]) -> Result<(WeightedGraph, ContractionMap), GraphError> {
    let n = g.n();
    let mut class = vec![usize::MAX; n];
    for (i, p) in parts.iter().enumerate() {
        for &v in p {
            if v >= n {
                return Err(GraphError::BadVertex(v));
            }
            if class[v] != usize::MAX {
                return Err(GraphError::OverlappingParts(v));
            }
            class[v] = i;
        }
    }
    let mut image = vec![usize::MAX; n];
    let mut part_id = vec![usize::MAX; parts.len()];
    let mut origin: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        let id = if class[v] == usize::MAX {
            origin.push(Vec::new());
            origin.len() - 1
        } else if part_id[class[v]] == usize::MAX {
            origin.push(Vec::new());
            part_id[class[v]] = origin.len() - 1;
            part_id[class[v]]
        } else {
            part_id[class[v]]
        };
        image[v] = id;
        origin[id].push(v);
    }
    let mut acc: BTreeMap<(usize, usize), Weight> = BTreeMap::new();
    for e in g.edges() {
        let (a, b) = (image[e.u], image[e.v]);
        if a != b {
            *acc.entry((a.min(b), a.max(b))).or_insert(0) += e.w;
        }
    }
    let mut h = WeightedGraph::new(origin.len());
    for ((a, b), w) in acc {
        h.add_edge(a, b, w);
    }
    if let Some(t) = g.terminals() {
        h.set_terminals(Some(t.iter().map(|&v| image[v]).collect()));
    }
    Ok((h, ContractionMap { origin, image }))
}

/// Cut value of `s`, which must be a nonempty proper subset.
pub fn cut_value(g: &WeightedGraph, s: &VertexSet) -> Result<Weight, GraphError> {
    if s.is_empty() || s.len() >= g.n() {
        return Err(GraphError::TrivialCut);
    }
    if let Some(&v) = s.members().iter().find(|&&v| v >= g.n()) {
        return Err(GraphError::BadVertex(v));
    }
    Ok(g.cut_of(&s.indicator(g.n())))
}

pub fn parse_graph(text: &str) -> Result<WeightedGraph, GraphError> {
    parse_graph_with(text, DEFAULT_W_MAX)
}

/// Parses the edge-list format: `p n m`, then `e u v w` and `t u` records,
/// 1-based, with `#` comments.
pub fn parse_graph_with(text: &str, w_max: Weight) -> Result<WeightedGraph, GraphError> {
    let mut g: Option<WeightedGraph> = None;
    let mut declared = 0usize;
    let mut terminals: Vec<usize> = Vec::new();
    let mut saw_terminal = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let tok: Vec<&str> = s.split_whitespace().collect();
        match tok[0] {
            "p" => {
                if g.is_some() {
                    return Err(GraphError::DuplicateHeader { line });
                }
                if tok.len() != 3 {
                    return Err(GraphError::MalformedHeader { line });
                }
                let n: usize = tok[1].parse().map_err(|_| GraphError::MalformedHeader { line })?;
                declared = tok[2].parse().map_err(|_| GraphError::MalformedHeader { line })?;
                g = Some(WeightedGraph::new(n));
            }
            "e" => {
                let gr = g.as_mut().ok_or(GraphError::MissingHeader { line })?;
                if tok.len() != 4 {
                    return Err(GraphError::MalformedLine { line });
                }
                let num = |t: &str| t.parse::<i128>().map_err(|_| GraphError::MalformedLine { line });
                let (u, v, w) = (num(tok[1])?, num(tok[2])?, num(tok[3])?);
                let n = gr.n();
                for x in [u, v] {
                    if x < 1 || x > n as i128 {
                        return Err(GraphError::VertexOutOfRange { line, v: x, n });
                    }
                }
                if w < 1 || w > w_max as i128 {
                    return Err(GraphError::WeightOutOfRange { line, w, max: w_max });
                }
                if u == v {
                    return Err(GraphError::SelfLoop { line, v: u as usize });
                }
                gr.add_edge(u as usize - 1, v as usize - 1, w as Weight);
            }
            "t" => {
                let gr = g.as_ref().ok_or(GraphError::MissingHeader { line })?;
                if tok.len() != 2 {
                    return Err(GraphError::MalformedLine { line });
                }
                let v: i128 = tok[1].parse().map_err(|_| GraphError::MalformedLine { line })?;
                if v < 1 || v > gr.n() as i128 {
                    return Err(GraphError::VertexOutOfRange { line, v, n: gr.n() });
                }
                terminals.push(v as usize - 1);
                saw_terminal = true;
            }
            _ => return Err(GraphError::MalformedLine { line }),
        }
    }
    let mut g = g.ok_or(GraphError::Empty)?;
    if g.m() != declared {
        return Err(GraphError::EdgeCountMismatch { declared, found: g.m() });
    }
    if saw_terminal {
        g.set_terminals(Some(terminals));
    }
    Ok(g)
}

/// Serializes in the edge-list format.
pub fn write_graph(g: &WeightedGraph) -> String {
    let mut s = String::new();
    writeln!(s, "p {} {}", g.n(), g.m()).unwrap();
    for e in g.edges() {
        writeln!(s, "e {} {} {}", e.u + 1, e.v + 1, e.w).unwrap();
    }
    if let Some(t) = g.terminals() {
        for &v in t {
            writeln!(s, "t {}", v + 1).unwrap();
        }
    }
    s
}

/// Global minimum cut value over all vertices (Stoer-Wagner). Returns 0 for
/// disconnected graphs and `None` when n < 2.
pub fn global_min_cut(g: &WeightedGraph) -> Option<Weight> {
    let n = g.n();
    if n < 2 {
        return None;
    }
    let mut w = vec![vec![0 as Weight; n]; n];
    for e in g.edges() {
        w[e.u][e.v] += e.w;
        w[e.v][e.u] += e.w;
    }
    let mut alive: Vec<usize> = (0..n).collect();
    let mut best = Weight::MAX;
    while alive.len() > 1 {
        let k = alive.len();
        let mut key = vec![0 as Weight; k];
        let mut added = vec![false; k];
        let mut prev = 0;
        let mut last = 0;
        for step in 0..k {
            let mut sel = usize::MAX;
            for i in 0..k {
                if !added[i] && (sel == usize::MAX || key[i] > key[sel]) {
                    sel = i;
                }
            }
            added[sel] = true;
            if step == k - 1 {
                best = best.min(key[sel]);
            }
            prev = last;
            last = sel;
            for i in 0..k {
                if !added[i] {
                    key[i] += w[alive[sel]][alive[i]];
                }
            }
        }
        let (a, b) = (alive[prev], alive[last]);
        for i in 0..n {
            w[a][i] += w[b][i];
            w[i][a] = w[a][i];
        }
        w[a][a] = 0;
        alive.remove(last);
    }
    Some(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn parse_examples() {
        let g = parse_graph("p 3 2\ne 1 2 1\ne 2 3 2").unwrap();
        assert_eq!(g, fixtures::p3());
        let g = parse_graph("p 1 0").unwrap();
        assert_eq!((g.n(), g.m()), (1, 0));
        assert!(matches!(parse_graph("p 2 1\ne 1 2 0"), Err(GraphError::WeightOutOfRange { .. })));
    }

    #[test]
    fn parse_errors_are_distinct() {
        assert!(matches!(parse_graph("p 2"), Err(GraphError::MalformedHeader { line: 1 })));
        assert!(matches!(parse_graph("p 2 0\np 2 0"), Err(GraphError::DuplicateHeader { line: 2 })));
        assert!(matches!(parse_graph("p 2 1\ne 1 3 1"), Err(GraphError::VertexOutOfRange { .. })));
        assert!(matches!(parse_graph("p 2 2\ne 1 2 1"), Err(GraphError::EdgeCountMismatch { .. })));
        assert!(matches!(parse_graph("e 1 2 1"), Err(GraphError::MissingHeader { .. })));
        assert!(matches!(parse_graph("# nothing"), Err(GraphError::Empty)));
        assert!(matches!(parse_graph("p 2 1\ne 1 2 2000000"), Err(GraphError::WeightOutOfRange { .. })));
    }

    #[test]
    fn round_trip_with_terminals() {
        let mut g = fixtures::dumbbell();
        g.set_terminals(Some(vec![1, 4]));
        let back = parse_graph(&write_graph(&g)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn contraction_examples() {
        let (h, map) = contract(&fixtures::p3(), &[vec![0, 1]]).unwrap();
        assert_eq!(h.n(), 2);
        assert_eq!(h.edges(), &[Edge { u: 0, v: 1, w: 2 }]);
        assert_eq!(map.origin, vec![vec![0, 1], vec![2]]);
        let (h, _) = contract(&fixtures::k4(), &[vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(h.edges(), &[Edge { u: 0, v: 1, w: 4 }]);
        let g = fixtures::dumbbell();
        let (h, map) = contract(&g, &[]).unwrap();
        assert_eq!(h.simplified().edges(), g.simplified().edges());
        assert_eq!(map, ContractionMap::identity(g.n()));
        assert_eq!(contract(&g, &[vec![0, 1], vec![1]]), Err(GraphError::OverlappingParts(1)));
    }

    #[test]
    fn cut_examples() {
        let s = |v: &[usize]| VertexSet::new(v.to_vec());
        assert_eq!(cut_value(&fixtures::p3(), &s(&[0])), Ok(1));
        assert_eq!(cut_value(&fixtures::k4(), &s(&[0, 1])), Ok(4));
        assert_eq!(cut_value(&fixtures::dumbbell(), &s(&[0, 1, 2])), Ok(1));
        assert_eq!(cut_value(&fixtures::p3(), &s(&[])), Err(GraphError::TrivialCut));
        assert_eq!(cut_value(&fixtures::p3(), &s(&[0, 1, 2])), Err(GraphError::TrivialCut));
    }

    #[test]
    fn stoer_wagner_small() {
        assert_eq!(global_min_cut(&fixtures::k4()), Some(3));
        assert_eq!(global_min_cut(&fixtures::dumbbell()), Some(1));
        assert_eq!(global_min_cut(&WeightedGraph::new(2)), Some(0));
        assert_eq!(global_min_cut(&WeightedGraph::new(1)), None);
    }
}
