//! Terminal vertex sparsifiers, skeleton graphs, tree packings and guide
//! trees.
//!
//! The sparsifier replays the packing's event stream into Euler tours of the
//! solid forest R. Every terminal occurrence carries the value of the
//! contracted cycle edge leaving it; the value is flushed to G′ whenever the
//! cycle edge disappears and once more at the end. Weights of G′ are kept as
//! integers in half units with one common rational scale.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ett::EulerForest;
use crate::graph::{global_min_cut, Weight, WeightedGraph};
use crate::linkcut::RKind;
use crate::packing::{pack_steiner_subgraphs_with, BigRational, PackingError, PackingEvent, PackingOptions, Rational};

/// Crossing bound of the guide-tree guarantee.
pub const K_RESPECT: usize = 16;
/// Connectivity target of the skeleton.
pub const LAMBDA_MAX: i128 = 64;
/// Cuts up to this many terminals are checked exhaustively.
const EXHAUSTIVE_LIMIT: usize = 16;
const MAX_DOUBLINGS: u32 = 6;

#[derive(Debug, Error, PartialEq)]
pub enum SparsifierError {
    #[error("need at least two terminals, got {0}")]
    TooFewTerminals(usize),
    #[error("source {0} is not a terminal")]
    SourceNotTerminal(usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("packing: {0}")]
    Packing(#[from] PackingError),
    #[error("euler tour check failed: {0}")]
    Tour(String),
    #[error("skeleton inequalities fail for every tried scale")]
    Skeleton,
}

/// A graph on the terminals. Vertex `i` stands for `terminals[i]` and edge
/// weights are integers to be divided by `scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexSparsifier {
    pub terminals: Vec<usize>,
    pub graph: WeightedGraph,
    pub scale: BigRational,
    /// Value of the packing it came from.
    pub packing_value: BigRational,
    pub r_updates: usize,
    pub add_values: usize,
    pub flushes: usize,
}

impl VertexSparsifier {
    pub fn weight(&self, e: usize) -> BigRational {
        BigRational::from_integer(self.graph.edge(e).w as i128) / self.scale
    }

    /// Cut value of the terminal subset given as a mask over sparsifier ids.
    pub fn cut_mask(&self, mask: u64) -> BigRational {
        BigRational::from_integer(self.graph.cut_mask(mask) as i128) / self.scale
    }

    /// Cut value of a side given as original vertex ids.
    pub fn cut_of_original(&self, side: &[bool]) -> BigRational {
        let s: Vec<bool> = self.terminals.iter().map(|&t| side[t]).collect();
        BigRational::from_integer(self.graph.cut_of(&s) as i128) / self.scale
    }

    pub fn lambda(&self) -> BigRational {
        let raw = global_min_cut(&self.graph).unwrap_or(0);
        BigRational::from_integer(raw as i128) / self.scale
    }

    /// Weighted edge list over original ids with rational weights.
    pub fn edge_list(&self) -> Vec<(usize, usize, BigRational)> {
        self.graph
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| (self.terminals[e.u], self.terminals[e.v], self.weight(i)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ExtractOptions {
    pub packing: PackingOptions,
    /// Validates the stored tours and value conservation after every event.
    pub check_tours: bool,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions { packing: PackingOptions::default(), check_tours: false }
    }
}

pub fn extract_vertex_sparsifier(
    g: &WeightedGraph,
    terminals: &[usize],
    epsilon: Rational,
) -> Result<VertexSparsifier, SparsifierError> {
    extract_vertex_sparsifier_with(g, terminals, epsilon, ExtractOptions::default())
}

pub fn extract_vertex_sparsifier_with(
    g: &WeightedGraph,
    terminals: &[usize],
    epsilon: Rational,
    opts: ExtractOptions,
) -> Result<VertexSparsifier, SparsifierError> {
    let mut u: Vec<usize> = terminals.to_vec();
    u.sort_unstable();
    u.dedup();
    if u.len() < 2 {
        return Err(SparsifierError::TooFewTerminals(u.len()));
    }
    let run = pack_steiner_subgraphs_with(g, &u, epsilon, opts.packing)?;
    let n = g.n();
    let mut is_t = vec![false; n];
    for &t in &u {
        is_t[t] = true;
    }
    let mut tours = EulerForest::new(n, &is_t, true);
    let mut check = opts.check_tours.then(|| TourCheck::new(n, is_t.clone()));
    let (mut r_updates, mut add_values) = (0, 0);
    for ev in &run.events {
        match *ev {
            PackingEvent::R(r) => {
                r_updates += 1;
                match r.kind {
                    RKind::Insert => tours.link(r.u, r.v, None),
                    RKind::Delete => {
                        tours.cut(r.u, r.v);
                    }
                }
                if let Some(c) = check.as_mut() {
                    c.update(r.kind, r.u, r.v);
                    c.verify(&tours, &[r.u, r.v])?;
                }
            }
            PackingEvent::AddValue(v) => {
                add_values += 1;
                tours.add_cycle(u[0], v);
                if let Some(c) = check.as_mut() {
                    c.add(&tours, u[0], v)?;
                    c.verify(&tours, &[u[0]])?;
                }
            }
        }
    }
    tours.flush_all();
    if let Some(c) = check.as_ref() {
        c.conserved(&tours)?;
    }
    let index: HashMap<usize, usize> = u.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let mut acc: BTreeMap<(usize, usize), Weight> = BTreeMap::new();
    for f in &tours.flushed {
        let (a, b) = (index[&f.a], index[&f.b]);
        if a != b && f.half_units > 0 {
            *acc.entry((a.min(b), a.max(b))).or_insert(0) += f.half_units;
        }
    }
    let mut h = WeightedGraph::new(u.len());
    for ((a, b), w) in acc {
        h.add_edge(a, b, w);
    }
    Ok(VertexSparsifier {
        terminals: u,
        graph: h,
        scale: run.packing.scale * BigRational::from_integer(2),
        packing_value: run.packing.total_value(),
        r_updates,
        add_values,
        flushes: tours.flushed.len(),
    })
}

/// Independent bookkeeping for the replay: a plain edge set for R and the
/// total value ever added to the cycle.
struct TourCheck {
    terminal: Vec<bool>,
    adj: Vec<BTreeSet<usize>>,
    added: i128,
}

impl TourCheck {
    fn new(n: usize, terminal: Vec<bool>) -> Self {
        TourCheck { terminal, adj: vec![BTreeSet::new(); n], added: 0 }
    }

    fn update(&mut self, kind: RKind, u: usize, v: usize) {
        match kind {
            RKind::Insert => {
                self.adj[u].insert(v);
                self.adj[v].insert(u);
            }
            RKind::Delete => {
                self.adj[u].remove(&v);
                self.adj[v].remove(&u);
            }
        }
    }

    fn component(&self, v: usize) -> Vec<usize> {
        let mut seen = BTreeSet::from([v]);
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            for &y in &self.adj[x] {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// The stored sequence must be a closed walk using every arc of the
    /// current tree exactly once, i.e. an Euler tour, and its terminal
    /// occurrences must be exactly those of that walk.
    fn verify(&self, tours: &EulerForest, roots: &[usize]) -> Result<(), SparsifierError> {
        for &r in roots {
            let comp = self.component(r);
            let seq = tours.sequence(r);
            let verts: BTreeSet<usize> = seq.iter().filter(|x| x.0 == x.1).map(|x| x.0).collect();
            if verts != comp.iter().copied().collect() {
                return Err(SparsifierError::Tour(format!("tour of {r} visits {verts:?}, tree is {comp:?}")));
            }
            let arcs: Vec<(usize, usize)> = seq.iter().filter(|x| x.0 != x.1).map(|x| (x.0, x.1)).collect();
            let want: BTreeSet<(usize, usize)> =
                comp.iter().flat_map(|&x| self.adj[x].iter().map(move |&y| (x, y))).collect();
            let got: BTreeSet<(usize, usize)> = arcs.iter().copied().collect();
            if got.len() != arcs.len() || got != want {
                return Err(SparsifierError::Tour(format!("tour of {r} has arcs {arcs:?}")));
            }
            for i in 0..arcs.len() {
                if arcs[i].1 != arcs[(i + 1) % arcs.len()].0 {
                    return Err(SparsifierError::Tour(format!("tour of {r} breaks after arc {:?}", arcs[i])));
                }
            }
            for x in &seq {
                if x.0 != x.1 && !self.terminal[x.0] && x.2 != 0 {
                    return Err(SparsifierError::Tour(format!("non-terminal occurrence of {} holds value", x.0)));
                }
            }
        }
        Ok(())
    }

    fn add(&mut self, tours: &EulerForest, t: usize, v: Weight) -> Result<(), SparsifierError> {
        let occ = tours.sequence(t).iter().filter(|x| x.0 != x.1 && self.terminal[x.0]).count();
        if occ < 2 {
            return Err(SparsifierError::Tour(format!("cycle has {occ} terminal occurrences")));
        }
        self.added += occ as i128 * v as i128;
        Ok(())
    }

    fn conserved(&self, tours: &EulerForest) -> Result<(), SparsifierError> {
        let flushed: i128 = tours.flushed.iter().map(|f| f.half_units as i128).sum();
        if flushed != self.added {
            return Err(SparsifierError::Tour(format!("flushed {flushed} half units, added {}", self.added)));
        }
        Ok(())
    }
}

/// Unweighted multigraph on the sparsifier's vertices; `graph` weights are
/// multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkeletonGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize, Weight)>,
    pub w_skel: BigRational,
    pub lambda_h: Weight,
    /// True when every G′ weight is an exact multiple of `w_skel`.
    pub exact: bool,
}

impl SkeletonGraph {
    pub fn multigraph(&self) -> WeightedGraph {
        WeightedGraph::from_edges(self.n, &self.edges)
    }
}

fn big(x: i128) -> BigRational {
    BigRational::from_integer(x)
}

fn ceil_div(a: &BigRational, b: &BigRational) -> i128 {
    (a / b).ceil().to_integer()
}

/// All cuts of the skeleton checked against both inequalities.
fn skeleton_holds(
    sp: &VertexSparsifier,
    h: &WeightedGraph,
    w: &BigRational,
    c: &BigRational,
    eps: &BigRational,
) -> bool {
    let k = sp.graph.n();
    let lam = sp.lambda();
    let one = big(1);
    let ok = |mask: u64| {
        let wg = sp.cut_mask(mask);
        let wh = w * big(h.cut_mask(mask) as i128);
        if wh < (&one - eps) * &lam {
            return false;
        }
        !(wg <= c * &lam && wh > (&one + eps) * &wg)
    };
    if k <= EXHAUSTIVE_LIMIT {
        let full = (1u64 << k) - 1;
        return (1..full).filter(|m| m & 1 == 1).all(ok);
    }
    (0..k).all(|v| ok(1 << v)) && (0..k).all(|v| ok(((1u64 << (v + 1)) - 1) & !(1u64 << k)))
}

/// Builds H with multiplicities `⌈w/W⌉`. Exact splitting is used when the
/// common divisor of the weights already gives connectivity at most
/// [`LAMBDA_MAX`]; otherwise `W = λ_{G′}/Λ` with Λ doubled until both
/// inequalities hold on every checked cut.
pub fn build_skeleton(sp: &VertexSparsifier, c: Rational, epsilon: Rational) -> Result<SkeletonGraph, SparsifierError> {
    let k = sp.graph.n();
    if k < 2 || !sp.graph.is_connected() {
        return Err(SparsifierError::Disconnected);
    }
    let c = BigRational::new(*c.numer() as i128, *c.denom() as i128);
    let eps = BigRational::new(*epsilon.numer() as i128, *epsilon.denom() as i128);
    let lam = sp.lambda();
    let gcd = sp.graph.edges().iter().fold(0i128, |acc, e| acc.gcd(&(e.w as i128)));
    let w_gcd = big(gcd) / sp.scale;
    let build = |w: &BigRational| {
        let edges: Vec<(usize, usize, Weight)> = sp
            .graph
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| (e.u, e.v, ceil_div(&sp.weight(i), w) as Weight))
            .collect();
        WeightedGraph::from_edges(k, &edges)
    };
    let finish = |h: WeightedGraph, w: BigRational, exact: bool| SkeletonGraph {
        n: k,
        edges: h.edges().iter().map(|e| (e.u, e.v, e.w)).collect(),
        w_skel: w,
        lambda_h: global_min_cut(&h).unwrap_or(0),
        exact,
    };
    if weights_integral(sp) && lam <= big(LAMBDA_MAX) {
        return Ok(finish(build(&big(1)), big(1), true));
    }
    if ceil_div(&lam, &w_gcd) <= LAMBDA_MAX {
        return Ok(finish(build(&w_gcd), w_gcd, true));
    }
    for d in 0..=MAX_DOUBLINGS {
        let w = &lam / big(LAMBDA_MAX << d);
        let h = build(&w);
        if skeleton_holds(sp, &h, &w, &c, &eps) {
            return Ok(finish(h, w, false));
        }
    }
    Err(SparsifierError::Skeleton)
}

fn weights_integral(sp: &VertexSparsifier) -> bool {
    (0..sp.graph.m()).all(|i| sp.weight(i).is_integer())
}

/// A tree on skeleton vertices with its packing value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackedTree {
    pub edges: Vec<(usize, usize)>,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreePacking {
    pub trees: Vec<PackedTree>,
    /// Set when the greedy rounds fell short and the forest-union packing of
    /// the doubled multigraph was used.
    pub used_fallback: bool,
}

impl TreePacking {
    pub fn total(&self) -> Rational {
        self.trees.iter().map(|t| t.value).sum()
    }
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let nx = self.0[y];
            self.0[y] = r;
            y = nx;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

/// Maximum spanning tree by residual multiplicity, returned as edge-class
/// indices, or `None` if the positive classes do not span.
fn max_bottleneck_tree(n: usize, classes: &[(usize, usize)], residual: &[i64]) -> Option<Vec<usize>> {
    let mut order: Vec<usize> = (0..classes.len()).filter(|&i| residual[i] > 0).collect();
    order.sort_by(|&a, &b| residual[b].cmp(&residual[a]).then(a.cmp(&b)));
    let mut d = Dsu::new(n);
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    for i in order {
        if d.union(classes[i].0, classes[i].1) {
            tree.push(i);
        }
    }
    (tree.len() + 1 == n).then_some(tree)
}

/// Greedy packing in half units: repeatedly take a max-bottleneck spanning
/// tree and give it the smaller of its bottleneck and the granularity.
fn greedy_round(
    n: usize,
    classes: &[(usize, usize)],
    mult: &[i64],
    gran: i64,
    target: i64,
    cap: usize,
) -> Option<Vec<(Vec<usize>, i64)>> {
    let mut residual: Vec<i64> = mult.iter().map(|m| 2 * m).collect();
    let mut out = Vec::new();
    let mut total = 0;
    while total < target {
        if out.len() >= cap {
            return None;
        }
        let tree = max_bottleneck_tree(n, classes, &residual)?;
        let v = tree.iter().map(|&i| residual[i]).min().unwrap().min(gran).min(target - total);
        for &i in &tree {
            residual[i] -= v;
        }
        total += v;
        out.push((tree, v));
    }
    Some(out)
}

/// `k` edge-disjoint spanning trees of a multigraph given as expanded edge
/// copies, by shortest augmenting paths in the union of graphic matroids.
fn disjoint_spanning_trees(n: usize, copies: &[(usize, usize)], k: usize) -> Option<Vec<Vec<usize>>> {
    let mut owner: Vec<Option<usize>> = vec![None; copies.len()];
    let mut size = vec![0usize; k];
    let need = k * (n - 1);
    let mut placed = 0;
    for start in 0..copies.len() {
        if placed == need {
            break;
        }
        let mut adj: Vec<Vec<Vec<(usize, usize)>>> = vec![vec![Vec::new(); n]; k];
        for (i, o) in owner.iter().enumerate() {
            if let Some(f) = *o {
                adj[f][copies[i].0].push((copies[i].1, i));
                adj[f][copies[i].1].push((copies[i].0, i));
            }
        }
        let path = |f: usize, a: usize, b: usize| -> Option<Vec<usize>> {
            let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
            let mut seen = vec![false; n];
            seen[a] = true;
            let mut stack = vec![a];
            while let Some(x) = stack.pop() {
                for &(y, e) in &adj[f][x] {
                    if !seen[y] {
                        seen[y] = true;
                        prev[y] = Some((x, e));
                        stack.push(y);
                    }
                }
            }
            if !seen[b] {
                return None;
            }
            let mut out = Vec::new();
            let mut x = b;
            while x != a {
                let (p, e) = prev[x].unwrap();
                out.push(e);
                x = p;
            }
            Some(out)
        };
        let mut label: HashMap<usize, (usize, usize)> = HashMap::new();
        let mut queue = std::collections::VecDeque::from([start]);
        let mut visited = vec![false; copies.len()];
        visited[start] = true;
        let mut found = None;
        'bfs: while let Some(x) = queue.pop_front() {
            for f in 0..k {
                if owner[x] == Some(f) {
                    continue;
                }
                match path(f, copies[x].0, copies[x].1) {
                    None => {
                        found = Some((x, f));
                        break 'bfs;
                    }
                    Some(cycle) => {
                        for y in cycle {
                            if !visited[y] {
                                visited[y] = true;
                                label.insert(y, (x, f));
                                queue.push_back(y);
                            }
                        }
                    }
                }
            }
        }
        let Some((mut x, mut f)) = found else { continue };
        loop {
            if let Some(o) = owner[x] {
                size[o] -= 1;
            }
            owner[x] = Some(f);
            size[f] += 1;
            match label.get(&x) {
                None => break,
                Some(&(px, pf)) => {
                    x = px;
                    f = pf;
                }
            }
        }
        placed += 1;
    }
    if placed < need {
        return None;
    }
    let mut trees = vec![Vec::new(); k];
    for (i, o) in owner.iter().enumerate() {
        if let Some(f) = o {
            trees[*f].push(i);
        }
    }
    Some(trees)
}

/// Feasible tree packing of value at least `λ_H/2` with at most `λ_H` trees.
pub fn tree_packing(h: &SkeletonGraph) -> Result<TreePacking, SparsifierError> {
    let g = h.multigraph();
    if h.n < 2 || !g.is_connected() {
        return Err(SparsifierError::Disconnected);
    }
    let mut merged: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    for &(a, b, m) in &h.edges {
        *merged.entry((a.min(b), a.max(b))).or_insert(0) += m;
    }
    let classes: Vec<(usize, usize)> = merged.keys().copied().collect();
    let mult: Vec<i64> = merged.values().copied().collect();
    let lam = h.lambda_h;
    let cap = lam as usize;
    let mut gran = mult.iter().copied().max().unwrap() * 2;
    loop {
        if let Some(trees) = greedy_round(h.n, &classes, &mult, gran, lam, cap) {
            return Ok(TreePacking {
                trees: trees
                    .into_iter()
                    .map(|(t, v)| PackedTree {
                        edges: t.iter().map(|&i| classes[i]).collect(),
                        value: Rational::new(v, 2),
                    })
                    .collect(),
                used_fallback: false,
            });
        }
        if gran == 1 {
            break;
        }
        gran = (gran / 2).max(1);
    }
    let mut copies = Vec::new();
    for (i, &(a, b)) in classes.iter().enumerate() {
        for _ in 0..2 * mult[i] {
            copies.push((a, b));
        }
    }
    let trees = disjoint_spanning_trees(h.n, &copies, cap).ok_or(SparsifierError::Disconnected)?;
    Ok(TreePacking {
        trees: trees
            .into_iter()
            .map(|t| PackedTree { edges: t.iter().map(|&i| copies[i]).collect(), value: Rational::new(1, 2) })
            .collect(),
        used_fallback: true,
    })
}

/// Checks that each edge class carries at most its multiplicity.
pub fn packing_is_feasible(h: &SkeletonGraph, p: &TreePacking) -> bool {
    let mut cap: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for &(a, b, m) in &h.edges {
        *cap.entry((a.min(b), a.max(b))).or_insert_with(Rational::zero) += Rational::from_integer(m);
    }
    for t in &p.trees {
        let mut d = Dsu::new(h.n);
        if t.edges.len() + 1 != h.n || !t.edges.iter().all(|&(a, b)| d.union(a, b)) {
            return false;
        }
        for &(a, b) in &t.edges {
            match cap.get_mut(&(a.min(b), a.max(b))) {
                Some(c) => *c -= t.value,
                None => return false,
            }
        }
    }
    cap.values().all(|c| *c >= Rational::zero())
}

#[derive(Debug, Clone, Copy)]
pub struct GuideTreeOptions {
    /// Packing accuracy used for the sparsifier.
    pub epsilon: Rational,
    pub check_bracket: bool,
}

impl Default for GuideTreeOptions {
    fn default() -> Self {
        GuideTreeOptions { epsilon: Rational::new(1, 10), check_bracket: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuideTreeSet {
    /// Trees over original vertex ids, each spanning the terminals.
    pub trees: Vec<Vec<(usize, usize)>>,
    pub values: Vec<Rational>,
    pub terminals: Vec<usize>,
    pub k_respect: usize,
    pub lambda_h: Weight,
    pub w_skel: BigRational,
    pub used_fallback: bool,
}

pub fn guide_trees(g: &WeightedGraph, terminals: &[usize], s: usize) -> Result<GuideTreeSet, SparsifierError> {
    guide_trees_with(g, terminals, s, GuideTreeOptions::default())
}

pub fn guide_trees_with(
    g: &WeightedGraph,
    terminals: &[usize],
    s: usize,
    opts: GuideTreeOptions,
) -> Result<GuideTreeSet, SparsifierError> {
    if !terminals.contains(&s) {
        return Err(SparsifierError::SourceNotTerminal(s));
    }
    let extract = ExtractOptions { packing: PackingOptions { check_bracket: opts.check_bracket }, check_tours: false };
    let sp = extract_vertex_sparsifier_with(g, terminals, opts.epsilon, extract)?;
    let h = build_skeleton(&sp, Rational::from_integer(5), Rational::new(1, 5))?;
    let p = tree_packing(&h)?;
    let map = |(a, b): (usize, usize)| (sp.terminals[a], sp.terminals[b]);
    Ok(GuideTreeSet {
        trees: p.trees.iter().map(|t| t.edges.iter().map(|&e| map(e)).collect()).collect(),
        values: p.trees.iter().map(|t| t.value).collect(),
        terminals: sp.terminals.clone(),
        k_respect: K_RESPECT,
        lambda_h: h.lambda_h,
        w_skel: h.w_skel,
        used_fallback: p.used_fallback,
    })
}

/// Number of tree edges with exactly one endpoint in `side`.
pub fn crossing_count(tree: &[(usize, usize)], side: &[bool]) -> usize {
    tree.iter().filter(|&&(a, b)| side[a] != side[b]).count()
}

/// Converts a scale-bearing value to `f64` for display.
pub fn approx(x: &BigRational) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}
