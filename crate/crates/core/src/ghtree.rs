//! Gomory-Hu Steiner trees from balanced families of minimal mincuts, and
//! k-edge-connected components.
//!
//! [`ghtree_step`] finds the largest τ whose τ-connected component holds ¾
//! of the terminals, then collects disjoint minimal (v,r)-mincuts around a
//! pivot r with isolating cuts and expander halving. [`ghtree`] recurses on
//! both sides of every cut and joins the pieces.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expander::{expander_decompose, DemandVector};
use crate::flow::{isolating_cuts, st_mincut, MinCutResult};
use crate::graph::{contract, GraphError, VertexSet, Weight, WeightedGraph};
use crate::hitmiss::{ceil_log2, hit_and_miss_family, HitMissFamily};
use crate::oracle::ConnectivityMatrix;
use crate::packing::Rational;
use crate::ssmc::{ssmc_all, SsmcConfig, SsmcError};

#[derive(Debug, Error, PartialEq)]
pub enum GhError {
    #[error("need at least {need} terminals, got {got}")]
    TooFewTerminals { need: usize, got: usize },
    #[error("vertex {0} out of range")]
    BadVertex(usize),
    #[error("threshold must be at least 1")]
    ZeroThreshold,
    #[error("terminals are not connected")]
    Disconnected,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("single-source mincuts: {0}")]
    Ssmc(#[from] SsmcError),
    #[error("graph: {0}")]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy)]
pub struct GhConfig {
    pub ssmc: SsmcConfig,
    /// Multiplier of the path-decomposition depth in the round count.
    pub c_path: usize,
    /// Caps the rounds of each decomposition phase at |U|.
    pub cap_rounds: bool,
    /// Overrides ψ in every phase.
    pub psi: Option<Rational>,
    /// Overrides the leaf bound L in every phase.
    pub leaf_bound: Option<usize>,
    pub parallel: bool,
}

impl GhConfig {
    pub fn faithful() -> Self {
        GhConfig {
            ssmc: SsmcConfig::faithful(),
            c_path: 1,
            cap_rounds: false,
            psi: None,
            leaf_bound: None,
            parallel: true,
        }
    }

    pub fn fast() -> Self {
        GhConfig { ssmc: SsmcConfig::fast(), cap_rounds: true, ..GhConfig::faithful() }
    }
}

impl Default for GhConfig {
    fn default() -> Self {
        GhConfig::faithful()
    }
}

/// A minimal (v,r)-mincut `side` and its value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CutTriple {
    pub side: VertexSet,
    pub v: usize,
    pub r: usize,
    pub value: Weight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// |C| < 15/16·|U|: cuts around the vertices outside C.
    Outside,
    /// |C| ≥ 15/16·|U|: cuts of value τ inside C.
    Inside,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionResult {
    pub pivot: usize,
    pub tau: Weight,
    pub component: VertexSet,
    pub branch: Branch,
    pub triples: Vec<CutTriple>,
    /// Why the classic single split replaced the decomposition, if it did.
    pub fallback: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GhStats {
    pub steps: usize,
    pub fallbacks: usize,
    pub fallback_notes: Vec<String>,
    pub outside_branches: usize,
    pub inside_branches: usize,
    pub detect_calls: usize,
    pub ssmc_calls: usize,
    pub isolating_calls: usize,
    pub expander_calls: usize,
    pub max_depth: usize,
}

impl GhStats {
    fn merge(&mut self, o: GhStats) {
        self.steps += o.steps;
        self.fallbacks += o.fallbacks;
        self.fallback_notes.extend(o.fallback_notes);
        self.outside_branches += o.outside_branches;
        self.inside_branches += o.inside_branches;
        self.detect_calls += o.detect_calls;
        self.ssmc_calls += o.ssmc_calls;
        self.isolating_calls += o.isolating_calls;
        self.expander_calls += o.expander_calls;
        self.max_depth = self.max_depth.max(o.max_depth);
    }
}

/// Tree on the terminals with a map of every vertex to a terminal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GomoryHuTree {
    pub n: usize,
    pub terminals: Vec<usize>,
    pub edges: Vec<(usize, usize, Weight)>,
    pub f: Vec<usize>,
}

/// A pair whose tree answer disagrees with the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GhViolation {
    pub s: usize,
    pub t: usize,
    pub tree_value: Option<Weight>,
    pub true_value: Weight,
    pub cut_value: Option<Weight>,
}

impl fmt::Display for GhViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pair ({}, {}): λ = {}", self.s + 1, self.t + 1, self.true_value)?;
        match self.tree_value {
            Some(x) => write!(f, ", tree path minimum {x}")?,
            None => write!(f, ", no tree path")?,
        }
        if let Some(c) = self.cut_value {
            write!(f, ", induced cut {c}")?;
        }
        Ok(())
    }
}

impl GomoryHuTree {
    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n];
        for (i, &(a, b, _)) in self.edges.iter().enumerate() {
            adj[a].push((b, i));
            adj[b].push((a, i));
        }
        adj
    }

    /// Lightest edge on the s–t path, by index.
    pub fn path_min(&self, s: usize, t: usize) -> Option<usize> {
        if s == t {
            return None;
        }
        let adj = self.adjacency();
        let mut via = vec![usize::MAX; self.n];
        let mut seen = vec![false; self.n];
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            for &(y, e) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    via[y] = e;
                    q.push_back(y);
                }
            }
        }
        if !seen[t] {
            return None;
        }
        let mut best: Option<usize> = None;
        let mut x = t;
        while x != s {
            let e = via[x];
            if best.map_or(true, |b| self.edges[e].2 < self.edges[b].2) {
                best = Some(e);
            }
            let (a, b, _) = self.edges[e];
            x = if a == x { b } else { a };
        }
        best
    }

    pub fn lambda(&self, s: usize, t: usize) -> Option<Weight> {
        self.path_min(s, t).map(|e| self.edges[e].2)
    }

    /// Preimage under f of the side of `x` after deleting `edge`.
    pub fn edge_side(&self, edge: usize, x: usize) -> Vec<bool> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        seen[x] = true;
        let mut q = VecDeque::from([x]);
        while let Some(a) = q.pop_front() {
            for &(b, e) in &adj[a] {
                if e != edge && !seen[b] {
                    seen[b] = true;
                    q.push_back(b);
                }
            }
        }
        (0..self.n).map(|v| seen[self.f[v]]).collect()
    }

    /// Parts of U after deleting the edges lighter than `k`, with f-preimages.
    pub fn components_at(&self, k: Weight) -> Vec<Vec<usize>> {
        let mut dsu: Vec<usize> = (0..self.n).collect();
        fn find(d: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while d[r] != r {
                r = d[r];
            }
            let mut y = x;
            while d[y] != r {
                let nx = d[y];
                d[y] = r;
                y = nx;
            }
            r
        }
        for &(a, b, w) in &self.edges {
            if w >= k {
                let (ra, rb) = (find(&mut dsu, a), find(&mut dsu, b));
                dsu[ra] = rb;
            }
        }
        let mut by_root: HashMap<usize, Vec<usize>> = HashMap::new();
        for v in 0..self.n {
            let r = find(&mut dsu, self.f[v]);
            by_root.entry(r).or_default().push(v);
        }
        let mut parts: Vec<Vec<usize>> = by_root.into_values().collect();
        parts.sort();
        parts
    }

    /// Structural checks: a spanning tree of U, f maps into U and fixes U.
    pub fn check_shape(&self) -> Result<(), String> {
        if self.f.len() != self.n {
            return Err(format!("f has {} entries for {} vertices", self.f.len(), self.n));
        }
        let mut is_t = vec![false; self.n];
        for &t in &self.terminals {
            if t >= self.n {
                return Err(format!("terminal {} out of range", t + 1));
            }
            is_t[t] = true;
        }
        for v in 0..self.n {
            if self.f[v] >= self.n || !is_t[self.f[v]] {
                return Err(format!("f({}) is not a terminal", v + 1));
            }
            if is_t[v] && self.f[v] != v {
                return Err(format!("f moves terminal {}", v + 1));
            }
        }
        if self.edges.len() + 1 != self.terminals.len().max(1) {
            return Err(format!("{} edges on {} terminals", self.edges.len(), self.terminals.len()));
        }
        for &(a, b, _) in &self.edges {
            if a >= self.n || b >= self.n || !is_t[a] || !is_t[b] {
                return Err("tree edge leaves the terminal set".into());
            }
        }
        if let Some(&s) = self.terminals.first() {
            if let Some(&t) = self.terminals.iter().find(|&&t| t != s && self.path_min(s, t).is_none()) {
                return Err(format!("terminals {} and {} are not joined", s + 1, t + 1));
            }
        }
        Ok(())
    }

    /// Every pair against the connectivity matrix, and every edge's cut.
    pub fn check_against(&self, g: &WeightedGraph, o: &ConnectivityMatrix) -> Result<(), GhViolation> {
        self.check_with(g, |s, t| o.lambda(s, t))
    }

    /// Every pair against a maxflow.
    pub fn check_by_flow(&self, g: &WeightedGraph) -> Result<(), GhViolation> {
        self.check_with(g, |s, t| st_mincut(g, s, t).value)
    }

    fn check_with(&self, g: &WeightedGraph, lambda: impl Fn(usize, usize) -> Weight) -> Result<(), GhViolation> {
        for (i, &s) in self.terminals.iter().enumerate() {
            for &t in &self.terminals[i + 1..] {
                let want = lambda(s, t);
                let e = self.path_min(s, t);
                let tree_value = e.map(|e| self.edges[e].2);
                let cut_value = e.map(|e| {
                    let side = self.edge_side(e, s);
                    if side[t] {
                        Weight::MIN
                    } else {
                        g.cut_of(&side)
                    }
                });
                if tree_value != Some(want) || cut_value != Some(want) {
                    return Err(GhViolation { s, t, tree_value, true_value: want, cut_value });
                }
            }
        }
        Ok(())
    }

    /// "g u v w" tree lines then "f v t" lines, 1-indexed.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for &(a, b, w) in &self.edges {
            out.push_str(&format!("g {} {} {}\n", a + 1, b + 1, w));
        }
        for (v, &t) in self.f.iter().enumerate() {
            out.push_str(&format!("f {} {}\n", v + 1, t + 1));
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<GomoryHuTree, String> {
        let mut edges = Vec::new();
        let mut fmap: Vec<Option<usize>> = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('#') {
                continue;
            }
            let tok: Vec<&str> = line.split_whitespace().collect();
            let num = |i: usize| -> Result<i64, String> {
                tok.get(i)
                    .ok_or(format!("line {}: missing field", ln + 1))?
                    .parse::<i64>()
                    .map_err(|e| format!("line {}: {e}", ln + 1))
            };
            let id = |i: usize| -> Result<usize, String> {
                let x = num(i)?;
                if x < 1 {
                    return Err(format!("line {}: vertex ids start at 1", ln + 1));
                }
                Ok(x as usize - 1)
            };
            match tok[0] {
                "g" if tok.len() == 4 => edges.push((id(1)?, id(2)?, num(3)?)),
                "f" if tok.len() == 3 => {
                    let (v, t) = (id(1)?, id(2)?);
                    if fmap.len() <= v {
                        fmap.resize(v + 1, None);
                    }
                    if fmap[v].replace(t).is_some() {
                        return Err(format!("line {}: f({}) given twice", ln + 1, v + 1));
                    }
                }
                _ => return Err(format!("line {}: expected \"g u v w\" or \"f v t\"", ln + 1)),
            }
        }
        let n = fmap.len();
        let f: Vec<usize> = fmap
            .into_iter()
            .enumerate()
            .map(|(v, t)| t.ok_or(format!("f({}) missing", v + 1)))
            .collect::<Result<_, _>>()?;
        let mut terminals: Vec<usize> = f.clone();
        terminals.sort_unstable();
        terminals.dedup();
        if edges.iter().any(|&(a, b, _)| a >= n || b >= n) {
            return Err("tree edge names a vertex without an f line".into());
        }
        Ok(GomoryHuTree { n, terminals, edges, f })
    }
}

/// A Gomory-Hu tree rooted at r whose cut below each terminal's lightest
/// root-path edge (the one nearest the terminal) is the minimal mincut.
#[derive(Debug, Clone)]
pub struct RootedMinimalGHTree {
    pub tree: GomoryHuTree,
    pub root: usize,
    /// Parent terminal and edge weight, `None` at the root and off U.
    pub parent: Vec<Option<(usize, Weight)>>,
}

impl RootedMinimalGHTree {
    pub fn from_tree(tree: GomoryHuTree, root: usize) -> Self {
        let adj = tree.adjacency();
        let mut parent = vec![None; tree.n];
        let mut seen = vec![false; tree.n];
        seen[root] = true;
        let mut q = VecDeque::from([root]);
        while let Some(x) = q.pop_front() {
            for &(y, e) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some((x, tree.edges[e].2));
                    q.push_back(y);
                }
            }
        }
        RootedMinimalGHTree { tree, root, parent }
    }

    /// Terminals on the path from `v` up to the root, both included.
    pub fn root_path(&self, v: usize) -> Vec<usize> {
        let mut p = vec![v];
        let mut x = v;
        while let Some((y, _)) = self.parent[x] {
            p.push(y);
            x = y;
        }
        p
    }

    /// c(v): the lower end of the lightest root-path edge nearest `v`.
    pub fn cut_vertex(&self, v: usize) -> Option<usize> {
        let mut best: Option<(usize, Weight)> = None;
        let mut x = v;
        while let Some((y, w)) = self.parent[x] {
            if best.map_or(true, |(_, bw)| w < bw) {
                best = Some((x, w));
            }
            x = y;
        }
        best.map(|(c, _)| c)
    }

    /// Terminals in the subtree of `c`.
    pub fn subtree(&self, c: usize) -> Vec<usize> {
        let mut out: Vec<usize> =
            self.tree.terminals.iter().copied().filter(|&t| self.root_path(t).contains(&c)).collect();
        out.sort_unstable();
        out
    }

    /// f-preimage of the subtree of c(v).
    pub fn minimal_cut(&self, v: usize) -> Option<VertexSet> {
        let c = self.cut_vertex(v)?;
        let sub = self.subtree(c);
        Some((0..self.tree.n).filter(|&x| sub.binary_search(&self.tree.f[x]).is_ok()).collect())
    }

    /// m(v) = |M_{v,r} ∩ U|.
    pub fn m(&self, v: usize) -> usize {
        self.cut_vertex(v).map_or(self.tree.terminals.len(), |c| self.subtree(c).len())
    }

    /// Number of heavy paths met by the root path of `v`.
    pub fn path_distance(&self, v: usize) -> usize {
        let size = |x: usize| self.subtree(x).len();
        let mut d = 1;
        let mut x = v;
        while let Some((y, _)) = self.parent[x] {
            let heavy = self
                .tree
                .terminals
                .iter()
                .copied()
                .filter(|&c| self.parent[c].map(|p| p.0) == Some(y))
                .max_by_key(|&c| (size(c), std::cmp::Reverse(c)));
            if heavy != Some(x) {
                d += 1;
            }
            x = y;
        }
        d
    }
}

/// Rooted minimal tree from a classic Gomory-Hu tree of a perturbed graph:
/// weights scaled by n+1 plus a unit edge from every vertex to r make each
/// (t,r)-mincut unique and vertex-minimal.
pub fn rooted_minimal_tree(g: &WeightedGraph, u: &[usize], r: usize) -> Result<RootedMinimalGHTree, GhError> {
    let u = check_terminals(g, u, 1)?;
    if !u.contains(&r) {
        return Err(GhError::Precondition(format!("root {} is not a terminal", r + 1)));
    }
    let n = g.n();
    let scale = n as Weight + 1;
    let mut h = WeightedGraph::new(n);
    for e in g.edges() {
        h.add_edge(e.u, e.v, e.w * scale);
    }
    for v in (0..n).filter(|&v| v != r) {
        h.add_edge(v, r, 1);
    }
    let mut t = classic_ghtree(&h, &u)?;
    for e in t.edges.iter_mut() {
        e.2 /= scale;
    }
    t.n = n;
    Ok(RootedMinimalGHTree::from_tree(t, r))
}

fn check_terminals(g: &WeightedGraph, u: &[usize], need: usize) -> Result<Vec<usize>, GhError> {
    let mut u = u.to_vec();
    u.sort_unstable();
    u.dedup();
    if let Some(&v) = u.iter().find(|&&v| v >= g.n()) {
        return Err(GhError::BadVertex(v));
    }
    if u.len() < need {
        return Err(GhError::TooFewTerminals { need, got: u.len() });
    }
    Ok(u)
}

/// Per-invocation state: memoized single-source mincuts, isolating cuts and
/// hit-and-miss families, plus counters.
struct Step<'a> {
    g: &'a WeightedGraph,
    u: Vec<usize>,
    in_u: Vec<bool>,
    cfg: &'a GhConfig,
    logn: usize,
    log_nw: usize,
    gamma: i64,
    lam: RefCell<HashMap<usize, Vec<Weight>>>,
    iso: RefCell<HashMap<Vec<usize>, Vec<MinCutResult>>>,
    families: RefCell<HashMap<(usize, usize), HitMissFamily>>,
    stats: RefCell<GhStats>,
}

impl<'a> Step<'a> {
    fn new(g: &'a WeightedGraph, u: Vec<usize>, cfg: &'a GhConfig) -> Self {
        let n = g.n();
        let mut in_u = vec![false; n];
        for &t in &u {
            in_u[t] = true;
        }
        let nw = (n as i128 * g.simplified().max_weight().max(1) as i128).min(usize::MAX as i128) as usize;
        Step {
            g,
            u,
            in_u,
            cfg,
            logn: ceil_log2(n).max(1),
            log_nw: ceil_log2(nw).max(1),
            gamma: 0,
            lam: RefCell::new(HashMap::new()),
            iso: RefCell::new(HashMap::new()),
            families: RefCell::new(HashMap::new()),
            stats: RefCell::new(GhStats::default()),
        }
    }

    /// Twice the congestion the expander module needs on this graph.
    fn gamma(&mut self) -> i64 {
        if self.gamma == 0 {
            let phi = Rational::new(1, 100 * self.logn as i64);
            let dec = expander_decompose(self.g, phi, &DemandVector::indicator(self.g.n(), &self.u));
            self.stats.borrow_mut().expander_calls += 1;
            self.gamma = 2 * dec.gamma.max(1);
        }
        self.gamma
    }

    fn count_u(&self, s: &VertexSet) -> usize {
        s.members().iter().filter(|&&v| self.in_u[v]).count()
    }

    /// λ(s, ·) over all vertices.
    fn lambda_from(&self, s: usize) -> Result<Vec<Weight>, GhError> {
        if let Some(l) = self.lam.borrow().get(&s) {
            return Ok(l.clone());
        }
        let (est, _) = ssmc_all(self.g, s, &self.cfg.ssmc)?;
        self.stats.borrow_mut().ssmc_calls += 1;
        let l: Vec<Weight> =
            (0..self.g.n()).map(|t| if t == s { Weight::MAX } else { est.get(t).unwrap_or(0) }).collect();
        self.lam.borrow_mut().insert(s, l.clone());
        Ok(l)
    }

    fn component(&self, r: usize, tau: Weight) -> Result<VertexSet, GhError> {
        let l = self.lambda_from(r)?;
        Ok(self.u.iter().copied().filter(|&t| l[t] >= tau).collect())
    }

    fn family(&self, a: usize, b: usize) -> HitMissFamily {
        let n = self.g.n();
        let a = a.min(n);
        self.families
            .borrow_mut()
            .entry((a, b))
            .or_insert_with(|| hit_and_miss_family(n, a, b).expect("ground set and hit size are valid"))
            .clone()
    }

    fn isolate(&self, groups: Vec<usize>) -> Vec<MinCutResult> {
        if let Some(c) = self.iso.borrow().get(&groups) {
            return c.clone();
        }
        let gs: Vec<Vec<usize>> = groups.iter().map(|&v| vec![v]).collect();
        let cuts = isolating_cuts(self.g, &gs).expect("distinct singleton groups");
        self.stats.borrow_mut().isolating_calls += 1;
        self.iso.borrow_mut().insert(groups, cuts.clone());
        cuts
    }

    /// Removes ⌈|A∩X|/2⌉ vertices of A from each cluster X.
    fn halve(&self, a: &mut Vec<usize>, phi: Rational) {
        if a.is_empty() {
            return;
        }
        let dec = expander_decompose(self.g, phi, &DemandVector::indicator(self.g.n(), a));
        self.stats.borrow_mut().expander_calls += 1;
        let mut drop = vec![false; self.g.n()];
        for x in &dec.clusters {
            let hit: Vec<usize> = x.iter().copied().filter(|v| a.binary_search(v).is_ok()).collect();
            for &v in &hit[..hit.len().div_ceil(2)] {
                drop[v] = true;
            }
        }
        a.retain(|&v| !drop[v]);
    }

    fn detect_psi(&mut self) -> Rational {
        match self.cfg.psi {
            Some(p) => p,
            None => Rational::new(1, self.gamma() * 100 * self.logn as i64),
        }
    }

    fn decomp_psi(&mut self) -> Rational {
        match self.cfg.psi {
            Some(p) => p,
            None => Rational::new(1, self.gamma() * 20 * self.logn as i64),
        }
    }

    fn leaf_bound(&self, numer: f64, psi: Rational) -> usize {
        if let Some(l) = self.cfg.leaf_bound {
            return l;
        }
        let l = numer * *psi.denom() as f64 / *psi.numer() as f64;
        l.ceil().min(usize::MAX as f64) as usize
    }

    fn detect_cc(&mut self, tau: Weight) -> Result<VertexSet, GhError> {
        self.stats.borrow_mut().detect_calls += 1;
        let psi = self.detect_psi();
        let big_l = self.leaf_bound(100.0 * self.logn as f64, psi);
        let nu = self.u.len() as i128;
        let (pn, pd) = (*psi.numer() as i128, *psi.denom() as i128);
        let mut a = self.u.clone();
        while a.len() as i128 * pn > pd {
            let leaves = self.remove_leaves(&a, big_l);
            let mut pruned = vec![false; self.g.n()];
            for c in &leaves {
                if c.value < tau && 4 * (self.count_u(&c.s_side) as i128) < 3 * nu {
                    for &v in c.s_side.members() {
                        pruned[v] = true;
                    }
                }
            }
            let a_prime = a.iter().filter(|&&v| pruned[v]).count() as i128;
            if a_prime * 100 * self.logn as i128 * pd < pn * a.len() as i128 {
                self.halve(&mut a, psi * Rational::from_integer(tau));
            } else {
                a.retain(|&v| !pruned[v]);
            }
        }
        let mut covered = vec![false; self.g.n()];
        let mut uncovered = self.u.len();
        for &r in &a {
            if 4 * uncovered < 3 * self.u.len() {
                break;
            }
            if covered[r] {
                continue;
            }
            let c = self.component(r, tau)?;
            if 4 * c.len() >= 3 * self.u.len() {
                return Ok(c);
            }
            for &v in c.members() {
                covered[v] = true;
            }
            uncovered -= c.len();
        }
        Ok(VertexSet::default())
    }

    fn remove_leaves(&self, a: &[usize], big_l: usize) -> Vec<MinCutResult> {
        let fam = self.family(big_l.saturating_add(1), 2);
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for h in &fam.functions {
            let ah = h.hits(a);
            if ah.len() < 2 || !seen.insert(ah.clone()) {
                continue;
            }
            out.extend(self.isolate(ah));
        }
        out
    }

    /// Minimal (v,r)-mincuts from isolating cuts over {h = 1} ∪ {r}, kept
    /// when `keep(v, cut)` holds.
    fn remove_leaf_step(
        &self,
        a: &[usize],
        r: usize,
        big_l: usize,
        keep: &dyn Fn(usize, &MinCutResult) -> bool,
    ) -> Vec<CutTriple> {
        let fam = self.family(big_l, 2);
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for h in &fam.functions {
            let mut ah = h.hits(a);
            if ah.is_empty() {
                continue;
            }
            ah.push(r);
            ah.sort_unstable();
            if !seen.insert(ah.clone()) {
                continue;
            }
            let cuts = self.isolate(ah.clone());
            for (&v, c) in ah.iter().zip(&cuts) {
                if v != r && keep(v, c) {
                    out.push(CutTriple { side: c.s_side.clone(), v, r, value: c.value });
                }
            }
        }
        out
    }

    fn first_step(&mut self, a: &[usize], r: usize, tau: Weight) -> Result<Vec<CutTriple>, GhError> {
        let psi = self.decomp_psi();
        let big_l = self.leaf_bound(1000.0 * (self.log_nw * self.log_nw) as f64, psi);
        let lam = self.lambda_from(r)?;
        let keep = |v: usize, c: &MinCutResult| c.value < tau && lam[v] == c.value;
        let mut out = BTreeSet::new();
        for j in 0..=ceil_log2(tau as usize) {
            let tau_p = Rational::from_integer(1 << j);
            let mut ap = a.to_vec();
            for _ in 0..self.logn {
                if ap.is_empty() {
                    break;
                }
                out.extend(self.remove_leaf_step(&ap, r, big_l, &keep));
                self.halve(&mut ap, psi * tau_p);
            }
        }
        Ok(out.into_iter().collect())
    }

    fn second_step(&mut self, a: &[usize], r: usize, tau: Weight) -> Result<Vec<CutTriple>, GhError> {
        let psi = self.decomp_psi();
        let big_l = self.leaf_bound(1000.0 * (self.log_nw * self.log_nw) as f64, psi);
        let nu = self.u.len();
        let keep = |_: usize, c: &MinCutResult| c.value == tau && 16 * self.count_u(&c.s_side) <= 15 * nu;
        let mut out = BTreeSet::new();
        let mut ap = a.to_vec();
        for _ in 0..self.logn {
            if ap.is_empty() {
                break;
            }
            out.extend(self.remove_leaf_step(&ap, r, big_l, &keep));
            self.halve(&mut ap, psi * Rational::from_integer(tau));
        }
        Ok(out.into_iter().collect())
    }

    fn rounds(&self) -> usize {
        let r = self.cfg.c_path * (self.logn + 1) * (self.logn + 1);
        if self.cfg.cap_rounds {
            r.min(self.u.len())
        } else {
            r
        }
    }

    fn run(&mut self) -> Result<DecompositionResult, GhError> {
        self.stats.borrow_mut().steps += 1;
        let nw = self.g.n() as Weight * self.g.simplified().max_weight().max(1);
        if self.detect_cc(1)?.is_empty() {
            return Err(GhError::Disconnected);
        }
        let (mut lo, mut hi) = (1, nw);
        while lo < hi {
            let mid = lo + (hi - lo + 1) / 2;
            if self.detect_cc(mid)?.is_empty() {
                hi = mid - 1;
            } else {
                lo = mid;
            }
        }
        let tau = lo;
        let c = self.detect_cc(tau)?;
        let r = c.members()[0];
        let nu = self.u.len();
        let mut temp: BTreeSet<CutTriple> = BTreeSet::new();
        let branch = if 16 * c.len() < 15 * nu {
            self.stats.borrow_mut().outside_branches += 1;
            let mut a: Vec<usize> = self.u.iter().copied().filter(|&v| !c.contains(v)).collect();
            for _ in 0..self.rounds() {
                if a.is_empty() {
                    break;
                }
                let s1 = self.first_step(&a, r, tau)?;
                a.retain(|&v| !s1.iter().any(|t| t.side.contains(v)));
                temp.extend(s1);
            }
            Branch::Outside
        } else {
            self.stats.borrow_mut().inside_branches += 1;
            let mut a: Vec<usize> = c.members().iter().copied().filter(|&v| v != r).collect();
            for _ in 0..self.rounds() {
                if a.is_empty() {
                    break;
                }
                let s2 = self.second_step(&a, r, tau)?;
                a.retain(|&v| !s2.iter().any(|t| t.side.contains(v)));
                temp.extend(s2);
            }
            Branch::Inside
        };
        let triples = greedy_disjoint(temp.into_iter().collect());
        let mut res = DecompositionResult { pivot: r, tau, component: c, branch, triples, fallback: None };
        if let Err(why) = check_lemma(self.g, &self.u, &res) {
            let split = classic_split(self.g, &self.u);
            res.pivot = split.pivot;
            res.triples = split.triples;
            let mut st = self.stats.borrow_mut();
            st.fallbacks += 1;
            st.fallback_notes.push(why.clone());
            res.fallback = Some(why);
        }
        Ok(res)
    }
}

/// Keeps triples in descending |S| (then lexicographic S) that miss every
/// cut kept before.
fn greedy_disjoint(mut temp: Vec<CutTriple>) -> Vec<CutTriple> {
    temp.sort_by(|x, y| y.side.len().cmp(&x.side.len()).then_with(|| x.side.cmp(&y.side)).then(x.v.cmp(&y.v)));
    let mut used = BTreeSet::new();
    let mut out = Vec::new();
    for t in temp {
        if t.side.members().iter().all(|v| !used.contains(v)) {
            used.extend(t.side.members().iter().copied());
            out.push(t);
        }
    }
    out
}

/// The four postconditions of a decomposition step, checked exactly with
/// one maxflow per triple.
pub fn check_lemma(g: &WeightedGraph, u: &[usize], res: &DecompositionResult) -> Result<(), String> {
    let nu = u.len();
    let in_u = |v: usize| u.binary_search(&v).is_ok();
    if res.triples.is_empty() {
        return Err("no cut found".into());
    }
    let mut used = vec![false; g.n()];
    let mut covered = 0;
    for t in &res.triples {
        if t.v == res.pivot || !in_u(t.v) || t.r != res.pivot {
            return Err(format!("triple for {} does not pair a terminal with the pivot", t.v + 1));
        }
        let m = st_mincut(g, t.v, res.pivot);
        if m.s_side != t.side || m.value != t.value {
            return Err(format!("cut for {} is not the minimal mincut", t.v + 1));
        }
        let k = t.side.members().iter().filter(|&&v| in_u(v)).count();
        if 16 * k > 15 * nu {
            return Err(format!("cut for {} holds {k} of {nu} terminals", t.v + 1));
        }
        for &v in t.side.members() {
            if std::mem::replace(&mut used[v], true) {
                return Err(format!("cuts overlap at {}", v + 1));
            }
        }
        covered += k;
    }
    if 16 * covered < nu {
        return Err(format!("cuts cover {covered} of {nu} terminals"));
    }
    Ok(())
}

/// Largest τ-connected component w.r.t. U when it holds ¾ of U, else ∅.
pub fn detect_cc(g: &WeightedGraph, u: &[usize], tau: Weight, cfg: &GhConfig) -> Result<VertexSet, GhError> {
    if tau < 1 {
        return Err(GhError::ZeroThreshold);
    }
    let u = check_terminals(g, u, 1)?;
    Step::new(g, u, cfg).detect_cc(tau)
}

fn check_decomp_input(
    g: &WeightedGraph,
    u: &[usize],
    a: &[usize],
    r: usize,
) -> Result<(Vec<usize>, Vec<usize>), GhError> {
    let u = check_terminals(g, u, 1)?;
    if r >= g.n() {
        return Err(GhError::BadVertex(r));
    }
    let mut a = a.to_vec();
    a.sort_unstable();
    a.dedup();
    if let Some(&v) = a.iter().find(|&&v| v >= g.n()) {
        return Err(GhError::BadVertex(v));
    }
    if let Some(&v) = a.iter().find(|v| u.binary_search(v).is_err()) {
        return Err(GhError::Precondition(format!("{} is not a terminal", v + 1)));
    }
    Ok((u, a))
}

/// Minimal (v,r)-mincuts for v ∈ a, where a lies outside the τ-component of r.
pub fn decomp_first_step(
    g: &WeightedGraph,
    u: &[usize],
    a: &[usize],
    r: usize,
    tau: Weight,
    cfg: &GhConfig,
) -> Result<Vec<CutTriple>, GhError> {
    let (u, a) = check_decomp_input(g, u, a, r)?;
    let mut st = Step::new(g, u, cfg);
    let lam = st.lambda_from(r)?;
    if let Some(&v) = a.iter().find(|&&v| v == r || lam[v] >= tau) {
        return Err(GhError::Precondition(format!("{} is in the {tau}-component of {}", v + 1, r + 1)));
    }
    st.first_step(&a, r, tau)
}

/// Minimal (v,r)-mincuts of value τ holding at most 15/16 of U, for v ∈ a
/// inside the τ-component of r.
pub fn decomp_second_step(
    g: &WeightedGraph,
    u: &[usize],
    a: &[usize],
    r: usize,
    tau: Weight,
    cfg: &GhConfig,
) -> Result<Vec<CutTriple>, GhError> {
    let (u, a) = check_decomp_input(g, u, a, r)?;
    let mut st = Step::new(g, u, cfg);
    let lam = st.lambda_from(r)?;
    if let Some(&v) = a.iter().find(|&&v| v == r || lam[v] < tau) {
        return Err(GhError::Precondition(format!(
            "{} is not in the {tau}-component of {} minus the pivot",
            v + 1,
            r + 1
        )));
    }
    st.second_step(&a, r, tau)
}

pub fn ghtree_step(g: &WeightedGraph, u: &[usize], cfg: &GhConfig) -> Result<(DecompositionResult, GhStats), GhError> {
    let u = check_terminals(g, u, 2)?;
    let mut st = Step::new(g, u, cfg);
    let res = st.run()?;
    Ok((res, st.stats.into_inner()))
}

pub fn ghtree(g: &WeightedGraph, u: &[usize]) -> Result<GomoryHuTree, GhError> {
    ghtree_with(g, u, &GhConfig::default()).map(|(t, _)| t)
}

/// Gomory-Hu U-Steiner tree. Terminals in different components are joined
/// by edges of weight 0.
pub fn ghtree_with(g: &WeightedGraph, u: &[usize], cfg: &GhConfig) -> Result<(GomoryHuTree, GhStats), GhError> {
    build(g, u, Some(cfg))
}

/// Gomory-Hu U-Steiner tree with one maxflow split per level.
pub fn classic_ghtree(g: &WeightedGraph, u: &[usize]) -> Result<GomoryHuTree, GhError> {
    build(g, u, None).map(|(t, _)| t)
}

/// One minimal mincut between the two smallest terminals.
fn classic_split(g: &WeightedGraph, u: &[usize]) -> DecompositionResult {
    let (r, v) = (u[0], u[1]);
    let cut = st_mincut(g, v, r);
    DecompositionResult {
        pivot: r,
        tau: cut.value,
        component: VertexSet::default(),
        branch: Branch::Inside,
        triples: vec![CutTriple { side: cut.s_side, v, r, value: cut.value }],
        fallback: None,
    }
}

fn build(g: &WeightedGraph, u: &[usize], cfg: Option<&GhConfig>) -> Result<(GomoryHuTree, GhStats), GhError> {
    let u = check_terminals(g, u, 1)?;
    let n = g.n();
    let comp = g.components();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &t in &u {
        match groups.iter_mut().find(|grp| comp[grp[0]] == comp[t]) {
            Some(grp) => grp.push(t),
            None => groups.push(vec![t]),
        }
    }
    let mut f = vec![u[0]; n];
    let mut edges = Vec::new();
    let mut stats = GhStats::default();
    for (i, grp) in groups.iter().enumerate() {
        let verts: Vec<usize> = (0..n).filter(|&v| comp[v] == comp[grp[0]]).collect();
        let h = g.induced(&verts);
        let local = |v: usize| verts.binary_search(&v).expect("vertex of the component");
        let hu: Vec<usize> = grp.iter().map(|&t| local(t)).collect();
        let (he, hf, st) = rec(&h, &hu, cfg, 0)?;
        stats.merge(st);
        edges.extend(he.into_iter().map(|(a, b, w)| (verts[a], verts[b], w)));
        for (x, &v) in verts.iter().enumerate() {
            f[v] = verts[hf[x]];
        }
        if i > 0 {
            edges.push((groups[0][0], grp[0], 0));
        }
    }
    Ok((GomoryHuTree { n, terminals: u, edges, f }, stats))
}

type RecOut = (Vec<(usize, usize, Weight)>, Vec<usize>, GhStats);

fn rec(g: &WeightedGraph, u: &[usize], cfg: Option<&GhConfig>, depth: usize) -> Result<RecOut, GhError> {
    let n = g.n();
    if u.len() == 1 {
        return Ok((Vec::new(), vec![u[0]; n], GhStats { max_depth: depth, ..GhStats::default() }));
    }
    let (step, mut stats) = match cfg {
        Some(cfg) => ghtree_step(g, u, cfg)?,
        None => (classic_split(g, u), GhStats { steps: 1, ..GhStats::default() }),
    };
    stats.max_depth = depth;
    let k = step.triples.len();
    let in_any: Vec<bool> = {
        let mut b = vec![false; n];
        for t in &step.triples {
            for &v in t.side.members() {
                b[v] = true;
            }
        }
        b
    };
    // Job i < k is the branch below triple i; job k is the contracted rest.
    let job = |i: usize| -> Result<(RecOut, Vec<usize>, usize), GhError> {
        if i < k {
            let side = &step.triples[i].side;
            let outside: Vec<usize> = (0..n).filter(|&v| !side.contains(v)).collect();
            let (h, map) = contract(g, &[outside.clone()])?;
            let hu: Vec<usize> = u.iter().copied().filter(|&t| side.contains(t)).map(|t| map.image[t]).collect();
            let (he, hf, st) = rec(&h, &hu, cfg, depth + 1)?;
            let back = |x: usize| map.origin[x][0];
            let attach = back(hf[map.image[outside[0]]]);
            let edges = he.into_iter().map(|(a, b, w)| (back(a), back(b), w)).collect();
            let f: Vec<usize> =
                (0..n).map(|v| if side.contains(v) { back(hf[map.image[v]]) } else { usize::MAX }).collect();
            Ok(((edges, f, st), Vec::new(), attach))
        } else {
            let parts: Vec<Vec<usize>> = step.triples.iter().map(|t| t.side.members().to_vec()).collect();
            let (h, map) = contract(g, &parts)?;
            let hu: Vec<usize> = u.iter().copied().filter(|&t| !in_any[t]).map(|t| map.image[t]).collect();
            let (he, hf, st) = rec(&h, &hu, cfg, depth + 1)?;
            let back = |x: usize| map.origin[x][0];
            let attach: Vec<usize> = parts.iter().map(|p| back(hf[map.image[p[0]]])).collect();
            let edges = he.into_iter().map(|(a, b, w)| (back(a), back(b), w)).collect();
            let f: Vec<usize> = (0..n).map(|v| if in_any[v] { usize::MAX } else { back(hf[map.image[v]]) }).collect();
            Ok(((edges, f, st), attach, usize::MAX))
        }
    };
    let results: Vec<_> = if cfg.map_or(false, |c| c.parallel) {
        (0..=k).into_par_iter().map(job).collect::<Result<_, _>>()?
    } else {
        (0..=k).map(job).collect::<Result<_, _>>()?
    };
    let mut edges = Vec::new();
    let mut f = vec![usize::MAX; n];
    let large_attach = results[k].1.clone();
    for (i, ((e, fi, st), _, attach)) in results.into_iter().enumerate() {
        edges.extend(e);
        for v in 0..n {
            if fi[v] != usize::MAX {
                f[v] = fi[v];
            }
        }
        stats.merge(st);
        if i < k {
            edges.push((attach, large_attach[i], step.triples[i].value));
        }
    }
    debug_assert!(f.iter().all(|&x| x != usize::MAX));
    Ok((edges, f, stats))
}

/// Partition of V by λ ≥ k, read off a Gomory-Hu tree on all of V.
pub fn k_connected_components(g: &WeightedGraph, k: Weight, cfg: &GhConfig) -> Result<Vec<Vec<usize>>, GhError> {
    Ok(k_connected_partitions(g, &[k], cfg)?.pop().unwrap_or_default())
}

/// The partition for every threshold in `ks`, from a single tree.
pub fn k_connected_partitions(
    g: &WeightedGraph,
    ks: &[Weight],
    cfg: &GhConfig,
) -> Result<Vec<Vec<Vec<usize>>>, GhError> {
    if ks.iter().any(|&k| k < 1) {
        return Err(GhError::ZeroThreshold);
    }
    if g.n() == 0 {
        return Ok(vec![Vec::new(); ks.len()]);
    }
    let all: Vec<usize> = (0..g.n()).collect();
    let (t, _) = ghtree_with(g, &all, cfg)?;
    Ok(ks.iter().map(|&k| t.components_at(k)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::oracle::oracle_all_pairs_mincut;

    fn all(g: &WeightedGraph) -> Vec<usize> {
        (0..g.n()).collect()
    }

    fn cfg() -> GhConfig {
        GhConfig::fast()
    }

    #[test]
    fn detect_examples() {
        let d = fixtures::dumbbell();
        assert_eq!(detect_cc(&d, &all(&d), 1, &cfg()).unwrap().members(), &[0, 1, 2, 3, 4, 5]);
        assert!(detect_cc(&d, &all(&d), 2, &cfg()).unwrap().is_empty());
        let k = fixtures::k4();
        assert_eq!(detect_cc(&k, &all(&k), 3, &cfg()).unwrap().len(), 4);
        assert_eq!(detect_cc(&k, &all(&k), 0, &cfg()), Err(GhError::ZeroThreshold));
    }

    #[test]
    fn decomposition_examples() {
        let d = fixtures::dumbbell();
        let t = decomp_first_step(&d, &all(&d), &[3, 4, 5], 1, 2, &cfg()).unwrap();
        assert!(t.iter().any(|x| x.side.members() == [3, 4, 5] && x.value == 1));
        assert!(decomp_first_step(&d, &all(&d), &[], 1, 2, &cfg()).unwrap().is_empty());
        assert!(matches!(decomp_first_step(&d, &all(&d), &[0], 1, 2, &cfg()), Err(GhError::Precondition(_))));

        let s = fixtures::star4();
        let t = decomp_second_step(&s, &all(&s), &[1, 2, 3], 0, 1, &cfg()).unwrap();
        let sides: Vec<&[usize]> = t.iter().map(|x| x.side.members()).collect();
        assert_eq!(sides, vec![&[1][..], &[2], &[3]]);
        let k = fixtures::k4();
        let t = decomp_second_step(&k, &all(&k), &[1, 2, 3], 0, 3, &cfg()).unwrap();
        assert!(t.len() == 3 && t.iter().all(|x| x.side.len() == 1 && x.value == 3));
    }

    #[test]
    fn step_examples() {
        let s = fixtures::star4();
        let (r, st) = ghtree_step(&s, &all(&s), &cfg()).unwrap();
        assert_eq!((r.pivot, r.tau, r.branch, r.triples.len(), st.fallbacks), (0, 1, Branch::Inside, 3, 0));
        let d = fixtures::dumbbell();
        let (r, _) = ghtree_step(&d, &all(&d), &cfg()).unwrap();
        assert_eq!((r.tau, r.component.len(), r.branch, r.fallback), (1, 6, Branch::Inside, None));
        let e = fixtures::single_edge();
        let (r, _) = ghtree_step(&e, &[0, 1], &cfg()).unwrap();
        assert_eq!((r.tau, r.triples.len(), r.triples[0].side.members()), (10, 1, &[1][..]));
        assert!(matches!(ghtree_step(&e, &[0], &cfg()), Err(GhError::TooFewTerminals { .. })));
    }

    #[test]
    fn tree_examples() {
        let p = fixtures::p3();
        let t = ghtree_with(&p, &all(&p), &cfg()).unwrap().0;
        let mut e: Vec<_> = t.edges.iter().map(|&(a, b, w)| (a.min(b), a.max(b), w)).collect();
        e.sort();
        assert_eq!(e, vec![(0, 1, 1), (1, 2, 2)]);
        for (_, g) in fixtures::named() {
            let t = ghtree_with(&g, &all(&g), &cfg()).unwrap().0;
            t.check_shape().unwrap();
            t.check_against(&g, &oracle_all_pairs_mincut(&g).unwrap()).unwrap();
        }
        let k = fixtures::k4();
        assert!(ghtree_with(&k, &all(&k), &cfg()).unwrap().0.edges.iter().all(|e| e.2 == 3));
    }

    #[test]
    fn components_examples() {
        let d = fixtures::dumbbell();
        assert_eq!(k_connected_components(&d, 2, &cfg()).unwrap(), vec![vec![0, 1, 2], vec![3, 4, 5]]);
        assert_eq!(k_connected_components(&d, 1, &cfg()).unwrap().len(), 1);
        assert_eq!(k_connected_components(&fixtures::k4(), 4, &cfg()).unwrap().len(), 4);
    }

    #[test]
    fn text_round_trip() {
        let d = fixtures::dumbbell();
        let t = ghtree_with(&d, &all(&d), &cfg()).unwrap().0;
        assert_eq!(GomoryHuTree::parse_text(&t.to_text()).unwrap(), t);
        assert!(GomoryHuTree::parse_text("g 1 2 x\n").is_err());
    }

    #[test]
    fn rooted_minimal_examples() {
        for (_, g) in fixtures::named() {
            let o = oracle_all_pairs_mincut(&g).unwrap();
            let rt = rooted_minimal_tree(&g, &all(&g), 0).unwrap();
            rt.tree.check_against(&g, &o).unwrap();
            for v in 1..g.n() {
                assert_eq!(rt.minimal_cut(v).unwrap(), o.minimal_mincut(v, 0));
            }
        }
    }
}
