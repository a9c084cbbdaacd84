//! Steiner-subgraph packing by multiplicative weights.
//!
//! Each iteration asks a static Mehlhorn oracle for a short Steiner tree,
//! feeds the tree difference to the dynamic forest as one batch, adds the
//! bottleneck weight to the Steiner subtree and flushes congested edges into
//! their lengths. Loads are kept exactly as integers in quarter units, so the
//! congestion threshold `w/4` becomes `w`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Weight, WeightedGraph};
use crate::linkcut::{naive_steiner_subtree, DynamicForest, ForestEdge, ForestError, ForestUpdate, RUpdate};

pub type Rational = Ratio<i64>;
pub type BigRational = Ratio<i128>;

/// Quarter units per unit of weight.
pub const QUARTERS: Weight = 4;
const SCALE_BITS: u32 = 32;

#[derive(Debug, Error, PartialEq)]
pub enum PackingError {
    #[error("need at least two terminals, got {0}")]
    TooFewTerminals(usize),
    #[error("terminals are not connected")]
    Disconnected,
    #[error("epsilon must lie in (0, 1), got {0}")]
    BadEpsilon(f64),
    #[error("terminal {0} out of range")]
    BadTerminal(usize),
    #[error("forest: {0}")]
    Forest(String),
    #[error("length bracket violated on edge {0}")]
    Bracket(usize),
    #[error("accumulator of edge {id} is {got} but the shadow load is {want}")]
    Shadow { id: usize, got: Weight, want: Weight },
    #[error("iteration bound {0} exceeded")]
    Iterations(u64),
    #[error("corrupt log: {0}")]
    CorruptLog(String),
}

impl From<ForestError> for PackingError {
    fn from(e: ForestError) -> Self {
        PackingError::Forest(e.to_string())
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Dist(f64, usize);

impl Eq for Dist {}

impl Ord for Dist {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then_with(|| o.1.cmp(&self.1))
    }
}

impl PartialOrd for Dist {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
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
            let z = self.0[y];
            self.0[y] = r;
            y = z;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        self.0[a] = b;
        true
    }
}

fn kruskal(n: usize, mut cand: Vec<(f64, usize, usize, usize)>) -> Vec<usize> {
    cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut dsu = Dsu::new(n);
    cand.into_iter().filter(|&(_, _, u, v)| dsu.union(u, v)).map(|c| c.1).collect()
}

/// Mehlhorn's Steiner tree: Voronoi regions around the terminals, a minimum
/// spanning tree of the terminal closure, expansion to paths, a spanning tree
/// of their union and pruning of non-terminal leaves. Returns edge ids.
pub fn min_length_steiner_subgraph(
    g: &WeightedGraph,
    len: &[f64],
    terminals: &[usize],
) -> Result<Vec<usize>, PackingError> {
    let n = g.n();
    for &t in terminals {
        if t >= n {
            return Err(PackingError::BadTerminal(t));
        }
    }
    if terminals.len() <= 1 {
        return Ok(Vec::new());
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut src = vec![usize::MAX; n];
    let mut pred = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    for &t in terminals {
        dist[t] = 0.0;
        src[t] = t;
        heap.push(Dist(0.0, t));
    }
    while let Some(Dist(d, x)) = heap.pop() {
        if d > dist[x] {
            continue;
        }
        for &(y, id) in g.adj(x) {
            let nd = d + len[id];
            if nd < dist[y] {
                dist[y] = nd;
                src[y] = src[x];
                pred[y] = id;
                heap.push(Dist(nd, y));
            }
        }
    }
    let mut best: BTreeMap<(usize, usize), (f64, usize)> = BTreeMap::new();
    for (id, e) in g.edges().iter().enumerate() {
        let (a, b) = (src[e.u], src[e.v]);
        if a == usize::MAX || b == usize::MAX || a == b {
            continue;
        }
        let d = dist[e.u] + len[id] + dist[e.v];
        let k = (a.min(b), a.max(b));
        match best.get(&k) {
            Some(&(bd, bid)) if bd < d || (bd == d && bid < id) => {}
            _ => {
                best.insert(k, (d, id));
            }
        }
    }
    let cand: Vec<_> = best.iter().map(|(&(a, b), &(d, id))| (d, id, a, b)).collect();
    let closure = kruskal(n, cand);
    let chosen: BTreeSet<usize> = closure.iter().copied().collect();
    {
        let mut d2 = Dsu::new(n);
        for &id in &chosen {
            let e = g.edge(id);
            d2.union(src[e.u], src[e.v]);
        }
        let r = d2.find(terminals[0]);
        if terminals.iter().any(|&t| d2.find(t) != r) {
            return Err(PackingError::Disconnected);
        }
    }
    let mut union: BTreeSet<usize> = BTreeSet::new();
    for &id in &chosen {
        union.insert(id);
        let e = g.edge(id);
        for mut x in [e.u, e.v] {
            while pred[x] != usize::MAX {
                union.insert(pred[x]);
                x = g.edge(pred[x]).other(x);
            }
        }
    }
    let cand: Vec<_> = union.iter().map(|&id| (len[id], id, g.edge(id).u, g.edge(id).v)).collect();
    let tree = kruskal(n, cand);
    let pairs: Vec<(usize, usize)> =
        tree.iter().map(|&id| (g.edge(id).u.min(g.edge(id).v), g.edge(id).u.max(g.edge(id).v))).collect();
    let kept: BTreeSet<(usize, usize)> = naive_steiner_subtree(n, &pairs, terminals).into_iter().collect();
    let mut out: Vec<usize> = tree.into_iter().zip(pairs).filter(|(_, p)| kept.contains(p)).map(|(id, _)| id).collect();
    out.sort_unstable();
    Ok(out)
}

/// The length function `ℓ̃(e) = δ/w(e) · exp(ε·X(e)/w(e))`, with the flushed
/// load `X` kept exactly in quarter units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthFunction {
    pub epsilon: f64,
    pub ln_delta: f64,
    pub weights: Vec<Weight>,
    pub flushed_quarters: Vec<Weight>,
}

impl LengthFunction {
    fn new(g: &WeightedGraph, epsilon: f64) -> Self {
        let m = g.m().max(1) as f64;
        LengthFunction {
            epsilon,
            ln_delta: -(2.0 * m).ln() / epsilon,
            weights: g.edges().iter().map(|e| e.w).collect(),
            flushed_quarters: vec![0; g.m()],
        }
    }

    /// `ln(w(e)·ℓ̃(e)) - ln δ`.
    fn exponent(&self, e: usize) -> f64 {
        self.epsilon * self.flushed_quarters[e] as f64 / (QUARTERS * self.weights[e]) as f64
    }

    pub fn ln_length(&self, e: usize) -> f64 {
        self.ln_delta - (self.weights[e] as f64).ln() + self.exponent(e)
    }

    pub fn length(&self, e: usize) -> f64 {
        self.ln_length(e).exp()
    }

    /// `ln Σ_e w(e) ℓ̃(e)`.
    pub fn ln_potential(&self) -> f64 {
        let xs: Vec<f64> = (0..self.weights.len()).map(|e| self.exponent(e)).collect();
        let mx = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if mx == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        self.ln_delta + mx + xs.iter().map(|x| (x - mx).exp()).sum::<f64>().ln()
    }

    /// Lengths divided by their common maximum, for the oracle.
    fn relative(&self) -> Vec<f64> {
        let ls: Vec<f64> = (0..self.weights.len()).map(|e| self.ln_length(e)).collect();
        let mx = ls.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        ls.iter().map(|l| (l - mx).exp()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingEntry {
    /// Number of forest batches applied before the tree was taken.
    pub tick: usize,
    /// Unscaled value in weight units.
    pub value: Weight,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteinerPacking {
    pub entries: Vec<PackingEntry>,
    /// Every value is divided by this factor on output.
    pub scale: BigRational,
    pub alpha: Weight,
}

#[derive(Serialize)]
struct EntryLine {
    tick: usize,
    value_num: i128,
    value_den: i128,
}

impl SteinerPacking {
    pub fn scaled_value(&self, e: &PackingEntry) -> BigRational {
        BigRational::from_integer(e.value as i128) / self.scale
    }

    pub fn total_value(&self) -> BigRational {
        let raw: i128 = self.entries.iter().map(|e| e.value as i128).sum();
        BigRational::from_integer(raw) / self.scale
    }

    /// One JSON object per entry.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let v = self.scaled_value(e);
            let line = EntryLine { tick: e.tick, value_num: *v.numer(), value_den: *v.denom() };
            out.push_str(&serde_json::to_string(&line).expect("entry serializes"));
            out.push('\n');
        }
        out
    }
}

/// Event stream consumed by the sparsifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PackingEvent {
    R(RUpdate),
    AddValue(Weight),
}

#[derive(Debug, Clone)]
pub struct PackingRun {
    pub packing: SteinerPacking,
    pub diff_log: Vec<Vec<ForestUpdate>>,
    pub lengths: LengthFunction,
    pub events: Vec<PackingEvent>,
    pub terminals: Vec<usize>,
    pub iterations: u64,
    pub iteration_bound: u64,
    pub splices: usize,
    pub forest_operations: usize,
}

/// Options for a packing run.
#[derive(Debug, Clone, Copy)]
pub struct PackingOptions {
    /// Shadow-computes exact loads and checks the length bracket every
    /// iteration.
    pub check_bracket: bool,
}

impl Default for PackingOptions {
    fn default() -> Self {
        PackingOptions { check_bracket: true }
    }
}

fn scale_factor(epsilon: f64, ln_delta: f64) -> BigRational {
    let s = (2.0 * (1.0 + epsilon).ln() - ln_delta) / epsilon;
    let den = 1i128 << SCALE_BITS;
    let num = (s * den as f64).ceil() as i128 + 1;
    BigRational::new(num, den)
}

pub fn pack_steiner_subgraphs(
    g: &WeightedGraph,
    terminals: &[usize],
    epsilon: Rational,
) -> Result<PackingRun, PackingError> {
    pack_steiner_subgraphs_with(g, terminals, epsilon, PackingOptions::default())
}

pub fn pack_steiner_subgraphs_with(
    g: &WeightedGraph,
    terminals: &[usize],
    epsilon: Rational,
    opts: PackingOptions,
) -> Result<PackingRun, PackingError> {
    let eps = *epsilon.numer() as f64 / *epsilon.denom() as f64;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(PackingError::BadEpsilon(eps));
    }
    let mut u: Vec<usize> = terminals.to_vec();
    u.sort_unstable();
    u.dedup();
    if u.len() < 2 {
        return Err(PackingError::TooFewTerminals(u.len()));
    }
    if let Some(&t) = u.iter().find(|&&t| t >= g.n()) {
        return Err(PackingError::BadTerminal(t));
    }
    let comps = g.components();
    if u.iter().any(|&t| comps[t] != comps[u[0]]) {
        return Err(PackingError::Disconnected);
    }
    let mut lf = LengthFunction::new(g, eps);
    let stop = 0.0;
    let w_max = g.max_weight() as f64;
    let bound = (g.m() as f64 * (((w_max * (1.0 + eps)).ln() - lf.ln_delta) / eps + 1.0)).ceil() as u64 + 1;
    let mut forest = DynamicForest::new(g.n(), &u);
    let mut current: BTreeSet<usize> = BTreeSet::new();
    let mut shadow = vec![0 as Weight; g.m()];
    let mut entries = Vec::new();
    let mut diff_log = Vec::new();
    let mut events = Vec::new();
    let mut iterations = 0u64;
    let fe = |lf: &LengthFunction, id: usize| ForestEdge {
        id,
        w: g.edge(id).w,
        len: (lf.exponent(id) - (g.edge(id).w as f64).ln()).exp(),
        tau: g.edge(id).w,
    };
    while lf.ln_potential() < stop {
        iterations += 1;
        if iterations > bound {
            return Err(PackingError::Iterations(bound));
        }
        let tree: BTreeSet<usize> = min_length_steiner_subgraph(g, &lf.relative(), &u)?.into_iter().collect();
        let mut batch = Vec::new();
        for &id in current.difference(&tree) {
            let e = g.edge(id);
            batch.push(ForestUpdate::Cut { u: e.u, v: e.v });
        }
        for &id in tree.difference(&current) {
            let e = g.edge(id);
            batch.push(ForestUpdate::Link { u: e.u, v: e.v, edge: fe(&lf, id) });
        }
        let before = forest.emitted_updates.len();
        forest.apply_batch(&batch)?;
        events.extend(forest.emitted_updates[before..].iter().map(|&r| PackingEvent::R(r)));
        diff_log.push(batch);
        current = tree;
        let (_, v) = forest.steiner_tree_stats()?;
        entries.push(PackingEntry { tick: diff_log.len(), value: v });
        forest.add_value_on_steiner_tree(QUARTERS * v)?;
        events.push(PackingEvent::AddValue(v));
        if opts.check_bracket {
            for &id in &current {
                shadow[id] += QUARTERS * v;
            }
        }
        while let Some(id) = forest.get_congested_edge() {
            let x = forest.get_value(id);
            forest.reset_value(id);
            lf.flushed_quarters[id] += x;
            forest.set_length(id, fe(&lf, id).len);
        }
        if opts.check_bracket {
            for id in 0..g.m() {
                let pending = shadow[id] - lf.flushed_quarters[id];
                if pending != forest.get_value(id) {
                    return Err(PackingError::Shadow { id, got: forest.get_value(id), want: pending });
                }
                let ratio = (eps * pending as f64 / (QUARTERS * g.edge(id).w) as f64).exp();
                if !(pending >= 0 && ratio <= 1.0 + eps) {
                    return Err(PackingError::Bracket(id));
                }
            }
        }
    }
    Ok(PackingRun {
        packing: SteinerPacking { entries, scale: scale_factor(eps, lf.ln_delta), alpha: 1 },
        diff_log,
        lengths: lf,
        events,
        terminals: u,
        iterations,
        iteration_bound: bound,
        splices: forest.splices,
        forest_operations: forest.operations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub feasible: bool,
    pub value: BigRational,
    /// Largest load over weight, scaled.
    pub max_congestion: BigRational,
    pub trees: usize,
    pub violations: Vec<usize>,
}

/// Replays the diff log, rebuilds every packed tree and checks feasibility
/// exactly.
pub fn audit_packing(
    g: &WeightedGraph,
    terminals: &[usize],
    packing: &SteinerPacking,
    diff_log: &[Vec<ForestUpdate>],
) -> Result<AuditReport, PackingError> {
    let n = g.n();
    let mut by_pair: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (id, e) in g.edges().iter().enumerate() {
        by_pair.entry((e.u.min(e.v), e.u.max(e.v))).or_default().push(id);
    }
    let mut forest: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut load = vec![0i128; g.m()];
    let mut applied = 0;
    let mut trees = 0;
    let mut entries: Vec<&PackingEntry> = packing.entries.iter().collect();
    entries.sort_by_key(|e| e.tick);
    for e in entries {
        if e.tick > diff_log.len() {
            return Err(PackingError::CorruptLog(format!("tick {} beyond log of {}", e.tick, diff_log.len())));
        }
        if e.value < 0 {
            return Err(PackingError::CorruptLog("negative value".into()));
        }
        while applied < e.tick {
            for up in &diff_log[applied] {
                match *up {
                    ForestUpdate::Link { u, v, edge } => {
                        let k = (u.min(v), u.max(v));
                        if edge.id >= g.m()
                            || (g.edge(edge.id).u.min(g.edge(edge.id).v), g.edge(edge.id).u.max(g.edge(edge.id).v)) != k
                        {
                            return Err(PackingError::CorruptLog(format!("link ({u}, {v}) names edge {}", edge.id)));
                        }
                        if forest.insert(k, edge.id).is_some() {
                            return Err(PackingError::CorruptLog(format!("duplicate link ({u}, {v})")));
                        }
                    }
                    ForestUpdate::Cut { u, v } => {
                        if forest.remove(&(u.min(v), u.max(v))).is_none() {
                            return Err(PackingError::CorruptLog(format!("cut of missing ({u}, {v})")));
                        }
                    }
                }
            }
            applied += 1;
        }
        let pairs: Vec<(usize, usize)> = forest.keys().copied().collect();
        let st = naive_steiner_subtree(n, &pairs, terminals);
        let mut check = Dsu::new(n);
        for &(a, b) in &pairs {
            if !check.union(a, b) {
                return Err(PackingError::CorruptLog("replayed forest has a cycle".into()));
            }
        }
        if terminals.iter().any(|&t| check.find(t) != check.find(terminals[0])) {
            return Err(PackingError::CorruptLog(format!("tree at tick {} does not span the terminals", e.tick)));
        }
        for k in st {
            load[forest[&k]] += e.value as i128;
        }
        trees += 1;
    }
    let s = packing.scale;
    let mut violations = Vec::new();
    let mut max_c = BigRational::from_integer(0);
    for (id, e) in g.edges().iter().enumerate() {
        let c = BigRational::from_integer(load[id]) / (s * BigRational::from_integer(e.w as i128));
        if c > BigRational::from_integer(1) {
            violations.push(id);
        }
        if c > max_c {
            max_c = c;
        }
    }
    Ok(AuditReport {
        feasible: violations.is_empty(),
        value: packing.total_value(),
        max_congestion: max_c,
        trees,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::oracle::oracle_all_pairs_mincut;

    fn eps() -> Rational {
        Rational::new(1, 20)
    }

    fn bound_ok(g: &WeightedGraph, u: &[usize]) {
        let run = pack_steiner_subgraphs(g, u, eps()).unwrap();
        let rep = audit_packing(g, &run.terminals, &run.packing, &run.diff_log).unwrap();
        assert!(rep.feasible, "infeasible: {:?}", rep.violations);
        let lam = oracle_all_pairs_mincut(g).unwrap().lambda_of(u).unwrap();
        let lb = BigRational::new(lam as i128 * 10, 41);
        assert!(rep.value >= lb, "value {} below {}", rep.value, lb);
        assert!(rep.value <= BigRational::from_integer(lam as i128));
    }

    #[test]
    fn oracle_examples() {
        let p3 = fixtures::p3();
        assert_eq!(min_length_steiner_subgraph(&p3, &[1.0, 1.0], &[0, 2]).unwrap(), vec![0, 1]);
        let k4 = fixtures::k4();
        let ones = vec![1.0; k4.m()];
        let t = min_length_steiner_subgraph(&k4, &ones, &[1, 2]).unwrap();
        assert_eq!(t.len(), 1);
        let e = k4.edge(t[0]);
        assert_eq!((e.u.min(e.v), e.u.max(e.v)), (1, 2));
        let c4 = fixtures::c4();
        let mut len = vec![1.0; 4];
        let heavy =
            (0..4).find(|&i| (c4.edge(i).u, c4.edge(i).v) == (3, 0) || (c4.edge(i).u, c4.edge(i).v) == (0, 3)).unwrap();
        len[heavy] = 10.0;
        let t = min_length_steiner_subgraph(&c4, &len, &[0, 2]).unwrap();
        let total: f64 = t.iter().map(|&i| len[i]).sum();
        assert_eq!(total, 2.0);
    }

    #[test]
    fn packing_examples() {
        let tri = WeightedGraph::from_edges(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]);
        bound_ok(&tri, &[0, 1, 2]);
        bound_ok(&fixtures::p3(), &[0, 2]);
        bound_ok(&fixtures::single_edge(), &[0, 1]);
    }

    #[test]
    fn p3_trees_are_the_path() {
        let g = fixtures::p3();
        let run = pack_steiner_subgraphs(&g, &[0, 2], eps()).unwrap();
        assert!(run.diff_log.iter().skip(1).all(|b| b.is_empty()));
    }

    #[test]
    fn audit_detects_tampering() {
        let g = fixtures::single_edge();
        let tight = SteinerPacking {
            entries: vec![PackingEntry { tick: 1, value: 10 }],
            scale: BigRational::from_integer(1),
            alpha: 1,
        };
        let log = vec![vec![ForestUpdate::Link { u: 0, v: 1, edge: ForestEdge { id: 0, w: 10, len: 1.0, tau: 10 } }]];
        assert!(audit_packing(&g, &[0, 1], &tight, &log).unwrap().feasible);
        let mut bad = tight.clone();
        bad.entries[0].value *= 2;
        assert!(!audit_packing(&g, &[0, 1], &bad, &log).unwrap().feasible);
        let empty = SteinerPacking { entries: vec![], scale: BigRational::from_integer(1), alpha: 1 };
        let rep = audit_packing(&g, &[0, 1], &empty, &[]).unwrap();
        assert!(rep.feasible);
        assert_eq!(rep.value, BigRational::from_integer(0));
    }

    #[test]
    fn json_lines() {
        let p = SteinerPacking {
            entries: vec![PackingEntry { tick: 3, value: 4 }],
            scale: BigRational::new(8, 1),
            alpha: 1,
        };
        assert_eq!(p.to_json_lines(), "{\"tick\":3,\"value_num\":1,\"value_den\":2}\n");
    }

    #[test]
    fn errors() {
        let g = fixtures::p3();
        assert_eq!(pack_steiner_subgraphs(&g, &[0], eps()).unwrap_err(), PackingError::TooFewTerminals(1));
        assert!(matches!(pack_steiner_subgraphs(&g, &[0, 2], Rational::new(3, 2)), Err(PackingError::BadEpsilon(_))));
    }
}
