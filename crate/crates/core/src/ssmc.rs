//! Single-source mincuts through guide trees.
//!
//! [`ssmc_via_guide_tree`] recovers λ(s,t) for every t whose mincut some
//! given tree k-respects, using centroid splits, isolating cuts and
//! contractions. [`partial_ssmc`] runs it over a guide-tree set and
//! [`ssmc_all`] peels the terminal set by factors of 1.1 until every target
//! is exact.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flow::{isolating_cuts, st_mincut};
use crate::graph::{contract, Weight, WeightedGraph};
use crate::hitmiss::{ceil_log2, pair_separation_family};
use crate::packing::Rational;
use crate::sparsifier::{guide_trees_with, GuideTreeOptions, SparsifierError, K_RESPECT};

/// Sentinel for "no estimate yet".
pub const INF: Weight = Weight::MAX;
/// Smallest base-case size for which every recursive call shrinks the tree.
pub const MIN_BASE: usize = 5;

#[derive(Debug, Error, PartialEq)]
pub enum SsmcError {
    #[error("source {0} is not a vertex of the tree")]
    SourceNotInTree(usize),
    #[error("source {0} must be a leaf for the starred variant")]
    NotALeaf(usize),
    #[error("edge list is not a tree")]
    NotATree,
    #[error("vertex {0} out of range")]
    BadVertex(usize),
    #[error("recursion depth {depth} exceeds the guard {limit}")]
    DepthExceeded { depth: usize, limit: usize },
    #[error("estimate {got} for vertex {t} is below the true value {want}")]
    Underestimate { t: usize, got: Weight, want: Weight },
    #[error("terminal set not exhausted after {0} rounds")]
    Rounds(usize),
    #[error("guide trees: {0}")]
    Guide(#[from] SparsifierError),
}

#[derive(Debug, Clone, Copy)]
pub struct SsmcConfig {
    /// Trees smaller than this are solved with one maxflow per vertex.
    pub base: usize,
    pub k: usize,
    pub guide: GuideTreeOptions,
    /// Re-checks every returned estimate against a maxflow in its own graph.
    pub audit: bool,
}

impl SsmcConfig {
    pub fn faithful() -> Self {
        SsmcConfig { base: 100, k: K_RESPECT, guide: GuideTreeOptions::default(), audit: false }
    }

    pub fn fast() -> Self {
        SsmcConfig {
            base: 8,
            k: K_RESPECT,
            guide: GuideTreeOptions { epsilon: Rational::new(1, 4), check_bracket: false },
            audit: false,
        }
    }
}

impl Default for SsmcConfig {
    fn default() -> Self {
        SsmcConfig::faithful()
    }
}

/// Upper bounds on λ(s,t); `None` stands for +∞.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MincutEstimates {
    pub source: usize,
    pub values: BTreeMap<usize, Option<Weight>>,
}

impl MincutEstimates {
    pub fn get(&self, t: usize) -> Option<Weight> {
        self.values.get(&t).copied().flatten()
    }

    fn from_map(source: usize, m: &BTreeMap<usize, Weight>) -> Self {
        MincutEstimates { source, values: m.iter().map(|(&t, &v)| (t, (v != INF).then_some(v))).collect() }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SsmcStats {
    pub calls: usize,
    pub maxflows: usize,
    pub isolating: usize,
    pub max_depth: usize,
    pub rounds: usize,
    pub guide_trees: usize,
}

struct Ctx<'a> {
    cfg: &'a SsmcConfig,
    limit: usize,
    calls: AtomicUsize,
    flows: AtomicUsize,
    isolating: AtomicUsize,
    depth: AtomicUsize,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a SsmcConfig, limit: usize) -> Self {
        Ctx {
            cfg,
            limit,
            calls: AtomicUsize::new(0),
            flows: AtomicUsize::new(0),
            isolating: AtomicUsize::new(0),
            depth: AtomicUsize::new(0),
        }
    }

    fn lambda(&self, g: &WeightedGraph, s: usize, t: usize) -> Weight {
        self.flows.fetch_add(1, Ordering::Relaxed);
        st_mincut(g, s, t).value
    }

    fn stats(&self) -> SsmcStats {
        SsmcStats {
            calls: self.calls.load(Ordering::Relaxed),
            maxflows: self.flows.load(Ordering::Relaxed),
            isolating: self.isolating.load(Ordering::Relaxed),
            max_depth: self.depth.load(Ordering::Relaxed),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Tree {
    verts: BTreeSet<usize>,
    edges: BTreeSet<(usize, usize)>,
}

impl Tree {
    fn new(verts: BTreeSet<usize>, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Tree { verts, edges: edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect() }
    }

    fn adj(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut a: BTreeMap<usize, Vec<usize>> = self.verts.iter().map(|&v| (v, Vec::new())).collect();
        for &(x, y) in &self.edges {
            a.get_mut(&x).unwrap().push(y);
            a.get_mut(&y).unwrap().push(x);
        }
        a
    }

    fn is_tree(&self) -> bool {
        if self.edges.len() + 1 != self.verts.len() {
            return false;
        }
        let adj = self.adj();
        let start = *self.verts.iter().next().unwrap();
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for &y in &adj[&x] {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen.len() == self.verts.len()
    }

    fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    /// Components of the tree minus `c`, ordered by smallest vertex.
    fn subtrees(&self, c: usize) -> Vec<BTreeSet<usize>> {
        let adj = self.adj();
        let mut seen = BTreeSet::from([c]);
        let mut out = Vec::new();
        for &v in &self.verts {
            if seen.contains(&v) {
                continue;
            }
            let mut comp = BTreeSet::from([v]);
            seen.insert(v);
            let mut stack = vec![v];
            while let Some(x) = stack.pop() {
                for &y in &adj[&x] {
                    if seen.insert(y) {
                        comp.insert(y);
                        stack.push(y);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// Smallest vertex whose removal leaves components of at most half the size.
    fn centroid(&self) -> usize {
        let r = self.verts.len();
        *self
            .verts
            .iter()
            .find(|&&v| self.subtrees(v).iter().all(|c| 2 * c.len() <= r))
            .expect("every tree has a centroid")
    }

    fn without(&self, gone: &BTreeSet<usize>) -> Tree {
        Tree {
            verts: self.verts.difference(gone).copied().collect(),
            edges: self.edges.iter().copied().filter(|(a, b)| !gone.contains(a) && !gone.contains(b)).collect(),
        }
    }

    fn contracted(&self, image: &[usize]) -> Tree {
        Tree::new(
            self.verts.iter().map(|&v| image[v]).collect(),
            self.edges.iter().map(|&(a, b)| (image[a], image[b])).filter(|(a, b)| a != b),
        )
    }
}

fn update(est: &mut BTreeMap<usize, Weight>, t: usize, x: Weight) {
    if let Some(e) = est.get_mut(&t) {
        *e = (*e).min(x);
    }
}

/// Pulls a child's estimates back through a contraction image.
fn pull(est: &mut BTreeMap<usize, Weight>, child: &BTreeMap<usize, Weight>, image: Option<&[usize]>) {
    let keys: Vec<usize> = est.keys().copied().collect();
    for t in keys {
        let ct = image.map_or(t, |im| im[t]);
        if let Some(&v) = child.get(&ct) {
            update(est, t, v);
        }
    }
}

fn merge_all(
    est: &mut BTreeMap<usize, Weight>,
    v: Vec<Result<(BTreeMap<usize, Weight>, Vec<usize>), SsmcError>>,
) -> Result<(), SsmcError> {
    for r in v {
        let (child, image) = r?;
        pull(est, &child, Some(&image));
    }
    Ok(())
}

fn contract_one(g: &WeightedGraph, part: &BTreeSet<usize>) -> (WeightedGraph, Vec<usize>) {
    let (h, map) = contract(g, &[part.iter().copied().collect()]).expect("part is in range and disjoint");
    (h, map.image)
}

fn rec(
    ctx: &Ctx,
    g: &WeightedGraph,
    tree: &Tree,
    s: usize,
    k: usize,
    starred: bool,
    depth: usize,
) -> Result<BTreeMap<usize, Weight>, SsmcError> {
    ctx.calls.fetch_add(1, Ordering::Relaxed);
    ctx.depth.fetch_max(depth, Ordering::Relaxed);
    if depth > ctx.limit {
        return Err(SsmcError::DepthExceeded { depth, limit: ctx.limit });
    }
    let mut est: BTreeMap<usize, Weight> = tree.verts.iter().filter(|&&t| t != s).map(|&t| (t, INF)).collect();
    let r = tree.verts.len();
    if r < ctx.cfg.base.max(MIN_BASE) {
        for t in est.clone().into_keys() {
            update(&mut est, t, ctx.lambda(g, s, t));
        }
        return audit(ctx, g, s, est);
    }
    // Step 2: centroid, subtrees and isolating cuts.
    let c = tree.centroid();
    if s != c {
        update(&mut est, c, ctx.lambda(g, s, c));
    }
    let subs = tree.subtrees(c);
    let t0: Option<BTreeSet<usize>> = subs.iter().find(|t| t.contains(&s)).cloned();
    let others: Vec<BTreeSet<usize>> = subs.into_iter().filter(|t| !t.contains(&s)).collect();
    let t0_rest: BTreeSet<usize> = t0.iter().flatten().copied().filter(|&v| v != s).collect();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    if !t0_rest.is_empty() {
        groups.push(t0_rest.iter().copied().collect());
    }
    groups.extend(others.iter().map(|t| t.iter().copied().collect()));
    if s != c {
        groups.push(vec![s]);
    }
    groups.push(vec![c]);
    ctx.isolating.fetch_add(1, Ordering::Relaxed);
    let cuts = isolating_cuts(g, &groups).expect("groups are disjoint and nonempty");
    let off = usize::from(!t0_rest.is_empty());
    let w0: BTreeSet<usize> =
        if off == 1 { cuts[0].s_side.members().iter().copied().collect() } else { BTreeSet::new() };
    let w: Vec<BTreeSet<usize>> =
        (0..others.len()).map(|i| cuts[off + i].s_side.members().iter().copied().collect()).collect();

    // Step 3 and 3*.
    if s != c && !others.is_empty() {
        let union: BTreeSet<usize> = w.iter().flatten().copied().collect();
        let (g0, image) = contract_one(g, &union);
        let child = rec(ctx, &g0, &tree.contracted(&image), image[s], k, starred, depth + 1)?;
        pull(&mut est, &child, Some(&image));
    }
    if !starred {
        let n = g.n();
        let results: Vec<_> = w
            .par_iter()
            .map(|wi| {
                let rest: BTreeSet<usize> = (0..n).filter(|v| !wi.contains(v)).collect();
                let (gi, image) = contract_one(g, &rest);
                rec(ctx, &gi, &tree.contracted(&image), image[s], k, false, depth + 1).map(|m| (m, image))
            })
            .collect();
        merge_all(&mut est, results)?;
    }

    // Step 4: drop separating families of subtrees at k - 1.
    if k >= 2 && !others.is_empty() {
        for fam in pair_separation_family(others.len()) {
            if fam.is_empty() {
                continue;
            }
            let gone: BTreeSet<usize> = fam.iter().flat_map(|&i| others[i].iter().copied()).collect();
            let child = rec(ctx, g, &tree.without(&gone), s, k - 1, false, depth + 1)?;
            pull(&mut est, &child, None);
        }
    }

    // Step 5 and 5*.
    if s != c {
        let mut t3 = tree.without(&t0_rest);
        t3.edges.insert((s.min(c), s.max(c)));
        if k >= 2 && !t0_rest.is_empty() {
            let child = rec(ctx, g, &t3, s, k - 1, false, depth + 1)?;
            pull(&mut est, &child, None);
        }
        if !starred {
            let child = rec(ctx, g, &t3, s, k, true, depth + 1)?;
            pull(&mut est, &child, None);
        } else if !others.is_empty() {
            let mut z: Option<(Weight, usize)> = None;
            for &v in others.iter().flatten() {
                let e = est[&v];
                if z.map_or(true, |(b, bz)| e > b || (e == b && v < bz)) {
                    z = Some((e, v));
                }
            }
            let z = z.unwrap().1;
            let j = others.iter().position(|t| t.contains(&z)).unwrap();
            let mut merged: BTreeSet<usize> = w0.clone();
            merged.insert(c);
            for (i, wi) in w.iter().enumerate() {
                if i != j {
                    merged.extend(wi.iter().copied());
                }
            }
            let (g4, image) = contract_one(g, &merged);
            let t4 = tree.contracted(&image);
            let child = rec(ctx, &g4, &t4, image[s], k, true, depth + 1)?;
            pull(&mut est, &child, Some(&image));
        }
    }
    audit(ctx, g, s, est)
}

fn audit(
    ctx: &Ctx,
    g: &WeightedGraph,
    s: usize,
    est: BTreeMap<usize, Weight>,
) -> Result<BTreeMap<usize, Weight>, SsmcError> {
    if ctx.cfg.audit {
        for (&t, &v) in &est {
            let want = st_mincut(g, s, t).value;
            if v < want {
                return Err(SsmcError::Underestimate { t, got: v, want });
            }
        }
    }
    Ok(est)
}

fn depth_limit(n: usize, r: usize, k: usize) -> usize {
    (4 * k.max(1) * ceil_log2(n).max(1) * ceil_log2(r).max(1)).max(8)
}

/// Estimates for every vertex of the tree other than `s`: never below
/// λ(s,t), and equal to it whenever the tree k-respects some (s,t)-mincut
/// (for the starred variant: one crossed by the tree edge at `s`).
pub fn ssmc_via_guide_tree(
    g: &WeightedGraph,
    tree: &[(usize, usize)],
    s: usize,
    k: usize,
    starred: bool,
    cfg: &SsmcConfig,
) -> Result<(MincutEstimates, SsmcStats), SsmcError> {
    if s >= g.n() {
        return Err(SsmcError::BadVertex(s));
    }
    if let Some(&(a, b)) = tree.iter().find(|&&(a, b)| a >= g.n() || b >= g.n()) {
        return Err(SsmcError::BadVertex(a.max(b)));
    }
    let mut verts: BTreeSet<usize> = tree.iter().flat_map(|&(a, b)| [a, b]).collect();
    if tree.is_empty() {
        verts.insert(s);
    }
    if !verts.contains(&s) {
        return Err(SsmcError::SourceNotInTree(s));
    }
    let t = Tree::new(verts, tree.iter().copied());
    if !t.is_tree() {
        return Err(SsmcError::NotATree);
    }
    if starred && t.degree(s) != 1 {
        return Err(SsmcError::NotALeaf(s));
    }
    let ctx = Ctx::new(cfg, depth_limit(g.n(), t.verts.len(), k));
    let est = if k == 0 {
        t.verts.iter().filter(|&&v| v != s).map(|&v| (v, INF)).collect()
    } else {
        rec(&ctx, g, &t, s, k, starred, 0)?
    };
    Ok((MincutEstimates::from_map(s, &est), ctx.stats()))
}

fn pointwise_min(acc: &mut BTreeMap<usize, Weight>, other: &MincutEstimates) {
    for (t, v) in &other.values {
        let e = acc.entry(*t).or_insert(INF);
        *e = (*e).min(v.unwrap_or(INF));
    }
}

/// Exact for every t in U with λ(s,t) ≤ 1.1·λ(U), never an underestimate.
pub fn partial_ssmc(
    g: &WeightedGraph,
    terminals: &[usize],
    s: usize,
    cfg: &SsmcConfig,
) -> Result<(MincutEstimates, SsmcStats), SsmcError> {
    let mut u: Vec<usize> = terminals.to_vec();
    u.sort_unstable();
    u.dedup();
    if !u.contains(&s) {
        return Err(SsmcError::Guide(SparsifierError::SourceNotTerminal(s)));
    }
    let mut acc: BTreeMap<usize, Weight> = u.iter().filter(|&&t| t != s).map(|&t| (t, INF)).collect();
    let mut stats = SsmcStats::default();
    if u.len() < 2 {
        return Ok((MincutEstimates::from_map(s, &acc), stats));
    }
    // Every tree would hit the base case at its root.
    if u.len() < cfg.base.max(MIN_BASE) {
        for (&t, v) in acc.iter_mut() {
            *v = st_mincut(g, s, t).value;
            stats.maxflows += 1;
        }
        return Ok((MincutEstimates::from_map(s, &acc), stats));
    }
    let gt = guide_trees_with(g, &u, s, cfg.guide)?;
    stats.guide_trees = gt.trees.len();
    for tree in &gt.trees {
        let (e, st) = ssmc_via_guide_tree(g, tree, s, cfg.k, false, cfg)?;
        pointwise_min(&mut acc, &e);
        stats.calls += st.calls;
        stats.maxflows += st.maxflows;
        stats.isolating += st.isolating;
        stats.max_depth = stats.max_depth.max(st.max_depth);
    }
    Ok((MincutEstimates::from_map(s, &acc), stats))
}

/// λ(s,t) for every t ≠ s. Vertices outside the component of `s` get 0.
pub fn ssmc_all(g: &WeightedGraph, s: usize, cfg: &SsmcConfig) -> Result<(MincutEstimates, SsmcStats), SsmcError> {
    let n = g.n();
    if s >= n {
        return Err(SsmcError::BadVertex(s));
    }
    let comp = g.components();
    let mine: Vec<usize> = (0..n).filter(|&v| comp[v] == comp[s]).collect();
    let mut out: BTreeMap<usize, Weight> = (0..n).filter(|&v| comp[v] != comp[s]).map(|v| (v, 0)).collect();
    let h = g.induced(&mine);
    let hs = mine.iter().position(|&v| v == s).unwrap();
    let w = h.max_weight().max(1) as f64;
    let rounds = ((mine.len() as f64 * w).ln() / 1.1f64.ln()).ceil().max(1.0) as usize;
    let mut u: BTreeSet<usize> = (0..mine.len()).collect();
    let mut stats = SsmcStats::default();
    for _ in 0..rounds {
        if u.len() <= 1 {
            break;
        }
        stats.rounds += 1;
        let ul: Vec<usize> = u.iter().copied().collect();
        let (est, st) = partial_ssmc(&h, &ul, hs, cfg)?;
        stats.calls += st.calls;
        stats.maxflows += st.maxflows;
        stats.isolating += st.isolating;
        stats.max_depth = stats.max_depth.max(st.max_depth);
        stats.guide_trees += st.guide_trees;
        let lmin = est.values.values().filter_map(|v| *v).min().ok_or(SsmcError::Rounds(stats.rounds))?;
        for (&t, v) in &est.values {
            if let Some(x) = *v {
                if 10 * x as i128 <= 11 * lmin as i128 {
                    out.insert(mine[t], x);
                    u.remove(&t);
                }
            }
        }
    }
    if u.len() > 1 {
        return Err(SsmcError::Rounds(rounds));
    }
    out.remove(&s);
    Ok((MincutEstimates::from_map(s, &out), stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn small() -> SsmcConfig {
        SsmcConfig { base: MIN_BASE, audit: true, ..SsmcConfig::fast() }
    }

    #[test]
    fn guide_tree_examples() {
        let cfg = SsmcConfig::fast();
        let (e, _) = ssmc_via_guide_tree(&fixtures::p3(), &[(0, 1), (1, 2)], 0, 2, false, &cfg).unwrap();
        assert_eq!((e.get(1), e.get(2)), (Some(1), Some(1)));
        let star: Vec<(usize, usize)> = (1..4).map(|v| (0, v)).collect();
        let (e, _) = ssmc_via_guide_tree(&fixtures::k4(), &star, 0, 16, false, &cfg).unwrap();
        assert!((1..4).all(|t| e.get(t) == Some(3)));
        let (e, _) = ssmc_via_guide_tree(&fixtures::star4(), &star, 0, 1, false, &cfg).unwrap();
        assert!((1..4).all(|t| e.get(t) == Some(1)));
    }

    #[test]
    fn recursion_on_a_path() {
        let g = fixtures::random_connected(5, 9, 16, 5);
        let path: Vec<(usize, usize)> = (0..8).map(|v| (v, v + 1)).collect();
        for s in [0, 4, 8] {
            let (e, st) = ssmc_via_guide_tree(&g, &path, s, 3, false, &small()).unwrap();
            assert!(st.calls > 1);
            for t in (0..9).filter(|&t| t != s) {
                assert!(e.get(t).map_or(true, |v| v >= st_mincut(&g, s, t).value));
            }
        }
        let (_, st) = ssmc_via_guide_tree(&g, &path, 0, 3, true, &small()).unwrap();
        assert!(st.calls > 1);
    }

    #[test]
    fn errors() {
        let cfg = SsmcConfig::fast();
        let g = fixtures::p3();
        assert_eq!(ssmc_via_guide_tree(&g, &[(0, 1)], 2, 2, false, &cfg).unwrap_err(), SsmcError::SourceNotInTree(2));
        assert_eq!(ssmc_via_guide_tree(&g, &[(0, 1), (1, 2)], 1, 2, true, &cfg).unwrap_err(), SsmcError::NotALeaf(1));
        assert_eq!(
            ssmc_via_guide_tree(&g, &[(0, 1), (1, 2), (0, 2)], 0, 2, false, &cfg).unwrap_err(),
            SsmcError::NotATree
        );
    }

    #[test]
    fn partial_and_full_examples() {
        let cfg = SsmcConfig::fast();
        let (e, _) = partial_ssmc(&fixtures::star4(), &[0, 1, 2, 3], 0, &cfg).unwrap();
        assert!((1..4).all(|t| e.get(t) == Some(1)));
        let d = fixtures::dumbbell();
        let (e, _) = partial_ssmc(&d, &(0..6).collect::<Vec<_>>(), 1, &cfg).unwrap();
        for t in 3..6 {
            assert_eq!(e.get(t), Some(1));
        }
        for t in [0, 2] {
            assert!(e.get(t).map_or(true, |v| v >= 2));
        }
        let (e, _) = partial_ssmc(&d, &[1, 4], 1, &cfg).unwrap();
        assert_eq!(e.get(4), Some(1));
        let (e, st) = ssmc_all(&d, 1, &cfg).unwrap();
        assert_eq!(e.values.len(), 5);
        assert_eq!((e.get(0), e.get(2)), (Some(2), Some(2)));
        assert!((3..6).all(|t| e.get(t) == Some(1)));
        assert!(st.rounds <= 2);
        let (e, _) = ssmc_all(&fixtures::k4(), 0, &cfg).unwrap();
        assert!((1..4).all(|t| e.get(t) == Some(3)));
        let (e, _) = ssmc_all(&WeightedGraph::new(2), 0, &cfg).unwrap();
        assert_eq!(e.get(1), Some(0));
    }
}
