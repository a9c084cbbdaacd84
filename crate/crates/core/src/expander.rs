//! (φ, d)-expander decomposition by the trimming recursion, with a
//! materialized witness flow.

use num_rational::Ratio;

use crate::flow::FlowNetwork;
use crate::graph::{global_min_cut, Weight, WeightedGraph};
use crate::oracle::{set_order, OracleLimit};

pub type Rational = Ratio<i64>;

/// Largest piece certified by exhaustive cut enumeration.
pub const ENUM_LIMIT: usize = 14;

/// Nonnegative integer demand per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandVector(pub Vec<Weight>);

impl DemandVector {
    pub fn uniform(n: usize, x: Weight) -> Self {
        DemandVector(vec![x; n])
    }

    /// Indicator demand of a vertex subset.
    pub fn indicator(n: usize, set: &[usize]) -> Self {
        let mut d = vec![0; n];
        for &v in set {
            d[v] = 1;
        }
        DemandVector(d)
    }

    pub fn total(&self, verts: &[usize]) -> Weight {
        verts.iter().map(|&v| self.0[v]).sum()
    }
}

/// Flow certifying Definition 6.1's second bullet, in units of `1/scale`.
#[derive(Debug, Clone, Default)]
pub struct WitnessFlow {
    pub scale: i128,
    /// Net flow on each edge of the graph, oriented `u → v`.
    pub edge_flow: Vec<i128>,
    /// Units injected at each vertex.
    pub source: Vec<i128>,
    /// Units absorbed at each vertex.
    pub absorbed: Vec<i128>,
}

/// One trimming step of the recursion.
#[derive(Debug, Clone)]
pub struct TrimRecord {
    pub depth: usize,
    pub d_total: Weight,
    pub b: Vec<usize>,
    pub b_prime: Vec<usize>,
    pub d_removed: Weight,
    pub alpha: i64,
    pub heavy: bool,
}

#[derive(Debug, Clone)]
pub struct ExpanderDecomposition {
    pub clusters: Vec<Vec<usize>>,
    pub phi: Rational,
    pub witness: WitnessFlow,
    pub gamma: i64,
    /// Largest α over all levels: inter-cluster weight ≤ α·φ·d(V) per level.
    pub alpha: i64,
    pub depth: usize,
    pub trims: Vec<TrimRecord>,
}

impl ExpanderDecomposition {
    /// Cluster index of every vertex.
    pub fn cluster_of(&self, n: usize) -> Vec<usize> {
        let mut c = vec![usize::MAX; n];
        for (i, x) in self.clusters.iter().enumerate() {
            for &v in x {
                c[v] = i;
            }
        }
        c
    }
}

fn lt_ratio(w1: Weight, m1: Weight, w2: Weight, m2: Weight) -> bool {
    (w1 as i128) * (m2 as i128) < (w2 as i128) * (m1 as i128)
}

/// `w < φ·m`.
fn violates(w: Weight, m: Weight, phi: Rational) -> bool {
    (w as i128) * (*phi.denom() as i128) < (*phi.numer() as i128) * (m as i128)
}

/// Most violating cut of `g` (as a mask over local ids), if any.
fn most_violating_enum(g: &WeightedGraph, d: &[Weight], phi: Rational) -> Option<u64> {
    let n = g.n();
    let cuts = crate::oracle::cut_table(g);
    let total: Weight = d.iter().sum();
    let mut dsum = vec![0 as Weight; 1 << n];
    for mask in 1usize..1 << n {
        let v = mask.trailing_zeros() as usize;
        dsum[mask] = dsum[mask & (mask - 1)] + d[v];
    }
    let mut best: Option<(u64, Weight, Weight)> = None;
    for mask in 1u64..(1u64 << (n - 1)) {
        let ds = dsum[mask as usize];
        let m = ds.min(total - ds);
        let w = cuts[mask as usize];
        if m == 0 || !violates(w, m, phi) {
            continue;
        }
        let better = match best {
            None => true,
            Some((bm, bw, bmm)) => lt_ratio(w, m, bw, bmm) || (!lt_ratio(bw, bmm, w, m) && set_order(mask, bm).is_lt()),
        };
        if better {
            best = Some((mask, w, m));
        }
    }
    best.map(|b| b.0)
}

/// Best BFS-prefix cut over all start vertices, if it violates.
fn most_violating_sweep(g: &WeightedGraph, d: &[Weight], phi: Rational) -> Option<Vec<bool>> {
    let n = g.n();
    let total: Weight = d.iter().sum();
    let mut best: Option<(Vec<bool>, Weight, Weight)> = None;
    for start in 0..n {
        let mut order = vec![start];
        let mut seen = vec![false; n];
        seen[start] = true;
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            i += 1;
            let mut nb: Vec<usize> = g.adj(x).iter().map(|&(y, _)| y).filter(|&y| !seen[y]).collect();
            nb.sort_unstable();
            nb.dedup();
            for y in nb {
                seen[y] = true;
                order.push(y);
            }
        }
        let mut side = vec![false; n];
        let (mut w, mut ds) = (0 as Weight, 0 as Weight);
        for &x in order.iter().take(order.len().min(n - 1)) {
            for &(y, e) in g.adj(x) {
                if side[y] {
                    w -= g.edge(e).w;
                } else {
                    w += g.edge(e).w;
                }
            }
            side[x] = true;
            ds += d[x];
            let m = ds.min(total - ds);
            if m > 0 && violates(w, m, phi) {
                let better = match &best {
                    None => true,
                    Some((_, bw, bm)) => lt_ratio(w, m, *bw, *bm),
                };
                if better {
                    best = Some((side.clone(), w, m));
                }
            }
        }
    }
    best.map(|b| b.0)
}

/// A violating cut of `g`, or `None` when the piece certifies.
fn find_violating(g: &WeightedGraph, d: &[Weight], phi: Rational) -> Option<Vec<bool>> {
    let n = g.n();
    let total: Weight = d.iter().sum();
    if n <= 1 || total == 0 {
        return None;
    }
    if let Some(l) = global_min_cut(g) {
        // min(d(S), d(V∖S)) ≤ d(V)/2 for every cut.
        if !violates(2 * l, total, phi) {
            return None;
        }
    }
    if n <= ENUM_LIMIT {
        most_violating_enum(g, d, phi).map(|mask| (0..n).map(|v| mask >> v & 1 == 1).collect())
    } else {
        most_violating_sweep(g, d, phi)
    }
}

/// Splits `verts` into pieces that each certify as φ-expanders.
fn partition(g: &WeightedGraph, verts: &[usize], phi: Rational, d: &DemandVector) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack = vec![verts.to_vec()];
    while let Some(piece) = stack.pop() {
        let sub = g.induced(&piece);
        let dl: Vec<Weight> = piece.iter().map(|&v| d.0[v]).collect();
        match find_violating(&sub, &dl, phi) {
            None => out.push(piece),
            Some(side) => {
                let a: Vec<usize> = (0..piece.len()).filter(|&i| side[i]).map(|i| piece[i]).collect();
                let b: Vec<usize> = (0..piece.len()).filter(|&i| !side[i]).map(|i| piece[i]).collect();
                stack.push(b);
                stack.push(a);
            }
        }
    }
    for c in out.iter_mut() {
        c.sort_unstable();
    }
    out.sort();
    out
}

/// Exhaustive check that every cut of `g` is φ-expanding w.r.t. `d`.
pub fn verify_expander(g: &WeightedGraph, phi: Rational, d: &DemandVector) -> Result<bool, OracleLimit> {
    if g.n() > ENUM_LIMIT {
        return Err(OracleLimit { n: g.n(), limit: ENUM_LIMIT });
    }
    if g.n() <= 1 {
        return Ok(true);
    }
    Ok(most_violating_enum(g, &d.0, phi).is_none())
}

struct Run<'a> {
    g: &'a WeightedGraph,
    phi: Rational,
    d: &'a DemandVector,
    clusters: Vec<Vec<usize>>,
    trims: Vec<TrimRecord>,
    alpha: i64,
    depth: usize,
}

impl Run<'_> {
    fn recurse(&mut self, verts: Vec<usize>, depth: usize) {
        self.depth = self.depth.max(depth);
        let d_total = self.d.total(&verts);
        if verts.len() <= 1 || d_total == 0 {
            self.clusters.push(verts);
            return;
        }
        let parts = partition(self.g, &verts, self.phi, self.d);
        if parts.len() == 1 {
            self.clusters.push(verts);
            return;
        }
        let n = self.g.n();
        let mut part_of = vec![usize::MAX; n];
        for (i, p) in parts.iter().enumerate() {
            for &v in p {
                part_of[v] = i;
            }
        }
        let inter: Weight = self
            .g
            .edges()
            .iter()
            .filter(|e| part_of[e.u] != usize::MAX && part_of[e.v] != usize::MAX && part_of[e.u] != part_of[e.v])
            .map(|e| e.w)
            .sum();
        let (pn, pd) = (*self.phi.numer() as i128, *self.phi.denom() as i128);
        // Smallest integer α with inter ≤ α·φ·d(V).
        let denom = pn * d_total as i128;
        let alpha = ((inter as i128 * pd + denom - 1) / denom).max(1) as i64;
        self.alpha = self.alpha.max(alpha);

        let heavy = parts.iter().position(|p| 2 * self.d.total(p) > d_total);
        let mut in_b = vec![false; n];
        match heavy {
            Some(i) => parts[i].iter().for_each(|&v| in_b[v] = true),
            None => {
                let mut d_a = 0;
                for p in &parts {
                    if 4 * d_a >= d_total {
                        p.iter().for_each(|&v| in_b[v] = true);
                    } else {
                        d_a += self.d.total(p);
                    }
                }
            }
        }
        let b: Vec<usize> = verts.iter().copied().filter(|&v| in_b[v]).collect();
        let in_v: Vec<bool> = {
            let mut x = vec![false; n];
            verts.iter().for_each(|&v| x[v] = true);
            x
        };

        // Trim flow scaled by 24·α·den(φ) to stay integral.
        let mut local = vec![usize::MAX; n];
        for (i, &v) in b.iter().enumerate() {
            local[v] = i;
        }
        let (s, t) = (b.len(), b.len() + 1);
        let mut net: FlowNetwork<i128> = FlowNetwork::new(b.len() + 2);
        let a = alpha as i128;
        let mut out_w = vec![0i128; b.len()];
        for e in self.g.edges() {
            if !in_v[e.u] || !in_v[e.v] {
                continue;
            }
            match (in_b[e.u], in_b[e.v]) {
                (true, true) => {
                    net.add_edge(local[e.u], local[e.v], 24 * a * pd * e.w as i128);
                }
                (true, false) => out_w[local[e.u]] += e.w as i128,
                (false, true) => out_w[local[e.v]] += e.w as i128,
                _ => {}
            }
        }
        for (i, &v) in b.iter().enumerate() {
            if out_w[i] > 0 {
                net.add_arc(s, i, 2 * pd * out_w[i]);
            }
            if self.d.0[v] > 0 {
                net.add_arc(i, t, 12 * a * pn * self.d.0[v] as i128);
            }
        }
        net.max_flow(s, t);
        let reach = net.residual_reach(s);
        let b_prime: Vec<usize> = b.iter().copied().filter(|&v| !reach[local[v]]).collect();
        let in_bp: Vec<bool> = {
            let mut x = vec![false; n];
            b_prime.iter().for_each(|&v| x[v] = true);
            x
        };
        let d_removed = self.d.total(&b) - self.d.total(&b_prime);
        self.trims.push(TrimRecord {
            depth,
            d_total,
            b: b.clone(),
            b_prime: b_prime.clone(),
            d_removed,
            alpha,
            heavy: heavy.is_some(),
        });
        let a_prime: Vec<usize> = verts.iter().copied().filter(|&v| !in_bp[v]).collect();
        if !a_prime.is_empty() {
            self.recurse(a_prime, depth + 1);
        }
        self.recurse(b_prime, depth + 1);
    }
}

/// Witness flow of the final partition with the least integer γ that routes
/// every source unit.
fn witness(g: &WeightedGraph, phi: Rational, d: &DemandVector, cluster: &[usize]) -> (WitnessFlow, i64) {
    let n = g.n();
    let (pn, pd) = (*phi.numer() as i128, *phi.denom() as i128);
    let mut src = vec![0i128; n];
    for e in g.edges() {
        if cluster[e.u] != cluster[e.v] {
            src[e.u] += e.w as i128;
            src[e.v] += e.w as i128;
        }
    }
    let need: i128 = src.iter().sum::<i128>() * pd;
    let build = |gamma: i128| {
        let mut net: FlowNetwork<i128> = FlowNetwork::new(n + 2);
        for e in g.edges() {
            net.add_edge(e.u, e.v, gamma * pd * e.w as i128);
        }
        for v in 0..n {
            if src[v] > 0 {
                net.add_arc(n, v, src[v] * pd);
            }
            if d.0[v] > 0 {
                net.add_arc(v, n + 1, gamma * pn * d.0[v] as i128);
            }
        }
        let f = net.max_flow(n, n + 1);
        (net, f)
    };
    if need == 0 {
        let w = WitnessFlow { scale: pd, edge_flow: vec![0; g.m()], source: vec![0; n], absorbed: vec![0; n] };
        return (w, 1);
    }
    let mut hi: i128 = 1;
    while build(hi).1 < need {
        hi *= 2;
        assert!(hi < 1 << 60, "witness flow infeasible");
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if build(mid).1 >= need {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (net, _) = build(hi);
    let edge_flow: Vec<i128> = (0..g.m()).map(|i| net.flow(i)).collect();
    let mut absorbed = vec![0i128; n];
    let mut source = vec![0i128; n];
    let mut id = g.m();
    for v in 0..n {
        if src[v] > 0 {
            source[v] = net.flow(id);
            id += 1;
        }
        if d.0[v] > 0 {
            absorbed[v] = net.flow(id);
            id += 1;
        }
    }
    (WitnessFlow { scale: pd, edge_flow, source, absorbed }, hi as i64)
}

/// Partition of V into (φ, d)-expanders with a witness flow.
pub fn expander_decompose(g: &WeightedGraph, phi: Rational, d: &DemandVector) -> ExpanderDecomposition {
    assert!(phi > Rational::from_integer(0), "φ must be positive");
    assert_eq!(d.0.len(), g.n());
    let mut run = Run { g, phi, d, clusters: Vec::new(), trims: Vec::new(), alpha: 1, depth: 0 };
    run.recurse((0..g.n()).collect(), 0);
    let mut clusters = run.clusters;
    for c in clusters.iter_mut() {
        c.sort_unstable();
    }
    clusters.retain(|c| !c.is_empty());
    clusters.sort();
    let mut dec = ExpanderDecomposition {
        clusters,
        phi,
        witness: WitnessFlow::default(),
        gamma: 1,
        alpha: run.alpha,
        depth: run.depth,
        trims: run.trims,
    };
    let (w, gamma) = witness(g, phi, d, &dec.cluster_of(g.n()));
    dec.witness = w;
    dec.gamma = gamma;
    dec
}

/// Exact validation of the witness flow: conservation, supply, congestion
/// ≤ γ·w(e) and absorption ≤ φ·γ·d(v). Returns a description of the first
/// violation.
pub fn check_witness(g: &WeightedGraph, dec: &ExpanderDecomposition, d: &DemandVector) -> Result<(), String> {
    let n = g.n();
    let w = &dec.witness;
    let cluster = dec.cluster_of(n);
    let gamma = dec.gamma as i128;
    let (pn, pd) = (*dec.phi.numer() as i128, *dec.phi.denom() as i128);
    let mut net = vec![0i128; n];
    for (i, e) in g.edges().iter().enumerate() {
        let f = w.edge_flow[i];
        if f.abs() * pd > gamma * e.w as i128 * w.scale {
            return Err(format!("edge {i} carries {f}/{} above γ·w", w.scale));
        }
        net[e.u] -= f;
        net[e.v] += f;
    }
    for v in 0..n {
        let need: i128 =
            g.adj(v).iter().filter(|&&(y, _)| cluster[y] != cluster[v]).map(|&(_, e)| g.edge(e).w as i128).sum();
        if w.source[v] != need * w.scale {
            return Err(format!("vertex {v} sources {} instead of {}", w.source[v], need * w.scale));
        }
        if w.absorbed[v] < 0 || w.absorbed[v] * pd > pn * gamma * d.0[v] as i128 * w.scale {
            return Err(format!("vertex {v} absorbs {} above φ·γ·d", w.absorbed[v]));
        }
        if net[v] + w.source[v] != w.absorbed[v] {
            return Err(format!("conservation fails at vertex {v}"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn verify_examples() {
        let ones = DemandVector::uniform(4, 1);
        assert_eq!(verify_expander(&fixtures::k4(), r(2, 1), &ones), Ok(true));
        assert_eq!(verify_expander(&fixtures::k4(), r(201, 100), &ones), Ok(false));
        assert_eq!(verify_expander(&fixtures::p3(), r(1, 1), &DemandVector::uniform(3, 1)), Ok(true));
        assert!(verify_expander(&WeightedGraph::new(15), r(1, 1), &DemandVector::uniform(15, 1)).is_err());
    }

    #[test]
    fn decomposition_examples() {
        let g = fixtures::k4();
        let dec = expander_decompose(&g, r(1, 1), &DemandVector::uniform(4, 1));
        assert_eq!(dec.clusters, vec![vec![0, 1, 2, 3]]);
        assert!(dec.witness.edge_flow.iter().all(|&f| f == 0));

        let g = fixtures::dumbbell();
        let d = DemandVector::uniform(6, 1);
        let dec = expander_decompose(&g, r(1, 1), &d);
        assert_eq!(dec.clusters, vec![vec![0, 1, 2], vec![3, 4, 5]]);
        check_witness(&g, &dec, &d).unwrap();
        assert_eq!(dec.witness.source[0], dec.witness.scale);
        assert_eq!(dec.witness.source[3], dec.witness.scale);

        let g = fixtures::random_connected(5, 10, 20, 5);
        let dec = expander_decompose(&g, r(3, 1), &DemandVector::uniform(10, 0));
        assert_eq!(dec.clusters.len(), 1);
    }
}
