//! Augmented dynamic forest.
//!
//! `M` is a forest stored twice: in a link-cut tree `S` (every edge, with a
//! solid/dashed mark and terminal counts for `GlobalLCA`) and, for the solid
//! edges only, in an Euler-tour forest `R` holding per-edge accumulators with
//! lazy additions. The solid components of `R` are either the Steiner subtree
//! `M^U` or terminal-free paths.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ett::{EulerForest, Payload};
use crate::graph::Weight;

const NIL: usize = usize::MAX;

#[derive(Debug, Clone, Default)]
struct LNode {
    ch: [usize; 2],
    p: usize,
    rev: bool,
    ends: (usize, usize),
    is_edge: bool,
    term: usize,
    dashed: bool,
    virt: usize,
    vtops: BTreeSet<usize>,
    sum: usize,
    dcnt: usize,
    lm: usize,
    rm: usize,
}

/// Link-cut tree over vertex nodes and edge nodes.
#[derive(Debug, Clone)]
pub struct LinkCutTree {
    t: Vec<LNode>,
    free: Vec<usize>,
    edge_node: HashMap<(usize, usize), usize>,
}

fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

impl LinkCutTree {
    pub fn new(terminal: &[bool]) -> Self {
        let mut lct = LinkCutTree { t: Vec::new(), free: Vec::new(), edge_node: HashMap::new() };
        for (v, &is_t) in terminal.iter().enumerate() {
            let x = lct.alloc();
            lct.t[x].ends = (v, v);
            lct.t[x].term = is_t as usize;
            lct.pull(x);
        }
        lct
    }

    fn alloc(&mut self) -> usize {
        let node = LNode { ch: [NIL, NIL], p: NIL, ..Default::default() };
        if let Some(x) = self.free.pop() {
            self.t[x] = node;
            self.t[x].lm = x;
            self.t[x].rm = x;
            x
        } else {
            self.t.push(node);
            let x = self.t.len() - 1;
            self.t[x].lm = x;
            self.t[x].rm = x;
            x
        }
    }

    fn is_root(&self, x: usize) -> bool {
        let p = self.t[x].p;
        p == NIL || (self.t[p].ch[0] != x && self.t[p].ch[1] != x)
    }

    fn sum(&self, x: usize) -> usize {
        if x == NIL {
            0
        } else {
            self.t[x].sum
        }
    }

    fn dcnt(&self, x: usize) -> usize {
        if x == NIL {
            0
        } else {
            self.t[x].dcnt
        }
    }

    fn pull(&mut self, x: usize) {
        let [l, r] = self.t[x].ch;
        let own = self.t[x].term + self.t[x].virt;
        let d = (self.t[x].is_edge && self.t[x].dashed) as usize;
        self.t[x].sum = self.sum(l) + self.sum(r) + own;
        self.t[x].dcnt = self.dcnt(l) + self.dcnt(r) + d;
        self.t[x].lm = if l == NIL { x } else { self.t[l].lm };
        self.t[x].rm = if r == NIL { x } else { self.t[r].rm };
    }

    fn toggle(&mut self, x: usize) {
        if x == NIL {
            return;
        }
        let n = &mut self.t[x];
        n.ch.swap(0, 1);
        std::mem::swap(&mut n.lm, &mut n.rm);
        n.rev = !n.rev;
    }

    fn push(&mut self, x: usize) {
        if self.t[x].rev {
            let [l, r] = self.t[x].ch;
            self.toggle(l);
            self.toggle(r);
            self.t[x].rev = false;
        }
    }

    fn rotate(&mut self, x: usize) {
        let y = self.t[x].p;
        let z = self.t[y].p;
        let dir = (self.t[y].ch[1] == x) as usize;
        if !self.is_root(y) {
            let zd = (self.t[z].ch[1] == y) as usize;
            self.t[z].ch[zd] = x;
        }
        self.t[x].p = z;
        let b = self.t[x].ch[1 - dir];
        self.t[y].ch[dir] = b;
        if b != NIL {
            self.t[b].p = y;
        }
        self.t[x].ch[1 - dir] = y;
        self.t[y].p = x;
        self.pull(y);
        self.pull(x);
    }

    fn splay(&mut self, x: usize) {
        let mut path = vec![x];
        let mut y = x;
        while !self.is_root(y) {
            y = self.t[y].p;
            path.push(y);
        }
        for &z in path.iter().rev() {
            self.push(z);
        }
        while !self.is_root(x) {
            let y = self.t[x].p;
            if !self.is_root(y) {
                let z = self.t[y].p;
                if (self.t[y].ch[0] == x) == (self.t[z].ch[0] == y) {
                    self.rotate(y);
                } else {
                    self.rotate(x);
                }
            }
            self.rotate(x);
        }
    }

    fn add_virtual(&mut self, y: usize, c: usize) {
        let s = self.t[c].sum;
        self.t[y].virt += s;
        if s > 0 {
            let top = self.t[c].lm;
            self.t[y].vtops.insert(top);
        }
    }

    fn remove_virtual(&mut self, y: usize, c: usize) {
        let s = self.t[c].sum;
        self.t[y].virt -= s;
        if s > 0 {
            let top = self.t[c].lm;
            let removed = self.t[y].vtops.remove(&top);
            debug_assert!(removed, "virtual child top not registered");
        }
    }

    fn access(&mut self, x: usize) {
        let mut last = NIL;
        let mut y = x;
        while y != NIL {
            self.splay(y);
            let r = self.t[y].ch[1];
            if r != NIL {
                self.add_virtual(y, r);
            }
            if last != NIL {
                self.remove_virtual(y, last);
            }
            self.t[y].ch[1] = last;
            self.pull(y);
            last = y;
            y = self.t[y].p;
        }
        self.splay(x);
    }

    pub fn evert(&mut self, x: usize) {
        self.access(x);
        self.toggle(x);
    }

    fn leftmost(&mut self, mut x: usize) -> usize {
        loop {
            self.push(x);
            let l = self.t[x].ch[0];
            if l == NIL {
                return x;
            }
            x = l;
        }
    }

    fn rightmost(&mut self, mut x: usize) -> usize {
        loop {
            self.push(x);
            let r = self.t[x].ch[1];
            if r == NIL {
                return x;
            }
            x = r;
        }
    }

    pub fn root(&mut self, x: usize) -> usize {
        self.access(x);
        let r = self.leftmost(x);
        self.splay(r);
        r
    }

    pub fn connected(&mut self, u: usize, v: usize) -> bool {
        u == v || self.root(u) == self.root(v)
    }

    fn link_nodes(&mut self, a: usize, b: usize) {
        self.evert(a);
        self.access(b);
        self.t[a].p = b;
        self.add_virtual(b, a);
        self.pull(b);
    }

    fn cut_nodes(&mut self, a: usize, b: usize) {
        self.evert(a);
        self.access(b);
        debug_assert_eq!(self.t[b].ch[0], a);
        self.t[b].ch[0] = NIL;
        self.t[a].p = NIL;
        self.pull(b);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_node.contains_key(&key(u, v))
    }

    /// Adds the edge `(u, v)` marked dashed.
    pub fn link(&mut self, u: usize, v: usize) {
        let e = self.alloc();
        self.t[e].is_edge = true;
        self.t[e].ends = (u, v);
        self.t[e].dashed = true;
        self.pull(e);
        self.edge_node.insert(key(u, v), e);
        self.link_nodes(e, u);
        self.link_nodes(e, v);
    }

    pub fn cut(&mut self, u: usize, v: usize) {
        let e = self.edge_node.remove(&key(u, v)).expect("cut of a non-edge");
        self.cut_nodes(u, e);
        self.cut_nodes(e, v);
        self.free.push(e);
    }

    pub fn mark(&mut self, u: usize, v: usize, dashed: bool) {
        let e = self.edge_node[&key(u, v)];
        self.splay(e);
        self.t[e].dashed = dashed;
        self.pull(e);
    }

    pub fn parent(&mut self, u: usize) -> Option<usize> {
        self.access(u);
        let l = self.t[u].ch[0];
        if l == NIL {
            return None;
        }
        let e = self.rightmost(l);
        self.splay(e);
        let (a, b) = self.t[e].ends;
        Some(if a == u { b } else { a })
    }

    pub fn highest(&mut self, u: usize) -> usize {
        self.access(u);
        if self.t[u].dcnt == 0 {
            return self.root(u);
        }
        let mut x = u;
        loop {
            self.push(x);
            let r = self.t[x].ch[1];
            if self.dcnt(r) > 0 {
                x = r;
                continue;
            }
            if self.t[x].is_edge && self.t[x].dashed {
                break;
            }
            x = self.t[x].ch[0];
        }
        self.splay(x);
        let r = self.t[x].ch[1];
        let y = self.leftmost(r);
        self.splay(y);
        y
    }

    fn find_terminal(&mut self, mut x: usize) -> usize {
        loop {
            self.push(x);
            let [l, r] = self.t[x].ch;
            if self.sum(l) > 0 {
                x = l;
            } else if self.t[x].term > 0 {
                return x;
            } else if self.sum(r) > 0 {
                x = r;
            } else {
                let top = *self.t[x].vtops.iter().next().expect("terminal count without a source");
                self.splay(top);
                x = top;
            }
        }
    }

    /// Lowest common ancestor of all terminals in the tree of `u` with
    /// respect to its current root.
    pub fn global_lca(&mut self, u: usize) -> Option<usize> {
        let r = self.root(u);
        let total = self.t[r].sum;
        if total == 0 {
            return None;
        }
        let t = self.find_terminal(r);
        self.access(t);
        let mut x = t;
        let mut acc = 0;
        let ans = loop {
            self.push(x);
            let [l, rr] = self.t[x].ch;
            let sr = self.sum(rr);
            if acc + sr >= total {
                x = rr;
                continue;
            }
            let own = self.t[x].term + self.t[x].virt;
            if acc + sr + own >= total {
                break x;
            }
            acc += sr + own;
            x = l;
        };
        self.splay(ans);
        debug_assert!(!self.t[ans].is_edge);
        Some(ans)
    }
}

/// Edge data supplied with a link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestEdge {
    pub id: usize,
    pub w: Weight,
    pub len: f64,
    pub tau: Weight,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ForestUpdate {
    Link { u: usize, v: usize, edge: ForestEdge },
    Cut { u: usize, v: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RKind {
    Insert,
    Delete,
}

/// One emitted change of the solid subgraph `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RUpdate {
    pub kind: RKind,
    pub u: usize,
    pub v: usize,
    pub tick: usize,
    pub edge: ForestEdge,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ForestError {
    #[error("link ({0}, {1}) would create a cycle")]
    Cycle(usize, usize),
    #[error("cut ({0}, {1}) targets a non-edge")]
    NotAnEdge(usize, usize),
    #[error("vertex {0} out of range")]
    BadVertex(usize),
    #[error("terminals are not connected in M")]
    Disconnected,
}

#[derive(Debug, Clone)]
struct MEdge {
    data: ForestEdge,
    solid: bool,
    dval: Weight,
}

/// Maximum edges returned by an incident-edge query on `R`.
pub const INCIDENT_CAP: usize = 10;

#[derive(Debug, Clone)]
pub struct DynamicForest {
    n: usize,
    terminals: Vec<usize>,
    s: LinkCutTree,
    r: EulerForest,
    r_adj: Vec<BTreeSet<usize>>,
    m: HashMap<(usize, usize), MEdge>,
    loc: HashMap<usize, (usize, usize)>,
    off: BTreeMap<usize, (Weight, Weight)>,
    watch: BTreeSet<usize>,
    tick: usize,
    pub emitted_updates: Vec<RUpdate>,
    pub splices: usize,
    pub operations: usize,
}

impl DynamicForest {
    pub fn new(n: usize, terminals: &[usize]) -> Self {
        let mut is_t = vec![false; n];
        for &t in terminals {
            is_t[t] = true;
        }
        let mut terminals = terminals.to_vec();
        terminals.sort_unstable();
        terminals.dedup();
        DynamicForest {
            n,
            terminals,
            s: LinkCutTree::new(&is_t),
            r: EulerForest::new(n, &is_t, false),
            r_adj: vec![BTreeSet::new(); n],
            m: HashMap::new(),
            loc: HashMap::new(),
            off: BTreeMap::new(),
            watch: BTreeSet::new(),
            tick: 0,
            emitted_updates: Vec::new(),
            splices: 0,
            operations: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terminals(&self) -> &[usize] {
        &self.terminals
    }

    /// Edges currently in `M`, as sorted `(u, v, id)`.
    pub fn forest_edges(&self) -> Vec<(usize, usize, usize)> {
        let mut out: Vec<_> = self.m.iter().map(|(&(u, v), e)| (u, v, e.data.id)).collect();
        out.sort_unstable();
        out
    }

    /// Edges currently in `R`, sorted.
    pub fn solid_edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self.m.iter().filter(|(_, e)| e.solid).map(|(&k, _)| k).collect();
        out.sort_unstable();
        out
    }

    /// Edges of the component of `R` containing the terminals, if the
    /// terminals are connected in `R`.
    pub fn terminal_component(&self) -> Option<Vec<(usize, usize)>> {
        if self.terminals.len() <= 1 {
            return Some(Vec::new());
        }
        let t0 = self.terminals[0];
        if self.r.stats(t0).terminals != self.terminals.len() {
            return None;
        }
        let mut out: Vec<_> = self.solid_edges().into_iter().filter(|&(u, _)| self.r.connected(u, t0)).collect();
        out.sort_unstable();
        Some(out)
    }

    fn check_vertex(&self, v: usize) -> Result<(), ForestError> {
        if v >= self.n {
            Err(ForestError::BadVertex(v))
        } else {
            Ok(())
        }
    }

    fn emit(&mut self, kind: RKind, u: usize, v: usize, edge: ForestEdge) {
        self.emitted_updates.push(RUpdate { kind, u, v, tick: self.tick, edge });
    }

    fn to_solid(&mut self, u: usize, v: usize) {
        let k = key(u, v);
        let e = self.m.get_mut(&k).expect("solid conversion of a non-edge");
        debug_assert!(!e.solid);
        e.solid = true;
        let dval = std::mem::take(&mut e.dval);
        let data = e.data;
        self.s.mark(u, v, false);
        self.r.link(k.0, k.1, Some(Payload { id: data.id, w: data.w, len: data.len, tau: data.tau, dval }));
        self.r_adj[u].insert(v);
        self.r_adj[v].insert(u);
        if dval >= data.tau {
            self.watch.insert(data.id);
        }
        self.emit(RKind::Insert, k.0, k.1, data);
    }

    fn to_dashed(&mut self, u: usize, v: usize) {
        let k = key(u, v);
        let p = self.r.cut(k.0, k.1).expect("solid edge carries a payload");
        self.r_adj[u].remove(&v);
        self.r_adj[v].remove(&u);
        self.s.mark(u, v, true);
        let e = self.m.get_mut(&k).unwrap();
        e.solid = false;
        e.dval = p.dval;
        e.data.len = p.len;
        let data = e.data;
        if p.dval >= data.tau {
            self.watch.insert(data.id);
        }
        self.emit(RKind::Delete, k.0, k.1, data);
    }

    fn is_solid(&self, u: usize, v: usize) -> bool {
        self.m.get(&key(u, v)).map_or(false, |e| e.solid)
    }

    fn incident(&self, u: usize) -> Vec<usize> {
        self.r_adj[u].iter().copied().take(INCIDENT_CAP).collect()
    }

    /// Solid edges `(x, v)` entering `v`, i.e. with `Parent(x) = v`.
    fn entering(&mut self, v: usize) -> Vec<usize> {
        let inc = self.incident(v);
        assert!(inc.len() <= 2, "splice touches a solid vertex of degree {} outside the Steiner component", inc.len());
        inc.into_iter().filter(|&x| self.s.parent(x) == Some(v)).collect()
    }

    fn splice(&mut self, u: usize) {
        self.splices += 1;
        let v = self.s.parent(u).expect("splice at a root");
        let hv = self.s.highest(v);
        let root = self.s.root(v);
        if hv != root {
            for x in self.entering(v) {
                self.to_dashed(x, v);
            }
            for x in self.entering(hv) {
                if hv == v || !self.on_root_path(x, v) {
                    self.to_dashed(x, hv);
                }
            }
        }
        self.to_solid(u, v);
    }

    /// Whether `x` lies on the tree path from the root to `v`.
    fn on_root_path(&mut self, x: usize, v: usize) -> bool {
        self.s.access(v);
        self.s.splay(x);
        let mut y = v;
        while !self.s.is_root(y) {
            y = self.s.t[y].p;
        }
        y == x
    }

    fn expose(&mut self, u: usize) {
        loop {
            let h = self.s.highest(u);
            if h == self.s.root(u) {
                break;
            }
            self.splice(h);
        }
    }

    fn m_link(&mut self, u: usize, v: usize, mut edge: ForestEdge) -> Result<(), ForestError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v || self.s.connected(u, v) {
            return Err(ForestError::Cycle(u, v));
        }
        self.s.evert(u);
        let up = self.s.global_lca(u);
        self.s.evert(v);
        let vp = self.s.global_lca(v);
        let dval = self.off.remove(&edge.id).map_or(0, |x| x.0);
        if edge.len.is_nan() {
            edge.len = 0.0;
        }
        self.s.link(u, v);
        self.m.insert(key(u, v), MEdge { data: edge, solid: false, dval });
        self.loc.insert(edge.id, key(u, v));
        if dval >= edge.tau {
            self.watch.insert(edge.id);
        }
        if let (Some(up), Some(vp)) = (up, vp) {
            self.s.evert(up);
            self.expose(vp);
        }
        Ok(())
    }

    fn m_cut(&mut self, u: usize, v: usize) -> Result<(), ForestError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if !self.s.has_edge(u, v) {
            return Err(ForestError::NotAnEdge(u, v));
        }
        if self.is_solid(u, v) {
            self.to_dashed(u, v);
        }
        self.s.cut(u, v);
        let e = self.m.remove(&key(u, v)).unwrap();
        self.loc.remove(&e.data.id);
        self.off.insert(e.data.id, (e.dval, e.data.tau));
        if e.dval >= e.data.tau {
            self.watch.insert(e.data.id);
        } else if e.dval == 0 {
            self.off.remove(&e.data.id);
        }
        self.s.evert(u);
        let up = self.s.global_lca(u);
        self.s.evert(v);
        let vp = self.s.global_lca(v);
        if let (Some(up), Some(vp)) = (up, vp) {
            if up != u {
                self.s.evert(u);
                let p = self.s.parent(up).unwrap();
                if self.is_solid(up, p) {
                    self.to_dashed(up, p);
                }
            }
            if vp != v {
                self.s.evert(v);
                let p = self.s.parent(vp).unwrap();
                if self.is_solid(vp, p) {
                    self.to_dashed(vp, p);
                }
            }
        }
        Ok(())
    }

    /// Applies the updates in order and returns the number of `R` updates
    /// they emitted.
    pub fn apply_batch(&mut self, batch: &[ForestUpdate]) -> Result<usize, ForestError> {
        let before = self.emitted_updates.len();
        for up in batch {
            self.operations += 1;
            match *up {
                ForestUpdate::Link { u, v, edge } => self.m_link(u, v, edge)?,
                ForestUpdate::Cut { u, v } => self.m_cut(u, v)?,
            }
        }
        self.tick += 1;
        Ok(self.emitted_updates.len() - before)
    }

    /// Index of the next batch.
    pub fn tick(&self) -> usize {
        self.tick
    }

    fn terminals_connected(&self) -> bool {
        self.terminals.len() <= 1 || self.r.stats(self.terminals[0]).terminals == self.terminals.len()
    }

    pub fn add_value_on_steiner_tree(&mut self, delta: Weight) -> Result<(), ForestError> {
        if self.terminals.len() <= 1 {
            return Ok(());
        }
        if !self.terminals_connected() {
            return Err(ForestError::Disconnected);
        }
        self.r.add_dval(self.terminals[0], delta);
        Ok(())
    }

    /// Total length and minimum weight over `M^U`; `Weight::MAX` stands for
    /// an empty Steiner tree.
    pub fn steiner_tree_stats(&self) -> Result<(f64, Weight), ForestError> {
        if self.terminals.len() <= 1 {
            return Ok((0.0, Weight::MAX));
        }
        if !self.terminals_connected() {
            return Err(ForestError::Disconnected);
        }
        let st = self.r.stats(self.terminals[0]);
        Ok((st.sum_len, st.min_w))
    }

    pub fn get_value(&mut self, id: usize) -> Weight {
        if let Some(&(u, v)) = self.loc.get(&id) {
            if self.m[&(u, v)].solid {
                self.r.payload(u, v).dval
            } else {
                self.m[&(u, v)].dval
            }
        } else {
            self.off.get(&id).map_or(0, |x| x.0)
        }
    }

    pub fn reset_value(&mut self, id: usize) {
        if let Some(&(u, v)) = self.loc.get(&id) {
            if self.m[&(u, v)].solid {
                let mut p = self.r.payload(u, v);
                p.dval = 0;
                self.r.set_payload(u, v, p);
            } else {
                self.m.get_mut(&(u, v)).unwrap().dval = 0;
            }
        } else {
            self.off.remove(&id);
        }
        self.watch.remove(&id);
    }

    /// Updates the stored length of an edge of `M`.
    pub fn set_length(&mut self, id: usize, len: f64) {
        if let Some(&(u, v)) = self.loc.get(&id) {
            if self.m[&(u, v)].solid {
                let mut p = self.r.payload(u, v);
                p.len = len;
                self.r.set_payload(u, v, p);
            }
            self.m.get_mut(&(u, v)).unwrap().data.len = len;
        }
    }

    fn tau_of(&self, id: usize) -> Option<Weight> {
        if let Some(k) = self.loc.get(&id) {
            Some(self.m[k].data.tau)
        } else {
            self.off.get(&id).map(|x| x.1)
        }
    }

    /// Some edge whose accumulator reached its threshold, as an edge id.
    pub fn get_congested_edge(&mut self) -> Option<usize> {
        if self.terminals.len() >= 2 {
            if let Some((_, _, excess)) = self.r.most_congested_edge(self.terminals[0]) {
                if excess >= 0 {
                    let st = self.r.stats(self.terminals[0]);
                    return st.most_congested.map(|x| x.1);
                }
            }
        }
        while let Some(&id) = self.watch.iter().next() {
            match self.tau_of(id) {
                Some(tau) if self.get_value(id) >= tau => return Some(id),
                _ => {
                    self.watch.remove(&id);
                }
            }
        }
        None
    }

    /// Checks that every solid component is `M^U` or a terminal-free path.
    pub fn check_property(&self) -> Result<(), String> {
        let steiner: BTreeSet<(usize, usize)> = naive_steiner_subtree(
            self.n,
            &self.forest_edges().iter().map(|&(u, v, _)| (u, v)).collect::<Vec<_>>(),
            &self.terminals,
        )
        .into_iter()
        .collect();
        let solid = self.solid_edges();
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &solid {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut seen = vec![false; self.n];
        let is_t: BTreeSet<usize> = self.terminals.iter().copied().collect();
        for s in 0..self.n {
            if seen[s] || adj[s].is_empty() {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut i = 0;
            while i < comp.len() {
                let x = comp[i];
                i += 1;
                for &y in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                    }
                }
            }
            let has_t = comp.iter().any(|x| is_t.contains(x));
            if has_t {
                for &x in &comp {
                    for &y in &adj[x] {
                        if !steiner.contains(&key(x, y)) {
                            return Err(format!("solid edge ({x}, {y}) with terminals is outside M^U"));
                        }
                    }
                }
            } else if comp.iter().any(|&x| adj[x].len() > 2) {
                return Err(format!("terminal-free solid component at {s} is not a path"));
            }
        }
        Ok(())
    }
}

/// Edges of the forest lying on a path between two terminals.
pub fn naive_steiner_subtree(n: usize, edges: &[(usize, usize)], terminals: &[usize]) -> Vec<(usize, usize)> {
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for &(u, v) in edges {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    let mut is_t = vec![false; n];
    for &t in terminals {
        is_t[t] = true;
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| adj[v].len() == 1 && !is_t[v]).collect();
    while let Some(x) = stack.pop() {
        if adj[x].len() != 1 || is_t[x] {
            continue;
        }
        let y = *adj[x].iter().next().unwrap();
        adj[x].clear();
        adj[y].remove(&x);
        if adj[y].len() == 1 && !is_t[y] {
            stack.push(y);
        }
    }
    let mut out = Vec::new();
    for u in 0..n {
        for &v in &adj[u] {
            if u < v {
                out.push((u, v));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(id: usize, w: Weight, len: f64, tau: Weight) -> ForestEdge {
        ForestEdge { id, w, len, tau }
    }

    fn link(u: usize, v: usize, id: usize) -> ForestUpdate {
        ForestUpdate::Link { u, v, edge: edge(id, 1, 1.0, 1) }
    }

    #[test]
    fn lct_primitives() {
        let mut s = LinkCutTree::new(&[true, false, false, true, false]);
        s.link(0, 1);
        s.link(1, 2);
        s.link(2, 3);
        s.link(2, 4);
        s.evert(4);
        assert_eq!(s.root(0), 4);
        assert_eq!(s.parent(0), Some(1));
        assert_eq!(s.parent(2), Some(4));
        assert_eq!(s.global_lca(0), Some(2));
        s.evert(0);
        assert_eq!(s.global_lca(4), Some(0));
        assert_eq!(s.highest(3), 3);
        s.mark(2, 3, false);
        s.mark(1, 2, false);
        assert_eq!(s.highest(3), 1);
        s.cut(1, 2);
        assert_eq!(s.global_lca(1), Some(0));
        assert_eq!(s.global_lca(4), Some(3));
        assert!(!s.connected(0, 3));
    }

    #[test]
    fn p3_restoration() {
        let mut f = DynamicForest::new(3, &[0, 2]);
        f.apply_batch(&[link(0, 1, 0), link(1, 2, 1)]).unwrap();
        assert_eq!(f.terminal_component(), Some(vec![(0, 1), (1, 2)]));
        f.apply_batch(&[ForestUpdate::Cut { u: 1, v: 2 }, link(1, 2, 1)]).unwrap();
        assert_eq!(f.terminal_component(), Some(vec![(0, 1), (1, 2)]));
        f.check_property().unwrap();
    }

    #[test]
    fn star_build_emits_all_edges() {
        let mut f = DynamicForest::new(4, &[1, 2, 3]);
        f.apply_batch(&[link(0, 1, 0), link(0, 2, 1), link(0, 3, 2)]).unwrap();
        let ins: BTreeSet<(usize, usize)> =
            f.emitted_updates.iter().filter(|u| u.kind == RKind::Insert).map(|u| (u.u, u.v)).collect();
        assert_eq!(ins, [(0, 1), (0, 2), (0, 3)].into_iter().collect());
        assert_eq!(f.terminal_component().unwrap().len(), 3);
    }

    #[test]
    fn path_cut_leaves_terminal_free_paths() {
        let mut f = DynamicForest::new(4, &[0, 3]);
        f.apply_batch(&[link(0, 1, 0), link(1, 2, 1), link(2, 3, 2)]).unwrap();
        f.apply_batch(&[ForestUpdate::Cut { u: 1, v: 2 }]).unwrap();
        assert_eq!(f.terminal_component(), None);
        f.check_property().unwrap();
        assert!(f.solid_edges().is_empty());
    }

    #[test]
    fn values_and_congestion() {
        let mut f = DynamicForest::new(3, &[0, 2]);
        f.apply_batch(&[
            ForestUpdate::Link { u: 0, v: 1, edge: edge(0, 7, 2.0, 4) },
            ForestUpdate::Link { u: 1, v: 2, edge: edge(1, 4, 3.0, 4) },
        ])
        .unwrap();
        assert_eq!(f.steiner_tree_stats().unwrap(), (5.0, 4));
        assert_eq!(f.get_congested_edge(), None);
        f.add_value_on_steiner_tree(3).unwrap();
        assert_eq!(f.get_congested_edge(), None);
        f.add_value_on_steiner_tree(3).unwrap();
        assert_eq!(f.get_value(0), 6);
        assert_eq!(f.get_value(1), 6);
        let a = f.get_congested_edge().unwrap();
        f.reset_value(a);
        let b = f.get_congested_edge().unwrap();
        assert_ne!(a, b);
        f.reset_value(b);
        assert_eq!(f.get_congested_edge(), None);
    }

    #[test]
    fn star_two_leaves() {
        let mut f = DynamicForest::new(4, &[1, 2]);
        f.apply_batch(&[link(0, 1, 0), link(0, 2, 1), link(0, 3, 2)]).unwrap();
        f.add_value_on_steiner_tree(1).unwrap();
        assert_eq!((f.get_value(0), f.get_value(1), f.get_value(2)), (1, 1, 0));
    }

    #[test]
    fn single_terminal_stats() {
        let mut f = DynamicForest::new(2, &[0]);
        f.apply_batch(&[link(0, 1, 0)]).unwrap();
        assert_eq!(f.steiner_tree_stats().unwrap(), (0.0, Weight::MAX));
        f.add_value_on_steiner_tree(5).unwrap();
        assert_eq!(f.get_value(0), 0);
    }

    #[test]
    fn errors() {
        let mut f = DynamicForest::new(3, &[0, 2]);
        f.apply_batch(&[link(0, 1, 0), link(1, 2, 1)]).unwrap();
        assert_eq!(f.apply_batch(&[link(0, 2, 2)]), Err(ForestError::Cycle(0, 2)));
        assert_eq!(f.apply_batch(&[ForestUpdate::Cut { u: 0, v: 2 }]), Err(ForestError::NotAnEdge(0, 2)));
    }

    #[test]
    fn naive_examples() {
        assert_eq!(naive_steiner_subtree(3, &[(0, 1), (1, 2)], &[0, 2]), vec![(0, 1), (1, 2)]);
        assert_eq!(naive_steiner_subtree(3, &[(0, 1), (1, 2)], &[0, 1]), vec![(0, 1)]);
        assert_eq!(
            naive_steiner_subtree(6, &[(0, 1), (1, 2), (3, 4), (4, 5)], &[0, 1, 3, 5]),
            vec![(0, 1), (3, 4), (4, 5)]
        );
    }
}
