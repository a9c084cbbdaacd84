//! Euler-tour forests over an implicit-key treap.
//!
//! Each tree is stored as a cyclic sequence of one node per vertex plus two
//! arc nodes per edge. The canonical arc `(min → max)` of every edge holds
//! the edge payload. Optionally the structure also tracks the cycle of
//! terminal occurrences: every arc whose tail is a terminal carries the value
//! of the cycle edge leaving it, and those values are flushed whenever the
//! cycle edge changes.

use std::collections::HashMap;

use crate::graph::Weight;

const NIL: usize = usize::MAX;

/// Per-edge payload stored on the canonical arc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Payload {
    pub id: usize,
    pub w: Weight,
    pub len: f64,
    pub tau: Weight,
    pub dval: Weight,
}

#[derive(Debug, Clone)]
struct Node {
    l: usize,
    r: usize,
    p: usize,
    prio: u64,
    size: usize,
    tail: usize,
    head: usize,
    term_v: bool,
    term_tail: bool,
    payload: Option<Payload>,
    cval: Weight,
    tag_d: Weight,
    tag_c: Weight,
    cnt_term_v: usize,
    cnt_tail: usize,
    cnt_payload: usize,
    sum_len: f64,
    min_w: Weight,
    best: Weight,
    best_node: usize,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Aggregates over one tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeStats {
    pub terminals: usize,
    pub edges: usize,
    pub sum_len: f64,
    pub min_w: Weight,
    /// Largest `dval - tau` over edges, with the edge id.
    pub most_congested: Option<(Weight, usize)>,
}

/// A flushed cycle edge: terminal endpoints and value in half units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Flush {
    pub a: usize,
    pub b: usize,
    pub half_units: Weight,
}

#[derive(Debug, Clone)]
pub struct EulerForest {
    nodes: Vec<Node>,
    free: Vec<usize>,
    arcs: HashMap<(usize, usize), usize>,
    terminal: Vec<bool>,
    track_cycle: bool,
    pub flushed: Vec<Flush>,
    counter: u64,
}

impl EulerForest {
    pub fn new(n: usize, terminal: &[bool], track_cycle: bool) -> Self {
        let mut f = EulerForest {
            nodes: Vec::with_capacity(3 * n),
            free: Vec::new(),
            arcs: HashMap::new(),
            terminal: terminal.to_vec(),
            track_cycle,
            flushed: Vec::new(),
            counter: 0,
        };
        for v in 0..n {
            let id = f.alloc(v, v, None);
            debug_assert_eq!(id, v);
        }
        f
    }

    fn alloc(&mut self, tail: usize, head: usize, payload: Option<Payload>) -> usize {
        self.counter += 1;
        let is_vertex = tail == head;
        let node = Node {
            l: NIL,
            r: NIL,
            p: NIL,
            prio: splitmix(self.counter),
            size: 1,
            tail,
            head,
            term_v: is_vertex && self.terminal[tail],
            term_tail: !is_vertex && self.terminal[tail],
            payload,
            cval: 0,
            tag_d: 0,
            tag_c: 0,
            cnt_term_v: 0,
            cnt_tail: 0,
            cnt_payload: 0,
            sum_len: 0.0,
            min_w: Weight::MAX,
            best: Weight::MIN,
            best_node: NIL,
        };
        let id = if let Some(id) = self.free.pop() {
            self.nodes[id] = node;
            id
        } else {
            self.nodes.push(node);
            self.nodes.len() - 1
        };
        self.pull(id);
        id
    }

    fn apply_d(&mut self, x: usize, t: Weight) {
        if x == NIL || t == 0 {
            return;
        }
        let n = &mut self.nodes[x];
        if let Some(p) = n.payload.as_mut() {
            p.dval += t;
        }
        if n.best_node != NIL {
            n.best += t;
        }
        n.tag_d += t;
    }

    fn apply_c(&mut self, x: usize, t: Weight) {
        if x == NIL || t == 0 {
            return;
        }
        let n = &mut self.nodes[x];
        if n.term_tail {
            n.cval += t;
        }
        n.tag_c += t;
    }

    fn push(&mut self, x: usize) {
        let (l, r, td, tc) = {
            let n = &self.nodes[x];
            (n.l, n.r, n.tag_d, n.tag_c)
        };
        if td != 0 {
            self.apply_d(l, td);
            self.apply_d(r, td);
            self.nodes[x].tag_d = 0;
        }
        if tc != 0 {
            self.apply_c(l, tc);
            self.apply_c(r, tc);
            self.nodes[x].tag_c = 0;
        }
    }

    fn pull(&mut self, x: usize) {
        let (l, r) = (self.nodes[x].l, self.nodes[x].r);
        let mut size = 1;
        let mut ctv = self.nodes[x].term_v as usize;
        let mut ctt = self.nodes[x].term_tail as usize;
        let mut cp = 0;
        let (mut sl, mut mw, mut best, mut bn) = (0.0, Weight::MAX, Weight::MIN, NIL);
        if let Some(p) = self.nodes[x].payload {
            cp = 1;
            sl = p.len;
            mw = p.w;
            best = p.dval - p.tau;
            bn = x;
        }
        for c in [l, r] {
            if c == NIL {
                continue;
            }
            let n = &self.nodes[c];
            size += n.size;
            ctv += n.cnt_term_v;
            ctt += n.cnt_tail;
            cp += n.cnt_payload;
            sl += n.sum_len;
            mw = mw.min(n.min_w);
            if n.best_node != NIL && (bn == NIL || n.best > best) {
                best = n.best;
                bn = n.best_node;
            }
        }
        let n = &mut self.nodes[x];
        n.size = size;
        n.cnt_term_v = ctv;
        n.cnt_tail = ctt;
        n.cnt_payload = cp;
        n.sum_len = sl;
        n.min_w = mw;
        n.best = best;
        n.best_node = bn;
    }

    fn size(&self, x: usize) -> usize {
        if x == NIL {
            0
        } else {
            self.nodes[x].size
        }
    }

    fn tails(&self, x: usize) -> usize {
        if x == NIL {
            0
        } else {
            self.nodes[x].cnt_tail
        }
    }

    fn merge(&mut self, a: usize, b: usize) -> usize {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        if self.nodes[a].prio > self.nodes[b].prio {
            self.push(a);
            let r = self.merge(self.nodes[a].r, b);
            self.nodes[a].r = r;
            self.nodes[r].p = a;
            self.pull(a);
            a
        } else {
            self.push(b);
            let l = self.merge(a, self.nodes[b].l);
            self.nodes[b].l = l;
            self.nodes[l].p = b;
            self.pull(b);
            b
        }
    }

    /// First `k` elements and the rest.
    fn split(&mut self, t: usize, k: usize) -> (usize, usize) {
        if t == NIL {
            return (NIL, NIL);
        }
        self.push(t);
        let ls = self.size(self.nodes[t].l);
        if k <= ls {
            let l = self.nodes[t].l;
            let (a, b) = self.split(l, k);
            self.nodes[t].l = b;
            if b != NIL {
                self.nodes[b].p = t;
            }
            if a != NIL {
                self.nodes[a].p = NIL;
            }
            self.pull(t);
            self.nodes[t].p = NIL;
            (a, t)
        } else {
            let r = self.nodes[t].r;
            let (a, b) = self.split(r, k - ls - 1);
            self.nodes[t].r = a;
            if a != NIL {
                self.nodes[a].p = t;
            }
            if b != NIL {
                self.nodes[b].p = NIL;
            }
            self.pull(t);
            self.nodes[t].p = NIL;
            (t, b)
        }
    }

    fn root(&self, mut x: usize) -> usize {
        while self.nodes[x].p != NIL {
            x = self.nodes[x].p;
        }
        x
    }

    fn index(&self, mut x: usize) -> usize {
        let mut i = self.size(self.nodes[x].l);
        while self.nodes[x].p != NIL {
            let p = self.nodes[x].p;
            if self.nodes[p].r == x {
                i += self.size(self.nodes[p].l) + 1;
            }
            x = p;
        }
        i
    }

    /// Number of terminal-tail arcs strictly before `x` in its sequence.
    fn tails_before(&self, mut x: usize) -> usize {
        let mut c = self.tails(self.nodes[x].l);
        while self.nodes[x].p != NIL {
            let p = self.nodes[x].p;
            if self.nodes[p].r == x {
                c += self.tails(self.nodes[p].l) + self.nodes[p].term_tail as usize;
            }
            x = p;
        }
        c
    }

    /// The `k`-th terminal-tail arc (0-based) below `t`.
    fn kth_tail(&self, mut t: usize, mut k: usize) -> usize {
        loop {
            let l = self.nodes[t].l;
            let lc = self.tails(l);
            if k < lc {
                t = l;
                continue;
            }
            k -= lc;
            if self.nodes[t].term_tail {
                if k == 0 {
                    return t;
                }
                k -= 1;
            }
            t = self.nodes[t].r;
        }
    }

    /// Pushes every pending tag on the path from the root down to `x`.
    fn push_path(&mut self, x: usize) {
        let mut path = vec![x];
        let mut y = x;
        while self.nodes[y].p != NIL {
            y = self.nodes[y].p;
            path.push(y);
        }
        for &z in path.iter().rev() {
            self.push(z);
        }
    }

    fn pull_path(&mut self, mut x: usize) {
        loop {
            self.pull(x);
            if self.nodes[x].p == NIL {
                break;
            }
            x = self.nodes[x].p;
        }
    }

    fn reroot(&mut self, v: usize) -> usize {
        let r = self.root(v);
        let i = self.index(v);
        let (a, b) = self.split(r, i);
        self.merge(b, a)
    }

    /// Terminal-tail arc cyclically preceding position of `x`.
    fn tail_before(&self, x: usize) -> Option<usize> {
        let r = self.root(x);
        let total = self.tails(r);
        if total == 0 {
            return None;
        }
        let c = self.tails_before(x);
        let k = if c == 0 { total - 1 } else { c - 1 };
        Some(self.kth_tail(r, k))
    }

    /// Moves the cycle value leaving terminal occurrence `o` to the output.
    fn flush_occurrence(&mut self, o: usize) {
        self.push_path(o);
        let value = self.nodes[o].cval;
        if value == 0 {
            return;
        }
        let r = self.root(o);
        let total = self.tails(r);
        let k = (self.tails_before(o) + 1) % total;
        let succ = self.kth_tail(r, k);
        let (a, b) = (self.nodes[o].tail, self.nodes[succ].tail);
        if a != b {
            self.flushed.push(Flush { a, b, half_units: value });
        }
        self.nodes[o].cval = 0;
    }

    pub fn connected(&self, u: usize, v: usize) -> bool {
        self.root(u) == self.root(v)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.arcs.contains_key(&(u, v))
    }

    /// Joins the trees of `u` and `v` by the edge `(u, v)`.
    pub fn link(&mut self, u: usize, v: usize, payload: Option<Payload>) {
        assert!(!self.connected(u, v), "link would create a cycle");
        if self.track_cycle {
            let mut occ = Vec::new();
            occ.extend(self.tail_before(u));
            occ.extend(self.tail_before(v));
            for o in occ {
                self.flush_occurrence(o);
            }
        }
        let su = self.reroot(u);
        let sv = self.reroot(v);
        let (pa, pb) = if u < v { (payload, None) } else { (None, payload) };
        let a1 = self.alloc(u, v, pa);
        let a2 = self.alloc(v, u, pb);
        self.arcs.insert((u, v), a1);
        self.arcs.insert((v, u), a2);
        let x = self.merge(su, a1);
        let x = self.merge(x, sv);
        self.merge(x, a2);
    }

    /// Removes the edge `(u, v)` and returns its payload.
    pub fn cut(&mut self, u: usize, v: usize) -> Option<Payload> {
        let a1 = *self.arcs.get(&(u, v)).expect("cut of a non-edge");
        let a2 = self.arcs[&(v, u)];
        if self.track_cycle {
            let mut occ = Vec::new();
            occ.extend(self.tail_before(a1));
            occ.extend(self.tail_before(a2));
            for a in [a1, a2] {
                if self.nodes[a].term_tail {
                    occ.push(a);
                }
            }
            occ.sort_unstable();
            occ.dedup();
            for o in occ {
                self.flush_occurrence(o);
            }
        }
        self.push_path(a1);
        self.push_path(a2);
        let payload = self.nodes[a1].payload.or(self.nodes[a2].payload);
        let r = self.root(a1);
        let (mut i1, mut i2) = (self.index(a1), self.index(a2));
        if i1 > i2 {
            std::mem::swap(&mut i1, &mut i2);
        }
        let (x, rest) = self.split(r, i1);
        let (_, rest) = self.split(rest, 1);
        let (_y, rest) = self.split(rest, i2 - i1 - 1);
        let (_, z) = self.split(rest, 1);
        self.merge(x, z);
        self.arcs.remove(&(u, v));
        self.arcs.remove(&(v, u));
        self.free.push(a1);
        self.free.push(a2);
        payload
    }

    fn canonical(&self, u: usize, v: usize) -> usize {
        self.arcs[&(u.min(v), u.max(v))]
    }

    pub fn payload(&mut self, u: usize, v: usize) -> Payload {
        let a = self.canonical(u, v);
        self.push_path(a);
        self.nodes[a].payload.expect("canonical arc carries the payload")
    }

    pub fn set_payload(&mut self, u: usize, v: usize, p: Payload) {
        let a = self.canonical(u, v);
        self.push_path(a);
        self.nodes[a].payload = Some(p);
        self.pull_path(a);
    }

    /// Adds `delta` to the payload value of every edge in the tree of `v`.
    pub fn add_dval(&mut self, v: usize, delta: Weight) {
        let r = self.root(v);
        self.apply_d(r, delta);
    }

    /// Adds `half_units` to every terminal-cycle edge of the tree of `v`.
    pub fn add_cycle(&mut self, v: usize, half_units: Weight) {
        let r = self.root(v);
        self.apply_c(r, half_units);
    }

    pub fn stats(&self, v: usize) -> TreeStats {
        let n = &self.nodes[self.root(v)];
        TreeStats {
            terminals: n.cnt_term_v,
            edges: n.cnt_payload,
            sum_len: n.sum_len,
            min_w: n.min_w,
            most_congested: if n.best_node == NIL {
                None
            } else {
                Some((n.best, self.nodes[n.best_node].payload.unwrap().id))
            },
        }
    }

    /// Endpoints of the edge whose payload is most congested in the tree of `v`.
    pub fn most_congested_edge(&self, v: usize) -> Option<(usize, usize, Weight)> {
        let n = &self.nodes[self.root(v)];
        if n.best_node == NIL {
            return None;
        }
        let b = &self.nodes[n.best_node];
        Some((b.tail.min(b.head), b.tail.max(b.head), n.best))
    }

    /// Flushes every cycle edge of every tree.
    pub fn flush_all(&mut self) {
        let mut occ: Vec<usize> = self.arcs.values().copied().filter(|&x| self.nodes[x].term_tail).collect();
        occ.sort_unstable();
        for o in occ {
            self.flush_occurrence(o);
        }
    }

    fn collect(&self, t: usize, tag_c: Weight, out: &mut Vec<(usize, usize, Weight)>) {
        if t == NIL {
            return;
        }
        let n = &self.nodes[t];
        let acc = tag_c;
        self.collect(n.l, acc + n.tag_c, out);
        out.push((n.tail, n.head, if n.term_tail { n.cval + acc } else { 0 }));
        self.collect(n.r, acc + n.tag_c, out);
    }

    /// The stored sequence of the tree of `v` as `(tail, head, cycle value)`;
    /// vertex nodes appear as `(x, x, 0)`.
    pub fn sequence(&self, v: usize) -> Vec<(usize, usize, Weight)> {
        let mut out = Vec::new();
        self.collect(self.root(v), 0, &mut out);
        out
    }
}
