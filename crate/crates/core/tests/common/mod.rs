#![allow(dead_code)]

use std::collections::BTreeSet;

use mincut::linkcut::{naive_steiner_subtree, DynamicForest, ForestEdge, ForestUpdate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct FuzzReport {
    pub operations: usize,
    pub emitted: usize,
    pub splices: usize,
    pub n: usize,
}

fn comp_of(n: usize, edges: &BTreeSet<(usize, usize)>) -> Vec<usize> {
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(c: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while c[r] != r {
            r = c[r];
        }
        let mut y = x;
        while c[y] != r {
            let z = c[y];
            c[y] = r;
            y = z;
        }
        r
    }
    for &(u, v) in edges {
        let (a, b) = (find(&mut comp, u), find(&mut comp, v));
        comp[a] = b;
    }
    (0..n).map(|x| find(&mut comp, x)).collect()
}

/// Random batches of links and cuts checked against naive recomputation.
pub fn fuzz_forest(seed: u64, n: usize, ops: usize) -> Result<FuzzReport, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut verts: Vec<usize> = (0..n).collect();
    verts.shuffle(&mut rng);
    let k = rng.gen_range(1..=n.max(2) / 2 + 1).min(n);
    let terminals: Vec<usize> = verts[..k].to_vec();
    let mut f = DynamicForest::new(n, &terminals);
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut model = vec![0i64; n * n];
    let weight = |u: usize, v: usize| ((u * 7 + v * 13) % 9 + 1) as i64;
    let mut done = 0;
    while done < ops {
        let len = rng.gen_range(1..=4);
        let mut batch = Vec::new();
        for _ in 0..len {
            let comp = comp_of(n, &edges);
            let want_link = edges.is_empty() || (edges.len() < n - 1 && rng.gen_bool(0.6));
            if want_link {
                let mut tries = 0;
                loop {
                    let u = rng.gen_range(0..n);
                    let v = rng.gen_range(0..n);
                    tries += 1;
                    if u != v && comp[u] != comp[v] {
                        let (a, b) = (u.min(v), u.max(v));
                        edges.insert((a, b));
                        let e = ForestEdge { id: a * n + b, w: weight(a, b), len: (a + b) as f64, tau: 1 << 40 };
                        batch.push(ForestUpdate::Link { u, v, edge: e });
                        break;
                    }
                    if tries > 100 {
                        break;
                    }
                }
            } else {
                let list: Vec<_> = edges.iter().copied().collect();
                let &(a, b) = list.choose(&mut rng).unwrap();
                edges.remove(&(a, b));
                if rng.gen_bool(0.5) {
                    batch.push(ForestUpdate::Cut { u: a, v: b });
                } else {
                    batch.push(ForestUpdate::Cut { u: b, v: a });
                }
            }
        }
        done += batch.len();
        f.apply_batch(&batch).map_err(|e| e.to_string())?;
        f.check_property()?;
        let list: Vec<(usize, usize)> = edges.iter().copied().collect();
        let naive = naive_steiner_subtree(n, &list, &terminals);
        let comp = comp_of(n, &edges);
        let connected = terminals.iter().all(|&t| comp[t] == comp[terminals[0]]);
        let got: Vec<(usize, usize)> = f.forest_edges().iter().map(|&(u, v, _)| (u, v)).collect();
        if got != list {
            return Err("forest edge set diverged".into());
        }
        if connected {
            let tc = f.terminal_component().ok_or("terminals connected in M but not in R")?;
            if tc != naive {
                return Err(format!("solid terminal component {tc:?} differs from M^U {naive:?}"));
            }
            let (len, minw) = f.steiner_tree_stats().map_err(|e| e.to_string())?;
            let nlen: f64 = naive.iter().map(|&(a, b)| (a + b) as f64).sum();
            let nmin = naive.iter().map(|&(a, b)| weight(a, b)).min().unwrap_or(i64::MAX);
            if (len - nlen).abs() > 1e-9 || minw != nmin {
                return Err(format!("stats ({len}, {minw}) differ from ({nlen}, {nmin})"));
            }
            if rng.gen_bool(0.3) {
                let d = rng.gen_range(1..5);
                f.add_value_on_steiner_tree(d).map_err(|e| e.to_string())?;
                if terminals.len() >= 2 {
                    for &(a, b) in &naive {
                        model[a * n + b] += d;
                    }
                }
            }
        }
        if rng.gen_bool(0.2) {
            for &(a, b) in &list {
                let id = a * n + b;
                if f.get_value(id) != model[id] {
                    return Err(format!("value of ({a}, {b}) is {} but expected {}", f.get_value(id), model[id]));
                }
            }
        }
    }
    Ok(FuzzReport { operations: f.operations, emitted: f.emitted_updates.len(), splices: f.splices, n })
}
