//! One test per acceptance criterion. Each prints a single PASS/FAIL line
//! with its measurements before asserting.

mod common;

use std::io::Write;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use mincut::expander::{check_witness, expander_decompose, verify_expander, DemandVector, ENUM_LIMIT};
use mincut::fixtures;
use mincut::flow::st_mincut;
use mincut::ghtree::{check_lemma, ghtree_step, ghtree_with, k_connected_partitions, GhConfig};
use mincut::hitmiss::hit_and_miss_family;
use mincut::oracle::oracle_all_pairs_mincut;
use mincut::packing::{audit_packing, pack_steiner_subgraphs, BigRational, Rational};
use mincut::sparsifier::{crossing_count, extract_vertex_sparsifier_with, guide_trees, ExtractOptions, K_RESPECT};
use mincut::ssmc::{ssmc_all, SsmcConfig};
use mincut::WeightedGraph;

const CORPUS_SEED: u64 = 101;
const CORPUS_SIZE: usize = 200;
/// Splice budget per operation and per unit of log₂n.
const SPLICE_C: f64 = 4.0;
const FUZZ_OPS: usize = 100_000;

fn corpus() -> Vec<WeightedGraph> {
    fixtures::corpus(CORPUS_SEED, CORPUS_SIZE, 12, 30, 16)
}

fn with_named(graphs: Vec<WeightedGraph>) -> Vec<(String, WeightedGraph)> {
    let mut out: Vec<(String, WeightedGraph)> =
        fixtures::named().into_iter().map(|(n, g)| (n.to_string(), g)).collect();
    out.extend(graphs.into_iter().enumerate().map(|(i, g)| (format!("corpus #{i}"), g)));
    out
}

fn all(g: &WeightedGraph) -> Vec<usize> {
    (0..g.n()).collect()
}

fn line(id: usize, name: &str, res: &Result<String, String>, limit: Duration, took: Duration) {
    let text = match res {
        Ok(m) if took <= limit => format!("criterion {id:>2} PASS  {name}: {m} ({took:.1?})"),
        Ok(m) => format!("criterion {id:>2} FAIL  {name}: {m} ({took:.1?}, over the {limit:?} budget)"),
        Err(m) => format!("criterion {id:>2} FAIL  {name}: {m} ({took:.1?})"),
    };
    // Raw stderr, outside the harness capture.
    let _ = writeln!(std::io::stderr(), "{text}");
}

static SERIAL: Mutex<()> = Mutex::new(());

/// Runs one criterion at a time and times it.
fn criterion(id: usize, name: &str, limit: Duration, body: impl FnOnce() -> Result<String, String>) {
    let _alone = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let t0 = Instant::now();
    let res = body();
    let took = t0.elapsed();
    line(id, name, &res, limit, took);
    if let Err(m) = res {
        panic!("criterion {id} failed: {m}");
    }
    assert!(took <= limit, "criterion {id} exceeded {limit:?}");
}

#[test]
fn c01_ghtree_exactness() {
    criterion(1, "Gomory-Hu trees exact", Duration::from_secs(120), || {
        let cfg = GhConfig::fast();
        let graphs = with_named(corpus());
        let mut pairs = 0;
        for (name, g) in &graphs {
            let o = oracle_all_pairs_mincut(g).unwrap();
            let (t, _) = ghtree_with(g, &all(g), &cfg).map_err(|e| format!("{name}: {e}"))?;
            t.check_shape().map_err(|e| format!("{name}: {e}"))?;
            t.check_against(g, &o).map_err(|v| format!("{name}: {v}"))?;
            pairs += g.n() * (g.n() - 1) / 2;
        }
        Ok(format!("{} graphs, {pairs} pairs, path minimum and induced cut both equal λ", graphs.len()))
    });
}

#[test]
fn c02_ssmc_exactness() {
    criterion(2, "single-source mincuts exact", Duration::from_secs(120), || {
        let cfg = SsmcConfig::fast();
        let graphs = with_named(corpus());
        let mut targets = 0;
        for (name, g) in &graphs {
            for s in 0..g.n() {
                let (e, _) = ssmc_all(g, s, &cfg).map_err(|e| format!("{name}: {e}"))?;
                for t in (0..g.n()).filter(|&t| t != s) {
                    let want = st_mincut(g, s, t).value;
                    if e.get(t) != Some(want) {
                        return Err(format!("{name}, s {s}, t {t}: got {:?}, maxflow {want}", e.get(t)));
                    }
                    targets += 1;
                }
            }
        }
        Ok(format!("{} graphs, every source, {targets} targets", graphs.len()))
    });
}

#[test]
fn c03_guide_trees_respect() {
    criterion(3, "guide trees 16-respect a mincut", Duration::from_secs(300), || {
        let graphs = fixtures::corpus(301, 110, 9, 22, 16);
        let (mut checked, mut worst) = (0, 0);
        for (i, g) in graphs.iter().enumerate() {
            let n = g.n();
            let s = i % n;
            let u = all(g);
            let gt = guide_trees(g, &u, s).map_err(|e| format!("graph {i}: {e}"))?;
            let o = oracle_all_pairs_mincut(g).unwrap();
            let lam = o.lambda_of(&u).unwrap();
            for t in (0..n).filter(|&t| t != s && 10 * o.lambda(s, t) <= 11 * lam) {
                let best = o
                    .all_mincuts(s, t)
                    .into_iter()
                    .flat_map(|m| {
                        let side: Vec<bool> = (0..n).map(|v| m >> v & 1 == 1).collect();
                        gt.trees.iter().map(move |tr| crossing_count(tr, &side)).collect::<Vec<_>>()
                    })
                    .min()
                    .unwrap();
                if best > K_RESPECT {
                    return Err(format!("graph {i}, s {s}, t {t}: best tree crosses {best} times"));
                }
                worst = worst.max(best);
                checked += 1;
            }
        }
        Ok(format!("{} graphs, {checked} targets, worst crossing {worst} ≤ {K_RESPECT}", graphs.len()))
    });
}

#[test]
fn c04_sparsifier_bounds() {
    criterion(4, "vertex sparsifier bounds", Duration::from_secs(300), || {
        let graphs = fixtures::corpus(401, 80, 10, 24, 16);
        let mut worst = f64::INFINITY;
        for (i, g) in graphs.iter().enumerate() {
            let n = g.n();
            let u: Vec<usize> = (0..n).filter(|v| (v + i) % 4 != 1 || n < 4).collect();
            let sp = extract_vertex_sparsifier_with(g, &u, Rational::new(1, 10), ExtractOptions::default())
                .map_err(|e| format!("graph {i}: {e}"))?;
            let lam = oracle_all_pairs_mincut(g).unwrap().lambda_of(&u).unwrap();
            let lp = sp.lambda();
            if lp * BigRational::from_integer(41) < BigRational::from_integer(10 * lam as i128) {
                return Err(format!("graph {i}: λ(G′) = {} below {lam}/4.1", sp.lambda()));
            }
            worst = worst.min(mincut::sparsifier::approx(&sp.lambda()) / lam as f64);
            for mask in 1..(1u64 << n) - 1 {
                let side: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
                let c = sp.cut_of_original(&side);
                if c > BigRational::from_integer(g.cut_mask(mask) as i128) {
                    return Err(format!("graph {i}, side {mask:b}: {c} > {}", g.cut_mask(mask)));
                }
            }
        }
        Ok(format!("{} graphs, all bipartitions dominated, worst λ(G′)/λ(U) = {worst:.4} ≥ 1/4.1", graphs.len()))
    });
}

#[test]
fn c05_packing_guarantees() {
    criterion(5, "Steiner packing feasible and large", Duration::from_secs(300), || {
        let graphs = with_named(fixtures::corpus(501, 60, 12, 30, 16));
        let eps = Rational::new(1, 20);
        let mut worst = f64::INFINITY;
        for (i, (name, g)) in graphs.iter().enumerate() {
            let n = g.n();
            let u: Vec<usize> = (0..n).filter(|v| (v + i) % 3 != 1 || n < 4).collect();
            let run = pack_steiner_subgraphs(g, &u, eps).map_err(|e| format!("{name}: {e}"))?;
            let rep =
                audit_packing(g, &run.terminals, &run.packing, &run.diff_log).map_err(|e| format!("{name}: {e}"))?;
            if !rep.feasible {
                return Err(format!("{name}: replayed packing overloads an edge"));
            }
            let lam = oracle_all_pairs_mincut(g).unwrap().lambda_of(&u).unwrap();
            if rep.value * BigRational::from_integer(41) < BigRational::from_integer(10 * lam as i128) {
                return Err(format!("{name}: value {} below {lam}/4.1", rep.value));
            }
            worst = worst.min(mincut::sparsifier::approx(&rep.value) / lam as f64);
        }
        Ok(format!("{} graphs at ε = {eps}, worst value/λ(U) = {worst:.4} ≥ 1/4.1", graphs.len()))
    });
}

#[test]
fn c06_dynamic_forest() {
    criterion(6, "dynamic forest matches M^U", Duration::from_secs(180), || {
        let (mut ops, mut worst, mut seed) = (0, 0.0f64, 0u64);
        while ops < FUZZ_OPS {
            let n = 2 + (seed as usize * 7) % 63;
            let r = common::fuzz_forest(1000 + seed, n, 500).map_err(|e| format!("seed {seed}, n {n}: {e}"))?;
            let bound = SPLICE_C * r.operations as f64 * (n as f64).log2().max(1.0);
            if r.splices as f64 > bound {
                return Err(format!("seed {seed}: {} splices over C·k·log₂n = {bound:.0}", r.splices));
            }
            worst = worst.max(r.splices as f64 / (r.operations as f64 * (n as f64).log2().max(1.0)));
            ops += r.operations;
            seed += 1;
        }
        Ok(format!("{ops} operations over {seed} forests, n ≤ 64, splices/(k·log₂n) ≤ {worst:.3}, C = {SPLICE_C}"))
    });
}

#[test]
fn c07_expander_decomposition() {
    criterion(7, "expander decomposition certified", Duration::from_secs(180), || {
        let mut graphs = fixtures::corpus(701, 80, 14, 30, 3);
        graphs.extend(fixtures::named().into_iter().map(|(_, g)| g));
        let phis = [Rational::new(1, 4), Rational::new(1, 1), Rational::new(3, 1)];
        let (mut clusters, mut trims) = (0, 0);
        for (i, g) in graphs.iter().enumerate() {
            let n = g.n();
            let demands =
                [DemandVector::uniform(n, 1), DemandVector::indicator(n, &(0..n).step_by(2).collect::<Vec<_>>())];
            for phi in phis {
                for d in &demands {
                    let dec = expander_decompose(g, phi, d);
                    check_witness(g, &dec, d).map_err(|e| format!("graph {i}, φ {phi}: {e}"))?;
                    for c in dec.clusters.iter().filter(|c| c.len() <= ENUM_LIMIT) {
                        let sub = g.induced(c);
                        let dc = DemandVector(c.iter().map(|&v| d.0[v]).collect());
                        if !verify_expander(&sub, phi, &dc).unwrap() {
                            return Err(format!("graph {i}, φ {phi}: cluster {c:?} not φ-expanding"));
                        }
                        clusters += 1;
                    }
                    for t in &dec.trims {
                        if 6 * t.d_removed > t.d_total {
                            return Err(format!(
                                "graph {i}, φ {phi}, depth {}: trimmed {} of {}",
                                t.depth, t.d_removed, t.d_total
                            ));
                        }
                        trims += 1;
                    }
                }
            }
        }
        if trims == 0 {
            return Err("no instance exercised trimming".into());
        }
        Ok(format!(
            "{} graphs × 3 φ × 2 demands, {clusters} clusters certified, {trims} trims within d(V)/6",
            graphs.len()
        ))
    });
}

#[test]
fn c08_hit_and_miss() {
    criterion(8, "hit-and-miss families", Duration::from_secs(60), || {
        let mut pairs = 0u64;
        for n in 1..=16usize {
            for a in 0..=4usize {
                for b in 0..=2usize {
                    let fam = hit_and_miss_family(n, a, b).map_err(|e| e.to_string())?;
                    if fam.to_bytes() != hit_and_miss_family(n, a, b).unwrap().to_bytes() {
                        return Err(format!("n {n}, a {a}, b {b}: two builds differ"));
                    }
                    if fam.len() as f64 > fam.size_bound() {
                        return Err(format!("n {n}, a {a}, b {b}: {} functions over the bound", fam.len()));
                    }
                    let ones: Vec<u32> =
                        fam.functions.iter().map(|f| (0..n).filter(|&x| f.eval(x)).map(|x| 1u32 << x).sum()).collect();
                    let full = (1u32 << n) - 1;
                    for bset in (0..=full).filter(|m| m.count_ones() as usize <= b) {
                        let cover: Vec<u32> = ones.iter().copied().filter(|o| o & bset == bset).collect();
                        let rest = full & !bset;
                        let mut aset = rest;
                        loop {
                            if aset.count_ones() as usize <= a {
                                if !cover.iter().any(|o| o & aset == 0) {
                                    return Err(format!("n {n}, a {a}, b {b}: miss {aset:b} hit {bset:b} unseparated"));
                                }
                                pairs += 1;
                            }
                            if aset == 0 {
                                break;
                            }
                            aset = (aset - 1) & rest;
                        }
                    }
                }
            }
        }
        let bytes = hit_and_miss_family(16, 4, 2).unwrap().to_bytes();
        if std::thread::spawn(|| hit_and_miss_family(16, 4, 2).unwrap().to_bytes()).join().unwrap() != bytes {
            return Err("build on another thread differs".into());
        }
        Ok(format!("n ≤ 16, a ≤ 4, b ≤ 2: {pairs} (miss, hit) pairs separated, byte-identical rebuilds"))
    });
}

#[test]
fn c09_k_connected_components() {
    criterion(9, "k-connected components", Duration::from_secs(60), || {
        let cfg = GhConfig::fast();
        let graphs = with_named(corpus());
        for (name, g) in &graphs {
            let o = oracle_all_pairs_mincut(g).unwrap();
            let ks: Vec<i64> = (1..=8).collect();
            let parts = k_connected_partitions(g, &ks, &cfg).map_err(|e| format!("{name}: {e}"))?;
            for (&k, got) in ks.iter().zip(&parts) {
                if *got != o.tau_components(&all(g), k) {
                    return Err(format!("{name}, k {k}: partition differs from the λ matrix"));
                }
            }
        }
        Ok(format!("{} graphs, k = 1..8", graphs.len()))
    });
}

#[test]
fn c10_step_lemma() {
    criterion(10, "decomposition step lemma", Duration::from_secs(180), || {
        let cfg = GhConfig::fast();
        let graphs = with_named(corpus());
        let (mut steps, mut triples) = (0, 0);
        for (name, g) in &graphs {
            let o = oracle_all_pairs_mincut(g).unwrap();
            let u = all(g);
            let (r, _) = ghtree_step(g, &u, &cfg).map_err(|e| format!("{name}: {e}"))?;
            if let Some(note) = &r.fallback {
                return Err(format!("{name}: fallback used: {note}"));
            }
            check_lemma(g, &u, &r).map_err(|e| format!("{name}: {e}"))?;
            for t in &r.triples {
                if t.side != o.minimal_mincut(t.v, r.pivot) {
                    return Err(format!("{name}: side of {} is not the minimal ({}, {})-mincut", t.v, t.v, r.pivot));
                }
            }
            triples += r.triples.len();
            let (_, st) = ghtree_with(g, &u, &cfg).map_err(|e| format!("{name}: {e}"))?;
            if st.fallbacks > 0 {
                return Err(format!("{name}: {} fallbacks during recursion: {:?}", st.fallbacks, st.fallback_notes));
            }
            steps += st.steps;
        }
        Ok(format!(
            "{} graphs, {steps} recursive steps with the lemma checked and zero fallbacks, {triples} top-level triples minimal",
            graphs.len()
        ))
    });
}
