use std::time::Instant;

use mincut::fixtures;
use mincut::oracle::oracle_all_pairs_mincut;
use mincut::packing::{BigRational, Rational};
use mincut::sparsifier::{
    build_skeleton, crossing_count, extract_vertex_sparsifier_with, guide_trees_with, packing_is_feasible,
    tree_packing, ExtractOptions, GuideTreeOptions, K_RESPECT,
};

#[test]
fn sparsifier_bounds_on_random_graphs() {
    let t0 = Instant::now();
    let mut worst = f64::INFINITY;
    let mut fallbacks = 0;
    for (i, g) in fixtures::corpus(21, 40, 10, 24, 16).into_iter().enumerate() {
        let n = g.n();
        let u: Vec<usize> = (0..n).filter(|v| (v + i) % 4 != 1 || n < 4).collect();
        let opts = ExtractOptions { check_tours: true, ..Default::default() };
        let sp = extract_vertex_sparsifier_with(&g, &u, Rational::new(1, 10), opts).unwrap();
        let lam = oracle_all_pairs_mincut(&g).unwrap().lambda_of(&u).unwrap();
        let lp = sp.lambda();
        assert!(lp >= BigRational::new(10 * lam as i128, 41), "graph {i}");
        worst = worst.min(mincut::sparsifier::approx(&lp) / lam as f64);
        for mask in 1..(1u64 << n) - 1 {
            let side: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
            assert!(sp.cut_of_original(&side) <= BigRational::from_integer(g.cut_mask(mask) as i128));
        }
        let h = build_skeleton(&sp, Rational::from_integer(5), Rational::new(1, 5)).unwrap();
        let p = tree_packing(&h).unwrap();
        assert!(packing_is_feasible(&h, &p));
        assert!(p.total() * 2 >= Rational::from_integer(h.lambda_h));
        assert!(p.trees.len() as i64 <= h.lambda_h);
        fallbacks += p.used_fallback as usize;
    }
    println!("worst lambda'/lambda = {worst:.4}, fallbacks = {fallbacks}, {:?}", t0.elapsed());
}

#[test]
fn guide_trees_respect_on_random_graphs() {
    for eps in [Rational::new(1, 10), Rational::new(1, 4), Rational::new(1, 2)] {
        let t0 = Instant::now();
        let mut worst = 0;
        for (i, g) in fixtures::corpus(31, 40, 9, 22, 16).into_iter().enumerate() {
            let n = g.n();
            let u: Vec<usize> = (0..n).collect();
            let s = i % n;
            let gt = guide_trees_with(&g, &u, s, GuideTreeOptions { epsilon: eps, check_bracket: false }).unwrap();
            let cm = oracle_all_pairs_mincut(&g).unwrap();
            let lam = cm.lambda_of(&u).unwrap();
            for t in (0..n).filter(|&t| t != s && 10 * cm.lambda(s, t) <= 11 * lam) {
                let best = cm
                    .all_mincuts(s, t)
                    .into_iter()
                    .flat_map(|m| {
                        let side: Vec<bool> = (0..n).map(|v| m >> v & 1 == 1).collect();
                        gt.trees.iter().map(move |tr| crossing_count(tr, &side)).collect::<Vec<_>>()
                    })
                    .min()
                    .unwrap();
                assert!(best <= K_RESPECT);
                worst = worst.max(best);
            }
        }
        println!("eps {eps}: worst crossing = {worst}, {:?}", t0.elapsed());
    }
}
