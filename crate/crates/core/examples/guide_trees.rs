//! Guide trees for a source and how often they cross each mincut.

use mincut::fixtures::random_connected;
use mincut::flow::st_mincut;
use mincut::sparsifier::{crossing_count, guide_trees};

fn main() {
    let g = random_connected(11, 9, 20, 6);
    let u: Vec<usize> = (0..g.n()).collect();
    let set = guide_trees(&g, &u, 0).expect("connected input");
    println!("{} trees, λ_H = {}, W_skel = {}", set.trees.len(), set.lambda_h, set.w_skel);
    for t in 1..g.n() {
        let cut = st_mincut(&g, t, 0);
        let side: Vec<bool> = (0..g.n()).map(|v| cut.s_side.contains(v)).collect();
        let best = set.trees.iter().map(|tr| crossing_count(tr, &side)).min().unwrap();
        println!("t = {}: λ = {}, fewest tree edges crossing the minimal cut = {best}", t + 1, cut.value);
    }
}
