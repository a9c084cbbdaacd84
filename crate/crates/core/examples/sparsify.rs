//! Vertex sparsifier on a terminal subset and its unweighted skeleton.

use mincut::fixtures::random_connected;
use mincut::packing::Rational;
use mincut::sparsifier::{approx, build_skeleton, extract_vertex_sparsifier, tree_packing};

fn main() {
    let g = random_connected(5, 10, 24, 8);
    let u = vec![0, 2, 4, 6, 8];
    let sp = extract_vertex_sparsifier(&g, &u, Rational::new(1, 10)).expect("connected input");
    for (a, b, w) in sp.edge_list() {
        println!("{} -- {}  {:.3}", a + 1, b + 1, approx(&w));
    }
    println!("λ(G′) = {:.3}", approx(&sp.lambda()));
    let h = build_skeleton(&sp, Rational::from_integer(5), Rational::new(1, 5)).expect("connected sparsifier");
    let p = tree_packing(&h).expect("connected skeleton");
    println!(
        "skeleton: {} edges, λ_H = {}, {} packed trees of total value {}",
        h.edges.len(),
        h.lambda_h,
        p.trees.len(),
        p.total()
    );
}
