//! Builds a Gomory-Hu tree for a random graph and checks every pair by maxflow.

use mincut::fixtures::random_connected;
use mincut::ghtree::{ghtree_with, GhConfig};

fn main() {
    let g = random_connected(7, 12, 26, 9);
    let all: Vec<usize> = (0..g.n()).collect();
    let (tree, stats) = ghtree_with(&g, &all, &GhConfig::fast()).expect("connected input");
    for &(a, b, w) in &tree.edges {
        println!("{} -- {}  weight {w}", a + 1, b + 1);
    }
    tree.check_by_flow(&g).expect("tree is exact");
    println!("λ(1, 12) = {}", tree.lambda(0, 11).unwrap());
    println!("{} steps, {} fallbacks, depth {}", stats.steps, stats.fallbacks, stats.max_depth);
}
