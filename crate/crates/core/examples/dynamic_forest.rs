//! Maintains the Steiner subtree of a forest under links and cuts.

use mincut::linkcut::{DynamicForest, ForestEdge, ForestUpdate};

fn edge(id: usize, w: i64) -> ForestEdge {
    ForestEdge { id, w, len: 1.0, tau: 1 << 40 }
}

fn main() {
    let mut f = DynamicForest::new(6, &[0, 3, 5]);
    let path = [(0, 1, 4), (1, 2, 2), (2, 3, 7), (2, 4, 1), (4, 5, 3)];
    let batch: Vec<ForestUpdate> =
        path.iter().enumerate().map(|(i, &(u, v, w))| ForestUpdate::Link { u, v, edge: edge(i, w) }).collect();
    f.apply_batch(&batch).unwrap();
    println!("terminal subtree: {:?}", f.terminal_component());
    println!("(length, lightest weight) = {:?}", f.steiner_tree_stats().unwrap());
    f.apply_batch(&[ForestUpdate::Cut { u: 2, v: 4 }, ForestUpdate::Link { u: 3, v: 5, edge: edge(9, 5) }]).unwrap();
    println!("after rewiring: {:?}", f.terminal_component());
    println!("{} operations, {} splices, {} emitted updates", f.operations, f.splices, f.emitted_updates.len());
}
