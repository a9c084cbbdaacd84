//! k-edge-connected components for a range of thresholds.

use mincut::fixtures::random_connected;
use mincut::ghtree::{k_connected_partitions, GhConfig};

fn main() {
    let g = random_connected(3, 12, 22, 4);
    let ks = [1, 2, 3, 4, 6];
    let parts = k_connected_partitions(&g, &ks, &GhConfig::fast()).expect("connected input");
    for (k, p) in ks.iter().zip(parts) {
        let shown: Vec<Vec<usize>> = p.iter().map(|c| c.iter().map(|v| v + 1).collect()).collect();
        println!("k = {k}: {shown:?}");
    }
}
