//! Fractional Steiner subgraph packing with an exact replay audit.

use mincut::fixtures::random_connected;
use mincut::packing::{audit_packing, pack_steiner_subgraphs, Rational};
use mincut::sparsifier::approx;

fn main() {
    let g = random_connected(2, 10, 22, 5);
    let u = vec![0, 3, 5, 9];
    let run = pack_steiner_subgraphs(&g, &u, Rational::new(1, 20)).expect("connected input");
    let rep = audit_packing(&g, &run.terminals, &run.packing, &run.diff_log).expect("consistent log");
    println!("{} iterations (bound {}), {} subgraphs", run.iterations, run.iteration_bound, rep.trees);
    println!(
        "feasible: {}, value {:.4}, max congestion {:.4}",
        rep.feasible,
        approx(&rep.value),
        approx(&rep.max_congestion)
    );
}
