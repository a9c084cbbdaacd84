//! Minimum s-t cut and simultaneous isolating cuts.

use mincut::fixtures::random_connected;
use mincut::flow::{isolating_cuts, st_mincut};

fn main() {
    let g = random_connected(4, 10, 20, 6);
    let c = st_mincut(&g, 0, 9);
    println!("λ(1, 10) = {}, minimal side {:?}", c.value, c.s_side.members());
    let groups = vec![vec![0], vec![4], vec![9]];
    for (grp, cut) in groups.iter().zip(isolating_cuts(&g, &groups).unwrap()) {
        println!("isolating {grp:?}: value {}, side {:?}", cut.value, cut.s_side.members());
    }
}
