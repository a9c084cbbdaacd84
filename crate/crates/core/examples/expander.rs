//! Expander decomposition of a dumbbell with a certified witness flow.

use mincut::expander::{check_witness, expander_decompose, verify_expander, DemandVector};
use mincut::fixtures::dumbbell;
use mincut::packing::Rational;

fn main() {
    let g = dumbbell();
    let d = DemandVector::uniform(g.n(), 1);
    let phi = Rational::new(1, 1);
    let dec = expander_decompose(&g, phi, &d);
    println!("clusters: {:?}", dec.clusters);
    check_witness(&g, &dec, &d).expect("witness routes");
    for c in &dec.clusters {
        let sub = g.induced(c);
        let dc = DemandVector(c.iter().map(|&v| d.0[v]).collect());
        println!("{c:?} is a φ-expander: {}", verify_expander(&sub, phi, &dc).unwrap());
    }
    println!("γ = {}, depth {}, {} trims", dec.gamma, dec.depth, dec.trims.len());
}
