mod common;

#[test]
fn fuzz_small_forests() {
    let mut worst: f64 = 0.0;
    for seed in 0..200 {
        let n = 2 + (seed as usize % 30);
        let r = common::fuzz_forest(seed, n, 300).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        let ratio = r.emitted as f64 / (r.operations as f64 * (r.n as f64).log2().max(1.0));
        worst = worst.max(ratio);
    }
    println!("worst emitted/(k log n) = {worst:.3}");
}
