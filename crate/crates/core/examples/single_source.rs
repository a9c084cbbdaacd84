//! Mincut values from one source to every vertex.

use mincut::fixtures::dumbbell;
use mincut::ssmc::{ssmc_all, SsmcConfig};

fn main() {
    let g = dumbbell();
    let (est, stats) = ssmc_all(&g, 0, &SsmcConfig::fast()).expect("valid source");
    for (t, v) in &est.values {
        println!("λ(1, {}) = {}", t + 1, v.map_or("inf".into(), |x| x.to_string()));
    }
    println!("{} maxflows, {} isolating-cut rounds", stats.maxflows, stats.isolating);
}
