//! A hit-and-miss family and a separating member for one query.

use mincut::hitmiss::hit_and_miss_family;

fn main() {
    let fam = hit_and_miss_family(16, 3, 2).unwrap();
    println!("{} functions over {} primes, bound {:.0}", fam.len(), fam.primes.len(), fam.size_bound());
    let (miss, hit) = ([1, 7, 12], [4, 9]);
    let f = fam
        .functions
        .iter()
        .find(|f| miss.iter().all(|&x| !f.eval(x)) && hit.iter().all(|&x| f.eval(x)))
        .expect("family separates");
    println!("x mod {} in {:?} hits {hit:?} and misses {miss:?}", f.p, f.residues);
}
