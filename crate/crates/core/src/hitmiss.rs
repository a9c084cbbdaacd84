//! Deterministic hit-and-miss families and pair-separating set families.

use serde::Serialize;
use thiserror::Error;

/// Exponent constant `C` in the size bound `max(2, a·⌈log₂N⌉)^(C·b)`.
pub const SIZE_EXPONENT: u32 = 6;

pub const MAX_HIT: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HitMissError {
    #[error("hit-set size {0} exceeds the supported maximum of 4")]
    HitTooLarge(usize),
    #[error("ground set must be nonempty")]
    EmptyGround,
}

/// The map `x ↦ [x mod p ∈ residues]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HashFn {
    pub p: usize,
    pub residues: Vec<usize>,
}

impl HashFn {
    pub fn eval(&self, x: usize) -> bool {
        self.residues.binary_search(&(x % self.p)).is_ok()
    }

    /// Elements of `set` mapped to 1.
    pub fn hits(&self, set: &[usize]) -> Vec<usize> {
        set.iter().copied().filter(|&x| self.eval(x)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HitMissFamily {
    pub ground_size: usize,
    pub a: usize,
    pub b: usize,
    pub primes: Vec<usize>,
    pub functions: Vec<HashFn>,
    pub size_exponent: u32,
}

impl HitMissFamily {
    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// The recorded size ceiling `max(2, a·⌈log₂N⌉)^(C·b)`.
    pub fn size_bound(&self) -> f64 {
        let base = ((self.a.max(1) * ceil_log2(self.ground_size).max(1)) as f64).max(2.0);
        base.powi((self.size_exponent as usize * self.b) as i32)
    }

    /// Canonical byte encoding for determinism checks.
    pub fn to_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("serializable")
    }
}

pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn subsets_up_to(p: usize, b: usize, cur: &mut Vec<usize>, start: usize, out: &mut Vec<HashFn>) {
    out.push(HashFn { p, residues: cur.clone() });
    if cur.len() == b {
        return;
    }
    for r in start..p {
        cur.push(r);
        subsets_up_to(p, b, cur, r + 1, out);
        cur.pop();
    }
}

/// Family over `[n]` such that any disjoint `A`, `B` with |A| ≤ a, |B| ≤ b
/// have a member that is 0 on `A` and 1 on `B`. A miss bound beyond the
/// ground size is clamped to it.
pub fn hit_and_miss_family(n: usize, a: usize, b: usize) -> Result<HitMissFamily, HitMissError> {
    if b > MAX_HIT {
        return Err(HitMissError::HitTooLarge(b));
    }
    if n == 0 {
        return Err(HitMissError::EmptyGround);
    }
    let a = a.min(n);
    let b = b.min(n);
    let k = (a + b) * (a + b) * ceil_log2(n).max(1);
    let mut primes = Vec::new();
    let mut p = 1;
    while primes.len() < k.max(1) {
        p += 1;
        if !is_prime(p) {
            continue;
        }
        primes.push(p);
        // A prime at least n is injective on all of [n].
        if p >= n {
            break;
        }
    }
    if b == 0 {
        primes.truncate(1);
    }
    let mut functions = Vec::new();
    for &p in &primes {
        subsets_up_to(p, b, &mut Vec::new(), 0, &mut functions);
    }
    Ok(HitMissFamily { ground_size: n, a, b, primes, functions, size_exponent: SIZE_EXPONENT })
}

/// At most 2⌈log₂n⌉ subsets of `[n]` such that every ordered pair `(x, y)`,
/// x ≠ y, has a set containing x but not y: bit-one selectors, then bit-zero.
pub fn pair_separation_family(n: usize) -> Vec<Vec<usize>> {
    let bits = ceil_log2(n).max(1);
    let mut out = Vec::with_capacity(2 * bits);
    for want in [1, 0] {
        for j in 0..bits {
            out.push((0..n).filter(|x| x >> j & 1 == want).collect());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_separation_examples() {
        assert_eq!(pair_separation_family(4), vec![vec![1, 3], vec![2, 3], vec![0, 2], vec![0, 1]]);
        assert_eq!(pair_separation_family(2), vec![vec![1], vec![0]]);
        let f = pair_separation_family(16);
        assert_eq!(f.len(), 8);
        for x in 0..16 {
            for y in 0..16 {
                if x != y {
                    assert!(f.iter().any(|s| s.contains(&x) && !s.contains(&y)));
                }
            }
        }
    }

    #[test]
    fn hit_too_large() {
        assert_eq!(hit_and_miss_family(10, 5, 5), Err(HitMissError::HitTooLarge(5)));
    }

    #[test]
    fn small_family_separates_both_ways() {
        let f = hit_and_miss_family(4, 1, 1).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                if x != y {
                    assert!(f.functions.iter().any(|h| !h.eval(x) && h.eval(y)));
                }
            }
        }
    }
}
