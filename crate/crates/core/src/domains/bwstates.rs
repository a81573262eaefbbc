//! Counting and uniform sampling of arm-empty labeled blocks-world states.
//!
//! A state of `n` labeled blocks is a set of non-empty towers, each an
//! ordered list of blocks. The number with exactly `k` towers is the Lah
//! number `L(n, k) = C(n-1, k-1) n! / k!`, and the total is
//! `a(n) = (2n-1) a(n-1) - (n-1)(n-2) a(n-2)`.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

/// Block configuration: `below[i]` is the block under `i`, `None` on the table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockConfig {
    pub below: Vec<Option<usize>>,
}

impl BlockConfig {
    pub fn len(&self) -> usize {
        self.below.len()
    }

    pub fn is_empty(&self) -> bool {
        self.below.is_empty()
    }

    /// `above[i]` is the block directly on `i`, if any.
    pub fn above(&self) -> Vec<Option<usize>> {
        let mut above = vec![None; self.below.len()];
        for (b, u) in self.below.iter().enumerate() {
            if let Some(u) = u {
                above[*u] = Some(b);
            }
        }
        above
    }

    /// Towers bottom to top, ordered by bottom block.
    pub fn towers(&self) -> Vec<Vec<usize>> {
        let above = self.above();
        let mut out = Vec::new();
        for (b, u) in self.below.iter().enumerate() {
            if u.is_none() {
                let mut t = vec![b];
                while let Some(next) = above[*t.last().unwrap()] {
                    t.push(next);
                }
                out.push(t);
            }
        }
        out
    }

    fn from_towers(n: usize, towers: &[Vec<usize>]) -> Self {
        let mut below = vec![None; n];
        for t in towers {
            for w in t.windows(2) {
                below[w[1]] = Some(w[0]);
            }
        }
        BlockConfig { below }
    }
}

/// Number of distinct arm-empty states of `n` labeled blocks.
pub fn count_bw_states(n: usize) -> BigUint {
    let mut prev = BigUint::one(); // a(0)
    let mut cur = BigUint::one(); // a(1)
    if n == 0 {
        return prev;
    }
    for m in 2..=n {
        let next = &cur * BigUint::from(2 * m - 1) - &prev * BigUint::from((m - 1) * (m - 2));
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Unsigned Lah number: states of `n` blocks with exactly `k` towers.
pub fn lah(n: usize, k: usize) -> BigUint {
    if k == 0 {
        return if n == 0 { BigUint::one() } else { BigUint::zero() };
    }
    if k > n {
        return BigUint::zero();
    }
    binomial(n - 1, k - 1) * factorial(n) / factorial(k)
}

/// Uniform integer in `[0, bound)` by rejection over `bits(bound)` random bits.
fn uniform_below<R: Rng + ?Sized>(bound: &BigUint, rng: &mut R) -> BigUint {
    assert!(!bound.is_zero());
    let bits = bound.bits();
    let digits = bits.div_ceil(32) as usize;
    let top_bits = bits - 32 * (digits as u64 - 1);
    let top_mask: u32 = if top_bits == 32 {
        u32::MAX
    } else {
        (1u32 << top_bits) - 1
    };
    loop {
        let mut v: Vec<u32> = (0..digits).map(|_| rng.gen()).collect();
        *v.last_mut().unwrap() &= top_mask;
        let x = BigUint::from_slice(&v);
        if &x < bound {
            return x;
        }
    }
}

/// Exactly uniform arm-empty configuration of `n` blocks.
///
/// Draws the tower count `k` with probability `L(n,k)/a(n)`, then a uniform
/// permutation cut at a uniform composition of `n` into `k` parts. Every
/// configuration with `k` towers arises from exactly `k!` such pairs.
pub fn uniform_bw_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BlockConfig {
    if n == 0 {
        return BlockConfig { below: Vec::new() };
    }
    let total = count_bw_states(n);
    let mut r = uniform_below(&total, rng);
    let mut k = 1;
    loop {
        let l = lah(n, k);
        if r < l {
            break;
        }
        r -= l;
        k += 1;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut cuts: Vec<usize> = rand::seq::index::sample(rng, n - 1, k - 1)
        .into_iter()
        .map(|c| c + 1)
        .collect();
    cuts.sort_unstable();
    let mut towers = Vec::with_capacity(k);
    let mut start = 0;
    for c in cuts.into_iter().chain(std::iter::once(n)) {
        towers.push(perm[start..c].to_vec());
        start = c;
    }
    BlockConfig::from_towers(n, &towers)
}
