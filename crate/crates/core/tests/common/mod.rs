#![allow(dead_code)]

use padic_cascade::{GaussianRational as G, Mask};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Integer coefficients in `[-3, 3]` on the full grid, with `h(0)` adjusted so `Σ h = p`.
pub fn random_real_mask(r: &mut impl Rng, p: u64, n: u32) -> Mask {
    let len = p.pow(n + 1);
    let mut vals: Vec<i64> = (0..len).map(|_| r.random_range(-3..=3)).collect();
    let rest: i64 = vals[1..].iter().sum();
    vals[0] = p as i64 - rest;
    Mask::from_grid(p, n, vals.into_iter().map(G::from_int).collect()).unwrap()
}

/// Gaussian-integer coefficients with halves, normalized the same way.
pub fn random_complex_mask(r: &mut impl Rng, p: u64, n: u32) -> Mask {
    let len = p.pow(n + 1) as usize;
    let mut vals: Vec<G> = (0..len)
        .map(|_| G::from_parts((r.random_range(-4..=4), 2), (r.random_range(-2..=2), 2)))
        .collect();
    let rest: G = vals[1..].iter().cloned().sum();
    vals[0] = G::from_int(p as i64) - rest;
    Mask::from_grid(p, n, vals).unwrap()
}

/// `count` masks with `p ∈ {2, 3}` and `N ∈ {0, 1}`.
pub fn real_corpus(seed: u64, count: usize) -> Vec<Mask> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let p = if r.random_bool(0.5) { 2 } else { 3 };
            let n = r.random_range(0..=1);
            random_real_mask(&mut r, p, n)
        })
        .collect()
}

pub fn complex_corpus(seed: u64, count: usize) -> Vec<Mask> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let p = if r.random_bool(0.5) { 2 } else { 3 };
            let n = r.random_range(0..=1);
            random_complex_mask(&mut r, p, n)
        })
        .collect()
}

pub fn haar3() -> Mask {
    Mask::haar(3).unwrap()
}

pub fn quarter_mask() -> Mask {
    let a = G::from_parts((1, 2), (1, 2));
    let b = G::from_parts((1, 2), (-1, 2));
    Mask::new(2, 1, [(0, a.clone()), (1, b.clone()), (2, a), (3, b)]).unwrap()
}

pub fn doubled_delta() -> Mask {
    Mask::new(2, 0, [(0, G::from_int(2))]).unwrap()
}

pub fn haar2() -> Mask {
    Mask::haar(2).unwrap()
}

/// Fixed masks with known behavior.
pub fn regression_corpus() -> Vec<(&'static str, Mask)> {
    vec![
        ("quarter_mask", quarter_mask()),
        ("doubled_delta", doubled_delta()),
        ("haar2", haar2()),
        ("haar3", Mask::haar(3).unwrap()),
    ]
}

/// A complex mask drawn from `seed` with `p` from `primes` and `N ≤ max_order`.
pub fn seeded_mask(seed: u64, primes: &[u64], max_order: u32) -> Mask {
    let mut r = rng(seed);
    let p = primes[r.random_range(0..primes.len())];
    let n = r.random_range(0..=max_order);
    random_complex_mask(&mut r, p, n)
}

/// A complex mask whose sum rules `Σ_β h(ε − Aβ) = 1` hold on every coset.
pub fn seeded_sum_rule_mask(seed: u64, primes: &[u64], max_order: u32) -> Mask {
    let m = seeded_mask(seed, primes, max_order);
    let (p, n) = (m.prime(), m.order());
    let mut vals = m.dense();
    for (e, s) in padic_cascade::mask::sum_rules(&m) {
        let i = e.grid_index_u64(n + 1).unwrap() as usize;
        vals[i] = vals[i].clone() + G::from_int(1) - s;
    }
    Mask::from_grid(p, n, vals).unwrap()
}
