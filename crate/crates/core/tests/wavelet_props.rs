mod common;

use num_complex::Complex64;
use padic_cascade::gaussian::GaussianRational as G;
use padic_cascade::mask::{orthonormality_precheck, parse_mask, Mask, DEFAULT_SYMBOL_TOL};
use padic_cascade::wavelet::{build_u, complete_masks, verify_unitary, WaveletMasks};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rand::Rng;

/// Orthonormal p=2 masks: the spectrum on even frequencies is `2 u_j` with
/// unimodular `u_j ∈ {±1, ±i}`, `u_0 = 1`, and zero elsewhere.
fn orthonormal_mask(seed: u64) -> Mask {
    let mut r = common::rng(seed);
    let n = r.random_range(1..=2u32);
    let m = 1usize << n;
    let units = [G::from_int(1), G::i(), G::from_int(-1), -G::i()];
    let u: Vec<G> = (0..m)
        .map(|j| if j == 0 { G::from_int(1) } else { units[r.random_range(0..4)].clone() })
        .collect();
    // c_k = 2^{-N} Σ_j u_j e^{-2πi jk / 2^N}, and e^{-2πi/4} = −i.
    let root = |e: usize| -> G {
        match (m, e % m) {
            (2, 0) | (4, 0) => G::from_int(1),
            (2, 1) | (4, 2) => G::from_int(-1),
            (4, 1) => -G::i(),
            (4, 3) => G::i(),
            _ => unreachable!(),
        }
    };
    let vals: Vec<G> = (0..2 * m)
        .map(|k| {
            let s: G = (0..m).map(|j| &u[j] * &root(j * k)).sum();
            s.scale(&num_rational::BigRational::new(1.into(), (m as i64).into()))
        })
        .collect();
    Mask::from_grid(2, n, vals).unwrap()
}

fn corpus() -> Vec<Mask> {
    let mut v: Vec<Mask> = common::regression_corpus().into_iter().map(|(_, m)| m).collect();
    v.push(Mask::haar(5).unwrap());
    v.extend((0..20).map(orthonormal_mask));
    v
}

fn gram_deviation(w: &WaveletMasks) -> f64 {
    let p = w.base.prime() as usize;
    let l = w.base.grid_len();
    let m = l / p;
    let mut filters = vec![w.base_vector()];
    filters.extend(w.filters.iter().cloned());
    let mut dev = 0.0f64;
    for (j, gj) in filters.iter().enumerate() {
        for (k, gk) in filters.iter().enumerate() {
            for a in 0..m {
                for b in 0..m {
                    let ip: Complex64 = (0..l)
                        .map(|i| gj[(i + l - a) % l].conj() * gk[(i + l - b) % l])
                        .sum::<Complex64>()
                        / p as f64;
                    let want = if j == k && a == b { 1.0 } else { 0.0 };
                    dev = dev.max((ip - want).norm());
                }
            }
        }
    }
    dev
}

#[test]
fn completions_are_unitary() {
    let mut done = 0;
    for m in corpus() {
        if !orthonormality_precheck(&m, DEFAULT_SYMBOL_TOL).pass {
            assert!(complete_masks(&m).is_err());
            continue;
        }
        let w = complete_masks(&m).unwrap();
        assert!(verify_unitary(&w.u_matrix().unwrap(), 1e-9).pass);
        assert!(gram_deviation(&w) < 1e-9);
        done += 1;
    }
    assert!(done >= 20);
}

#[test]
fn serialized_filters_parse_as_masks() {
    let w = complete_masks(&common::haar3()).unwrap();
    for j in 1..=2 {
        let m = parse_mask(&w.to_json(j).unwrap()).unwrap();
        assert_eq!(m.prime(), 3);
        let back: Vec<Complex64> = m.dense().iter().map(G::to_complex).collect();
        for (a, b) in back.iter().zip(w.filter(j).unwrap()) {
            assert!((a - b).norm() < 1e-15);
        }
    }
    assert!(w.to_json(0).is_err() && w.to_json(3).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, rng_seed: RngSeed::Fixed(909), ..ProptestConfig::default() })]

    #[test]
    fn completion_is_phase_covariant(seed in 0u64..40, theta in 0.0f64..std::f64::consts::TAU, j in 0usize..4) {
        let masks = corpus();
        let m = &masks[seed as usize % masks.len()];
        prop_assume!(orthonormality_precheck(m, DEFAULT_SYMBOL_TOL).pass);
        let w = complete_masks(m).unwrap();
        let j = j % w.filters.len();
        let mut filters = w.filters.clone();
        let ph = Complex64::from_polar(1.0, theta);
        for z in filters[j].iter_mut() {
            *z *= ph;
        }
        let u = build_u(m.prime(), m.order(), &w.base_vector(), &filters).unwrap();
        prop_assert!(verify_unitary(&u, 1e-9).pass);
    }
}
