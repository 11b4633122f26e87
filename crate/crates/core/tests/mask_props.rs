mod common;

use num_complex::Complex64;
use padic_cascade::gaussian::GaussianRational as G;
use padic_cascade::mask::{parse_mask, sum_rule_at, sum_rules, symbol};
use padic_cascade::padic::{IpElement, PadicRational};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, rng_seed: RngSeed::Fixed(202), ..ProptestConfig::default() })]

    #[test]
    fn symbol_at_zero_is_one(seed in any::<u64>()) {
        let m = common::seeded_mask(seed, &[2, 3], 2);
        let p = m.prime();
        let h0 = symbol(&m, &PadicRational::zero(p)).unwrap();
        prop_assert!((h0 - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn sum_rules_partition_the_support(seed in any::<u64>()) {
        let m = common::seeded_mask(seed, &[2, 3, 5], 2);
        let p = m.prime();
        let total: G = sum_rules(&m).into_values().sum();
        prop_assert_eq!(total, G::from_int(p as i64));
    }

    #[test]
    fn sum_rules_shift_invariant_for_order_zero(seed in any::<u64>(), k in 0i64..27, s in 0u32..=3) {
        let mut r = common::rng(seed);
        let p = if r.random_bool(0.5) { 2 } else { 3 };
        let m = common::random_complex_mask(&mut r, p, 0);
        let d = IpElement::new(k, s, p).unwrap();
        for (e, v) in sum_rules(&m) {
            prop_assert_eq!(sum_rule_at(&m, &e.add(&d.dilate_down())), v);
        }
    }

    #[test]
    fn json_roundtrip(seed in any::<u64>()) {
        let m = common::seeded_mask(seed, &[2, 3], 1);
        prop_assert_eq!(parse_mask(&m.to_json()).unwrap(), m);
    }
}

#[test]
fn sum_rules_shift_invariant_on_reference_masks() {
    for (name, m) in common::regression_corpus() {
        let p = m.prime();
        for (e, v) in sum_rules(&m) {
            for k in 0..p.pow(2) as i64 {
                let d = IpElement::new(k, 2, p).unwrap();
                assert_eq!(sum_rule_at(&m, &e.add(&d.dilate_down())), v, "{name}");
            }
        }
    }
}

/// Under mod-1 arithmetic the sum at α runs over the window `(α − 1/p, α]`,
/// so shifting ε by `Aδ` moves the window for masks of order 1.
#[test]
fn sum_rules_not_shift_invariant_for_order_one() {
    let m = padic_cascade::Mask::from_grid(2, 1, [2, 1, 0, -1].into_iter().map(G::from_int).collect()).unwrap();
    let zero = IpElement::zero(2);
    let shift = IpElement::new(1, 1, 2).unwrap().dilate_down();
    assert_eq!(sum_rule_at(&m, &zero), G::from_int(1));
    assert_eq!(sum_rule_at(&m, &zero.add(&shift)), G::from_int(3));
}
