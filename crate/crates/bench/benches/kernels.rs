use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use padic_cascade::convergence::restricted_family;
use padic_cascade::mask::{parse_mask, Mask};
use padic_cascade::smoothness::modulus_of_continuity;
use padic_cascade::spectral::{bracket, MatrixFamily, MatrixNorm, DEFAULT_BUDGET};
use padic_cascade::subdivision::{cascade_iterate, iterate};
use padic_cascade::Exponent;

fn mask(text: &str) -> Mask {
    parse_mask(text).expect("bench mask")
}

// p = 3, N = 1, satisfies the sum rules with a non-nilpotent restricted family
const SMOOTH3: &str = r#"{"p": 3, "N": 1, "coefficients": [
  {"k": 0, "re": "1/2"}, {"k": 1, "re": "1/3"}, {"k": 2, "re": "1/6"},
  {"k": 3, "re": "1/2"}, {"k": 4, "re": "1/3"}, {"k": 5, "re": "5/12"},
  {"k": 6, "re": "1/4"}, {"k": 7, "re": "1/4"}, {"k": 8, "re": "1/4"}]}"#;

const QUARTER: &str = include_str!("../../../masks/ex42.json");
const HAAR3: &str = include_str!("../../../masks/haar3.json");

fn bench_iterate(c: &mut Criterion) {
    let mut g = c.benchmark_group("iterate");
    for (name, text, n) in [("quarter", QUARTER, 10), ("smooth3", SMOOTH3, 6)] {
        let m = mask(text);
        g.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| b.iter(|| iterate(black_box(&m), n)));
    }
    g.finish();
}

fn bench_cascade(c: &mut Criterion) {
    let mut g = c.benchmark_group("cascade");
    for (name, text, n) in [("haar3", HAAR3, 6), ("smooth3", SMOOTH3, 5)] {
        let m = mask(text);
        g.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| b.iter(|| cascade_iterate(black_box(&m), n)));
    }
    g.finish();
}

fn bench_jsr(c: &mut Criterion) {
    let fam: MatrixFamily = restricted_family(&mask(SMOOTH3)).expect("family").family;
    let q = "2".parse::<Exponent>().expect("q");
    let mut g = c.benchmark_group("jsr");
    g.sample_size(10);
    for depth in [4, 6] {
        g.bench_with_input(BenchmarkId::new("smooth3", depth), &depth, |b, &d| {
            b.iter(|| bracket(black_box(&fam), &q, d, MatrixNorm::MaxRowSum, DEFAULT_BUDGET))
        });
    }
    g.finish();
}

fn bench_modulus(c: &mut Criterion) {
    let f = cascade_iterate(&mask(SMOOTH3), 5);
    let q = "2".parse::<Exponent>().expect("q");
    c.bench_function("modulus/smooth3/level3", |b| b.iter(|| modulus_of_continuity(black_box(&f), 3, &q)));
}

criterion_group!(kernels, bench_iterate, bench_cascade, bench_jsr, bench_modulus);
criterion_main!(kernels);
