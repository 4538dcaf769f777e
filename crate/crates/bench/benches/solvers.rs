use criterion::{black_box, criterion_group, criterion_main, Criterion};

use ptwell::oracle::p_matching_det_alpha;
use ptwell::pwell::{find_spectrum, secular_value_alpha};
use ptwell::xwell::{solve_level, spectrum};
use ptwell::{MpReal, PrecisionPolicy, Real};

fn xwell(c: &mut Criterion) {
    let p = PrecisionPolicy::default();
    c.bench_function("xwell/solve_level N=5 T=1", |b| {
        b.iter(|| solve_level(5, black_box(&1.0), &p).unwrap())
    });
    c.bench_function("xwell/spectrum 20 levels T=0.3", |b| {
        b.iter(|| spectrum(black_box(&0.3), 19, &p).unwrap())
    });
    let t = MpReal::with_digits(1.0, 40);
    c.bench_function("xwell/solve_level N=5 T=1 40 digits", |b| {
        b.iter(|| solve_level(5, &t, &p).unwrap())
    });
}

fn pwell(c: &mut Criterion) {
    let p = PrecisionPolicy::default();
    c.bench_function("pwell/secular f64", |b| {
        b.iter(|| secular_value_alpha(black_box(&1.1), &200.0).unwrap())
    });
    let z = MpReal::with_digits(200.0, 40);
    let a = z.lit(1.1);
    c.bench_function("pwell/secular 40 digits", |b| {
        b.iter(|| secular_value_alpha(&a, &z).unwrap())
    });
    c.bench_function("pwell/matching determinant f64", |b| {
        b.iter(|| p_matching_det_alpha(black_box(&1.1), &200.0).unwrap())
    });
    let mut slow = c.benchmark_group("pwell/find_spectrum");
    slow.sample_size(10);
    slow.bench_function("Z=35", |b| b.iter(|| find_spectrum(black_box(35.0), &p).unwrap()));
    slow.bench_function("Z=1200 escalated", |b| {
        b.iter(|| find_spectrum(black_box(1200.0), &p).unwrap())
    });
    slow.finish();
}

criterion_group!(benches, xwell, pwell);
criterion_main!(benches);
