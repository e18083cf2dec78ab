use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use moyal_core::weyl::build_vonneumann_a;
use moyal_core::{build_fock_rep, QuadratureBox};

fn quadrature(c: &mut Criterion) {
    let rep = build_fock_rep(24).unwrap();
    let bx = QuadratureBox::new(6.0, 6.0, 49, 49).unwrap();
    let mut group = c.benchmark_group("build_vonneumann_a");
    group.sample_size(10);
    group.bench_function("dim24_box6", |b| b.iter(|| build_vonneumann_a(black_box(&rep), &bx).unwrap()));
    group.finish();
}

fn fock_rep(c: &mut Criterion) {
    c.bench_function("build_fock_rep/48", |b| b.iter(|| build_fock_rep(black_box(48)).unwrap()));
}

criterion_group!(benches, quadrature, fock_rep);
criterion_main!(benches);
