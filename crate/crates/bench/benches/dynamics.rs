use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use moyal_core::dynamics::{evolve_moyal, schrodinger_oracle};
use moyal_core::transforms::wigner_from_wavefunction;
use moyal_core::{make_gaussian, EvolutionConfig, GridSpec1D, Method, PhaseGridSpec, PotentialSpec};

fn moyal_steps(c: &mut Criterion) {
    let g = GridSpec1D::new(128, -8.0, 8.0).unwrap();
    let psi = make_gaussian(&g, 2.0, 0.0, 2.0).unwrap();
    let w = wigner_from_wavefunction(&psi, &PhaseGridSpec::for_position(g)).unwrap();
    let v = PotentialSpec::Quartic { lambda: 0.1 };
    let cfg = EvolutionConfig::new(1e-3, 10, Method::Moyal);
    c.bench_function("evolve_moyal/128x10", |b| b.iter(|| evolve_moyal(black_box(&w), &v, &cfg).unwrap()));
    let oracle = EvolutionConfig::new(1e-3, 10, Method::SchrodingerOracle);
    c.bench_function("schrodinger_oracle/128x10", |b| {
        b.iter(|| schrodinger_oracle(black_box(&psi), &v, &oracle).unwrap())
    });
}

criterion_group!(benches, moyal_steps);
criterion_main!(benches);
