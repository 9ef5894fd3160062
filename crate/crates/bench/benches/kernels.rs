use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use pbrcheck::appendix::{near_singular_family, residual, search_local, SearchConfig};
use pbrcheck::detector::{couple_simple, xi_superposition};
use pbrcheck::ontic::{feasibility, OnticModel};
use pbrcheck::{born_probabilities, prepared_state, xi_basis, Amplitude, Preparation};

fn kernels(c: &mut Criterion) {
    let basis = xi_basis();
    let psi = prepared_state(Preparation::ALL[1]);
    c.bench_function("born_probabilities", |b| b.iter(|| born_probabilities(black_box(&psi), &basis).unwrap()));

    let h = Amplitude::new(0.5, 0.0);
    let sup = xi_superposition(&[h, h, h, h]).unwrap();
    c.bench_function("couple_simple", |b| b.iter(|| couple_simple(black_box(&sup)).unwrap()));

    let p = near_singular_family(0.1);
    c.bench_function("residual", |b| b.iter(|| residual(black_box(&p)).unwrap()));

    let cfg = SearchConfig::new(7, 4, 0.1);
    c.bench_function("search_local_4_restarts", |b| b.iter(|| search_local(black_box(&cfg)).unwrap()));

    let w = vec![0.125; 8];
    let m = OnticModel::from_weights(&w, &w).unwrap();
    c.bench_function("feasibility_n8", |b| b.iter(|| feasibility(black_box(&m)).unwrap()));
}

criterion_group!(benches, kernels);
criterion_main!(benches);
