// Copyright 2026 The qwalk Authors
// SPDX-License-Identifier: Apache-2.0

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

use qwalk_core::lindblad::{
    generalized_k, lindblad_propagate, random_diagonal_state, random_generator, walk_embedding, ObservableBasis,
};
use qwalk_core::{DensityMatrix, InitialCoin, WalkConfig};

fn propagate(c: &mut Criterion) {
    let mut group = c.benchmark_group("lindblad_propagate");
    for d in [4usize, 8, 16] {
        let mut rng = ChaCha8Rng::seed_from_u64(d as u64);
        let gen = random_generator(d, 2, &mut rng);
        let rho0 = DensityMatrix::new(random_diagonal_state(d, &mut rng).to_matrix()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(d), &d, |b, _| {
            b.iter(|| lindblad_propagate(&gen, black_box(&rho0), 1.0).unwrap())
        });
    }
    group.finish();
}

fn embedded_walk(c: &mut Criterion) {
    let cfg = WalkConfig::new(23.0, 6, 3, 0, InitialCoin::V).unwrap();
    let (gen, basis, rho0) = walk_embedding(&cfg).unwrap();
    c.bench_function("generalized_k_walk_n6", |b| {
        b.iter(|| generalized_k(&gen, &basis, black_box(&rho0), 3.0, 6.0).unwrap())
    });
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let gen = random_generator(6, 2, &mut rng);
    let rho0 = random_diagonal_state(6, &mut rng);
    let basis6 = ObservableBasis::numbered(6);
    c.bench_function("generalized_k_random_d6", |b| {
        b.iter(|| generalized_k(&gen, &basis6, black_box(&rho0), 0.5, 1.5).unwrap())
    });
}

criterion_group!(benches, propagate, embedded_walk);
criterion_main!(benches);
