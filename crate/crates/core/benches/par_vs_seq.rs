//! Rayon vs sequential on the three hot loops: quadrature-node sweeps of
//! the grand-partition integrand, thermal accumulation over a large
//! occupation basis, and the 3D tensor quadrature of the spin-trace check.
//! Both paths share the same index-ordered pairwise reduction, so the
//! outputs are bit-identical; only wall time differs.
//!
//! Run with `cargo bench -p hubatom-core` (the `parallel` feature is
//! required and on by default).

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;

use hubatom_core::exec::{map_collect_par, map_collect_seq, pairwise_sum, pairwise_sum_complex};
use hubatom_core::model::{Level, ModelSpec, NMax, Statistics, TruncationPolicy};
use hubatom_core::{oracle, quad, thermo};

fn levels(energies: &[f64]) -> Vec<Level> {
    energies
        .iter()
        .enumerate()
        .map(|(i, &energy)| Level {
            label: (i + 1).to_string(),
            energy,
        })
        .collect()
}

fn hs_integrand_sweep(c: &mut Criterion) {
    let model = ModelSpec {
        statistics: Statistics::Fermion,
        levels: levels(&[-0.3, 0.2, 0.7, 1.1]),
        u: 0.8,
        beta: 1.5,
        mu: 0.4,
    };
    let rule = quad::gauss_hermite(4096).unwrap();
    let scale = (2.0 * model.u / model.beta).sqrt();
    let eval = |i: usize| -> Complex64 {
        let phi = scale * rule.nodes[i];
        let mu_eff = Complex64::new(model.mu + model.u / 2.0, -phi);
        thermo::grand_partition_noninteracting(&model, mu_eff).unwrap() * rule.weights[i]
    };

    let mut group = c.benchmark_group("hs_integrand_4096_nodes");
    group.bench_with_input(BenchmarkId::new("seq", 4096), &4096usize, |b, &n| {
        b.iter(|| pairwise_sum_complex(&map_collect_seq(n, eval)))
    });
    group.bench_with_input(BenchmarkId::new("par", 4096), &4096usize, |b, &n| {
        b.iter(|| pairwise_sum_complex(&map_collect_par(n, eval)))
    });
    group.finish();
}

fn oracle_basis_sweep(c: &mut Criterion) {
    let model = ModelSpec {
        statistics: Statistics::Boson,
        levels: levels(&[0.4, 0.8, 1.1, 1.5, 1.9, 2.3]),
        u: 0.7,
        beta: 1.1,
        mu: -0.2,
    };
    let trunc = TruncationPolicy {
        n_max_per_level: 6,
        n_max: NMax::Auto,
        tail_tol: 1e-16,
    };
    let basis = oracle::enumerate_basis(&model, &trunc).unwrap();
    let n = basis.len(); // 7^6 = 117649 states
    let eval = |i: usize| -> f64 {
        let state = &basis[i];
        (-model.beta * (state.energy_free + state.energy_int - model.mu * state.total_n as f64))
            .exp()
    };

    let mut group = c.benchmark_group("oracle_thermal_sum");
    group.bench_with_input(BenchmarkId::new("seq", n), &n, |b, &n| {
        b.iter(|| pairwise_sum(&map_collect_seq(n, eval)))
    });
    group.bench_with_input(BenchmarkId::new("par", n), &n, |b, &n| {
        b.iter(|| pairwise_sum(&map_collect_par(n, eval)))
    });
    group.finish();
}

fn spin_tensor_sweep(c: &mut Criterion) {
    let rule = quad::gauss_hermite(32).unwrap();
    let n = rule.len();
    let total = n * n * n;
    let freq = 1.0_f64; // betaJ = 1
    let nodes = rule.nodes.clone();
    let weights = rule.weights.clone();
    let eval = move |idx: usize| -> f64 {
        let i = idx / (n * n);
        let j = (idx / n) % n;
        let k = idx % n;
        let r = (nodes[i] * nodes[i] + nodes[j] * nodes[j] + nodes[k] * nodes[k]).sqrt();
        weights[i] * weights[j] * weights[k] * 2.0 * (freq * r).cosh()
    };

    let mut group = c.benchmark_group("spin_tensor_quadrature_32cubed");
    group.bench_with_input(BenchmarkId::new("seq", total), &total, |b, &t| {
        b.iter(|| pairwise_sum(&map_collect_seq(t, &eval)))
    });
    group.bench_with_input(BenchmarkId::new("par", total), &total, |b, &t| {
        b.iter(|| pairwise_sum(&map_collect_par(t, &eval)))
    });
    group.finish();
}

criterion_group!(benches, hs_integrand_sweep, oracle_basis_sweep, spin_tensor_sweep);
criterion_main!(benches);
