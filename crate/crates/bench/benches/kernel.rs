//! Kernel construction, evaluation, Gram verification and sampler sweeps.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use mb_bench::{ensembles, label};
use mb_core::kernel::{build_kernel, kernel_eval, kernel_trace, verify_biortho};
use mb_core::sampler::ChainState;

fn bench_kernel(c: &mut Criterion) {
    let mut g = c.benchmark_group("kernel");
    for spec in ensembles(8, 2.0) {
        g.bench_function(format!("build/{}", label(&spec)), |b| b.iter(|| build_kernel(black_box(&spec)).unwrap()));
        let k = build_kernel(&spec).unwrap();
        let x = if spec.weight.is_full_line() { -0.35 } else { 0.35 };
        g.bench_function(format!("eval/{}", label(&spec)), |b| b.iter(|| kernel_eval(&k, black_box(x), 0.6)));
    }
    g.sample_size(10);
    for spec in ensembles(6, 2.0).into_iter().take(3) {
        let k = build_kernel(&spec).unwrap();
        g.bench_function(format!("trace/{}", label(&spec)), |b| b.iter(|| kernel_trace(black_box(&k)).unwrap()));
    }
    g.finish();
}

fn bench_gram(c: &mut Criterion) {
    let mut g = c.benchmark_group("gram");
    g.sample_size(10);
    for spec in ensembles(8, 1.5) {
        g.bench_function(label(&spec), |b| b.iter(|| verify_biortho(black_box(&spec.weight), 1.5, 8, 1e-8).unwrap()));
    }
    g.finish();
}

fn bench_sampler(c: &mut Criterion) {
    let mut g = c.benchmark_group("sampler_sweep");
    for spec in ensembles(10, 2.0) {
        let mut st = ChainState::new(&spec, 1).unwrap();
        g.bench_function(label(&spec), |b| b.iter(|| st.sweep(black_box(&spec))));
    }
    g.finish();
}

criterion_group!(kernel, bench_kernel, bench_gram, bench_sampler);
criterion_main!(kernel);
