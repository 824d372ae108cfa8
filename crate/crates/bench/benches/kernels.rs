use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use epi_lab::density::scaled_sum;
use epi_lab::entropy::epi_deficit;
use epi_lab::psd_lemma::{random_pd, spectral_decompose};
use epi_lab::transport::{gaussian_fit, w2_1d};
use epi_lab::{Density1D, QuadratureConfig};

fn convolution(c: &mut Criterion) {
    let mix = Density1D::mixture_counterexample(0.01).unwrap();
    let quartic = Density1D::quartic(0.1).unwrap();
    let mut group = c.benchmark_group("scaled_sum");
    for n in [1usize << 14, 1 << 16, 1 << 18] {
        let cfg = QuadratureConfig::default().with_grid_points(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &cfg, |b, cfg| {
            b.iter(|| {
                scaled_sum(black_box(&mix), 0.5f64.sqrt(), &quartic, 0.5f64.sqrt(), cfg).unwrap()
            })
        });
    }
    group.finish();
    let cfg = QuadratureConfig::default();
    c.bench_function("epi_deficit/mixture_0.01", |b| {
        b.iter(|| epi_deficit(black_box(&mix), &mix, 0.5, &cfg).unwrap())
    });
}

fn transport(c: &mut Criterion) {
    let cfg = QuadratureConfig::default();
    let mix = Density1D::mixture_counterexample(0.01).unwrap();
    let quartic = Density1D::quartic(0.1).unwrap();
    let lap = Density1D::laplace(1.0).unwrap();
    c.bench_function("w2_1d/mixture_quartic", |b| {
        b.iter(|| w2_1d(black_box(&mix), &quartic, &cfg).unwrap())
    });
    c.bench_function("w2_1d/laplace_quartic", |b| {
        b.iter(|| w2_1d(black_box(&lap), &quartic, &cfg).unwrap())
    });
    c.bench_function("gaussian_fit/mixture", |b| {
        b.iter(|| gaussian_fit(black_box(&mix), &cfg).unwrap())
    });
}

fn spectral(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut group = c.benchmark_group("spectral_decompose");
    for n in [2usize, 4, 8, 16] {
        let m = random_pd(&mut rng, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| spectral_decompose(black_box(m)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, convolution, transport, spectral);
criterion_main!(benches);
