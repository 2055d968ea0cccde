use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mumford_bench::{formal_engine, TARGETS};
use mumford_core::{dimension, mumford_decompose, wp_volume, Engine, SpectralCurve};

fn correlators(c: &mut Criterion) {
    let mut group = c.benchmark_group("correlator");
    for (g, n) in TARGETS {
        group.bench_with_input(
            BenchmarkId::new("formal", format!("{g},{n}")),
            &(g, n),
            |b, &(g, n)| b.iter(|| formal_engine(5).correlator(g, n).unwrap()),
        );
        group.bench_with_input(
            BenchmarkId::new("airy", format!("{g},{n}")),
            &(g, n),
            |b, &(g, n)| {
                b.iter(|| {
                    Engine::new(SpectralCurve::airy())
                        .unwrap()
                        .correlator(g, n)
                        .unwrap()
                })
            },
        );
    }
    group.finish();
}

fn moduli(c: &mut Criterion) {
    let mut group = c.benchmark_group("moduli");
    for (g, n) in TARGETS {
        group.bench_with_input(
            BenchmarkId::new("wp_volume", format!("{g},{n}")),
            &(g, n),
            |b, &(g, n)| b.iter(|| wp_volume(g, n, dimension(g, n) as u32).unwrap()),
        );
    }
    let engine = formal_engine(5);
    for (g, n) in [(1, 2), (2, 1), (2, 2)] {
        let w = engine.correlator(g, n).unwrap();
        group.bench_with_input(
            BenchmarkId::new("decompose", format!("{g},{n}")),
            &w,
            |b, w| b.iter(|| mumford_decompose(w, engine.curve()).unwrap()),
        );
    }
    group.finish();
}

fn batch(c: &mut Criterion) {
    c.bench_function("all pairs to budget 5", |b| {
        b.iter(|| {
            let engine = formal_engine(5);
            for (g, n) in mumford_core::stable_pairs(5) {
                engine.correlator(g, n).unwrap();
            }
        })
    });
}

criterion_group!(benches, correlators, moduli, batch);
criterion_main!(benches);
