use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use scaling_lab::relay;
use scaling_lab::seed;
use scaling_lab::{genie, FadingModel, GenieLimits, LazyChannel};
use scaling_lab_bench::{extremal_relays, rayleigh_square, unit_params};

fn sampling(c: &mut Criterion) {
    let mut g = c.benchmark_group("sample");
    let n = 100_000;
    g.throughput(Throughput::Elements(n as u64));
    let models = [
        ("rayleigh", FadingModel::rayleigh(1.0).unwrap()),
        ("extremal", FadingModel::extremal(1.0, 1.0, 1024).unwrap()),
        ("pareto_pathloss", FadingModel::pareto_pathloss(4.0).unwrap()),
        ("nakagami", FadingModel::nakagami(2.0, 1.0).unwrap()),
    ];
    for (name, model) in models {
        let mut buf = vec![0.0; n];
        let mut rng = seed::stream(1);
        g.bench_function(name, |b| b.iter(|| model.fill(&mut rng, black_box(&mut buf))));
    }
    g.finish();
}

fn genie_search(c: &mut Criterion) {
    let mut g = c.benchmark_group("genie");
    let params = unit_params();
    let limits = GenieLimits::default();
    for n in [8usize, 12] {
        let h = rayleigh_square(n, n as u64);
        g.bench_with_input(BenchmarkId::new("single_hop", n), &h, |b, h| {
            b.iter(|| genie::max_valid_single_hop(h, &params, &limits).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("two_hop", n), &h, |b, h| {
            b.iter(|| genie::max_valid_two_hop(h, &params, &limits).unwrap())
        });
    }
    g.finish();
}

fn relay_hops(c: &mut Criterion) {
    let mut g = c.benchmark_group("relay");
    g.sample_size(20);
    for n in [1024usize, 4096] {
        let cfg = extremal_relays(n);
        let h = LazyChannel::new(cfg.n, cfg.m, cfg.model, 7).unwrap();
        g.bench_with_input(BenchmarkId::new("first_hop_extremal", n), &h, |b, h| {
            b.iter(|| relay::first_hop_throughput(h, &cfg.params))
        });
    }
    let cfg = relay::pareto_linear_config(512, 4.0).unwrap();
    let mut rng = seed::stream(3);
    g.bench_function("two_hop_pareto_512", |b| {
        b.iter(|| relay::two_hop_realization(&cfg, &mut rng).unwrap())
    });
    g.finish();
}

criterion_group!(benches, sampling, genie_search, relay_hops);
criterion_main!(benches);
