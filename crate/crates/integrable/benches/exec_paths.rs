use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use integrable::models::{tw_transition, AsepParams, TwOptions};
use integrable::mpa::mpa_weights;
use integrable::sixvertex::{sample_many, six_vertex_weights, Boundary};
use integrable::Exec;
use std::hint::black_box;

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn bench_mpa(c: &mut Criterion) {
    let p = AsepParams::new(0.5, 0.7, 0.6, 0.1, 0.2, 12);
    let mut g = c.benchmark_group("mpa_weights_L12_M40");
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| mpa_weights(black_box(&p), 40, exec).unwrap())
        });
    }
    g.finish();
}

fn bench_tw(c: &mut Criterion) {
    let mut g = c.benchmark_group("tw_transition_N2");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        let opts = TwOptions { n_quad: 64, tol: 1e-6, exec, ..TwOptions::default() };
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| tw_transition(black_box(&[0, 2]), &[1, 3], 1.0, 0.5, &opts).unwrap())
        });
    }
    g.finish();
}

fn bench_sampler(c: &mut Criterion) {
    let w = six_vertex_weights(0.4, 0.7).unwrap();
    let bd = Boundary::step(32, 32);
    let mut g = c.benchmark_group("sample_many_32x32_x256");
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| sample_many(&w, 32, 32, &bd, black_box(7), 256, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench_mpa, bench_tw, bench_sampler);
criterion_main!(benches);
