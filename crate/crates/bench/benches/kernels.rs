use std::hint::black_box;

use arcmarkov::composition::{chebyshev, compose_derivative};
use arcmarkov::equilibrium::solve_tau;
use arcmarkov::fastdecay::build_fd_trig;
use arcmarkov::ineqlab::markov_sharpness_scan;
use arcmarkov::poly::sup_norm;
use arcmarkov_bench::{single_tset, three_arcs, trig_spec, two_tset};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn equilibrium(c: &mut Criterion) {
    let arcs = three_arcs();
    c.bench_function("solve_tau/three_arcs", |b| b.iter(|| solve_tau(black_box(&arcs)).unwrap()));
    let eq = solve_tau(&arcs).unwrap();
    c.bench_function("omega_endpoint/three_arcs", |b| b.iter(|| eq.omega_endpoint(black_box(0.3)).unwrap()));
}

fn fastdecay(c: &mut Criterion) {
    let mut g = c.benchmark_group("build_fd_trig");
    g.sample_size(10);
    for m in [100usize, 200, 400] {
        let spec = trig_spec(m);
        g.bench_with_input(BenchmarkId::from_parameter(m), &spec, |b, s| b.iter(|| build_fd_trig(s).unwrap()));
    }
    g.finish();
}

fn markov(c: &mut Criterion) {
    let (d, a) = two_tset();
    let mut g = c.benchmark_group("markov_sharpness_scan");
    g.sample_size(10);
    g.bench_function("two_intervals/k2", |b| {
        b.iter(|| markov_sharpness_scan(&d, a, 2, black_box(&[4, 8, 16, 32])).unwrap())
    });
    g.finish();

    let (d, _) = single_tset();
    let t = d.extremal_sequence(32);
    c.bench_function("sup_norm/degree32", |b| b.iter(|| sup_norm(black_box(&t), &d.e_set)));
}

fn composition(c: &mut Criterion) {
    let (d, a) = single_tset();
    let p = chebyshev(24);
    c.bench_function("compose_derivative/k6", |b| {
        b.iter(|| compose_derivative(black_box(&p), &d.u, a, 6).unwrap())
    });
}

criterion_group!(benches, equilibrium, fastdecay, markov, composition);
criterion_main!(benches);
