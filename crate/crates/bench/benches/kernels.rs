use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use filtra::energy::energy_dual;
use filtra::rational::q;
use filtra::Exponent;
use filtra_bench::*;

fn fd(c: &mut Criterion) {
    let mut g = c.benchmark_group("fd");
    for n in [3, 5] {
        let (a, b) = fd_pair(n);
        g.bench_with_input(BenchmarkId::new("joint_basis", n), &n, |bch, _| {
            bch.iter(|| black_box(a.joint_basis(&b).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("d2", n), &n, |bch, _| {
            bch.iter(|| black_box(a.distance(&b, &Exponent::Finite(q(2))).unwrap()))
        });
    }
    g.finish();
}

fn toric(c: &mut Criterion) {
    let mut g = c.benchmark_group("toric");
    let (a, b) = square_pair(4);
    g.bench_function("distance_p2_square", |bch| {
        bch.iter(|| black_box(a.distance(&b, &Exponent::Finite(q(2))).unwrap()))
    });
    g.bench_function("spectral_cdf_square", |bch| bch.iter(|| black_box(a.spectral_measure().unwrap())));
    g.bench_function("volume_square", |bch| bch.iter(|| black_box(a.volume().unwrap())));
    let f = parabola();
    for d in [16, 64] {
        g.bench_with_input(BenchmarkId::new("canonical_approximant", d), &d, |bch, &d| {
            bch.iter(|| black_box(f.canonical_approximant(d).unwrap()))
        });
    }
    g.finish();
}

fn energy(c: &mut Criterion) {
    let (p, mu) = four_atoms();
    let opts = ot_options();
    let mut g = c.benchmark_group("energy");
    g.sample_size(10);
    g.bench_function("energy_dual_4_atoms", |bch| bch.iter(|| black_box(energy_dual(&p, &mu, &opts).unwrap())));
    g.finish();
}

criterion_group!(benches, fd, toric, energy);
criterion_main!(benches);
