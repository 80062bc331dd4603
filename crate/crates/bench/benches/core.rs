use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;
use unigame_core::graph::ball;
use unigame_core::solvers::{minimize_potential, solve_linear_poisson, solve_nonlinear_poisson};
use unigame_core::thermo::random_regular;
use unigame_core::{
    canonical_code, partition_classes, BoxConstraint, ClassPartition, ClassRadius, Graph, LQModel, SolveOptions, Source,
    WModel,
};

fn balanced(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eta: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mean = eta.iter().sum::<f64>() / n as f64;
    eta.iter_mut().for_each(|x| *x -= mean);
    eta
}

fn codes(c: &mut Criterion) {
    let mut group = c.benchmark_group("canonical_code");
    let g = random_regular(2000, 3, 1).unwrap();
    for r in [2, 4, 6] {
        group.bench_with_input(BenchmarkId::new("random_3_regular", r), &r, |b, &r| {
            b.iter(|| canonical_code(&ball(&g, 0, r)).unwrap())
        });
    }
    let lattice = Graph::lattice_box(21, 2);
    for r in [3, 6] {
        group.bench_with_input(BenchmarkId::new("square_lattice", r), &r, |b, &r| {
            b.iter(|| canonical_code(&ball(&lattice, 220, r)).unwrap())
        });
    }
    group.finish();
}

fn partitions(c: &mut Criterion) {
    let mut group = c.benchmark_group("partition");
    group.sample_size(10);
    group.bench_function("box_20x20_exact", |b| {
        let g = Graph::lattice_box(20, 2);
        b.iter(|| partition_classes(black_box(&g), ClassRadius::Exact).unwrap())
    });
    group.bench_function("random_4_regular_1000_r2", |b| {
        let g = random_regular(1000, 4, 2).unwrap();
        b.iter(|| partition_classes(black_box(&g), ClassRadius::Fixed(2)).unwrap())
    });
    group.finish();
}

fn poisson(c: &mut Criterion) {
    let mut group = c.benchmark_group("poisson");
    for n in [100, 1000] {
        let g = random_regular(n, 3, 3).unwrap();
        let eta = balanced(n, 4);
        group.bench_with_input(BenchmarkId::new("linear", n), &n, |b, _| {
            b.iter(|| solve_linear_poisson(&g, &eta, 1e-10).unwrap())
        });
    }
    let g = random_regular(100, 3, 5).unwrap();
    let w = WModel::power(Source::PerVertex(balanced(100, 6)), 3.0).unwrap();
    group.sample_size(10);
    group.bench_function("nonlinear_p3_100", |b| {
        b.iter(|| solve_nonlinear_poisson(&g, &w, 1e-8, &SolveOptions::default()).unwrap())
    });
    group.finish();
}

fn minimizer(c: &mut Criterion) {
    let mut group = c.benchmark_group("minimize");
    group.sample_size(10);
    let g = random_regular(200, 3, 7).unwrap();
    let lq = LQModel::new(Source::PerVertex(balanced(200, 8))).unwrap();
    let part = ClassPartition::discrete(200);
    group.bench_function("lq_discrete_200", |b| {
        b.iter(|| minimize_potential(&g, &part, &lq, &BoxConstraint::unbounded(1), &SolveOptions::default()).unwrap())
    });
    let boxes = Graph::lattice_box(30, 2);
    let exact = partition_classes(&boxes, ClassRadius::Exact).unwrap();
    let constant = LQModel::new(Source::constant(1.0).unwrap()).unwrap();
    let k = BoxConstraint::interval(1, -1.0, 1.0).unwrap();
    group.bench_function("lq_box_30x30_exact", |b| {
        b.iter(|| minimize_potential(&boxes, &exact, &constant, &k, &SolveOptions::default()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, codes, partitions, poisson, minimizer);
criterion_main!(benches);
