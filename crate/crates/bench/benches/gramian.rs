use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use mzquad::linalg::sym_eig;
use mzquad::mz::{gramian, GramianLadder};
use mzquad::rules::{clenshaw_curtis, gauss_legendre, padua_rule};
use mzquad::{Domain, OrthonormalBasis};
use mzquad_bench::{halton_cube, padua_gramian};

fn eigensolver(c: &mut Criterion) {
    let mut group = c.benchmark_group("sym_eig");
    group.sample_size(10);
    for (m, n) in [(10, 9), (20, 19), (30, 29)] {
        let g = padua_gramian(m, n);
        group.bench_with_input(BenchmarkId::new("padua", g.order()), &g, |b, g| {
            b.iter(|| sym_eig(black_box(g)).unwrap())
        });
    }
    group.finish();
}

fn assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("gramian");
    group.sample_size(10);
    let rule = halton_cube(14);
    for n in [4, 8] {
        let basis = OrthonormalBasis::new(Domain::CUBE, n);
        group.bench_with_input(BenchmarkId::new("halton-cube-2^14", n), &basis, |b, basis| {
            b.iter(|| gramian(black_box(&rule), basis).unwrap())
        });
    }
    group.bench_function("cc-ladder-m20-n30", |b| {
        b.iter(|| {
            let ladder = GramianLadder::new(clenshaw_curtis(20).unwrap(), 30).unwrap();
            (0..=30).map(|n| ladder.report(n).unwrap().eta).sum::<f64>()
        })
    });
    group.finish();
}

fn construction(c: &mut Criterion) {
    let mut group = c.benchmark_group("rules");
    group.bench_function("gauss-legendre-64", |b| b.iter(|| gauss_legendre(black_box(64)).unwrap()));
    group.bench_function("clenshaw-curtis-64", |b| b.iter(|| clenshaw_curtis(black_box(64)).unwrap()));
    group.sample_size(10);
    group.bench_function("padua-20", |b| b.iter(|| padua_rule(black_box(20)).unwrap()));
    group.finish();
}

criterion_group!(benches, eigensolver, assembly, construction);
criterion_main!(benches);
