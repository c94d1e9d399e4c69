use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use destab::complex::ComplexWindow;
use destab::invariants::{dickson, mui, MuiClass};
use destab::oracle::ResolutionWindow;
use destab_bench::workloads;

fn complex_build(c: &mut Criterion) {
    let mut g = c.benchmark_group("complex_build");
    g.sample_size(10);
    for (name, m) in workloads(3, 40) {
        g.bench_with_input(BenchmarkId::from_parameter(&name), &m, |b, m| {
            b.iter(|| ComplexWindow::build(m.clone(), 3, 40).unwrap())
        });
    }
    g.finish();
}

fn homology(c: &mut Criterion) {
    let mut g = c.benchmark_group("homology_tsv");
    g.sample_size(10);
    for (name, m) in workloads(3, 40) {
        let cw = ComplexWindow::build(m, 3, 40).unwrap();
        g.bench_function(BenchmarkId::from_parameter(&name), |b| b.iter(|| cw.homology_tsv(2).unwrap()));
    }
    g.finish();
}

fn resolution(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle_resolution");
    g.sample_size(10);
    for (name, m) in workloads(3, 30).into_iter().filter(|(n, _)| !n.starts_with("free")) {
        g.bench_with_input(BenchmarkId::from_parameter(&name), &m, |b, m| b.iter(|| ResolutionWindow::new(m, 3, 30).unwrap()));
    }
    g.finish();
}

fn invariants(c: &mut Criterion) {
    c.bench_function("dickson p=3 s=3", |b| b.iter(|| dickson(3, 3, 1).unwrap()));
    c.bench_function("mui L p=5 s=2", |b| b.iter(|| mui(5, 2, MuiClass::L).unwrap()));
}

criterion_group!(benches, complex_build, homology, resolution, invariants);
criterion_main!(benches);
