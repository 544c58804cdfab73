use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use tropjac_bench::{d4_form, k4, prism_form};
use tropjac_core::{delaunay_subdivision, period_matrix, schottky_recover, secondary_cone_of_graph, voronoi_cell};

fn graphs(c: &mut Criterion) {
    let g = k4();
    c.bench_function("period_matrix/k4", |b| b.iter(|| period_matrix(black_box(&g)).unwrap()));
    c.bench_function("secondary_cone/k4", |b| b.iter(|| secondary_cone_of_graph(black_box(&g)).unwrap()));
}

fn forms(c: &mut Criterion) {
    let q = period_matrix(&k4()).unwrap();
    c.bench_function("delaunay/k4", |b| b.iter(|| delaunay_subdivision(black_box(q.matrix())).unwrap()));
    c.bench_function("voronoi/k4", |b| b.iter(|| voronoi_cell(black_box(q.matrix())).unwrap()));
}

fn schottky(c: &mut Criterion) {
    let prism = prism_form();
    let d4 = d4_form();
    // Warm the catalog cache so the timings cover recovery only.
    schottky_recover(&prism).unwrap();
    let mut group = c.benchmark_group("schottky");
    group.sample_size(10);
    group.bench_function("prism", |b| b.iter(|| schottky_recover(black_box(&prism)).unwrap()));
    group.bench_function("d4", |b| b.iter(|| schottky_recover(black_box(&d4)).unwrap()));
    group.finish();
}

criterion_group!(benches, graphs, forms, schottky);
criterion_main!(benches);
