use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use loophull::hull::{flood_fill_outside, rasterize_path, winding_field};
use loophull::{BridgeSpec, GridSpec};

fn sampling(c: &mut Criterion) {
    let mut g = c.benchmark_group("sample");
    for steps in [1usize << 12, 1 << 16] {
        g.bench_with_input(BenchmarkId::new("gaussian", steps), &steps, |b, &n| {
            b.iter(|| BridgeSpec::gaussian(n, 7).sample().unwrap())
        });
    }
    g.bench_function("lattice/50000", |b| b.iter(|| BridgeSpec::lattice(50_000, 7).sample().unwrap()));
    g.finish();
}

fn geometry(c: &mut Criterion) {
    let path = BridgeSpec::gaussian(1 << 16, 3).sample().unwrap();
    let mut g = c.benchmark_group("geometry");
    for cpu in [256.0, 512.0] {
        let grid = GridSpec::enclosing(&path, 1.0 / cpu, 4.0 / cpu).unwrap();
        let blocked = rasterize_path(&path, &grid).unwrap();
        g.bench_with_input(BenchmarkId::new("rasterize", cpu), &grid, |b, grid| {
            b.iter(|| rasterize_path(black_box(&path), grid).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("flood_fill", cpu), &grid, |b, grid| {
            b.iter(|| flood_fill_outside(black_box(&blocked), grid))
        });
        g.bench_with_input(BenchmarkId::new("winding_field", cpu), &grid, |b, grid| {
            b.iter(|| winding_field(black_box(&path), grid, &blocked))
        });
    }
    g.finish();
}

criterion_group!(benches, sampling, geometry);
criterion_main!(benches);
