use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use soliton_bench::{bowl, grim_reaper};
use soliton_core::entropy::GaussianIntegrator;
use soliton_core::pde::{solve_translator_graph, Rect};
use soliton_core::{compute_diagnostics, GaussianWeight, Vec3};

fn diagnostics(c: &mut Criterion) {
    let mut g = c.benchmark_group("diagnostics");
    for h in [0.1, 0.05] {
        let mesh = grim_reaper(h).unwrap();
        g.bench_with_input(BenchmarkId::new("grim_reaper", h), &mesh, |b, m| {
            b.iter(|| compute_diagnostics(black_box(m)).unwrap())
        });
    }
    g.finish();
}

fn f_functional(c: &mut Criterion) {
    let mesh = bowl(0.02).unwrap();
    let integ = GaussianIntegrator::new(&mesh).unwrap();
    let mut g = c.benchmark_group("f_functional");
    for t0 in [0.05, 1.0, 20.0] {
        let w = GaussianWeight::new(Vec3::new(0.1, 0.0, 1.0), t0).unwrap();
        g.bench_with_input(BenchmarkId::new("bowl", t0), &w, |b, w| b.iter(|| integ.eval(black_box(w))));
    }
    g.finish();
}

fn pde_solve(c: &mut Criterion) {
    let mut g = c.benchmark_group("pde_solve");
    g.sample_size(10);
    let domain = Rect::new(-1.2, 1.2, -1.0, 1.0);
    // tilted grim reaper with cos θ = 0.9
    let (k, tan) = (0.9f64, (1.0f64 - 0.81).sqrt() / 0.9);
    let data = move |x: f64, y: f64| -(x * k).cos().ln() / (k * k) + y * tan;
    for h in [0.05, 0.025] {
        g.bench_function(BenchmarkId::new("strip_patch", h), |b| {
            b.iter(|| solve_translator_graph(&domain, data, black_box(h), 1e-8).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, diagnostics, f_functional, pde_solve);
criterion_main!(benches);
