use criterion::{criterion_group, criterion_main, Criterion};
use nalgebra::DVector;
use regulie_core::bundles::{holonomy, BoxDomain, ConnectionChart};
use regulie_core::lie::catalog;
use regulie_core::{evolve, AlgebraCurve, PathInBase, Side};
use std::hint::black_box;

fn bench_evolve(c: &mut Criterion) {
    let x = AlgebraCurve::from_expr(catalog::so3(), "sin(t)*e1 + cos(2*t)*e2 + t*e3").unwrap();
    c.bench_function("evolve so3 1024", |b| b.iter(|| evolve(black_box(&x), Side::Right, 1024).unwrap()));
}

fn bench_exp_log(c: &mut Criterion) {
    let g = catalog::so3();
    let x = g.algebra_from(&[0.3, -1.1, 0.7]).unwrap();
    let a = g.exp(&x).unwrap();
    c.bench_function("so3 exp", |b| b.iter(|| g.exp(black_box(&x)).unwrap()));
    c.bench_function("so3 log", |b| b.iter(|| g.log(black_box(&a)).unwrap()));
}

fn bench_holonomy(c: &mut Criterion) {
    let dom = BoxDomain::cube(2, -1.0, 1.0).unwrap();
    let conn = ConnectionChart::from_exprs(catalog::so3(), dom, &["x*y*e1 + sin(x)*e2", "cos(y)*e3 + x*e1"]).unwrap();
    let lp = PathInBase::square_loop(&DVector::from_column_slice(&[-0.3, -0.4]), 0, 1, 0.8).unwrap();
    let id = conn.group().identity();
    c.bench_function("holonomy so3 square 256", |b| b.iter(|| holonomy(&conn, black_box(&lp), &id, 256).unwrap()));
}

criterion_group!(benches, bench_evolve, bench_exp_log, bench_holonomy);
criterion_main!(benches);
