use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use knotgate_core::algebra::{herm_exp, Mat2};
use knotgate_core::compile::{compile_word, Compiler};
use knotgate_core::diagram::catalog;
use knotgate_core::linkgate::{link_hamiltonian, LinkGateSpec};
use knotgate_core::reps::{fibonacci_rep, rep_solve, SolveOptions};
use knotgate_core::wirtinger_presentation;

fn bench_herm_exp(c: &mut Criterion) {
    let h = link_hamiltonian(&LinkGateSpec::new("hopf", 1, 1));
    c.bench_function("herm_exp/hopf", |b| b.iter(|| herm_exp(black_box(&h), black_box(0.7)).unwrap()));
}

fn bench_presentation(c: &mut Criterion) {
    let pd = catalog("whitehead").unwrap().pd;
    c.bench_function("wirtinger+simplify/whitehead", |b| {
        b.iter(|| wirtinger_presentation(black_box(&pd)).simplify())
    });
}

fn bench_rep_solve(c: &mut Criterion) {
    let p = catalog("figure8").unwrap().expected_presentation;
    let opts = SolveOptions::default();
    c.bench_function("rep_solve/figure8", |b| b.iter(|| rep_solve(black_box(&p), 1, &opts)));
}

fn bench_compile(c: &mut Criterion) {
    let rep = fibonacci_rep();
    let target = Mat2::basis_j();
    let mut g = c.benchmark_group("compile");
    g.sample_size(10);
    g.bench_function("fibonacci/build+search/len10", |b| {
        b.iter(|| compile_word(&rep, black_box(&target), 10, 0.0).unwrap())
    });
    let compiler = Compiler::new(&rep, 12).unwrap();
    g.bench_function("fibonacci/search/len12", |b| b.iter(|| compiler.compile(black_box(&target), 0.0).unwrap()));
    g.finish();
}

criterion_group!(kernels, bench_herm_exp, bench_presentation, bench_rep_solve, bench_compile);
criterion_main!(kernels);
