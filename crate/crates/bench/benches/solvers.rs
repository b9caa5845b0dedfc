use criterion::{black_box, criterion_group, criterion_main, Criterion};
use evla_bench::{fluence_grid, lattice, scenario};
use evla_core::damage::{damage_map, table3};
use evla_core::fdoracle::{solve_fluence_fd, Boundaries, Boundary};
use evla_core::fluence::assemble_and_solve;
use evla_core::specfn::{j0, k1};
use evla_core::thermal::build_temperature;

fn special_functions(c: &mut Criterion) {
    let xs: Vec<f64> = (1..=1000).map(|k| 0.05 * k as f64).collect();
    c.bench_function("specfn/j0+k1 x1000", |b| {
        b.iter(|| xs.iter().map(|&x| j0(black_box(x)) + k1(black_box(x))).sum::<f64>())
    });
}

fn analytic(c: &mut Criterion) {
    let p = scenario("810-15w");
    c.bench_function("fluence/assemble_and_solve", |b| b.iter(|| assemble_and_solve(black_box(&p)).unwrap()));
    c.bench_function("thermal/build_temperature", |b| b.iter(|| build_temperature(black_box(&p)).unwrap()));
    let temp = build_temperature(&p).unwrap();
    let pts = lattice(&p, 21, 21);
    c.bench_function("thermal/eval 441 points", |b| {
        b.iter(|| pts.iter().map(|&(r, z)| temp.eval(r, z, 5.0).unwrap()).sum::<f64>())
    });
    c.bench_function("damage/table3", |b| b.iter(|| table3(black_box(&p))));
    let few = lattice(&p, 5, 5);
    c.bench_function("damage/map 25 points", |b| b.iter(|| damage_map(&temp, &few, &p, 1.0, 64).unwrap()));
}

fn finite_difference(c: &mut Criterion) {
    let p = scenario("810-15w");
    let grid = fluence_grid(&p, 0.1, 101);
    let bcs = Boundaries::uniform(Boundary::ZeroFlux);
    let mut g = c.benchmark_group("fdoracle");
    g.sample_size(10);
    g.bench_function("steady fluence", |b| b.iter(|| solve_fluence_fd(&grid, &p, &bcs).unwrap()));
    g.finish();
}

criterion_group!(benches, special_functions, analytic, finite_difference);
criterion_main!(benches);
