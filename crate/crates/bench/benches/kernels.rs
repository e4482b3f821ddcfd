use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use cubic_string::cauchy::cauchy_weights;
use cubic_string::inverse::{HalfAxis, HalfAxisSolver};
use cubic_string::jost::{self, Backend, Family};
use cubic_string::quad::PanelGrid;
use cubic_string::scattering::row0;
use cubic_string::trig3::s_triple;
use cubic_string::Complex64;
use cubic_string_bench::{bump, step_data};

fn trig(c: &mut Criterion) {
    c.bench_function("s_triple", |b| b.iter(|| s_triple(black_box(Complex64::new(2.3, -1.7)))));
}

fn jost_solutions(c: &mut Criterion) {
    let p = bump();
    let lam = Complex64::new(0.15, -0.1);
    let mut g = c.benchmark_group("jost");
    for backend in [Backend::Neumann, Backend::Ode] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{backend:?}")), &backend, |b, &be| {
            b.iter(|| jost::solve(&p, Family::V, black_box(lam), 0, 0.0, be))
        });
    }
    g.bench_function("row0", |b| b.iter(|| row0(&p, black_box(Complex64::new(0.8, -0.5)))));
    g.finish();
}

fn cauchy(c: &mut Criterion) {
    let grid = PanelGrid::graded(15.0, 16, 16, 0.1, 2.0).unwrap();
    c.bench_function("cauchy_weights_256", |b| b.iter(|| cauchy_weights(&grid, black_box(Complex64::new(3.1, 0.01)))));
}

fn inverse(c: &mut Criterion) {
    let d = step_data(8);
    let solver = HalfAxisSolver::new(&d, HalfAxis::Direct).unwrap();
    let mut g = c.benchmark_group("inverse_n128");
    g.sample_size(10);
    g.bench_function("assemble", |b| b.iter(|| solver.assemble(black_box(1.0), &[], Complex64::new(1.0, 0.0))));
    let sys = solver.assemble(1.0, &[], Complex64::new(1.0, 0.0)).unwrap();
    g.bench_function("solve", |b| b.iter(|| solver.solve_system(black_box(&sys))));
    g.finish();
}

criterion_group!(benches, trig, jost_solutions, cauchy, inverse);
criterion_main!(benches);
