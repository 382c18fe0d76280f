use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use fujita_core::cc_geometry::{build_reach_graph_with, ReachOptions};
use fujita_core::heat::{assemble_operator, Scheme, Stepper};
use fujita_core::vf_algebra::grushin;
use fujita_core::{Field, GridSpec};

fn operator_apply(c: &mut Criterion) {
    let grid = GridSpec::centered(&[4.5, 3.0], &[256, 256]).unwrap();
    let op = assemble_operator(&grushin(1), &grid).unwrap();
    let u = Field::gaussian(&grid, &[0.0, 0.0], &[1.0, 1.0], 1.0).into_values();
    let mut out = vec![0.0; u.len()];
    let mut g = c.benchmark_group("operator_apply_256x256");
    g.bench_function("parallel", |b| b.iter(|| op.apply(black_box(&u), &mut out)));
    g.bench_function("sequential", |b| b.iter(|| op.apply_seq(black_box(&u), &mut out)));
    g.finish();
}

fn heat_steps(c: &mut Criterion) {
    let grid = GridSpec::centered(&[4.5, 3.0], &[128, 128]).unwrap();
    let op = assemble_operator(&grushin(1), &grid).unwrap();
    let u = Field::gaussian(&grid, &[0.0, 0.0], &[1.0, 1.0], 1.0).into_values();
    let mut g = c.benchmark_group("heat_steps_128x128");
    g.sample_size(20);
    for scheme in [Scheme::Explicit, Scheme::Implicit] {
        let dt = match scheme {
            Scheme::Explicit => op.default_dt(),
            Scheme::Implicit => 0.01,
        };
        for parallel in [true, false] {
            let stepper = Stepper::new(&op, scheme, parallel);
            let label = if parallel { "parallel" } else { "sequential" };
            g.bench_with_input(BenchmarkId::new(format!("{scheme:?}"), label), &dt, |b, &dt| {
                b.iter(|| stepper.propagate(black_box(&u), 10.0 * dt, dt).unwrap())
            });
        }
    }
    g.finish();
}

fn reach_graph(c: &mut Criterion) {
    let grid = GridSpec::centered(&[6.0, 12.0], &[97, 97]).unwrap();
    let sys = grushin(1);
    let step = grid.spacing(0);
    let mut g = c.benchmark_group("reach_graph_97x97");
    g.sample_size(10);
    for parallel in [true, false] {
        let opts = ReachOptions {
            parallel,
            ..ReachOptions::default()
        };
        let label = if parallel { "parallel" } else { "sequential" };
        g.bench_function(label, |b| {
            b.iter(|| build_reach_graph_with(&sys, &grid, step, &opts).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, operator_apply, heat_steps, reach_graph);
criterion_main!(benches);
