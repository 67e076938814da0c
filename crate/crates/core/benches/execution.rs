use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use nanobeam::dynamics::{InitialStateSpec, SimulationSetup, TimeGrid};
use nanobeam::model::{ModelParams, Regime, RegimeSpec};
use nanobeam::parallel::Execution;

/// Independent beam-splitter runs with couplings spread over a decade.
fn batch(size: usize) -> Vec<SimulationSetup> {
    (0..size)
        .map(|k| {
            let mut p = ModelParams::zeroed();
            p.gamma = 0.5;
            p.g = [0.02 * (1.0 + k as f64); 2];
            SimulationSetup {
                params: p,
                regime: RegimeSpec::new(Regime::Nbs),
                initial: InitialStateSpec::split_photon([1, 0]),
                grid: TimeGrid::new(0.0, 50.0, 201).unwrap(),
                losses: k % 2 == 1,
            }
        })
        .collect()
}

fn run(setups: &[SimulationSetup], execution: Execution) -> usize {
    execution
        .map(setups.iter().collect(), |s| {
            s.run([1, 1, 3, 3], 4, |_| Vec::new())
                .map(|t| t.len())
                .unwrap_or(0)
        })
        .into_iter()
        .sum()
}

fn execution(c: &mut Criterion) {
    let setups = batch(8);
    let mut group = c.benchmark_group("batch_of_8");
    group.sample_size(10);
    for (name, exec) in [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| run(black_box(&setups), exec))
        });
    }
    group.finish();
}

criterion_group!(benches, execution);
criterion_main!(benches);
