//! Hot-path benchmarks: enumeration, front extraction, one GA generation's
//! worth of work, and the front-distance indicator.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use riskfront_core::*;

fn bench_enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumeration");
    for demand in [100u64, 240, 480] {
        let scen = Scenario::builtin_fig2(demand);
        group.bench_with_input(BenchmarkId::from_parameter(demand), &scen, |b, scen| {
            b.iter(|| {
                let mut count = 0u64;
                for_each_distribution(scen, false, |_| {
                    count += 1;
                    Ok(())
                })
                .unwrap();
                count
            })
        });
    }
    group.finish();
}

fn bench_exact_front(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_front");
    for demand in [50u64, 100, 200] {
        let scen = Scenario::builtin_fig2(demand);
        group.bench_with_input(BenchmarkId::from_parameter(demand), &scen, |b, scen| {
            b.iter(|| exact_pareto_front(scen, false).unwrap())
        });
    }
    group.finish();
}

fn bench_ga(c: &mut Criterion) {
    let scen = Scenario::builtin_fig2(100);
    let cfg = GaConfig { max_generations: 10, ..GaConfig::default() };
    c.bench_function("ga_10_generations_d100", |b| {
        b.iter(|| run_ga(&scen, &cfg, ObjectiveKind::Weighted).unwrap())
    });
}

fn bench_pareto_distance(c: &mut Criterion) {
    let scen = Scenario::builtin_fig2(100);
    let front: Vec<ObjectivePoint> = exact_pareto_front(&scen, false)
        .unwrap()
        .iter()
        .map(|fp| fp.point)
        .collect();
    let shifted: Vec<ObjectivePoint> = front
        .iter()
        .map(|p| ObjectivePoint { total_cost: p.total_cost + 1.0, risk_index: p.risk_index })
        .collect();
    let norm = Normalization::for_scenario(&scen);
    c.bench_function("pareto_distance_d100", |b| {
        b.iter(|| pareto_distance(&front, &shifted, norm).unwrap())
    });
}

criterion_group!(benches, bench_enumeration, bench_exact_front, bench_ga, bench_pareto_distance);
criterion_main!(benches);
