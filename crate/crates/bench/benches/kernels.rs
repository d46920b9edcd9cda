use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use bsaks_core::admissible::Admissibility;
use bsaks_core::catalog::lookup;
use bsaks_core::estimate::{asep_upper, sm_delta_upper, window_profile};
use bsaks_core::polytope::{crosspolytope_heuristic, crosspolytope_min, grid_oracle};
use bsaks_core::{norm_exact, rat, CoordIndex, FiniteVector, SpaceDescriptor};

/// Dense overlapping vectors, so the minimizer cannot shortcut.
fn family(d: usize, len: u64) -> Vec<FiniteVector> {
    (0..d as i64)
        .map(|i| {
            let mut v = FiniteVector::zero();
            for j in 1..=len as i64 {
                v.add_at(CoordIndex::flat(j as u64), &rat((i * 7 + j * 3) % 9 - 4, 1 + (i + j) % 3));
            }
            v
        })
        .collect()
}

fn norms(c: &mut Criterion) {
    let v = &family(1, 200)[0];
    let mut g = c.benchmark_group("norm");
    for (name, space) in [("l1", SpaceDescriptor::l1()), ("sup", SpaceDescriptor::Sup), ("schreier", SpaceDescriptor::Schreier)] {
        g.bench_function(name, |b| b.iter(|| norm_exact(black_box(&space), black_box(v)).unwrap()));
    }
    g.finish();
}

fn minimizers(c: &mut Criterion) {
    let mut g = c.benchmark_group("crosspolytope");
    g.sample_size(10);
    for d in [2usize, 4, 6] {
        let vs = family(d, 8);
        for (name, space) in [("l1", SpaceDescriptor::l1()), ("schreier", SpaceDescriptor::Schreier)] {
            g.bench_with_input(BenchmarkId::new(format!("exact-{name}"), d), &vs, |b, vs| {
                b.iter(|| crosspolytope_min(&space, vs).unwrap())
            });
            g.bench_with_input(BenchmarkId::new(format!("heuristic-{name}"), d), &vs, |b, vs| {
                b.iter(|| crosspolytope_heuristic(&space, vs).unwrap())
            });
        }
    }
    let vs = family(3, 8);
    g.bench_function("grid-schreier/3", |b| b.iter(|| grid_oracle(&SpaceDescriptor::Schreier, &vs, &rat(1, 10)).unwrap()));
    g.finish();
}

fn estimators(c: &mut Criterion) {
    let mut g = c.benchmark_group("estimators");
    g.sample_size(10);
    let l1 = lookup("ell1-basis").unwrap();
    for n in [10u64, 14] {
        g.bench_with_input(BenchmarkId::new("asep-ell1", n), &n, |b, &n| {
            b.iter(|| asep_upper(&l1.space, &l1.spec, n, n / 2).unwrap())
        });
    }
    let flip = lookup("c-signflip").unwrap();
    for n in [100u64, 400] {
        g.bench_with_input(BenchmarkId::new("profile-signflip", n), &n, |b, &n| {
            b.iter(|| window_profile(&flip.space, &flip.spec.cesaro(), n).unwrap())
        });
    }
    let c0 = lookup("c0-basis").unwrap();
    let window: Vec<u64> = (1..=10).collect();
    g.bench_function("sm-c0/10", |b| b.iter(|| sm_delta_upper(&c0.space, &c0.spec, &window, Admissibility::Schreier).unwrap()));
    g.finish();
}

criterion_group!(benches, norms, minimizers, estimators);
criterion_main!(benches);
