//! Throughput benches for the hot paths. Run once with the default
//! `parallel` feature and once with `--no-default-features` to compare the
//! data-parallel core against the sequential fallback.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use nalgebra::DVector;

use conevol::geom::Polytope;
use conevol::isotropic::{self, IsotropyOptions};
use conevol::measure::cone_volume_measure_with;
use conevol::{corpus, metrics, scc, sections, transforms};
use conevol::{Subspace, Tolerances};

const TOL: Tolerances = Tolerances::DEFAULT;

fn batch(dim: usize, count: usize) -> Vec<Polytope> {
    corpus::random_bodies(dim, count, 0xBE7C, &TOL)
        .unwrap()
        .into_iter()
        .map(|e| e.body)
        .collect()
}

fn bench_hull(c: &mut Criterion) {
    let bodies = batch(4, 16);
    let points: Vec<Vec<DVector<f64>>> = bodies
        .iter()
        .map(|b| b.vertices().to_vec())
        .collect();
    c.bench_function("hull_batch_r4", |b| {
        b.iter_batched(
            || points.clone(),
            |sets| {
                for pts in sets {
                    Polytope::from_points(4, pts).unwrap();
                }
            },
            BatchSize::SmallInput,
        )
    });
}

fn bench_concentration(c: &mut Criterion) {
    let bodies = batch(3, 64);
    c.bench_function("check_scc_batch_r3", |b| {
        b.iter(|| {
            for body in &bodies {
                let mu = cone_volume_measure_with(body, &TOL).unwrap();
                scc::check_concentration(&mu, &TOL).unwrap();
            }
        })
    });
}

fn bench_isotropize(c: &mut Criterion) {
    let measures: Vec<_> = batch(3, 16)
        .iter()
        .map(|body| cone_volume_measure_with(body, &TOL).unwrap())
        .collect();
    let opts = IsotropyOptions::default();
    c.bench_function("isotropize_batch_r3", |b| {
        b.iter(|| {
            for mu in &measures {
                let _ = isotropic::isotropize(mu, &opts, &TOL);
            }
        })
    });
}

fn bench_profile(c: &mut Criterion) {
    let body = batch(3, 1).remove(0);
    let plane = Subspace::from_spanning(
        3,
        &[
            DVector::from_column_slice(&[1.0, 0.0, 0.0]),
            DVector::from_column_slice(&[0.0, 1.0, 0.0]),
        ],
        &TOL,
    )
    .unwrap();
    c.bench_function("section_profile_r3_d2_res101", |b| {
        b.iter(|| sections::build_profile(&body, &plane, 101, &TOL).unwrap())
    });
}

fn bench_symmetric_difference(c: &mut Criterion) {
    let bodies = batch(3, 8);
    c.bench_function("symmdiff_pairs_r3", |b| {
        b.iter(|| {
            for pair in bodies.chunks_exact(2) {
                metrics::symmetric_difference_volume(&pair[0], &pair[1]).unwrap();
            }
        })
    });
}

fn bench_hemisphere(c: &mut Criterion) {
    let body = batch(3, 1).remove(0);
    c.bench_function("hemisphere_scan_r3", |b| {
        b.iter(|| transforms::hemisphere_scan(&body, 64, 3, &TOL).unwrap())
    });
}

criterion_group!(
    benches,
    bench_hull,
    bench_concentration,
    bench_isotropize,
    bench_profile,
    bench_symmetric_difference,
    bench_hemisphere
);
criterion_main!(benches);
