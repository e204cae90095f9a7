//! Dictionary scans: rayon reduction against the sequential fallback, and
//! the screened two-bounce search against the exhaustive one.
//!
//! Build with `--no-default-features` to time the crate with rayon off.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nfmb_core::channel::{synthesize_channel, NoiseSpec, PathCoefficients, Sounder, WaveformSpec};
use nfmb_core::dictionary::{build_graph, build_grid, Dictionary, EdgeConstraints};
use nfmb_core::estimator::{gm_sage, EstimatorConfig};
use nfmb_core::geometry::{path_geometry, ArraySpec, Pose, Vec3};
use nfmb_core::scene::Aabb;

fn setup(resolution: f64) -> (Sounder, Dictionary, Dictionary) {
    let wf = WaveformSpec::default();
    let pose = |o| Pose::from_axes(o, Vec3::Z, Vec3::X).unwrap();
    let sounder = Sounder::new(
        ArraySpec::half_wavelength(4, wf.carrier_hz, pose(Vec3::new(0.2, -0.6, 0.0))),
        ArraySpec::half_wavelength(4, wf.carrier_hz, pose(Vec3::new(1.8, -0.6, 0.0))),
        wf,
    )
    .unwrap();
    let grid = build_grid(Aabb::new(Vec3::ZERO, Vec3::new(2.0, 2.0, 0.0)), resolution, 1_000_000).unwrap();
    let graph = build_graph(
        &grid,
        EdgeConstraints::default(),
        sounder.tx.reference_position(),
        sounder.rx.reference_position(),
        10_000_000,
    )
    .unwrap();
    let d1 = Dictionary::one_bounce(&grid, &sounder).unwrap();
    let d2 = Dictionary::two_bounce(&grid, &graph, &sounder).unwrap();
    (sounder, d1, d2)
}

fn scene(s: &Sounder) -> nfmb_core::channel::ChannelTensor {
    let (tx, rx) = (s.tx.reference_position(), s.rx.reference_position());
    let paths = [
        (vec![Vec3::new(1.03, 1.21, 0.0)], 1.0),
        (vec![Vec3::new(1.52, 0.47, 0.0), Vec3::new(0.48, 1.02, 0.0)], 0.6),
    ];
    let list: Vec<_> = paths
        .iter()
        .map(|(h, a)| (path_geometry(tx, rx, h).unwrap(), PathCoefficients::new(*a, 0.3, 0.0)))
        .collect();
    synthesize_channel(&list, s, Some(NoiseSpec { snr_db: 20.0, seed: 1 })).unwrap()
}

fn scans(c: &mut Criterion) {
    let mut g = c.benchmark_group("scan");
    g.sample_size(10);
    for res in [0.2, 0.1] {
        let (s, d1, d2) = setup(res);
        let z = scene(&s);
        let label = |d: &Dictionary| format!("k{}_{}atoms", d.order(), d.len());
        for d in [&d1, &d2] {
            g.bench_with_input(BenchmarkId::new("parallel", label(d)), d, |b, d| {
                b.iter(|| d.best_match_exhaustive(black_box(&z.data)).unwrap())
            });
            g.bench_with_input(BenchmarkId::new("sequential", label(d)), d, |b, d| {
                b.iter(|| d.best_match_sequential(black_box(&z.data)).unwrap())
            });
        }
        g.bench_with_input(BenchmarkId::new("screened", label(&d2)), &d2, |b, d| {
            b.iter(|| d.best_match(black_box(&z.data)).unwrap())
        });
    }
    g.finish();
}

fn estimate(c: &mut Criterion) {
    let mut g = c.benchmark_group("gm_sage");
    g.sample_size(10);
    let (s, d1, d2) = setup(0.1);
    let z = scene(&s);
    let cfg = EstimatorConfig::default();
    g.bench_function("two_paths_20dB", |b| {
        b.iter(|| gm_sage(black_box(&z), &d1, Some(&d2), &cfg).unwrap())
    });
    g.finish();
}

criterion_group!(benches, scans, estimate);
criterion_main!(benches);
