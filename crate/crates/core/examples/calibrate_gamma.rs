//! Monte Carlo calibration of the detection threshold.
//!
//! Draws pure white-noise channels and records, for each draw, the largest
//! ratio `|<psi, n>|^2 / ||n||^2` over the one- and two-bounce
//! dictionaries. A threshold above the 95th percentile of that statistic
//! makes the estimator report nothing on noise in at least 95% of runs.
//!
//! ```text
//! cargo run --release -p nfmb-core --example calibrate_gamma -- [side] [seeds]
//! ```

use nfmb_core::channel::{energy, Sounder, WaveformSpec};
use nfmb_core::dictionary::{build_graph, build_grid, Dictionary, EdgeConstraints};
use nfmb_core::estimator::EstimatorConfig;
use nfmb_core::geometry::{ArraySpec, Pose, Vec3};
use nfmb_core::scene::Aabb;
use nfmb_core::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn main() -> nfmb_core::Result<()> {
    let mut args = std::env::args().skip(1);
    let side: usize = args.next().map_or(4, |a| a.parse().expect("array side"));
    let seeds: u64 = args.next().map_or(100, |a| a.parse().expect("seed count"));

    let wf = WaveformSpec::default();
    let pose = |o| Pose::from_axes(o, Vec3::Z, Vec3::X).expect("orthonormal axes");
    let sounder = Sounder::new(
        ArraySpec::half_wavelength(side, wf.carrier_hz, pose(Vec3::new(0.2, -0.6, 0.0))),
        ArraySpec::half_wavelength(side, wf.carrier_hz, pose(Vec3::new(1.8, -0.6, 0.0))),
        wf,
    )?;
    let grid = build_grid(Aabb::new(Vec3::ZERO, Vec3::new(2.0, 2.0, 0.0)), 0.1, 1_000_000)?;
    let graph = build_graph(
        &grid,
        EdgeConstraints::default(),
        sounder.tx.reference_position(),
        sounder.rx.reference_position(),
        10_000_000,
    )?;
    let d1 = Dictionary::one_bounce(&grid, &sounder)?;
    let d2 = Dictionary::two_bounce(&grid, &graph, &sounder)?;
    let len = sounder.dims().len();
    println!(
        "{side}x{side} arrays, {len} entries, {} + {} atoms, {seeds} seeds",
        d1.len(),
        d2.len()
    );

    let mut stats = Vec::with_capacity(seeds as usize);
    for seed in 0..seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise: Vec<Complex64> = (0..len)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im)
            })
            .collect();
        let e = energy(&noise);
        let m1 = d1.best_match(&noise)?.energy;
        let m2 = d2.best_match(&noise)?.energy;
        stats.push(m1.max(m2) / e);
    }
    stats.sort_by(f64::total_cmp);
    let q = |p: f64| stats[((p * stats.len() as f64).ceil() as usize).clamp(1, stats.len()) - 1];
    let gamma = EstimatorConfig::default().gamma;
    let quiet = stats.iter().filter(|&&s| s < gamma).count();
    println!("max match ratio: median {:.3e}, p95 {:.3e}, p99 {:.3e}, max {:.3e}", q(0.5), q(0.95), q(0.99), q(1.0));
    println!(
        "default gamma {gamma}: no detection in {quiet}/{} runs ({:.1}x the p95)",
        stats.len(),
        gamma / q(0.95)
    );
    Ok(())
}
