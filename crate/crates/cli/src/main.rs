//! `nfmb`: scene generation, channel synthesis, estimation and scoring.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use nfmb_core::channel::{synthesize_channel, ChannelTensor, NoiseSpec, Sounder, WaveformSpec};
use nfmb_core::dictionary::{
    build_graph, build_grid, Dictionary, EdgeConstraints, DEFAULT_EDGE_CAP, DEFAULT_VERTEX_CAP,
};
use nfmb_core::estimator::{gm_sage, one_bounce_baseline, DetectedPath, EstimateReport, EstimatorConfig};
use nfmb_core::geometry::Vec3;
use nfmb_core::io::{load_estimates, load_tensor, save_estimates, save_tensor, write_atomic};
use nfmb_core::metrics::{evaluate, truth_positions};
use nfmb_core::scene::{demo_scene, image_method_paths, load_scene, save_scene, scatterer_chain_paths, Aabb};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct GridConfig {
    min: Vec3,
    max: Vec3,
    resolution: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            min: Vec3::ZERO,
            max: Vec3::new(2.0, 2.0, 0.0),
            resolution: 0.1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Outputs {
    tensor: Option<PathBuf>,
    estimates: Option<PathBuf>,
    report: Option<PathBuf>,
    metrics: Option<PathBuf>,
}

/// Run configuration file. Every field is optional; relative paths are
/// taken from the directory holding the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RunConfig {
    scene: Option<PathBuf>,
    waveform: WaveformSpec,
    /// Highest bounce order synthesized, for walls and scatterer chains.
    max_bounce: usize,
    /// Include specular wall paths when synthesizing.
    walls: bool,
    grid: GridConfig,
    edges: EdgeConstraints,
    estimator: EstimatorConfig,
    snr_db: Option<f64>,
    seed: Option<u64>,
    match_radius: f64,
    outputs: Outputs,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scene: None,
            waveform: WaveformSpec::default(),
            max_bounce: 2,
            walls: true,
            grid: GridConfig::default(),
            edges: EdgeConstraints::default(),
            estimator: EstimatorConfig::default(),
            snr_db: None,
            seed: None,
            match_radius: 0.15,
            outputs: Outputs::default(),
        }
    }
}

impl RunConfig {
    fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut Option<PathBuf>| {
            if let Some(q) = p.as_mut().filter(|q| q.is_relative()) {
                *q = base.join(&*q);
            }
        };
        rebase(&mut cfg.scene);
        rebase(&mut cfg.outputs.tensor);
        rebase(&mut cfg.outputs.estimates);
        rebase(&mut cfg.outputs.report);
        rebase(&mut cfg.outputs.metrics);
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        self.waveform.validate().context("waveform")?;
        self.edges.validate().context("edges")?;
        self.estimator.validate()?;
        if !(1..=3).contains(&self.max_bounce) {
            bail!("max_bounce must be 1, 2 or 3");
        }
        if !(self.grid.resolution > 0.0 && self.grid.resolution.is_finite()) {
            bail!("grid.resolution must be positive");
        }
        if !Aabb::new(self.grid.min, self.grid.max).is_valid() {
            bail!("grid.min must not exceed grid.max");
        }
        if let Some(snr) = self.snr_db {
            if !snr.is_finite() {
                bail!("snr_db must be finite");
            }
            if self.seed.is_none() {
                bail!("seed is required when snr_db is set");
            }
        }
        if !(self.match_radius > 0.0 && self.match_radius.is_finite()) {
            bail!("match_radius must be positive");
        }
        Ok(())
    }
}

#[derive(Parser)]
#[command(name = "nfmb", version, about = "Near-field multi-bounce channel synthesis and scatterer estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the demo office scene.
    SceneDemo {
        #[arg(long)]
        out: PathBuf,
    },
    /// Synthesize a channel tensor from a scene.
    Synth(SynthArgs),
    /// Multi-bounce estimation.
    Estimate(EstimateArgs),
    /// One-bounce-only estimation.
    Baseline(EstimateArgs),
    /// Score estimates against a scene's scatterers.
    Evaluate(EvaluateArgs),
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scene: Option<PathBuf>,
    /// Tensor output; the metadata goes to `<out>.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Ignore any configured SNR.
    #[arg(long, conflicts_with = "snr_db")]
    noiseless: bool,
    #[arg(long)]
    max_bounce: Option<usize>,
    /// Leave out specular wall paths.
    #[arg(long)]
    no_walls: bool,
    #[arg(long)]
    subbands: Option<usize>,
    #[arg(long)]
    frames: Option<usize>,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tensor: Option<PathBuf>,
    /// Estimates CSV output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report JSON output.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    resolution: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    max_paths: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    estimates: Option<PathBuf>,
    #[arg(long)]
    scene: Option<PathBuf>,
    #[arg(long)]
    radius: Option<f64>,
    /// Metrics JSON output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn required(p: Option<PathBuf>, what: &str) -> Result<PathBuf> {
    p.with_context(|| format!("no {what} given (flag or config)"))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes()).with_context(|| format!("writing {}", path.display()))
}

fn existing(path: &Path, what: &str) -> Result<()> {
    if !path.is_file() {
        bail!("{what} {} does not exist", path.display());
    }
    Ok(())
}

fn synth(a: SynthArgs) -> Result<()> {
    let mut cfg = RunConfig::load(a.config.as_deref())?;
    cfg.scene = a.scene.or(cfg.scene);
    cfg.outputs.tensor = a.out.or(cfg.outputs.tensor);
    cfg.snr_db = if a.noiseless { None } else { a.snr_db.or(cfg.snr_db) };
    cfg.seed = a.seed.or(cfg.seed);
    cfg.max_bounce = a.max_bounce.unwrap_or(cfg.max_bounce);
    cfg.walls &= !a.no_walls;
    cfg.waveform.subbands = a.subbands.unwrap_or(cfg.waveform.subbands);
    cfg.waveform.frames = a.frames.unwrap_or(cfg.waveform.frames);
    cfg.validate()?;
    let scene_path = required(cfg.scene, "scene")?;
    let out = required(cfg.outputs.tensor, "tensor output")?;
    existing(&scene_path, "scene")?;

    let scene = load_scene(&scene_path)?;
    let sounder = Sounder::new(scene.tx_array.clone(), scene.rx_array.clone(), cfg.waveform)?;
    let mut paths = scatterer_chain_paths(&scene, cfg.max_bounce)?;
    if cfg.walls {
        paths.extend(image_method_paths(&scene, cfg.max_bounce)?);
    }
    let list: Vec<_> = paths.into_iter().map(|p| (p.geometry, p.coefficients)).collect();
    let noise = cfg.snr_db.map(|snr_db| NoiseSpec {
        snr_db,
        seed: cfg.seed.expect("validated"),
    });
    let tensor = synthesize_channel(&list, &sounder, noise)?;
    save_tensor(&tensor, &out)?;
    eprintln!(
        "{} paths, {} entries, energy {:.6e} -> {}",
        list.len(),
        tensor.data.len(),
        tensor.energy(),
        out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct ReportFile<'a> {
    estimator: &'static str,
    iterations: usize,
    input_energy: f64,
    residual_energy: f64,
    noise_floor: f64,
    residual_trace: &'a [f64],
    detected: &'a [DetectedPath],
    config: &'a EstimatorConfig,
}

fn estimate(a: EstimateArgs, baseline: bool) -> Result<()> {
    let mut cfg = RunConfig::load(a.config.as_deref())?;
    cfg.outputs.tensor = a.tensor.or(cfg.outputs.tensor);
    cfg.outputs.estimates = a.out.or(cfg.outputs.estimates);
    cfg.outputs.report = a.report.or(cfg.outputs.report);
    cfg.grid.resolution = a.resolution.unwrap_or(cfg.grid.resolution);
    cfg.estimator.gamma = a.gamma.unwrap_or(cfg.estimator.gamma);
    cfg.estimator.max_paths = a.max_paths.unwrap_or(cfg.estimator.max_paths);
    cfg.estimator.max_iters = a.max_iters.unwrap_or(cfg.estimator.max_iters);
    cfg.validate()?;
    let tensor_path = required(cfg.outputs.tensor, "tensor")?;
    let out = required(cfg.outputs.estimates, "estimates output")?;
    existing(&tensor_path, "tensor")?;

    let z = load_tensor(&tensor_path).with_context(|| format!("loading {}", tensor_path.display()))?;
    let sounder = Sounder::new(z.meta.tx_array.clone(), z.meta.rx_array.clone(), z.meta.waveform.clone())?;
    let mut est = cfg.estimator.clone();
    if est.noise_floor == 0.0 {
        // expected noise energy when the tensor records it
        est.noise_floor = z.meta.noise_variance * z.data.len() as f64;
    }
    let grid = build_grid(Aabb::new(cfg.grid.min, cfg.grid.max), cfg.grid.resolution, DEFAULT_VERTEX_CAP)?;
    let d1 = Dictionary::one_bounce(&grid, &sounder)?;
    let report = if baseline {
        one_bounce_baseline(&z, &d1, &est)?
    } else {
        let d2 = if est.max_order >= 2 {
            let graph = build_graph(
                &grid,
                cfg.edges,
                sounder.tx.reference_position(),
                sounder.rx.reference_position(),
                DEFAULT_EDGE_CAP,
            )?;
            Some(Dictionary::two_bounce(&grid, &graph, &sounder)?)
        } else {
            None
        };
        gm_sage(&z, &d1, d2.as_ref(), &est)?
    };
    save_estimates(&report.detected, &out)?;
    if let Some(path) = cfg.outputs.report {
        write_json(&report_file(&report, &z, &est, baseline), &path)?;
    }
    eprintln!(
        "{} paths in {} iterations, residual {:.3e} of {:.3e} -> {}",
        report.detected.len(),
        report.iterations,
        report.residual_energy(),
        z.energy(),
        out.display()
    );
    Ok(())
}

fn report_file<'a>(r: &'a EstimateReport, z: &ChannelTensor, cfg: &'a EstimatorConfig, baseline: bool) -> ReportFile<'a> {
    ReportFile {
        estimator: if baseline { "one-bounce-baseline" } else { "gm-sage" },
        iterations: r.iterations,
        input_energy: z.energy(),
        residual_energy: r.residual_energy(),
        noise_floor: cfg.noise_floor,
        residual_trace: &r.residual_trace,
        detected: &r.detected,
        config: cfg,
    }
}

fn eval(a: EvaluateArgs) -> Result<()> {
    let mut cfg = RunConfig::load(a.config.as_deref())?;
    cfg.outputs.estimates = a.estimates.or(cfg.outputs.estimates);
    cfg.scene = a.scene.or(cfg.scene);
    cfg.match_radius = a.radius.unwrap_or(cfg.match_radius);
    cfg.outputs.metrics = a.out.or(cfg.outputs.metrics);
    cfg.validate()?;
    let est_path = required(cfg.outputs.estimates, "estimates")?;
    let scene_path = required(cfg.scene, "scene")?;
    let out = required(cfg.outputs.metrics, "metrics output")?;
    existing(&est_path, "estimates")?;
    existing(&scene_path, "scene")?;

    let detected = load_estimates(&est_path)?;
    let scene = load_scene(&scene_path)?;
    let m = evaluate(&detected, &truth_positions(&scene), cfg.match_radius)?;
    write_json(&m, &out)?;
    eprintln!(
        "tp {} ghosts {} duplicates {} missed {} -> {}",
        m.true_positives,
        m.ghosts,
        m.duplicates,
        m.missed,
        out.display()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::SceneDemo { out } => Ok(save_scene(&demo_scene(), &out)?),
        Command::Synth(a) => synth(a),
        Command::Estimate(a) => estimate(a, false),
        Command::Baseline(a) => estimate(a, true),
        Command::Evaluate(a) => eval(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let mismatch = e
                .chain()
                .any(|c| matches!(c.downcast_ref(), Some(nfmb_core::Error::DimensionMismatch(_))));
            ExitCode::from(if mismatch { 2 } else { 1 })
        }
    }
}
