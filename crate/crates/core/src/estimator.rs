//! Graph-dictionary multi-bounce SAGE.
//!
//! The channel is modelled as `z = psi1(theta1) + psi2(theta2) + h2`, where
//! `psi1`, `psi2` are sums of one- and two-bounce dictionary atoms and `h2`
//! is a non-parametric remainder that absorbs every higher-order path.
//! Each outer iteration re-estimates the one-bounce tracks against
//! `z - psi2 - h2`, then the two-bounce tracks against `z - psi1 - h2`, then
//! detects new paths by letting both dictionaries compete for the
//! remainder. Re-estimation starts from the current fit (the global
//! residual plus the track being refined), which is what keeps the
//! alternation from stalling at its initial point.
//!
//! The one-bounce baseline fits the whole channel with one-bounce atoms and
//! therefore explains two-bounce energy with ghost scatterers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{energy, ChannelTensor};
use crate::dictionary::{DictionaryAtom, Dictionary, Match};
use crate::error::{invalid, Error, Result};
use crate::geometry::Vec3;

/// Residual norms below this fraction of `||z||` count as an exact fit.
const EXACT_FIT: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Highest bounce order in the model. Orders above two are never fitted
    /// and end up in the remainder.
    pub max_order: usize,
    /// Cap on detected paths per bounce order.
    pub max_paths: usize,
    /// A candidate is accepted while its match energy is at least `gamma`
    /// times the current residual energy.
    pub gamma: f64,
    pub max_iters: usize,
    /// Stop when the remainder norm changes by less than this fraction.
    pub eps: f64,
    /// Re-estimation sweeps per pass.
    pub refine_cycles: usize,
    /// Candidate radial velocities (m/s) tried for each detected path.
    #[serde(default)]
    pub doppler_grid: Vec<f64>,
    /// Absolute residual energy below which detection stops.
    #[serde(default)]
    pub noise_floor: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            max_order: 3,
            max_paths: 6,
            gamma: 0.02,
            max_iters: 10,
            eps: 1e-6,
            refine_cycles: 2,
            doppler_grid: Vec::new(),
            noise_floor: 0.0,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(invalid("estimator.gamma must lie in (0, 1)"));
        }
        if self.max_iters == 0 {
            return Err(invalid("estimator.max_iters must be at least 1"));
        }
        if self.max_order == 0 {
            return Err(invalid("estimator.max_order must be at least 1"));
        }
        if !(self.eps >= 0.0) || !(self.noise_floor >= 0.0) {
            return Err(invalid("estimator.eps and estimator.noise_floor must be non-negative"));
        }
        if self.doppler_grid.iter().any(|v| !v.is_finite()) {
            return Err(invalid("estimator.doppler_grid must be finite"));
        }
        Ok(())
    }

    fn fitted_orders(&self) -> usize {
        self.max_order.min(2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectedPath {
    pub order: usize,
    /// Grid vertex ids; empty when the path was read back from a file.
    pub vertex_ids: Vec<usize>,
    pub positions: Vec<Vec3>,
    /// Coefficient on the unit-norm atom.
    #[serde(with = "crate::scene::complex_json")]
    pub coefficient: Complex64,
    /// Path gain `alpha e^{j phi}` in channel units.
    #[serde(with = "crate::scene::complex_json")]
    pub amplitude: Complex64,
    pub velocity: f64,
    /// Energy the path removes from the residual, `|coefficient|^2`.
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub detected: Vec<DetectedPath>,
    /// Residual norm after every accepted step, starting with `||z||`.
    pub residual_trace: Vec<f64>,
    /// Higher-bounce remainder `z - psi1 - psi2`.
    pub residual_channel: Vec<Complex64>,
    pub iterations: usize,
    pub baseline: bool,
}

impl EstimateReport {
    pub fn residual_energy(&self) -> f64 {
        energy(&self.residual_channel)
    }
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn axpy(r: &mut [Complex64], c: Complex64, s: &[Complex64]) {
    for (x, y) in r.iter_mut().zip(s) {
        *x += c * y;
    }
}

/// Exhaustive match of `residual` against a stream of unit-norm atoms:
/// the atom maximizing `|<psi, residual>|^2`, lowest position on ties.
pub fn match_atom<I>(residual: &[Complex64], atoms: I) -> Result<Match>
where
    I: IntoIterator<Item = Result<DictionaryAtom>>,
{
    if energy(residual) == 0.0 {
        return Err(invalid("cannot match a zero residual"));
    }
    let mut best: Option<Match> = None;
    for (id, atom) in atoms.into_iter().enumerate() {
        let atom = atom?;
        if atom.signature.len() != residual.len() {
            return Err(Error::DimensionMismatch(format!(
                "atom {id} has {} entries, residual {}",
                atom.signature.len(),
                residual.len()
            )));
        }
        let a = inner(&atom.signature, residual);
        let e = a.norm_sqr();
        if best.is_none_or(|b| e > b.energy) {
            best = Some(Match { id, amplitude: a, energy: e });
        }
    }
    best.ok_or(Error::EmptyDictionary)
}

#[derive(Debug, Clone)]
struct Track {
    order: usize,
    id: usize,
    velocity: f64,
    sig: Vec<Complex64>,
    raw_norm: f64,
    coef: Complex64,
}

impl Track {
    fn report(&self, dict: &Dictionary) -> DetectedPath {
        DetectedPath {
            order: self.order,
            vertex_ids: dict.vertex_ids(self.id),
            positions: dict.positions(self.id),
            coefficient: self.coef,
            amplitude: self.coef / self.raw_norm,
            velocity: self.velocity,
            energy: self.coef.norm_sqr(),
        }
    }
}

/// Best velocity for atom `id` against `y`, among static and the grid.
fn velocity_fit(dict: &Dictionary, id: usize, y: &[Complex64], grid: &[f64]) -> Result<Track> {
    let mut best: Option<Track> = None;
    for v in std::iter::once(0.0).chain(grid.iter().copied()) {
        let (sig, raw_norm) = dict.signature(id, v)?;
        let coef = inner(&sig, y);
        if best.as_ref().is_none_or(|b| coef.norm_sqr() > b.coef.norm_sqr()) {
            best = Some(Track {
                order: dict.order(),
                id,
                velocity: v,
                sig,
                raw_norm,
                coef,
            });
        }
    }
    Ok(best.expect("static candidate always present"))
}

/// Working state of one estimation run.
struct Fit<'a> {
    cfg: &'a EstimatorConfig,
    residual: Vec<Complex64>,
    trace: Vec<f64>,
    floor: f64,
    tracks: Vec<Track>,
}

impl<'a> Fit<'a> {
    fn new(cfg: &'a EstimatorConfig, residual: Vec<Complex64>, floor: f64) -> Self {
        let mut fit = Self {
            cfg,
            residual,
            trace: Vec::new(),
            floor,
            tracks: Vec::new(),
        };
        fit.record();
        fit
    }

    fn record(&mut self) {
        self.trace.push(energy(&self.residual).sqrt());
    }

    fn residual_energy(&self) -> f64 {
        energy(&self.residual)
    }

    fn count(&self, order: usize) -> usize {
        self.tracks.iter().filter(|t| t.order == order).count()
    }

    /// Best candidate from `dict` passing the threshold, if any.
    fn candidate(&self, dict: &Dictionary) -> Result<Option<Track>> {
        let r = self.residual_energy();
        if dict.is_empty() || r <= self.floor {
            return Ok(None);
        }
        let m = dict.best_match(&self.residual)?;
        if m.energy < self.cfg.gamma * r {
            return Ok(None);
        }
        velocity_fit(dict, m.id, &self.residual, &self.cfg.doppler_grid).map(Some)
    }

    /// Successive detection and cancellation. Each round takes the
    /// strongest candidate over `dicts` (earlier dictionaries win ties),
    /// skipping dictionaries whose order already holds `cap` paths. A
    /// candidate that repeats an existing track means the coefficients are
    /// stale: they are re-fitted once, and detection ends if it repeats
    /// again. Returns the number of new tracks.
    fn detect(&mut self, dicts: &[&Dictionary], cap: usize) -> Result<usize> {
        let mut added = 0;
        let mut refitted = false;
        loop {
            let mut best: Option<Track> = None;
            for d in dicts {
                if self.count(d.order()) >= cap {
                    continue;
                }
                if let Some(c) = self.candidate(d)? {
                    if best.as_ref().is_none_or(|b| c.coef.norm_sqr() > b.coef.norm_sqr()) {
                        best = Some(c);
                    }
                }
            }
            let Some(t) = best else { break };
            let repeat = self
                .tracks
                .iter()
                .any(|o| o.order == t.order && o.id == t.id && o.velocity == t.velocity);
            if repeat {
                if refitted {
                    break;
                }
                self.joint_ls(|_| true);
                refitted = true;
                continue;
            }
            self.subtract(&t);
            self.tracks.push(t);
            added += 1;
            refitted = false;
        }
        Ok(added)
    }

    fn subtract(&mut self, t: &Track) {
        axpy(&mut self.residual, -t.coef, &t.sig);
        self.record();
    }

    /// One re-estimation sweep over the tracks of `dict`'s order: each is
    /// added back, re-matched over the whole dictionary and re-subtracted.
    /// Returns whether any track moved to another atom or velocity.
    fn refine(&mut self, dict: &Dictionary) -> Result<bool> {
        let mut moved = false;
        for i in 0..self.tracks.len() {
            if self.tracks[i].order != dict.order() {
                continue;
            }
            let t = &self.tracks[i];
            axpy(&mut self.residual, t.coef, &t.sig);
            let m = dict.best_match(&self.residual)?;
            let mut next = velocity_fit(dict, m.id, &self.residual, &self.cfg.doppler_grid)?;
            // the current atom stays a candidate so the fit cannot get worse
            let keep = inner(&t.sig, &self.residual);
            if keep.norm_sqr() >= next.coef.norm_sqr() {
                next = Track { coef: keep, ..t.clone() };
            } else {
                moved = true;
            }
            self.subtract(&next);
            self.tracks[i] = next;
        }
        self.merge_duplicates();
        Ok(moved)
    }

    /// Up to `refine_cycles` sweeps, stopping after one that moved nothing;
    /// further sweeps would only nudge coefficients the joint fit replaces.
    fn refine_all(&mut self, dict: &Dictionary) -> Result<()> {
        for _ in 0..self.cfg.refine_cycles {
            if !self.tracks.iter().any(|t| t.order == dict.order()) || !self.refine(dict)? {
                break;
            }
        }
        Ok(())
    }

    /// Two tracks on the same atom collapse into one; the residual is
    /// unchanged.
    fn merge_duplicates(&mut self) {
        let mut out: Vec<Track> = Vec::with_capacity(self.tracks.len());
        for t in self.tracks.drain(..) {
            match out
                .iter_mut()
                .find(|o| o.order == t.order && o.id == t.id && o.velocity == t.velocity)
            {
                Some(o) => o.coef += t.coef,
                None => out.push(t),
            }
        }
        self.tracks = out;
    }

    /// Joint least-squares re-fit of the coefficients of the selected
    /// tracks, kept only if the residual does not grow.
    fn joint_ls(&mut self, select: impl Fn(&Track) -> bool) {
        let idx: Vec<usize> = (0..self.tracks.len()).filter(|&i| select(&self.tracks[i])).collect();
        let k = idx.len();
        if k == 0 {
            return;
        }
        let tr = &self.tracks;
        let mut y = self.residual.clone();
        for &i in &idx {
            axpy(&mut y, tr[i].coef, &tr[i].sig);
        }
        let gram = DMatrix::from_fn(k, k, |a, b| inner(&tr[idx[a]].sig, &tr[idx[b]].sig));
        let rhs = DVector::from_fn(k, |a, _| inner(&tr[idx[a]].sig, &y));
        let Ok(coef) = gram.svd(true, true).solve(&rhs, 1e-10) else {
            return;
        };
        let mut next = y;
        for (&i, c) in idx.iter().zip(coef.iter()) {
            axpy(&mut next, -c, &tr[i].sig);
        }
        if energy(&next) <= self.residual_energy() {
            for (&i, c) in idx.iter().zip(coef.iter()) {
                self.tracks[i].coef = *c;
            }
            self.residual = next;
            self.record();
        }
    }

    /// Detection over one dictionary, then re-estimation sweeps and a
    /// joint re-fit.
    fn pass(&mut self, dict: &Dictionary, max_paths: usize) -> Result<()> {
        self.detect(&[dict], max_paths)?;
        self.refine_all(dict)?;
        self.joint_ls(|_| true);
        Ok(())
    }

    fn report(&self, dict1: &Dictionary, dict2: Option<&Dictionary>) -> Vec<DetectedPath> {
        let mut tracks: Vec<&Track> = self.tracks.iter().collect();
        tracks.sort_by_key(|t| t.order);
        tracks
            .into_iter()
            .map(|t| match (t.order, dict2) {
                (2, Some(d2)) => t.report(d2),
                _ => t.report(dict1),
            })
            .collect()
    }
}

/// Result of a single-dictionary pass.
#[derive(Debug, Clone, PartialEq)]
pub struct PassResult {
    pub detected: Vec<DetectedPath>,
    pub residual_trace: Vec<f64>,
}

/// Successive detection and cancellation over one dictionary, followed by
/// `refine_cycles` re-estimation sweeps and a joint amplitude re-fit.
/// `residual` is updated in place.
pub fn sage_pass(
    residual: &mut Vec<Complex64>,
    dict: &Dictionary,
    cfg: &EstimatorConfig,
    noise_floor: f64,
) -> Result<PassResult> {
    cfg.validate()?;
    check_len(residual.len(), dict)?;
    let mut fit = Fit::new(cfg, std::mem::take(residual), noise_floor.max(cfg.noise_floor));
    fit.pass(dict, cfg.max_paths)?;
    let detected = fit.tracks.iter().map(|t| t.report(dict)).collect();
    *residual = fit.residual;
    Ok(PassResult {
        detected,
        residual_trace: fit.trace,
    })
}

fn check_len(len: usize, dict: &Dictionary) -> Result<()> {
    if len != dict.dims().len() {
        return Err(Error::DimensionMismatch(format!(
            "channel has {len} entries, dictionary expects {} ({:?})",
            dict.dims().len(),
            dict.dims()
        )));
    }
    Ok(())
}

fn check_tensor(z: &ChannelTensor, dict: &Dictionary) -> Result<()> {
    if z.dims != dict.dims() {
        return Err(Error::DimensionMismatch(format!(
            "tensor dimensions {:?} do not match dictionary {:?}",
            z.dims,
            dict.dims()
        )));
    }
    z.validate()
}

fn exact_floor(cfg: &EstimatorConfig, z_energy: f64) -> f64 {
    cfg.noise_floor.max(EXACT_FIT * EXACT_FIT * z_energy)
}

/// Multi-bounce estimation with one- and two-bounce dictionaries.
pub fn gm_sage(
    z: &ChannelTensor,
    dict1: &Dictionary,
    dict2: Option<&Dictionary>,
    cfg: &EstimatorConfig,
) -> Result<EstimateReport> {
    cfg.validate()?;
    check_tensor(z, dict1)?;
    if dict1.order() != 1 {
        return Err(invalid("first dictionary must hold one-bounce atoms"));
    }
    if let Some(d) = dict2 {
        check_tensor(z, d)?;
        if d.order() != 2 {
            return Err(invalid("second dictionary must hold two-bounce atoms"));
        }
    }
    let dict2 = dict2.filter(|_| cfg.fitted_orders() >= 2);
    let dicts: Vec<&Dictionary> = std::iter::once(dict1).chain(dict2).collect();
    let z_energy = z.energy();
    let mut fit = Fit::new(cfg, z.data.clone(), exact_floor(cfg, z_energy));
    let mut iterations = 0;
    if z_energy > 0.0 {
        let mut prev = z_energy.sqrt();
        for _ in 0..cfg.max_iters {
            iterations += 1;
            for d in &dicts {
                fit.refine_all(d)?;
                let order = d.order();
                fit.joint_ls(|t| t.order == order);
            }
            let added = fit.detect(&dicts, cfg.max_paths)?;
            fit.joint_ls(|_| true);
            let now = fit.residual_energy().sqrt();
            if now * now <= fit.floor || (added == 0 && prev - now <= cfg.eps * prev) {
                break;
            }
            prev = now;
        }
    }
    Ok(EstimateReport {
        detected: fit.report(dict1, dict2),
        residual_trace: fit.trace,
        residual_channel: fit.residual,
        iterations,
        baseline: false,
    })
}

/// Fits the whole channel with one-bounce atoms only, allowing as many
/// paths as the multi-bounce model has across its fitted orders.
pub fn one_bounce_baseline(z: &ChannelTensor, dict1: &Dictionary, cfg: &EstimatorConfig) -> Result<EstimateReport> {
    cfg.validate()?;
    check_tensor(z, dict1)?;
    if dict1.order() != 1 {
        return Err(invalid("baseline needs a one-bounce dictionary"));
    }
    let z_energy = z.energy();
    let mut fit = Fit::new(cfg, z.data.clone(), exact_floor(cfg, z_energy));
    let mut iterations = 0;
    if z_energy > 0.0 {
        iterations = 1;
        fit.pass(dict1, cfg.max_paths * cfg.fitted_orders())?;
    }
    Ok(EstimateReport {
        detected: fit.report(dict1, None),
        residual_trace: fit.trace,
        residual_channel: fit.residual,
        iterations,
        baseline: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{synthesize_channel, PathCoefficients, Sounder, WaveformSpec};
    use crate::dictionary::{build_graph, build_grid, EdgeConstraints};
    use crate::geometry::{path_geometry, ArraySpec, Pose};
    use crate::scene::Aabb;

    struct Setup {
        sounder: Sounder,
        d1: Dictionary,
        d2: Dictionary,
    }

    fn setup() -> Setup {
        let wf = WaveformSpec {
            subbands: 16,
            frames: 2,
            ..WaveformSpec::default()
        };
        let pose = |o| Pose::from_axes(o, Vec3::Z, Vec3::X).unwrap();
        let sounder = Sounder::new(
            ArraySpec::half_wavelength(3, wf.carrier_hz, pose(Vec3::new(0.2, -0.6, 0.0))),
            ArraySpec::half_wavelength(3, wf.carrier_hz, pose(Vec3::new(1.8, -0.6, 0.0))),
            wf,
        )
        .unwrap();
        let b = Aabb::new(Vec3::new(0.0, 0.0, 0.0), Vec3::new(2.0, 1.0, 0.0));
        let grid = build_grid(b, 0.25, 1000).unwrap();
        let tx = sounder.tx.reference_position();
        let rx = sounder.rx.reference_position();
        let graph = build_graph(&grid, EdgeConstraints::default(), tx, rx, 100_000).unwrap();
        let d1 = Dictionary::one_bounce(&grid, &sounder).unwrap();
        let d2 = Dictionary::two_bounce(&grid, &graph, &sounder).unwrap();
        Setup { sounder, d1, d2 }
    }

    fn channel(s: &Sounder, paths: &[(&[Vec3], Complex64)]) -> ChannelTensor {
        let tx = s.tx.reference_position();
        let rx = s.rx.reference_position();
        let list: Vec<_> = paths
            .iter()
            .map(|(hops, g)| {
                (
                    path_geometry(tx, rx, hops).unwrap(),
                    PathCoefficients::new(g.norm(), g.arg(), 0.0),
                )
            })
            .collect();
        synthesize_channel(&list, s, None).unwrap()
    }

    #[test]
    fn match_atom_examples() {
        let s = setup();
        let atoms: Vec<_> = s.d1.stream().collect::<Result<_>>().unwrap();
        let j = 7;
        let m = match_atom(&atoms[j].signature, atoms.iter().cloned().map(Ok)).unwrap();
        assert_eq!(m.id, j);
        assert!((m.amplitude - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let twice: Vec<_> = atoms[j].signature.iter().map(|z| z * 2.0).collect();
        let m = match_atom(&twice, atoms.iter().cloned().map(Ok)).unwrap();
        assert_eq!(m.id, j);
        assert!((m.energy - 4.0).abs() < 1e-12);
        assert!(matches!(match_atom(&twice, std::iter::empty()), Err(Error::EmptyDictionary)));
    }

    #[test]
    fn sage_pass_zero_residual() {
        let s = setup();
        let mut r = vec![Complex64::new(0.0, 0.0); s.d1.dims().len()];
        let out = sage_pass(&mut r, &s.d1, &EstimatorConfig::default(), 0.0).unwrap();
        assert!(out.detected.is_empty());
        assert!(r.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn sage_pass_two_paths() {
        let s = setup();
        let a = Vec3::new(0.25, 0.75, 0.0);
        let b = Vec3::new(1.75, 0.5, 0.0);
        let ga = Complex64::new(0.3, -0.2);
        let gb = Complex64::new(-0.1, 0.25);
        let z = channel(&s.sounder, &[(&[a], ga), (&[b], gb)]);
        let mut r = z.data.clone();
        let out = sage_pass(&mut r, &s.d1, &EstimatorConfig::default(), 1e-20 * z.energy()).unwrap();
        assert_eq!(out.detected.len(), 2);
        for (p, g) in [(a, ga), (b, gb)] {
            let d = out.detected.iter().find(|d| d.positions[0] == p).unwrap();
            assert!((d.amplitude - g).norm() < 1e-6 * g.norm());
        }
        let slack = 1e-12 * out.residual_trace[0];
        assert!(out.residual_trace.windows(2).all(|w| w[1] <= w[0] + slack));
    }

    #[test]
    fn gm_sage_one_and_two_bounce() {
        let s = setup();
        let a = Vec3::new(1.75, 0.75, 0.0);
        let (b1, b2) = (Vec3::new(1.25, 0.25, 0.0), Vec3::new(0.5, 1.0, 0.0));
        let z = channel(&s.sounder, &[(&[a], Complex64::new(0.4, 0.1)), (&[b1, b2], Complex64::new(0.0, 0.3))]);
        let rep = gm_sage(&z, &s.d1, Some(&s.d2), &EstimatorConfig::default()).unwrap();
        assert!(rep.iterations <= 3, "{}", rep.iterations);
        assert_eq!(rep.detected.len(), 2, "{:?}", rep.detected);
        assert_eq!(rep.detected[0].positions, vec![a]);
        assert_eq!(rep.detected[1].positions, vec![b1, b2]);
        assert!(rep.residual_energy().sqrt() < 1e-9 * z.energy().sqrt());

        let base = one_bounce_baseline(&z, &s.d1, &EstimatorConfig::default()).unwrap();
        assert!(base.baseline);
        assert!(base.detected.iter().all(|d| d.order == 1));
        assert!(base.detected.len() > 1);
    }

    #[test]
    fn zero_channel_report_is_empty() {
        let s = setup();
        let z = ChannelTensor::zeros(&s.sounder);
        let rep = gm_sage(&z, &s.d1, Some(&s.d2), &EstimatorConfig::default()).unwrap();
        assert!(rep.detected.is_empty());
        assert_eq!(rep.iterations, 0);
        let base = one_bounce_baseline(&z, &s.d1, &EstimatorConfig::default()).unwrap();
        assert!(base.detected.is_empty());
    }

    #[test]
    fn config_validation() {
        let c = EstimatorConfig {
            gamma: 1.0,
            ..EstimatorConfig::default()
        };
        assert!(c.validate().is_err());
        let c = EstimatorConfig {
            gamma: 0.1,
            max_iters: 0,
            ..c
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let s = setup();
        let mut z = ChannelTensor::zeros(&s.sounder);
        z.dims.q += 1;
        z.data.extend(vec![Complex64::new(0.0, 0.0); z.dims.rows() * z.dims.p]);
        assert!(matches!(
            gm_sage(&z, &s.d1, None, &EstimatorConfig::default()),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn doppler_refinement_recovers_velocity() {
        let s = setup();
        let a = Vec3::new(0.75, 0.5, 0.0);
        let tx = s.sounder.tx.reference_position();
        let rx = s.sounder.rx.reference_position();
        let g = path_geometry(tx, rx, &[a]).unwrap();
        let z = synthesize_channel(&[(g, PathCoefficients::new(0.2, 0.4, 2.5))], &s.sounder, None).unwrap();
        let cfg = EstimatorConfig {
            doppler_grid: vec![-5.0, -2.5, 2.5, 5.0],
            ..EstimatorConfig::default()
        };
        let rep = gm_sage(&z, &s.d1, Some(&s.d2), &cfg).unwrap();
        assert_eq!(rep.detected.len(), 1);
        assert_eq!(rep.detected[0].velocity, 2.5);
        assert_eq!(rep.detected[0].positions, vec![a]);
    }
}
