//! Propagation-graph dictionary.
//!
//! Candidate scatterer positions form a lattice (the graph vertices) and
//! admissible two-hop links form the edges. Each vertex yields a one-bounce
//! atom `Tx -> v -> Rx` and each ordered edge `(v1, v2)` a two-bounce atom
//! `Tx -> v1 -> v2 -> Rx`. Atoms are unit-norm static (`v = 0`) channel
//! signatures; they are produced on demand and never stored in bulk.
//!
//! Matching a residual against a dictionary works on the residual summed
//! over frames, which is exact for static atoms. Two-bounce scans first
//! compute a cheap separable upper bound on every atom's match energy and
//! evaluate exactly only the atoms whose bound can still beat the best
//! exact score, so the result equals the exhaustive argmax.

use std::sync::Arc;

use num_complex::Complex64;

use crate::channel::{cis_cycles, path_signature, Dims, Sounder};
use crate::error::{invalid, Error, Result};
use crate::geometry::{element_geometry, path_geometry, Vec3, COINCIDENCE_TOL, SPEED_OF_LIGHT};
use crate::par::{self, Best};
use crate::scene::Aabb;

pub const DEFAULT_VERTEX_CAP: usize = 1_000_000;
pub const DEFAULT_EDGE_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateGrid {
    pub bounds: Aabb,
    pub resolution: f64,
    pub counts: [usize; 3],
    pub vertices: Vec<Vec3>,
}

impl CandidateGrid {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

fn axis_count(lo: f64, hi: f64, res: f64) -> usize {
    ((hi - lo) / res + 1e-9).floor() as usize + 1
}

/// Lattice `min + i * resolution` inside `bounds`, x fastest, then y, z.
pub fn build_grid(bounds: Aabb, resolution: f64, vertex_cap: usize) -> Result<CandidateGrid> {
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(invalid("grid resolution must be positive"));
    }
    if !bounds.is_valid() {
        return Err(invalid("grid bounds are empty"));
    }
    let counts = [
        axis_count(bounds.min.x, bounds.max.x, resolution),
        axis_count(bounds.min.y, bounds.max.y, resolution),
        axis_count(bounds.min.z, bounds.max.z, resolution),
    ];
    let total = counts
        .iter()
        .try_fold(1usize, |a, &c| a.checked_mul(c))
        .unwrap_or(usize::MAX);
    if total > vertex_cap {
        return Err(Error::Capacity {
            what: "candidate grid",
            requested: total,
            cap: vertex_cap,
        });
    }
    let mut vertices = Vec::with_capacity(total);
    for k in 0..counts[2] {
        for j in 0..counts[1] {
            for i in 0..counts[0] {
                vertices.push(Vec3::new(
                    bounds.min.x + i as f64 * resolution,
                    bounds.min.y + j as f64 * resolution,
                    bounds.min.z + k as f64 * resolution,
                ));
            }
        }
    }
    Ok(CandidateGrid {
        bounds,
        resolution,
        counts,
        vertices,
    })
}

/// Edge admissibility rules.
///
/// A two-bounce path that barely changes direction at a vertex, or whose
/// vertices are close together, has nearly the same delay and angles as a
/// one-bounce path and cannot be told apart from it. Such edges are left
/// out.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EdgeConstraints {
    /// Minimum distance between the two vertices of an edge, meters.
    pub min_separation: f64,
    /// Minimum change of direction at each vertex, radians.
    #[serde(default)]
    pub min_turn: f64,
    /// Maximum reference delay `Tx -> v1 -> v2 -> Rx`, seconds.
    pub max_delay: Option<f64>,
}

impl Default for EdgeConstraints {
    fn default() -> Self {
        Self {
            min_separation: 0.5,
            min_turn: 20f64.to_radians(),
            max_delay: None,
        }
    }
}

impl EdgeConstraints {
    /// Every ordered pair of distinct vertices.
    pub fn unconstrained() -> Self {
        Self {
            min_separation: 0.0,
            min_turn: 0.0,
            max_delay: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min_separation >= 0.0 && self.min_separation.is_finite()) {
            return Err(invalid("edges.min_separation must be a non-negative distance"));
        }
        if !(0.0..=std::f64::consts::PI).contains(&self.min_turn) {
            return Err(invalid("edges.min_turn must lie in [0, pi]"));
        }
        if self.max_delay.is_some_and(|t| !(t > 0.0)) {
            return Err(invalid("edges.max_delay must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationGraph {
    pub vertex_count: usize,
    pub edges: Vec<(u32, u32)>,
    pub constraints: EdgeConstraints,
}

impl PropagationGraph {
    pub fn admits(grid: &CandidateGrid, c: &EdgeConstraints, tx: Vec3, rx: Vec3, a: usize, b: usize) -> bool {
        if a == b {
            return false;
        }
        let (va, vb) = (grid.vertices[a], grid.vertices[b]);
        let sep = va.distance(vb);
        if sep < c.min_separation.max(COINCIDENCE_TOL) {
            return false;
        }
        if c.min_turn > 0.0 {
            let hop = vb - va;
            let turn_a = (va - tx).angle_to(hop);
            let turn_b = hop.angle_to(rx - vb);
            if turn_a < c.min_turn || turn_b < c.min_turn {
                return false;
            }
        }
        match c.max_delay {
            Some(t) => (tx.distance(va) + sep + vb.distance(rx)) / SPEED_OF_LIGHT <= t,
            None => true,
        }
    }
}

/// Ordered vertex pairs satisfying the constraints, lexicographic by
/// `(v1, v2)`.
pub fn build_graph(
    grid: &CandidateGrid,
    constraints: EdgeConstraints,
    tx: Vec3,
    rx: Vec3,
    edge_cap: usize,
) -> Result<PropagationGraph> {
    constraints.validate()?;
    let n = grid.len();
    if n > u32::MAX as usize {
        return Err(Error::Capacity {
            what: "graph vertices",
            requested: n,
            cap: u32::MAX as usize,
        });
    }
    let rows = par::map_range(n, |a| {
        (0..n)
            .filter(|&b| PropagationGraph::admits(grid, &constraints, tx, rx, a, b))
            .map(|b| (a as u32, b as u32))
            .collect::<Vec<_>>()
    });
    let total: usize = rows.iter().map(Vec::len).sum();
    if total > edge_cap {
        return Err(Error::Capacity {
            what: "graph edges",
            requested: total,
            cap: edge_cap,
        });
    }
    Ok(PropagationGraph {
        vertex_count: n,
        edges: rows.into_iter().flatten().collect(),
        constraints,
    })
}

/// Unit-norm signature of one hypothesized scatterer configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct DictionaryAtom {
    pub order: usize,
    pub vertex_ids: Vec<usize>,
    pub signature: Vec<Complex64>,
}

/// Signature of the path `Tx_ref -> positions -> Rx_ref` at `velocity`,
/// scaled to unit norm. Returns the signature and the norm it had before
/// scaling.
pub fn atom_signature(positions: &[Vec3], sounder: &Sounder, velocity: f64) -> Result<(Vec<Complex64>, f64)> {
    if positions.is_empty() || positions.len() > 2 {
        return Err(invalid("atoms cover one- and two-bounce paths only"));
    }
    if positions.len() == 2 && positions[0].distance(positions[1]) < COINCIDENCE_TOL {
        return Err(invalid("two-bounce atom needs two distinct vertices"));
    }
    let geom = path_geometry(sounder.tx.reference_position(), sounder.rx.reference_position(), positions)?;
    let mut sig = path_signature(&geom, sounder, velocity)?;
    let norm = sig.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::DegenerateGeometry("atom has zero energy".into()));
    }
    let inv = 1.0 / norm;
    sig.iter_mut().for_each(|z| *z *= inv);
    Ok((sig, norm))
}

/// Builds the static atom for `positions`, tagging it with `vertex_ids`.
pub fn atom(vertex_ids: &[usize], positions: &[Vec3], sounder: &Sounder) -> Result<DictionaryAtom> {
    if vertex_ids.len() != positions.len() {
        return Err(invalid("one vertex id per position"));
    }
    if vertex_ids.len() == 2 && vertex_ids[0] == vertex_ids[1] {
        return Err(invalid("self-loop edges are not atoms"));
    }
    let (signature, _) = atom_signature(positions, sounder, 0.0)?;
    Ok(DictionaryAtom {
        order: positions.len(),
        vertex_ids: vertex_ids.to_vec(),
        signature,
    })
}

/// Best match of a residual against a dictionary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Match {
    pub id: usize,
    pub amplitude: Complex64,
    pub energy: f64,
}

/// Per-vertex view from one array.
#[derive(Debug, Clone)]
struct Side {
    d_ref: f64,
    dtau: Vec<f64>,
    gain: Vec<f64>,
    gain_norm: f64,
    max_dtau: f64,
    /// `exp(j 2 pi f_s dtau)` per element.
    sub_rot: Vec<Complex64>,
    /// `exp(j 2 pi f_c dtau)` per element (ones without carrier phase).
    car_rot: Vec<Complex64>,
}

/// Residual summed over frames, laid out `[row][p]`.
pub struct Collapsed {
    data: Vec<Complex64>,
    norm: f64,
}

/// One- or two-bounce dictionary over a candidate grid.
#[derive(Clone)]
pub struct Dictionary {
    order: usize,
    sounder: Sounder,
    dims: Dims,
    vertices: Arc<Vec<Vec3>>,
    entries: Vec<(u32, u32)>,
    tx: Vec<Option<Side>>,
    rx: Vec<Option<Side>>,
    /// Rx steering `g_n exp(j 2 pi (p f_s + f_c) dtau_n)` per vertex,
    /// `[n][p]`; used by the screening bound of two-bounce scans.
    rx_steer: Vec<Vec<Complex64>>,
}

impl std::fmt::Debug for Dictionary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Dictionary")
            .field("order", &self.order)
            .field("atoms", &self.entries.len())
            .field("vertices", &self.vertices.len())
            .finish_non_exhaustive()
    }
}

fn build_side(v: Vec3, array: &crate::geometry::ArraySpec, pattern: &dyn crate::channel::AntennaPattern, sounder: &Sounder) -> Option<Side> {
    let wf = &sounder.waveform;
    let rel = v - array.reference_position();
    let d_ref = rel.norm();
    if d_ref < COINCIDENCE_TOL {
        return None;
    }
    let omega = rel / d_ref;
    let offsets = array.element_offsets();
    let mut side = Side {
        d_ref,
        dtau: Vec::with_capacity(offsets.len()),
        gain: Vec::with_capacity(offsets.len()),
        gain_norm: 0.0,
        max_dtau: 0.0,
        sub_rot: Vec::with_capacity(offsets.len()),
        car_rot: Vec::with_capacity(offsets.len()),
    };
    for o in offsets {
        let g = element_geometry(d_ref, omega, o).ok()?;
        side.dtau.push(g.dtau);
        side.gain.push(pattern.gain(wf.carrier_hz, g.omega_elem));
        side.max_dtau = side.max_dtau.max(g.dtau.abs());
        side.sub_rot.push(cis_cycles(wf.subband_hz * g.dtau));
        side.car_rot.push(cis_cycles(wf.carrier_offset() * g.dtau));
    }
    side.gain_norm = side.gain.iter().map(|g| g * g).sum::<f64>().sqrt();
    Some(side)
}

/// Above this many steering entries the two-bounce scan skips screening.
const STEER_CAP: usize = 50_000_000;

impl Dictionary {
    fn with_entries(order: usize, vertices: Arc<Vec<Vec3>>, entries: Vec<(u32, u32)>, sounder: &Sounder) -> Result<Self> {
        sounder.tx.validate()?;
        sounder.rx.validate()?;
        sounder.waveform.validate()?;
        let tx = par::map_collect(&vertices, |v| build_side(*v, &sounder.tx, &*sounder.tx_pattern, sounder));
        let rx = par::map_collect(&vertices, |v| build_side(*v, &sounder.rx, &*sounder.rx_pattern, sounder));
        let dims = sounder.dims();
        let usable = |&(a, b): &(u32, u32)| tx[a as usize].is_some() && rx[b as usize].is_some();
        let entries: Vec<(u32, u32)> = entries.into_iter().filter(usable).collect();
        let mut dict = Self {
            order,
            sounder: sounder.clone(),
            dims,
            vertices,
            entries,
            tx,
            rx,
            rx_steer: Vec::new(),
        };
        if order == 2 && dict.vertices.len() * dims.n * dims.p <= STEER_CAP {
            let wf = &sounder.waveform;
            dict.rx_steer = par::map_collect(&dict.rx, |side| match side {
                Some(s) => {
                    let mut out = Vec::with_capacity(dims.n * dims.p);
                    for n in 0..dims.n {
                        for p in 0..dims.p {
                            out.push(cis_cycles(wf.phase_freq(p + 1) * s.dtau[n]) * s.gain[n]);
                        }
                    }
                    out
                }
                None => Vec::new(),
            });
        }
        Ok(dict)
    }

    /// One atom per grid vertex.
    pub fn one_bounce(grid: &CandidateGrid, sounder: &Sounder) -> Result<Self> {
        let entries = (0..grid.len() as u32).map(|v| (v, v)).collect();
        Self::with_entries(1, Arc::new(grid.vertices.clone()), entries, sounder)
    }

    /// One atom per graph edge.
    pub fn two_bounce(grid: &CandidateGrid, graph: &PropagationGraph, sounder: &Sounder) -> Result<Self> {
        if graph.vertex_count != grid.len() {
            return Err(invalid("graph was built over a different grid"));
        }
        Self::with_entries(2, Arc::new(grid.vertices.clone()), graph.edges.clone(), sounder)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sounder(&self) -> &Sounder {
        &self.sounder
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn vertex_ids(&self, id: usize) -> Vec<usize> {
        let (a, b) = self.entries[id];
        match self.order {
            1 => vec![a as usize],
            _ => vec![a as usize, b as usize],
        }
    }

    pub fn positions(&self, id: usize) -> Vec<Vec3> {
        self.vertex_ids(id).into_iter().map(|v| self.vertices[v]).collect()
    }

    /// Unit-norm signature of atom `id` at the given velocity, plus its raw
    /// (pre-normalization) norm.
    pub fn signature(&self, id: usize, velocity: f64) -> Result<(Vec<Complex64>, f64)> {
        atom_signature(&self.positions(id), &self.sounder, velocity)
    }

    pub fn atom(&self, id: usize) -> Result<DictionaryAtom> {
        atom(&self.vertex_ids(id), &self.positions(id), &self.sounder)
    }

    /// All atoms in id order, built on the fly.
    pub fn stream(&self) -> impl Iterator<Item = Result<DictionaryAtom>> + '_ {
        (0..self.len()).map(move |id| self.atom(id))
    }

    /// Builds every atom in memory, refusing when the dictionary holds more
    /// than `cap` atoms.
    pub fn materialize(&self, cap: usize) -> Result<Vec<DictionaryAtom>> {
        if self.len() > cap {
            return Err(Error::Capacity {
                what: "materialized dictionary",
                requested: self.len(),
                cap,
            });
        }
        self.stream().collect()
    }

    pub fn collapse(&self, residual: &[Complex64]) -> Result<Collapsed> {
        let d = self.dims;
        if residual.len() != d.len() {
            return Err(Error::DimensionMismatch(format!(
                "residual has {} entries, dictionary expects {}",
                residual.len(),
                d.len()
            )));
        }
        let cols = d.cols();
        let mut data = vec![Complex64::new(0.0, 0.0); d.rows() * d.p];
        for (row, chunk) in residual.chunks_exact(cols).enumerate() {
            let out = &mut data[row * d.p..(row + 1) * d.p];
            for frame in chunk.chunks_exact(d.p) {
                for (o, z) in out.iter_mut().zip(frame) {
                    *o += z;
                }
            }
        }
        let norm = data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        Ok(Collapsed { data, norm })
    }

    fn tau_ref(&self, id: usize) -> (f64, &Side, &Side) {
        let (a, b) = self.entries[id];
        let tx = self.tx[a as usize].as_ref().expect("usable entry");
        let rx = self.rx[b as usize].as_ref().expect("usable entry");
        let mid = if a == b {
            0.0
        } else {
            self.vertices[a as usize].distance(self.vertices[b as usize])
        };
        ((tx.d_ref + mid + rx.d_ref) / SPEED_OF_LIGHT, tx, rx)
    }

    /// Exact inner product `<psi_id, residual>` with the unit-norm static
    /// atom, evaluated on the frame-collapsed residual.
    pub fn correlate(&self, id: usize, r: &Collapsed) -> Complex64 {
        let d = self.dims;
        let wf = &self.sounder.waveform;
        let (tau_ref, tx, rx) = self.tau_ref(id);
        let w_ref = cis_cycles(wf.subband_hz * tau_ref);
        let c_ref = cis_cycles(wf.carrier_offset() * tau_ref);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut norm2 = 0.0;
        for n in 0..d.n {
            let wn = w_ref * rx.sub_rot[n];
            let cn = c_ref * rx.car_rot[n];
            for m in 0..d.m {
                let amp = tau_ref / (tau_ref + tx.dtau[m] + rx.dtau[n]) * tx.gain[m] * rx.gain[n];
                if amp == 0.0 {
                    continue;
                }
                norm2 += amp * amp;
                let w = wn * tx.sub_rot[m];
                let row = &r.data[(n * d.m + m) * d.p..(n * d.m + m + 1) * d.p];
                // sum_p r_p w^p by Horner
                let mut s = Complex64::new(0.0, 0.0);
                for z in row.iter().rev() {
                    s = (s + z) * w;
                }
                acc += s * (cn * tx.car_rot[m]) * amp;
            }
        }
        if norm2 == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        acc / (norm2 * (d.p * d.q) as f64).sqrt()
    }

    /// Upper bounds on the match energy of every atom sharing Tx-side
    /// vertex `a`, from the separable (unit SNS amplitude) approximation.
    fn screen_group(&self, a: usize, ids: std::ops::Range<usize>, r: &Collapsed) -> Vec<f64> {
        let d = self.dims;
        let wf = &self.sounder.waveform;
        let Some(tx) = self.tx[a].as_ref() else {
            return vec![f64::INFINITY; ids.len()];
        };
        // T[n][p] = sum_m g_m exp(j 2 pi (p f_s + f_c) dtau_m) rbar[m, n, p]
        let mut t = vec![Complex64::new(0.0, 0.0); d.n * d.p];
        for m in 0..d.m {
            if tx.gain[m] == 0.0 {
                continue;
            }
            let step = tx.sub_rot[m];
            let start = tx.car_rot[m] * tx.gain[m];
            for n in 0..d.n {
                let row = &r.data[(n * d.m + m) * d.p..(n * d.m + m + 1) * d.p];
                let out = &mut t[n * d.p..(n + 1) * d.p];
                let mut ph = start * step;
                for (o, z) in out.iter_mut().zip(row) {
                    *o += z * ph;
                    ph *= step;
                }
            }
        }
        let sqrt_p = (d.p as f64).sqrt();
        let sqrt_pq = ((d.p * d.q) as f64).sqrt();
        let mut u = vec![Complex64::new(0.0, 0.0); d.p];
        ids.map(|id| {
            let (tau_ref, tx, rx) = self.tau_ref(id);
            let g = tx.gain_norm * rx.gain_norm;
            if g == 0.0 {
                return 0.0;
            }
            let spread = tx.max_dtau + rx.max_dtau;
            if spread >= 0.5 * tau_ref {
                return f64::INFINITY;
            }
            let delta = spread / (tau_ref - spread);
            let steer = &self.rx_steer[self.entries[id].1 as usize];
            u.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
            for n in 0..d.n {
                let sr = &steer[n * d.p..(n + 1) * d.p];
                let tr = &t[n * d.p..(n + 1) * d.p];
                for ((o, a), b) in u.iter_mut().zip(sr).zip(tr) {
                    *o += a * b;
                }
            }
            let w = cis_cycles(wf.subband_hz * tau_ref);
            let mut s = Complex64::new(0.0, 0.0);
            for z in u.iter().rev() {
                s = (s + z) * w;
            }
            let approx = s.norm();
            let bound = (approx + delta * g * sqrt_p * r.norm) / (sqrt_pq * (1.0 - delta) * g);
            bound * bound * (1.0 + 1e-9) + 1e-300
        })
        .collect()
    }

    fn check_residual(&self, residual: &[Complex64]) -> Result<Collapsed> {
        if self.is_empty() {
            return Err(Error::EmptyDictionary);
        }
        self.collapse(residual)
    }

    /// Exhaustive exact argmax of `|<psi, residual>|^2`, lowest id on ties.
    pub fn best_match_exhaustive(&self, residual: &[Complex64]) -> Result<Match> {
        let r = self.check_residual(residual)?;
        let best = par::argmax(self.len(), |id| {
            let a = self.correlate(id, &r);
            (a.norm_sqr(), a)
        })
        .ok_or(Error::EmptyDictionary)?;
        Ok(Match {
            id: best.index,
            amplitude: best.value,
            energy: best.score,
        })
    }

    /// Single-threaded exhaustive scan regardless of the `parallel` feature.
    pub fn best_match_sequential(&self, residual: &[Complex64]) -> Result<Match> {
        let r = self.check_residual(residual)?;
        let best = par::argmax_seq(self.len(), |id| {
            let a = self.correlate(id, &r);
            (a.norm_sqr(), a)
        })
        .ok_or(Error::EmptyDictionary)?;
        Ok(Match {
            id: best.index,
            amplitude: best.value,
            energy: best.score,
        })
    }

    /// Exact argmax; two-bounce dictionaries are screened first.
    pub fn best_match(&self, residual: &[Complex64]) -> Result<Match> {
        if self.order == 1 || self.rx_steer.is_empty() {
            return self.best_match_exhaustive(residual);
        }
        let r = self.check_residual(residual)?;
        // entries are sorted by Tx-side vertex; bound one group at a time
        let mut groups = Vec::new();
        let mut start = 0;
        while start < self.len() {
            let a = self.entries[start].0;
            let end = start + self.entries[start..].partition_point(|e| e.0 == a);
            groups.push((a as usize, start..end));
            start = end;
        }
        let bounds: Vec<f64> = par::map_collect(&groups, |(a, ids)| self.screen_group(*a, ids.clone(), &r))
            .into_iter()
            .flatten()
            .collect();
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&i, &j| bounds[j].total_cmp(&bounds[i]).then(i.cmp(&j)));

        const BATCH: usize = 64;
        let mut best: Option<Best<Complex64>> = None;
        let mut pos = 0;
        while pos < order.len() {
            let floor = best.map_or(f64::NEG_INFINITY, |b| b.score);
            let end = (pos + BATCH).min(order.len());
            let batch: Vec<usize> = order[pos..end].iter().copied().take_while(|&id| bounds[id] >= floor).collect();
            if batch.is_empty() {
                break;
            }
            let scored = par::map_collect(&batch, |&id| {
                let a = self.correlate(id, &r);
                Best {
                    index: id,
                    score: a.norm_sqr(),
                    value: a,
                }
            });
            for s in scored {
                best = Best::pick(best, Some(s));
            }
            if batch.len() < end - pos {
                break;
            }
            pos = end;
        }
        let best = best.ok_or(Error::EmptyDictionary)?;
        Ok(Match {
            id: best.index,
            amplitude: best.value,
            energy: best.score,
        })
    }
}
