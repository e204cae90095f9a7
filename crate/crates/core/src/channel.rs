//! Baseband MIMO channel tensor synthesis.
//!
//! The tensor is stored as an `MN x PQ` complex matrix in row-major order.
//! Row `(n-1)M + m` holds the Tx `m` / Rx `n` link and column `(q-1)P + p`
//! holds sub-band `p` of frame `q` (all indices 1-based in the public maps).

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{
    element_geometry, per_element_delay, sns_amplitude, ArraySpec, PathGeometry, Vec3,
    SPEED_OF_LIGHT,
};
use crate::par;

/// Multi-band, multi-frame sounding waveform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveformSpec {
    pub carrier_hz: f64,
    /// Width of one sub-band; sub-band `p` sits at `p * subband_hz`.
    pub subband_hz: f64,
    pub subbands: usize,
    pub frame_s: f64,
    pub frames: usize,
    /// Evaluate Doppler at the carrier only (`f_p = 0`).
    #[serde(default)]
    pub narrowband_doppler: bool,
    /// Also rotate each entry by the carrier phase `exp(-j 2 pi f_c tau)`.
    /// Without it the per-element phase only sees `f_p`, which leaves the
    /// arrays with almost no angular resolution.
    #[serde(default = "yes")]
    pub carrier_phase: bool,
}

fn yes() -> bool {
    true
}

impl Default for WaveformSpec {
    fn default() -> Self {
        Self {
            carrier_hz: 30e9,
            subband_hz: 10e6,
            subbands: 32,
            frame_s: 1e-3,
            frames: 4,
            narrowband_doppler: false,
            carrier_phase: true,
        }
    }
}

impl WaveformSpec {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if !pos(self.carrier_hz) || !pos(self.subband_hz) || !pos(self.frame_s) {
            return Err(invalid("waveform frequencies and frame duration must be positive"));
        }
        if self.subbands == 0 || self.frames == 0 {
            return Err(invalid("waveform needs at least one sub-band and one frame"));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    /// Baseband frequency of 1-based sub-band `p`.
    pub fn subband_freq(&self, p: usize) -> f64 {
        p as f64 * self.subband_hz
    }

    /// Frequency that multiplies the delay in the phase term of sub-band `p`.
    pub(crate) fn phase_freq(&self, p: usize) -> f64 {
        self.subband_freq(p) + self.carrier_offset()
    }

    pub(crate) fn carrier_offset(&self) -> f64 {
        if self.carrier_phase {
            self.carrier_hz
        } else {
            0.0
        }
    }

    pub(crate) fn doppler_at(&self, p: usize, velocity: f64) -> f64 {
        let fp = if self.narrowband_doppler {
            0.0
        } else {
            self.subband_freq(p)
        };
        doppler_frequency(self.carrier_hz, fp, velocity)
    }
}

/// Reference-channel attenuation, constant phase and radial velocity of a path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathCoefficients {
    pub alpha: f64,
    pub phi: f64,
    pub velocity: f64,
}

impl PathCoefficients {
    pub fn new(alpha: f64, phi: f64, velocity: f64) -> Self {
        Self {
            alpha,
            phi: wrap_phase(phi),
            velocity,
        }
    }

    pub fn gain(&self) -> Complex64 {
        Complex64::from_polar(self.alpha, self.phi)
    }
}

/// Wraps an angle into `[0, 2 pi)`.
pub fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Element gain as a function of carrier and the element's unit orientation
/// vector toward the adjacent interaction point.
pub trait AntennaPattern: Send + Sync {
    fn gain(&self, carrier_hz: f64, direction: Vec3) -> f64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Isotropic;

impl AntennaPattern for Isotropic {
    fn gain(&self, _carrier_hz: f64, _direction: Vec3) -> f64 {
        1.0
    }
}

/// `max(0, cos(angle to axis))^exponent`; a simple directive element.
#[derive(Debug, Clone, Copy)]
pub struct CosinePattern {
    pub axis: Vec3,
    pub exponent: f64,
}

impl AntennaPattern for CosinePattern {
    fn gain(&self, _carrier_hz: f64, direction: Vec3) -> f64 {
        direction.dot(self.axis).max(0.0).powf(self.exponent)
    }
}

/// Arrays, waveform and element patterns shared by synthesis and matching.
#[derive(Clone)]
pub struct Sounder {
    pub tx: ArraySpec,
    pub rx: ArraySpec,
    pub waveform: WaveformSpec,
    pub tx_pattern: Arc<dyn AntennaPattern>,
    pub rx_pattern: Arc<dyn AntennaPattern>,
}

impl fmt::Debug for Sounder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Sounder")
            .field("tx", &self.tx)
            .field("rx", &self.rx)
            .field("waveform", &self.waveform)
            .finish_non_exhaustive()
    }
}

impl Sounder {
    pub fn new(tx: ArraySpec, rx: ArraySpec, waveform: WaveformSpec) -> Result<Self> {
        tx.validate()?;
        rx.validate()?;
        waveform.validate()?;
        Ok(Self {
            tx,
            rx,
            waveform,
            tx_pattern: Arc::new(Isotropic),
            rx_pattern: Arc::new(Isotropic),
        })
    }

    pub fn with_patterns(mut self, tx: Arc<dyn AntennaPattern>, rx: Arc<dyn AntennaPattern>) -> Self {
        self.tx_pattern = tx;
        self.rx_pattern = rx;
        self
    }

    pub fn dims(&self) -> Dims {
        Dims {
            m: self.tx.len(),
            n: self.rx.len(),
            p: self.waveform.subbands,
            q: self.waveform.frames,
        }
    }
}

/// Tensor dimensions: Tx count, Rx count, sub-bands, frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub q: usize,
}

impl Dims {
    pub fn rows(&self) -> usize {
        self.m * self.n
    }

    pub fn cols(&self) -> usize {
        self.p * self.q
    }

    pub fn len(&self) -> usize {
        self.rows() * self.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// 0-based flat index of 0-based `(m, n, p, q)`.
    #[inline]
    pub fn flat(&self, m: usize, n: usize, p: usize, q: usize) -> usize {
        (n * self.m + m) * self.cols() + q * self.p + p
    }
}

fn check_index(i: usize, max: usize, name: &str) -> Result<()> {
    if i == 0 || i > max {
        return Err(invalid(format!("{name} = {i} outside 1..={max}")));
    }
    Ok(())
}

/// 1-based row of Tx `m`, Rx `n`: `(n-1)M + m`.
pub fn row_of(m: usize, n: usize, tx_count: usize, rx_count: usize) -> Result<usize> {
    check_index(m, tx_count, "m")?;
    check_index(n, rx_count, "n")?;
    Ok((n - 1) * tx_count + m)
}

/// 1-based column of sub-band `p`, frame `q`: `(q-1)P + p`.
pub fn col_of(p: usize, q: usize, subbands: usize, frames: usize) -> Result<usize> {
    check_index(p, subbands, "p")?;
    check_index(q, frames, "q")?;
    Ok((q - 1) * subbands + p)
}

/// Inverse of [`row_of`]: 1-based `(m, n)`.
pub fn row_to_pair(row: usize, tx_count: usize, rx_count: usize) -> Result<(usize, usize)> {
    check_index(row, tx_count * rx_count, "row")?;
    Ok(((row - 1) % tx_count + 1, (row - 1) / tx_count + 1))
}

/// Inverse of [`col_of`]: 1-based `(p, q)`.
pub fn col_to_pair(col: usize, subbands: usize, frames: usize) -> Result<(usize, usize)> {
    check_index(col, subbands * frames, "col")?;
    Ok(((col - 1) % subbands + 1, (col - 1) / subbands + 1))
}

pub fn doppler_frequency(carrier_hz: f64, subband_hz: f64, velocity: f64) -> f64 {
    -(carrier_hz + subband_hz) * velocity / SPEED_OF_LIGHT
}

/// `exp(j 2 pi cycles)` with the integer part of `cycles` removed first.
#[inline]
pub(crate) fn cis_cycles(cycles: f64) -> Complex64 {
    let frac = cycles - cycles.round();
    let (s, c) = (TAU * frac).sin_cos();
    Complex64::new(c, s)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TensorMeta {
    pub waveform: WaveformSpec,
    pub tx_array: ArraySpec,
    pub rx_array: ArraySpec,
    pub snr_db: Option<f64>,
    pub seed: Option<u64>,
    pub noise_variance: f64,
}

/// Measurement matrix `Z` with its metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTensor {
    pub dims: Dims,
    pub data: Vec<Complex64>,
    pub meta: TensorMeta,
}

impl ChannelTensor {
    pub fn zeros(sounder: &Sounder) -> Self {
        let dims = sounder.dims();
        Self {
            dims,
            data: vec![Complex64::new(0.0, 0.0); dims.len()],
            meta: TensorMeta {
                waveform: sounder.waveform.clone(),
                tx_array: sounder.tx.clone(),
                rx_array: sounder.rx.clone(),
                snr_db: None,
                seed: None,
                noise_variance: 0.0,
            },
        }
    }

    /// Entry at 1-based `(m, n, p, q)`.
    pub fn get(&self, m: usize, n: usize, p: usize, q: usize) -> Result<Complex64> {
        let d = self.dims;
        let row = row_of(m, n, d.m, d.n)?;
        let col = col_of(p, q, d.p, d.q)?;
        Ok(self.data[(row - 1) * d.cols() + col - 1])
    }

    pub fn energy(&self) -> f64 {
        energy(&self.data)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dims;
        if self.data.len() != d.len() {
            return Err(Error::DimensionMismatch(format!(
                "tensor holds {} entries, dimensions imply {}",
                self.data.len(),
                d.len()
            )));
        }
        if self.meta.tx_array.len() != d.m
            || self.meta.rx_array.len() != d.n
            || self.meta.waveform.subbands != d.p
            || self.meta.waveform.frames != d.q
        {
            return Err(Error::DimensionMismatch(
                "tensor dimensions disagree with metadata".into(),
            ));
        }
        Ok(())
    }
}

pub fn energy(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

struct SideGeometry {
    dtau: Vec<f64>,
    gain: Vec<f64>,
}

fn side_geometry(
    d_ref: f64,
    omega: Vec3,
    array: &ArraySpec,
    pattern: &dyn AntennaPattern,
    carrier_hz: f64,
) -> Result<SideGeometry> {
    let offsets = array.element_offsets();
    let mut dtau = Vec::with_capacity(offsets.len());
    let mut gain = Vec::with_capacity(offsets.len());
    for o in offsets {
        let g = element_geometry(d_ref, omega, o)?;
        dtau.push(g.dtau);
        gain.push(pattern.gain(carrier_hz, g.omega_elem));
    }
    Ok(SideGeometry { dtau, gain })
}

/// Per-path factor of the channel model with unit attenuation and zero
/// constant phase, vectorized row-major (`MN x PQ`).
pub fn path_signature(path: &PathGeometry, sounder: &Sounder, velocity: f64) -> Result<Vec<Complex64>> {
    let wf = &sounder.waveform;
    let dims = sounder.dims();
    let tx = side_geometry(path.d_tx, path.omega_tx, &sounder.tx, &*sounder.tx_pattern, wf.carrier_hz)?;
    let rx = side_geometry(path.d_rx, path.omega_rx, &sounder.rx, &*sounder.rx_pattern, wf.carrier_hz)?;

    let cols = dims.cols();
    let mut pairs = Vec::with_capacity(dims.rows());
    for n in 0..dims.n {
        for m in 0..dims.m {
            let tau = per_element_delay(path.tau_ref, tx.dtau[m], rx.dtau[n])?;
            let dalpha = sns_amplitude(path.tau_ref, tau)?;
            pairs.push((tau, dalpha * tx.gain[m] * rx.gain[n]));
        }
    }

    let doppler: Vec<f64> = (1..=dims.p).map(|p| wf.doppler_at(p, velocity)).collect();
    let mut out = vec![Complex64::new(0.0, 0.0); dims.len()];
    par::for_each_chunk_mut(&mut out, cols, |row, chunk| {
        let (tau, amp) = pairs[row];
        for q in 0..dims.q {
            let t = (q + 1) as f64 * wf.frame_s;
            for p in 0..dims.p {
                let cycles = -wf.phase_freq(p + 1) * tau + doppler[p] * t;
                chunk[q * dims.p + p] = cis_cycles(cycles) * amp;
            }
        }
    });
    Ok(out)
}

/// Far-field counterpart of [`path_signature`]: delays linearized at the
/// reference elements (`d_elem ~ d_ref - omega . offset`), unit SNS
/// amplitude and reference-direction gains.
pub fn plane_wave_signature(path: &PathGeometry, sounder: &Sounder, velocity: f64) -> Result<Vec<Complex64>> {
    let wf = &sounder.waveform;
    let dims = sounder.dims();
    let gtx = sounder.tx_pattern.gain(wf.carrier_hz, path.omega_tx);
    let grx = sounder.rx_pattern.gain(wf.carrier_hz, path.omega_rx);
    let dtx: Vec<f64> = sounder
        .tx
        .element_offsets()
        .iter()
        .map(|o| -path.omega_tx.dot(*o) / SPEED_OF_LIGHT)
        .collect();
    let drx: Vec<f64> = sounder
        .rx
        .element_offsets()
        .iter()
        .map(|o| -path.omega_rx.dot(*o) / SPEED_OF_LIGHT)
        .collect();
    let mut out = Vec::with_capacity(dims.len());
    for dn in &drx {
        for dm in &dtx {
            let tau = path.tau_ref + dm + dn;
            for q in 0..dims.q {
                let t = (q + 1) as f64 * wf.frame_s;
                for p in 0..dims.p {
                    let cycles = -wf.phase_freq(p + 1) * tau + wf.doppler_at(p + 1, velocity) * t;
                    out.push(cis_cycles(cycles) * (gtx * grx));
                }
            }
        }
    }
    Ok(out)
}

/// Additive circular white noise specification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub snr_db: f64,
    pub seed: u64,
}

/// Adds i.i.d. circular complex Gaussian noise with per-entry variance
/// chosen so that signal energy over expected noise energy equals the SNR.
/// Returns the per-entry variance.
pub fn add_noise(data: &mut [Complex64], noise: NoiseSpec) -> f64 {
    let signal = energy(data);
    let variance = signal / (data.len() as f64 * 10f64.powf(noise.snr_db / 10.0));
    let scale = (variance / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    for z in data.iter_mut() {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        *z += Complex64::new(re * scale, im * scale);
    }
    variance
}

/// Sum of `alpha e^{j phi}` times each path signature, plus optional noise.
pub fn synthesize_channel(
    paths: &[(PathGeometry, PathCoefficients)],
    sounder: &Sounder,
    noise: Option<NoiseSpec>,
) -> Result<ChannelTensor> {
    sounder.tx.validate()?;
    sounder.rx.validate()?;
    sounder.waveform.validate()?;
    if let Some(n) = noise {
        if !n.snr_db.is_finite() {
            return Err(invalid("snr_db must be finite"));
        }
    }
    let mut tensor = ChannelTensor::zeros(sounder);
    let signatures = par::map_collect(paths, |(geom, coef)| {
        path_signature(geom, sounder, coef.velocity).map(|s| (s, coef.gain()))
    });
    // summed in path order so the result does not depend on thread count
    for entry in signatures {
        let (sig, gain) = entry?;
        for (z, s) in tensor.data.iter_mut().zip(&sig) {
            *z += s * gain;
        }
    }
    if let Some(n) = noise {
        tensor.meta.noise_variance = add_noise(&mut tensor.data, n);
        tensor.meta.snr_db = Some(n.snr_db);
        tensor.meta.seed = Some(n.seed);
    }
    Ok(tensor)
}
