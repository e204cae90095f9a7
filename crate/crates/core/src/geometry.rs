//! Geometric kernel for spherical-wavefront channels.
//!
//! Everything here is a pure function of its inputs. Orientation vectors
//! point from an antenna toward the adjacent interaction point, so that
//! `d_ref * omega_ref` is the scatterer position relative to the reference
//! antenna and the per-element distance is `|d_ref * omega_ref - offset|`.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Points closer than this are considered coincident.
pub const COINCIDENCE_TOL: f64 = 1e-9;

const UNIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };
    pub const X: Vec3 = Vec3 { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: Vec3 = Vec3 { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 1.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    #[inline]
    pub fn distance(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    /// Unit vector in the same direction, or `None` for (near) zero vectors.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        (n > COINCIDENCE_TOL).then(|| self / n)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Angle between two non-zero vectors in radians, computed with atan2
    /// so it stays accurate for nearly parallel vectors.
    pub fn angle_to(self, o: Vec3) -> f64 {
        self.cross(o).norm().atan2(self.dot(o))
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    #[inline]
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    #[inline]
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    #[inline]
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    #[inline]
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    #[inline]
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

/// Placement of a planar array: origin plus a right-handed orthonormal basis.
/// The first two basis vectors span the array plane, the third is broadside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub origin: Vec3,
    pub basis: [Vec3; 3],
}

impl Pose {
    pub fn identity() -> Self {
        Self::at(Vec3::ZERO)
    }

    pub fn at(origin: Vec3) -> Self {
        Self {
            origin,
            basis: [Vec3::X, Vec3::Y, Vec3::Z],
        }
    }

    /// Builds a pose from the two in-plane axes; the broadside axis is
    /// their cross product.
    pub fn from_axes(origin: Vec3, u: Vec3, v: Vec3) -> Result<Self> {
        let pose = Self {
            origin,
            basis: [u, v, u.cross(v)],
        };
        pose.validate()?;
        Ok(pose)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.origin.is_finite() {
            return Err(invalid("pose origin is not finite"));
        }
        let [a, b, c] = self.basis;
        for (i, v) in self.basis.iter().enumerate() {
            if !v.is_finite() || (v.norm() - 1.0).abs() > UNIT_TOL {
                return Err(invalid(format!("pose basis vector {i} is not unit norm")));
            }
        }
        if a.dot(b).abs() > UNIT_TOL || a.dot(c).abs() > UNIT_TOL || b.dot(c).abs() > UNIT_TOL {
            return Err(invalid("pose basis is not orthogonal"));
        }
        if (a.cross(b) - c).norm() > UNIT_TOL {
            return Err(invalid("pose basis is not right-handed"));
        }
        Ok(())
    }
}

/// Uniform planar array.
///
/// Element `i` sits at row `i / cols`, column `i % cols`. The lattice is laid
/// out along the first two pose axes and shifted so that the reference
/// element coincides with the pose origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArraySpec {
    pub rows: usize,
    pub cols: usize,
    pub spacing: f64,
    pub pose: Pose,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_index: Option<usize>,
}

impl ArraySpec {
    pub fn new(rows: usize, cols: usize, spacing: f64, pose: Pose) -> Self {
        Self {
            rows,
            cols,
            spacing,
            pose,
            reference_index: None,
        }
    }

    /// Square array with half-wavelength spacing at `carrier_hz`.
    pub fn half_wavelength(side: usize, carrier_hz: f64, pose: Pose) -> Self {
        Self::new(side, side, 0.5 * SPEED_OF_LIGHT / carrier_hz, pose)
    }

    pub fn with_reference(mut self, index: usize) -> Self {
        self.reference_index = Some(index);
        self
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(invalid("array must have at least one row and column"));
        }
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return Err(invalid("array spacing must be positive"));
        }
        if let Some(r) = self.reference_index {
            if r >= self.len() {
                return Err(invalid(format!(
                    "reference index {r} out of range for {} elements",
                    self.len()
                )));
            }
        }
        self.pose.validate()
    }

    /// Reference element index: the configured one, or the element nearest
    /// the lattice centroid (lowest index on ties).
    pub fn reference(&self) -> usize {
        if let Some(r) = self.reference_index {
            return r;
        }
        let cr = (self.rows as f64 - 1.0) / 2.0;
        let cc = (self.cols as f64 - 1.0) / 2.0;
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for i in 0..self.len() {
            let dr = (i / self.cols) as f64 - cr;
            let dc = (i % self.cols) as f64 - cc;
            let d = dr * dr + dc * dc;
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Position of the reference element (the pose origin).
    pub fn reference_position(&self) -> Vec3 {
        self.pose.origin
    }

    /// Element offsets relative to the reference element.
    pub fn element_offsets(&self) -> Vec<Vec3> {
        let r = self.reference();
        let (r0, c0) = ((r / self.cols) as f64, (r % self.cols) as f64);
        let [u, v, _] = self.pose.basis;
        (0..self.len())
            .map(|i| {
                let dr = (i / self.cols) as f64 - r0;
                let dc = (i % self.cols) as f64 - c0;
                u * (dc * self.spacing) + v * (dr * self.spacing)
            })
            .collect()
    }
}

pub fn element_positions(array: &ArraySpec) -> Vec<Vec3> {
    let o = array.pose.origin;
    array.element_offsets().into_iter().map(|d| o + d).collect()
}

/// Largest pairwise element distance (symbol D in the Rayleigh formula).
pub fn aperture_diameter(array: &ArraySpec) -> f64 {
    let pos = element_positions(array);
    let mut best = 0.0f64;
    for (i, a) in pos.iter().enumerate() {
        for b in &pos[i + 1..] {
            best = best.max(a.distance(*b));
        }
    }
    best
}

/// Near/far-field boundary `2 D^2 / lambda`.
pub fn rayleigh_distance(aperture: f64, wavelength: f64) -> Result<f64> {
    if !(wavelength > 0.0) {
        return Err(invalid("wavelength must be positive"));
    }
    if !(aperture >= 0.0) {
        return Err(invalid("aperture must be non-negative"));
    }
    Ok(2.0 * aperture * aperture / wavelength)
}

/// Reference-path geometry of one multipath component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathGeometry {
    pub hops: Vec<Vec3>,
    /// Delay of the reference channel Tx_ref -> hops -> Rx_ref, seconds.
    pub tau_ref: f64,
    pub d_tx: f64,
    pub d_rx: f64,
    /// Unit vector from the reference Tx toward the first hop.
    pub omega_tx: Vec3,
    /// Unit vector from the reference Rx toward the last hop.
    pub omega_rx: Vec3,
}

impl PathGeometry {
    pub fn bounce_order(&self) -> usize {
        self.hops.len()
    }

    pub fn length(&self) -> f64 {
        self.tau_ref * SPEED_OF_LIGHT
    }
}

pub fn path_geometry(tx_ref: Vec3, rx_ref: Vec3, hops: &[Vec3]) -> Result<PathGeometry> {
    let (first, last) = match (hops.first(), hops.last()) {
        (Some(f), Some(l)) => (*f, *l),
        _ => return Err(invalid("a path needs at least one interaction point")),
    };
    let mut length = 0.0;
    let mut prev = tx_ref;
    for (i, &h) in hops.iter().chain(std::iter::once(&rx_ref)).enumerate() {
        let seg = prev.distance(h);
        if seg < COINCIDENCE_TOL {
            return Err(Error::DegenerateGeometry(format!(
                "polyline point {i} coincides with its predecessor"
            )));
        }
        length += seg;
        prev = h;
    }
    let d_tx = tx_ref.distance(first);
    let d_rx = rx_ref.distance(last);
    Ok(PathGeometry {
        hops: hops.to_vec(),
        tau_ref: length / SPEED_OF_LIGHT,
        d_tx,
        d_rx,
        omega_tx: (first - tx_ref) / d_tx,
        omega_rx: (last - rx_ref) / d_rx,
    })
}

/// Geometry of one side (Tx or Rx) of a path as seen from a single element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerElementGeometry {
    pub d_elem: f64,
    pub omega_elem: Vec3,
    /// Delay difference to the reference element, seconds.
    pub dtau: f64,
}

/// Delay and SNS amplitude of one Tx/Rx element pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementPairGeometry {
    pub tau: f64,
    pub dalpha: f64,
}

fn check_unit(omega: Vec3) -> Result<()> {
    if !omega.is_finite() || (omega.norm() - 1.0).abs() > UNIT_TOL {
        return Err(invalid("orientation vector is not unit norm"));
    }
    Ok(())
}

pub fn per_element_distance(d_ref: f64, omega_ref: Vec3, element_offset: Vec3) -> Result<f64> {
    if !(d_ref > 0.0) {
        return Err(invalid("reference distance must be positive"));
    }
    check_unit(omega_ref)?;
    Ok((omega_ref * d_ref - element_offset).norm())
}

pub fn per_element_orientation(d_ref: f64, omega_ref: Vec3, element_offset: Vec3) -> Result<Vec3> {
    Ok(element_geometry(d_ref, omega_ref, element_offset)?.omega_elem)
}

pub fn element_geometry(d_ref: f64, omega_ref: Vec3, element_offset: Vec3) -> Result<PerElementGeometry> {
    let d_elem = per_element_distance(d_ref, omega_ref, element_offset)?;
    if d_elem < COINCIDENCE_TOL {
        return Err(Error::DegenerateGeometry(
            "array element coincides with the scatterer".into(),
        ));
    }
    Ok(PerElementGeometry {
        d_elem,
        omega_elem: (omega_ref * d_ref - element_offset) / d_elem,
        dtau: (d_elem - d_ref) / SPEED_OF_LIGHT,
    })
}

pub fn per_element_delay(tau_ref: f64, dtau_tx: f64, dtau_rx: f64) -> Result<f64> {
    if !(tau_ref > 0.0) {
        return Err(invalid("reference delay must be positive"));
    }
    let tau = tau_ref + dtau_rx + dtau_tx;
    if !(tau > 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "per-element delay {tau:e} s is not positive"
        )));
    }
    Ok(tau)
}

pub fn sns_amplitude(tau_ref: f64, tau_elem: f64) -> Result<f64> {
    if !(tau_elem > 0.0) {
        return Err(invalid("element delay must be positive"));
    }
    Ok(tau_ref / tau_elem)
}

pub fn element_pair(tau_ref: f64, tx: &PerElementGeometry, rx: &PerElementGeometry) -> Result<ElementPairGeometry> {
    let tau = per_element_delay(tau_ref, tx.dtau, rx.dtau)?;
    Ok(ElementPairGeometry {
        tau,
        dalpha: sns_amplitude(tau_ref, tau)?,
    })
}
