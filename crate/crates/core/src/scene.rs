//! Parametric indoor scenes and ground-truth multipath generation.
//!
//! Two independent generators are provided: specular wall reflections via
//! the image method, and ordered chains of point scatterers. Both return
//! paths sorted by bounce order and then lexicographically by the
//! interaction indices.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{wrap_phase, PathCoefficients};
use crate::error::{invalid, Error, Result};
use crate::geometry::{element_positions, path_geometry, ArraySpec, PathGeometry, Pose, Vec3, COINCIDENCE_TOL};

/// Complex numbers serialize as `{"re": .., "im": ..}`.
pub mod complex_json {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct ReIm {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        ReIm { re: z.re, im: z.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let v = ReIm::deserialize(d)?;
        Ok(Complex64::new(v.re, v.im))
    }
}

/// Planar rectangle `corner + s*edge_u + t*edge_v`, `s, t in [0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wall {
    pub corner: Vec3,
    pub edge_u: Vec3,
    pub edge_v: Vec3,
    #[serde(with = "complex_json")]
    pub reflection: Complex64,
}

impl Wall {
    pub fn new(corner: Vec3, edge_u: Vec3, edge_v: Vec3, reflection: Complex64) -> Self {
        Self {
            corner,
            edge_u,
            edge_v,
            reflection,
        }
    }

    pub fn normal(&self) -> Vec3 {
        self.edge_u.cross(self.edge_v).normalized().unwrap_or(Vec3::ZERO)
    }

    pub fn validate(&self) -> Result<()> {
        if self.edge_u.cross(self.edge_v).norm() < COINCIDENCE_TOL {
            return Err(invalid("wall edge vectors are linearly dependent"));
        }
        if self.reflection.norm() > 1.0 + 1e-12 {
            return Err(invalid("wall reflection coefficient exceeds unit magnitude"));
        }
        Ok(())
    }

    /// Whether a point of the wall's plane lies inside the rectangle,
    /// with `tol` meters of slack.
    fn contains_planar(&self, x: Vec3, tol: f64) -> bool {
        let w = x - self.corner;
        let (uu, uv, vv) = (
            self.edge_u.dot(self.edge_u),
            self.edge_u.dot(self.edge_v),
            self.edge_v.dot(self.edge_v),
        );
        let (wu, wv) = (w.dot(self.edge_u), w.dot(self.edge_v));
        let det = uu * vv - uv * uv;
        let s = (wu * vv - wv * uv) / det;
        let t = (wv * uu - wu * uv) / det;
        let su = tol / uu.sqrt();
        let tv = tol / vv.sqrt();
        s >= -su && s <= 1.0 + su && t >= -tv && t <= 1.0 + tv
    }

    /// Parameter `t` and point where segment `a -> b` crosses the wall plane.
    fn plane_crossing(&self, a: Vec3, b: Vec3) -> Option<(f64, Vec3)> {
        let n = self.normal();
        let denom = (b - a).dot(n);
        if denom.abs() < 1e-15 {
            return None;
        }
        let t = (self.corner - a).dot(n) / denom;
        Some((t, a + (b - a) * t))
    }

    /// Whether the open segment `a -> b` passes through the rectangle.
    fn blocks(&self, a: Vec3, b: Vec3) -> bool {
        let len = a.distance(b);
        match self.plane_crossing(a, b) {
            Some((t, x)) => {
                let eps = OCCLUSION_TOL / len;
                t > eps && t < 1.0 - eps && self.contains_planar(x, OCCLUSION_TOL)
            }
            None => false,
        }
    }
}

const OCCLUSION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scatterer {
    pub position: Vec3,
    #[serde(with = "complex_json")]
    pub sigma: Complex64,
    #[serde(default)]
    pub velocity: f64,
}

impl Scatterer {
    pub fn new(position: Vec3, sigma: Complex64) -> Self {
        Self {
            position,
            sigma,
            velocity: 0.0,
        }
    }

    pub fn is_active(&self) -> bool {
        self.sigma.norm() > 0.0
    }
}

/// Axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn new(min: Vec3, max: Vec3) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, p: Vec3) -> bool {
        (self.min.x..=self.max.x).contains(&p.x)
            && (self.min.y..=self.max.y).contains(&p.y)
            && (self.min.z..=self.max.z).contains(&p.z)
    }

    pub fn is_valid(&self) -> bool {
        self.min.is_finite() && self.max.is_finite() && self.min.x <= self.max.x && self.min.y <= self.max.y && self.min.z <= self.max.z
    }

    pub fn diagonal(&self) -> f64 {
        self.min.distance(self.max)
    }
}

fn unit_scale() -> [f64; 3] {
    [1.0; 3]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneConfig {
    pub walls: Vec<Wall>,
    pub scatterers: Vec<Scatterer>,
    pub tx_array: ArraySpec,
    pub rx_array: ArraySpec,
    pub bounds: Aabb,
    /// Extra amplitude factor applied to 1-, 2- and 3-bounce paths.
    #[serde(default = "unit_scale")]
    pub bounce_scale: [f64; 3],
}

impl SceneConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.bounds.is_valid() {
            return Err(invalid("scene bounds are empty or not finite"));
        }
        for (i, w) in self.walls.iter().enumerate() {
            w.validate().map_err(|e| invalid(format!("walls[{i}]: {e}")))?;
        }
        for (name, a) in [("tx_array", &self.tx_array), ("rx_array", &self.rx_array)] {
            a.validate().map_err(|e| invalid(format!("{name}: {e}")))?;
            if !element_positions(a).iter().all(|p| self.bounds.contains(*p)) {
                return Err(invalid(format!("{name} extends outside the scene bounds")));
            }
        }
        for (i, s) in self.scatterers.iter().enumerate() {
            if !s.position.is_finite() || !s.velocity.is_finite() {
                return Err(invalid(format!("scatterers[{i}] is not finite")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthPath {
    pub geometry: PathGeometry,
    pub coefficients: PathCoefficients,
    pub bounce_order: usize,
}

/// Reflection of `point` across the wall's plane.
pub fn mirror_image(point: Vec3, wall: &Wall) -> Vec3 {
    let n = wall.normal();
    point - n * (2.0 * (point - wall.corner).dot(n))
}

fn check_max_bounce(k: usize) -> Result<()> {
    if !(1..=3).contains(&k) {
        return Err(invalid(format!("max_bounce must be 1, 2 or 3, got {k}")));
    }
    Ok(())
}

/// Calls `f` for each ordered index sequence of length `len` over `0..n`,
/// lexicographically, keeping only sequences accepted by `ok(prefix, next)`.
fn for_each_sequence(n: usize, len: usize, ok: &dyn Fn(&[usize], usize) -> bool, f: &mut dyn FnMut(&[usize])) {
    fn rec(n: usize, len: usize, cur: &mut Vec<usize>, ok: &dyn Fn(&[usize], usize) -> bool, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == len {
            f(cur);
            return;
        }
        for i in 0..n {
            if ok(cur, i) {
                cur.push(i);
                rec(n, len, cur, ok, f);
                cur.pop();
            }
        }
    }
    rec(n, len, &mut Vec::with_capacity(len), ok, f);
}

/// Specular wall paths up to `max_bounce` reflections, found by successive
/// images of the reference Tx and validated for rectangle containment and
/// occlusion by the remaining walls.
pub fn image_method_paths(scene: &SceneConfig, max_bounce: usize) -> Result<Vec<GroundTruthPath>> {
    check_max_bounce(max_bounce)?;
    let tx = scene.tx_array.reference_position();
    let rx = scene.rx_array.reference_position();
    let walls = &scene.walls;
    let mut out = Vec::new();
    for k in 1..=max_bounce {
        // absorbing walls occlude but never reflect
        let no_repeat =
            |prefix: &[usize], next: usize| prefix.last() != Some(&next) && walls[next].reflection != Complex64::new(0.0, 0.0);
        for_each_sequence(walls.len(), k, &no_repeat, &mut |seq| {
            if let Some(p) = specular_path(tx, rx, walls, seq, scene.bounce_scale[k - 1]) {
                out.push(p);
            }
        });
    }
    Ok(out)
}

fn specular_path(tx: Vec3, rx: Vec3, walls: &[Wall], seq: &[usize], scale: f64) -> Option<GroundTruthPath> {
    let mut images = Vec::with_capacity(seq.len());
    let mut img = tx;
    for &w in seq {
        img = mirror_image(img, &walls[w]);
        images.push(img);
    }
    let mut points = vec![Vec3::ZERO; seq.len()];
    let mut target = rx;
    for i in (0..seq.len()).rev() {
        let wall = &walls[seq[i]];
        let (t, x) = wall.plane_crossing(target, images[i])?;
        if !(t > 0.0 && t < 1.0) || !wall.contains_planar(x, OCCLUSION_TOL) {
            return None;
        }
        points[i] = x;
        target = x;
    }
    // occlusion: each leg against every wall it does not touch
    let mut poly = Vec::with_capacity(seq.len() + 2);
    poly.push((tx, None));
    poly.extend(points.iter().zip(seq).map(|(p, &w)| (*p, Some(w))));
    poly.push((rx, None));
    for leg in poly.windows(2) {
        let (a, wa) = leg[0];
        let (b, wb) = leg[1];
        for (j, wall) in walls.iter().enumerate() {
            if Some(j) == wa || Some(j) == wb {
                continue;
            }
            if wall.blocks(a, b) {
                return None;
            }
        }
    }
    let geometry = path_geometry(tx, rx, &points).ok()?;
    let gain: Complex64 = seq.iter().map(|&w| walls[w].reflection).product();
    let phi: f64 = seq.iter().map(|&w| walls[w].reflection.arg()).sum();
    let alpha = gain.norm() * scale / geometry.length();
    Some(GroundTruthPath {
        bounce_order: seq.len(),
        coefficients: PathCoefficients::new(alpha, wrap_phase(phi), 0.0),
        geometry,
    })
}

/// Number of ordered chains of distinct elements from `n` with length
/// `1..=k`.
pub fn chain_count(n: usize, k: usize) -> usize {
    (1..=k.min(n)).map(|j| (n - j + 1..=n).product::<usize>()).sum()
}

/// All ordered chains of distinct active scatterers up to `max_bounce`.
pub fn scatterer_chain_paths(scene: &SceneConfig, max_bounce: usize) -> Result<Vec<GroundTruthPath>> {
    check_max_bounce(max_bounce)?;
    let active: Vec<&Scatterer> = scene.scatterers.iter().filter(|s| s.is_active()).collect();
    for (i, a) in active.iter().enumerate() {
        for b in &active[i + 1..] {
            if a.position.distance(b.position) < COINCIDENCE_TOL {
                return Err(invalid("scatterers must be pairwise distinct"));
            }
        }
    }
    let tx = scene.tx_array.reference_position();
    let rx = scene.rx_array.reference_position();
    let mut out = Vec::new();
    let mut err = None;
    for k in 1..=max_bounce {
        let distinct = |prefix: &[usize], next: usize| !prefix.contains(&next);
        for_each_sequence(active.len(), k, &distinct, &mut |seq| {
            if err.is_some() {
                return;
            }
            let hops: Vec<Vec3> = seq.iter().map(|&i| active[i].position).collect();
            match path_geometry(tx, rx, &hops) {
                Ok(geometry) => {
                    let mag: f64 = seq.iter().map(|&i| active[i].sigma.norm()).product();
                    let phi: f64 = seq.iter().map(|&i| active[i].sigma.arg()).sum();
                    let v: f64 = seq.iter().map(|&i| active[i].velocity).sum();
                    let alpha = mag * scene.bounce_scale[k - 1] / geometry.length();
                    out.push(GroundTruthPath {
                        bounce_order: k,
                        coefficients: PathCoefficients::new(alpha, phi, v),
                        geometry,
                    });
                }
                Err(e) => err = Some(e),
            }
        });
    }
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

pub fn scene_to_json(scene: &SceneConfig) -> Result<String> {
    serde_json::to_string_pretty(scene).map_err(|e| Error::Format(e.to_string()))
}

pub fn scene_from_json(text: &str) -> Result<SceneConfig> {
    let scene: SceneConfig = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    scene.validate()?;
    Ok(scene)
}

pub fn save_scene(scene: &SceneConfig, path: impl AsRef<Path>) -> Result<()> {
    let mut text = scene_to_json(scene)?;
    text.push('\n');
    crate::io::write_atomic(path.as_ref(), text.as_bytes())
}

pub fn load_scene(path: impl AsRef<Path>) -> Result<SceneConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    scene_from_json(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// A 4 m x 4 m office: four walls, three point scatterers on the 0.1 m
/// lattice, and 7x7 half-wavelength arrays at 30 GHz facing into the room.
pub fn demo_scene() -> SceneConfig {
    let fc = 30e9;
    let h = Vec3::Z * 3.0;
    let refl = Complex64::new(-0.6, 0.1);
    let (x0, x1, y0, y1, z0) = (-1.0, 3.0, -1.0, 3.0, -1.5);
    let walls = vec![
        Wall::new(Vec3::new(x0, y0, z0), Vec3::X * (x1 - x0), h, refl),
        Wall::new(Vec3::new(x1, y0, z0), Vec3::Y * (y1 - y0), h, refl),
        Wall::new(Vec3::new(x1, y1, z0), Vec3::X * (x0 - x1), h, refl),
        Wall::new(Vec3::new(x0, y1, z0), Vec3::Y * (y0 - y1), h, refl),
    ];
    let scatterers = vec![
        Scatterer::new(Vec3::new(0.5, 1.2, 0.0), Complex64::new(0.9, 0.3)),
        Scatterer::new(Vec3::new(1.4, 0.6, 0.0), Complex64::new(-0.5, 0.7)),
        Scatterer::new(Vec3::new(1.2, 1.7, 0.0), Complex64::new(0.4, -0.8)),
    ];
    let facing = |origin| Pose::from_axes(origin, Vec3::Z, Vec3::X).expect("orthonormal axes");
    SceneConfig {
        walls,
        scatterers,
        tx_array: ArraySpec::half_wavelength(7, fc, facing(Vec3::new(0.2, -0.6, 0.0))),
        rx_array: ArraySpec::half_wavelength(7, fc, facing(Vec3::new(1.8, -0.6, 0.0))),
        bounds: Aabb::new(Vec3::new(x0, y0, z0), Vec3::new(x1, y1, z0 + 3.0)),
        bounce_scale: unit_scale(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SPEED_OF_LIGHT;

    fn base_scene(walls: Vec<Wall>, tx: Vec3, rx: Vec3) -> SceneConfig {
        SceneConfig {
            walls,
            scatterers: vec![],
            tx_array: ArraySpec::new(1, 1, 0.005, Pose::at(tx)),
            rx_array: ArraySpec::new(1, 1, 0.005, Pose::at(rx)),
            bounds: Aabb::new(Vec3::new(-20.0, -20.0, -20.0), Vec3::new(20.0, 20.0, 20.0)),
            bounce_scale: [1.0; 3],
        }
    }

    fn floor_y(y: f64, refl: Complex64) -> Wall {
        Wall::new(Vec3::new(-10.0, y, -10.0), Vec3::X * 20.0, Vec3::Z * 20.0, refl)
    }

    /// Reflection law: the outgoing direction is the incoming direction
    /// mirrored in the wall normal.
    fn assert_specular(path: &GroundTruthPath, scene: &SceneConfig, seq: &[usize]) {
        let mut pts = vec![scene.tx_array.reference_position()];
        pts.extend(path.geometry.hops.iter().copied());
        pts.push(scene.rx_array.reference_position());
        for (i, &w) in seq.iter().enumerate() {
            let n = scene.walls[w].normal();
            let din = (pts[i + 1] - pts[i]).normalized().unwrap();
            let dout = (pts[i + 2] - pts[i + 1]).normalized().unwrap();
            let mirrored = din - n * (2.0 * din.dot(n));
            assert!(mirrored.angle_to(dout) < 1e-9, "bounce {i}");
            let ai = (-din).angle_to(n).min((-din).angle_to(-n));
            let ar = dout.angle_to(n).min(dout.angle_to(-n));
            assert!((ai - ar).abs() < 1e-9);
        }
    }

    #[test]
    fn mirror_examples() {
        let w = floor_y(0.0, Complex64::new(1.0, 0.0));
        assert_eq!(mirror_image(Vec3::Y, &w), -Vec3::Y);
        let on = Vec3::new(3.0, 0.0, -2.0);
        assert_eq!(mirror_image(on, &w), on);
        let p = Vec3::new(0.3, 1.7, -0.2);
        let tilted = Wall::new(Vec3::new(0.1, 0.2, 0.3), Vec3::new(1.0, 0.5, 0.0), Vec3::new(0.0, 0.3, 1.0), Complex64::new(0.5, 0.0));
        assert!((mirror_image(mirror_image(p, &tilted), &tilted) - p).norm() < 1e-14);
    }

    #[test]
    fn single_wall_reflection() {
        let scene = base_scene(vec![floor_y(0.0, Complex64::new(-0.5, 0.0))], Vec3::Y, Vec3::new(2.0, 1.0, 0.0));
        let paths = image_method_paths(&scene, 1).unwrap();
        assert_eq!(paths.len(), 1);
        let p = &paths[0];
        assert!((p.geometry.hops[0] - Vec3::X).norm() < 1e-12);
        let len = 2.0 * 2f64.sqrt();
        assert!((p.geometry.length() - len).abs() < 1e-12);
        assert!((p.geometry.tau_ref - len / SPEED_OF_LIGHT).abs() < 1e-12 * p.geometry.tau_ref);
        assert!((p.coefficients.alpha - 0.5 / len).abs() < 1e-12);
        assert!((p.coefficients.phi - std::f64::consts::PI).abs() < 1e-12);
        assert_eq!(p.coefficients.velocity, 0.0);
        assert_specular(p, &scene, &[0]);
    }

    #[test]
    fn occluded_or_opposite_side_gives_nothing() {
        // Tx and Rx on opposite sides of the only wall
        let w = Wall::new(Vec3::new(1.0, -10.0, -10.0), Vec3::Y * 20.0, Vec3::Z * 20.0, Complex64::new(0.7, 0.0));
        let scene = base_scene(vec![w], Vec3::ZERO, Vec3::new(2.0, 0.5, 0.0));
        assert!(image_method_paths(&scene, 3).unwrap().is_empty());

        // reflection blocked by a screen between Tx/Rx and the mirror wall
        let mirror = floor_y(0.0, Complex64::new(0.7, 0.0));
        let screen = Wall::new(Vec3::new(-5.0, 0.5, -5.0), Vec3::X * 10.0, Vec3::Z * 10.0, Complex64::new(0.0, 0.0));
        let scene = base_scene(vec![mirror, screen], Vec3::Y, Vec3::new(2.0, 1.0, 0.0));
        let paths = image_method_paths(&scene, 1).unwrap();
        assert!(paths.is_empty(), "{paths:?}");
    }

    #[test]
    fn finite_wall_misses() {
        let small = Wall::new(Vec3::new(3.0, 0.0, -1.0), Vec3::X, Vec3::Z * 2.0, Complex64::new(0.7, 0.0));
        let scene = base_scene(vec![small], Vec3::Y, Vec3::new(2.0, 1.0, 0.0));
        assert!(image_method_paths(&scene, 1).unwrap().is_empty());
    }

    #[test]
    fn parallel_walls_two_bounce() {
        let walls = vec![floor_y(0.0, Complex64::new(0.8, 0.0)), floor_y(3.0, Complex64::new(0.0, 0.6))];
        let scene = base_scene(walls, Vec3::Y, Vec3::new(4.0, 1.0, 0.0));
        let paths = image_method_paths(&scene, 2).unwrap();
        let two: Vec<_> = paths.iter().filter(|p| p.bounce_order == 2).collect();
        assert_eq!(paths.len(), 4);
        assert_eq!(two.len(), 2);
        // lexicographic order: [0,1] then [1,0]
        assert!(two[0].geometry.hops[0].y.abs() < 1e-12);
        assert!((two[0].geometry.hops[1].y - 3.0).abs() < 1e-12);
        assert!((two[1].geometry.hops[0].y - 3.0).abs() < 1e-12);
        assert_specular(two[0], &scene, &[0, 1]);
        assert_specular(two[1], &scene, &[1, 0]);
        for p in &paths {
            let mut len = 0.0;
            let mut prev = scene.tx_array.reference_position();
            for h in p.geometry.hops.iter().chain([scene.rx_array.reference_position()].iter()) {
                len += prev.distance(*h);
                prev = *h;
            }
            assert!((p.geometry.tau_ref - len / SPEED_OF_LIGHT).abs() <= 1e-12 * p.geometry.tau_ref);
            assert_eq!(p.bounce_order, p.geometry.hops.len());
        }
    }

    #[test]
    fn demo_room_three_bounce_specular() {
        let scene = demo_scene();
        let paths = image_method_paths(&scene, 3).unwrap();
        assert!(paths.iter().any(|p| p.bounce_order == 3));
        for p in &paths {
            assert_eq!(p.bounce_order, p.geometry.hops.len());
            let seq: Vec<usize> = p
                .geometry
                .hops
                .iter()
                .map(|h| {
                    scene
                        .walls
                        .iter()
                        .position(|w| (*h - w.corner).dot(w.normal()).abs() < 1e-9 && w.contains_planar(*h, 1e-9))
                        .unwrap()
                })
                .collect();
            assert_specular(p, &scene, &seq);
        }
    }

    #[test]
    fn chain_counts() {
        let mut scene = demo_scene();
        let s = scatterer_chain_paths(&scene, 3).unwrap();
        assert_eq!(s.len(), 15);
        assert_eq!(chain_count(3, 3), 15);
        assert_eq!(s.iter().filter(|p| p.bounce_order == 2).count(), 6);

        scene.scatterers.truncate(2);
        let s = scatterer_chain_paths(&scene, 2).unwrap();
        assert_eq!(s.len(), 4);
        scene.scatterers.truncate(1);
        let s = scatterer_chain_paths(&scene, 1).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].geometry.hops, vec![scene.scatterers[0].position]);

        for n in 0..6 {
            for k in 1..=3 {
                let total: usize = (1..=k)
                    .map(|j| {
                        let mut c = 0;
                        for_each_sequence(n, j, &|p: &[usize], x| !p.contains(&x), &mut |_| c += 1);
                        c
                    })
                    .sum();
                assert_eq!(chain_count(n, k), total, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn chain_coefficients() {
        let mut scene = demo_scene();
        scene.scatterers[0].velocity = 0.5;
        scene.scatterers[1].velocity = -0.2;
        let paths = scatterer_chain_paths(&scene, 2).unwrap();
        let p = paths.iter().find(|p| p.geometry.hops == vec![scene.scatterers[0].position, scene.scatterers[1].position]).unwrap();
        let s0 = scene.scatterers[0].sigma;
        let s1 = scene.scatterers[1].sigma;
        assert!((p.coefficients.alpha - s0.norm() * s1.norm() / p.geometry.length()).abs() < 1e-14);
        assert!((p.coefficients.phi - wrap_phase(s0.arg() + s1.arg())).abs() < 1e-12);
        assert!((p.coefficients.velocity - 0.3).abs() < 1e-15);
    }

    #[test]
    fn duplicate_scatterers_rejected() {
        let mut scene = demo_scene();
        scene.scatterers.push(scene.scatterers[0].clone());
        assert!(scatterer_chain_paths(&scene, 1).is_err());
        assert!(scatterer_chain_paths(&demo_scene(), 4).is_err());
    }

    #[test]
    fn scene_round_trip_and_errors() {
        let scene = demo_scene();
        scene.validate().unwrap();
        let text = scene_to_json(&scene).unwrap();
        assert_eq!(scene_from_json(&text).unwrap(), scene);
        assert!(text.contains("\"re\""));

        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v.as_object_mut().unwrap().remove("walls");
        let err = scene_from_json(&serde_json::to_string_pretty(&v).unwrap()).unwrap_err();
        assert!(err.to_string().contains("walls"), "{err}");

        let err = scene_from_json("{\n  \"walls\": [\n    oops\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");

        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("scene.json");
        save_scene(&scene, &f).unwrap();
        assert_eq!(load_scene(&f).unwrap(), scene);
    }

    #[test]
    fn arrays_must_be_inside_bounds() {
        let mut scene = demo_scene();
        scene.tx_array.pose.origin = Vec3::new(10.0, 0.0, 0.0);
        assert!(scene.validate().is_err());
    }
}
