//! Scoring detections against known scatterer positions.
//!
//! Every detected vertex is a point. Points are paired with truth by greedy
//! nearest matching within a radius, each truth used at most once. A point
//! with no truth inside the radius is a ghost; a point inside the radius of
//! an already claimed truth is a duplicate.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::estimator::DetectedPath;
use crate::geometry::{Vec3, COINCIDENCE_TOL};
use crate::scene::SceneConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointStatus {
    Matched,
    Duplicate,
    Ghost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointOutcome {
    pub path_id: usize,
    pub bounce: usize,
    pub position: Vec3,
    pub status: PointStatus,
    /// Index of the matched truth point.
    pub truth: Option<usize>,
    pub nearest_truth_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub match_radius_m: f64,
    pub true_positives: usize,
    pub ghosts: usize,
    pub duplicates: usize,
    pub missed: usize,
    /// Root-mean-square distance of matched pairs; `None` without matches.
    pub rmse_m: Option<f64>,
    pub truth: Vec<Vec3>,
    pub points: Vec<PointOutcome>,
}

impl Metrics {
    /// Points farther than `distance` from every truth point.
    pub fn far_points(&self, distance: f64) -> usize {
        self.points
            .iter()
            .filter(|p| p.nearest_truth_m.is_none_or(|d| d > distance))
            .count()
    }
}

/// Positions of the active scatterers of a scene.
pub fn truth_positions(scene: &SceneConfig) -> Vec<Vec3> {
    scene.scatterers.iter().filter(|s| s.is_active()).map(|s| s.position).collect()
}

pub fn evaluate(detected: &[DetectedPath], truth: &[Vec3], match_radius: f64) -> Result<Metrics> {
    if !(match_radius > 0.0 && match_radius.is_finite()) {
        return Err(invalid("match radius must be positive"));
    }
    // distinct detected points, first occurrence kept
    let mut points: Vec<(usize, usize, Vec3)> = Vec::new();
    for (id, d) in detected.iter().enumerate() {
        for &p in &d.positions {
            if !points.iter().any(|(_, _, q)| q.distance(p) < COINCIDENCE_TOL) {
                points.push((id, d.order, p));
            }
        }
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, (_, _, p)) in points.iter().enumerate() {
        for (j, t) in truth.iter().enumerate() {
            let d = p.distance(*t);
            if d <= match_radius {
                pairs.push((d, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut point_truth: Vec<Option<usize>> = vec![None; points.len()];
    let mut truth_used = vec![false; truth.len()];
    let mut sq = 0.0;
    let mut tp = 0;
    for (d, i, j) in pairs {
        if point_truth[i].is_none() && !truth_used[j] {
            point_truth[i] = Some(j);
            truth_used[j] = true;
            sq += d * d;
            tp += 1;
        }
    }
    let outcomes: Vec<PointOutcome> = points
        .iter()
        .zip(&point_truth)
        .map(|(&(path_id, bounce, position), &matched)| {
            let nearest = truth.iter().map(|t| position.distance(*t)).min_by(f64::total_cmp);
            let status = match (matched, nearest) {
                (Some(_), _) => PointStatus::Matched,
                (None, Some(d)) if d <= match_radius => PointStatus::Duplicate,
                _ => PointStatus::Ghost,
            };
            PointOutcome {
                path_id,
                bounce,
                position,
                status,
                truth: matched,
                nearest_truth_m: nearest,
            }
        })
        .collect();
    let count = |s: PointStatus| outcomes.iter().filter(|o| o.status == s).count();
    Ok(Metrics {
        match_radius_m: match_radius,
        true_positives: tp,
        ghosts: count(PointStatus::Ghost),
        duplicates: count(PointStatus::Duplicate),
        missed: truth.len() - tp,
        rmse_m: (tp > 0).then(|| (sq / tp as f64).sqrt()),
        truth: truth.to_vec(),
        points: outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn det(order: usize, pos: &[Vec3]) -> DetectedPath {
        DetectedPath {
            order,
            vertex_ids: Vec::new(),
            positions: pos.to_vec(),
            coefficient: Complex64::new(1.0, 0.0),
            amplitude: Complex64::new(1.0, 0.0),
            velocity: 0.0,
            energy: 1.0,
        }
    }

    #[test]
    fn perfect_recovery() {
        let truth = [Vec3::new(1.0, 1.0, 0.0), Vec3::new(0.0, 2.0, 0.0), Vec3::new(2.0, 0.5, 0.0)];
        let d = [det(1, &truth[..1]), det(2, &truth[1..])];
        let m = evaluate(&d, &truth, 0.1).unwrap();
        assert_eq!((m.true_positives, m.ghosts, m.missed), (3, 0, 0));
        assert_eq!(m.rmse_m, Some(0.0));
    }

    #[test]
    fn empty_report() {
        let m = evaluate(&[], &[Vec3::ZERO], 0.1).unwrap();
        assert_eq!((m.true_positives, m.ghosts, m.missed), (0, 0, 1));
        assert_eq!(m.rmse_m, None);
        assert!(evaluate(&[], &[], 0.0).is_err());
    }

    #[test]
    fn offset_detection() {
        let m = evaluate(&[det(1, &[Vec3::new(0.07, 0.0, 0.0)])], &[Vec3::ZERO], 0.15).unwrap();
        assert_eq!(m.true_positives, 1);
        assert!((m.rmse_m.unwrap() - 0.07).abs() < 1e-15);
    }

    #[test]
    fn ghosts_duplicates_and_reuse() {
        let truth = [Vec3::ZERO];
        let d = [
            det(1, &[Vec3::new(0.05, 0.0, 0.0)]),
            det(1, &[Vec3::new(0.02, 0.0, 0.0)]),
            det(1, &[Vec3::new(1.0, 0.0, 0.0)]),
            det(1, &[Vec3::new(1.0, 0.0, 0.0)]),
        ];
        let m = evaluate(&d, &truth, 0.1).unwrap();
        assert_eq!(m.true_positives, 1);
        assert_eq!(m.duplicates, 1);
        assert_eq!(m.ghosts, 1);
        assert_eq!(m.points.len(), 3);
        // the nearer point claims the truth
        assert_eq!(m.points[1].status, PointStatus::Matched);
        assert_eq!(m.far_points(0.5), 1);
    }
}
