use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::complexity::rms_length;
use crate::config::{distance, MassConfiguration};

/// Particle counts and densities in equal-width radial bins about the center
/// of mass. Radii are in units of `l_rms`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub dim: usize,
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// Count per unit annulus area (2D) or shell volume (3D).
    pub densities: Vec<f64>,
}

/// Radii of every particle from the center of mass, in units of `l_rms`.
pub fn radii(config: &MassConfiguration) -> Vec<f64> {
    let cm = config.center_of_mass();
    let scale = rms_length(config);
    config.points().map(|p| distance(p, &cm) / scale).collect()
}

fn shell_measure(dim: usize, r0: f64, r1: f64) -> f64 {
    match dim {
        2 => PI * (r1 * r1 - r0 * r0),
        _ => 4.0 / 3.0 * PI * (r1.powi(3) - r0.powi(3)),
    }
}

/// Equal-width bins from 0 to the largest radius; the outermost bin is closed.
pub fn radial_density_profile(config: &MassConfiguration, bins: usize) -> RadialProfile {
    assert!(bins >= 2, "radial profile needs at least 2 bins");
    let r = radii(config);
    let r_max = r.iter().copied().fold(0.0f64, f64::max);
    let width = r_max / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|k| k as f64 * width).collect();
    let mut counts = vec![0usize; bins];
    for &ri in &r {
        let k = if width > 0.0 { ((ri / width) as usize).min(bins - 1) } else { 0 };
        counts[k] += 1;
    }
    let densities = counts
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let m = shell_measure(config.dim(), edges[k], edges[k + 1]);
            if m > 0.0 {
                c as f64 / m
            } else {
                0.0
            }
        })
        .collect();
    RadialProfile {
        dim: config.dim(),
        edges,
        counts,
        densities,
    }
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let rx = ranks(x);
    let ry = ranks(y);
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my) * (b - my)).sum();
    if vx == 0.0 || vy == 0.0 {
        0.0
    } else {
        cov / (vx * vy).sqrt()
    }
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut k = 0;
    while k < idx.len() {
        let mut end = k;
        while end + 1 < idx.len() && v[idx[end + 1]] == v[idx[k]] {
            end += 1;
        }
        let avg = (k + end) as f64 / 2.0 + 1.0;
        for &i in &idx[k..=end] {
            out[i] = avg;
        }
        k = end + 1;
    }
    out
}
