use serde::{Deserialize, Serialize};

use crate::config::MassConfiguration;

use super::radial::radii;
use super::tiers::mean_cv;

pub const DEFAULT_INNER_FRACTION: f64 = 0.7;
const HISTOGRAM_BINS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborStats {
    /// Particles inside the inner region.
    pub sampled: usize,
    pub mean: f64,
    pub cv: f64,
    pub histogram: Vec<HistogramBin>,
}

/// Nearest-neighbor distances (input units) of the particles whose radius is at
/// most `inner_fraction` of the largest radius. Neighbors may lie anywhere.
pub fn nearest_neighbor_stats(config: &MassConfiguration, inner_fraction: f64) -> NeighborStats {
    assert!(
        inner_fraction > 0.0 && inner_fraction <= 1.0,
        "inner fraction must lie in (0, 1]"
    );
    let r = radii(config);
    let r_max = r.iter().copied().fold(0.0f64, f64::max);
    let cut = inner_fraction * r_max;
    let n = config.len();
    let mut dists: Vec<f64> = (0..n)
        .filter(|&i| r[i] <= cut * (1.0 + 1e-12))
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| config.separation(i, j))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    // The innermost particle is always sampled.
    if dists.is_empty() {
        let i = (0..n).min_by(|&a, &b| r[a].total_cmp(&r[b])).expect("N >= 2");
        dists.push((0..n).filter(|&j| j != i).map(|j| config.separation(i, j)).fold(f64::INFINITY, f64::min));
    }
    let (mean, cv) = mean_cv(&dists);
    let hi = dists.iter().copied().fold(0.0f64, f64::max);
    let width = hi / HISTOGRAM_BINS as f64;
    let mut counts = vec![0usize; HISTOGRAM_BINS];
    for &d in &dists {
        let k = if width > 0.0 { ((d / width) as usize).min(HISTOGRAM_BINS - 1) } else { HISTOGRAM_BINS - 1 };
        counts[k] += 1;
    }
    let histogram = counts
        .into_iter()
        .enumerate()
        .map(|(k, count)| HistogramBin {
            lo: k as f64 * width,
            hi: (k + 1) as f64 * width,
            count,
        })
        .collect();
    NeighborStats {
        sampled: dists.len(),
        mean,
        cv,
        histogram,
    }
}
