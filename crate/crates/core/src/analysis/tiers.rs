//! Near-equal tiers of sorted edge lengths.

use serde::{Deserialize, Serialize};

use super::mst::MstEdges;

pub const DEFAULT_GAP: f64 = 0.15;
/// Median coefficient of variation above which no ladder is reported.
pub const LADDER_MAX_CV: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tier {
    /// Member lengths, ascending.
    pub lengths: Vec<f64>,
    /// Indices of the member edges in the input, parallel to `lengths`.
    pub members: Vec<usize>,
    pub mean: f64,
    pub cv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeTierLadder {
    pub gap: f64,
    pub tiers: Vec<Tier>,
    /// `mean[k+1] / mean[k]`.
    pub step_ratios: Vec<f64>,
    /// `mean[k+1] - mean[k]`.
    pub step_differences: Vec<f64>,
    /// Median over edges of the coefficient of variation of their tier.
    pub median_cv: f64,
    pub no_ladder: bool,
}

impl EdgeTierLadder {
    /// Split ascending lengths wherever `(l[k+1] - l[k]) / l[k] > gap`.
    pub fn from_lengths(lengths: &[f64], gap: f64) -> Self {
        assert!(!lengths.is_empty(), "tier ladder needs at least one length");
        assert!(gap > 0.0, "gap threshold must be positive");
        let mut order: Vec<usize> = (0..lengths.len()).collect();
        order.sort_by(|&a, &b| lengths[a].total_cmp(&lengths[b]).then(a.cmp(&b)));

        let mut groups: Vec<Vec<usize>> = vec![vec![order[0]]];
        for w in order.windows(2) {
            let (prev, next) = (lengths[w[0]], lengths[w[1]]);
            if (next - prev) / prev > gap {
                groups.push(Vec::new());
            }
            groups.last_mut().expect("non-empty").push(w[1]);
        }
        let tiers: Vec<Tier> = groups
            .into_iter()
            .map(|members| {
                let lens: Vec<f64> = members.iter().map(|&i| lengths[i]).collect();
                let (mean, cv) = mean_cv(&lens);
                Tier {
                    lengths: lens,
                    members,
                    mean,
                    cv,
                }
            })
            .collect();
        let step_ratios = tiers.windows(2).map(|w| w[1].mean / w[0].mean).collect();
        let step_differences = tiers.windows(2).map(|w| w[1].mean - w[0].mean).collect();

        let mut per_edge_cv: Vec<f64> = tiers
            .iter()
            .flat_map(|t| std::iter::repeat(t.cv).take(t.lengths.len()))
            .collect();
        per_edge_cv.sort_by(f64::total_cmp);
        let median_cv = median_sorted(&per_edge_cv);
        let no_ladder = tiers.len() == 1 || median_cv > LADDER_MAX_CV;
        Self {
            gap,
            tiers,
            step_ratios,
            step_differences,
            median_cv,
            no_ladder,
        }
    }

    /// Tier number of every input edge.
    pub fn tier_of(&self) -> Vec<usize> {
        let n = self.tiers.iter().map(|t| t.members.len()).sum();
        let mut out = vec![0; n];
        for (k, t) in self.tiers.iter().enumerate() {
            for &m in &t.members {
                out[m] = k;
            }
        }
        out
    }
}

pub fn edge_tier_ladder(edges: &MstEdges, gap: f64) -> EdgeTierLadder {
    EdgeTierLadder::from_lengths(&edges.lengths(), gap)
}

/// Mean and coefficient of variation (population standard deviation over mean).
pub fn mean_cv(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.iter().all(|v| *v == values[0]) {
        return (values[0], 0.0);
    }
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let cv = if mean > 0.0 { var.sqrt() / mean } else { 0.0 };
    (mean, cv)
}

fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
