//! Structure reports for one configuration.

use std::path::Path;

use anyhow::Result;
use ccshape_core::analysis::{
    counting_report, euclidean_mst, fingerprint, nearest_neighbor_stats, radial_density_profile, void_census,
    CountingReport, EdgeTierLadder, NeighborStats, VoidReport,
};
use ccshape_core::{complexity, rms_length, MassConfiguration};
use serde::Serialize;

use crate::io::{num, write_csv, write_json};
use crate::run_config::AnalysisOptions;

pub const RADIAL_HEADER: [&str; 4] = ["r_lo", "r_hi", "count", "density"];
pub const MST_HEADER: [&str; 4] = ["i", "j", "length", "tier"];

#[derive(Debug, Serialize)]
struct Summary<'a> {
    n: usize,
    dim: usize,
    complexity: f64,
    rms_length: f64,
    fingerprint_hash: String,
    /// Lengths in the reports are in units of `l_rms`.
    length_unit: &'static str,
    nearest_neighbors: NeighborReport,
    counting: &'a CountingReport,
}

#[derive(Debug, Serialize)]
struct NeighborReport {
    inner_fraction: f64,
    sampled: usize,
    mean: f64,
    cv: f64,
    histogram: Vec<(f64, f64, usize)>,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum Voids {
    Found(VoidReport),
    Unavailable { error: String },
}

/// Facts printed after an analysis.
pub struct Outcome {
    pub fingerprint_hash: String,
    pub complexity: f64,
    pub ladder: EdgeTierLadder,
    pub neighbors: NeighborStats,
    pub counting: CountingReport,
}

/// Write `radial.csv`, `mst.csv`, `tiers.json`, `voids.json` and `summary.json`
/// into `dir`.
pub fn analyze(config: &MassConfiguration, options: &AnalysisOptions, dir: &Path) -> Result<Outcome> {
    let report = complexity(config)?;
    let scale = rms_length(config);
    let print = fingerprint(config)?;

    let radial = radial_density_profile(config, options.bins);
    write_csv(
        &dir.join("radial.csv"),
        &RADIAL_HEADER,
        (0..options.bins).map(|k| {
            vec![
                num(radial.edges[k]),
                num(radial.edges[k + 1]),
                radial.counts[k].to_string(),
                num(radial.densities[k]),
            ]
        }),
    )?;

    let mst = euclidean_mst(config);
    let lengths: Vec<f64> = mst.lengths().iter().map(|l| l / scale).collect();
    let ladder = EdgeTierLadder::from_lengths(&lengths, options.gap);
    let tier = ladder.tier_of();
    write_csv(
        &dir.join("mst.csv"),
        &MST_HEADER,
        mst.edges
            .iter()
            .zip(&lengths)
            .zip(&tier)
            .map(|((e, l), t)| vec![e.i.to_string(), e.j.to_string(), num(*l), (t + 1).to_string()]),
    )?;
    write_json(&dir.join("tiers.json"), &ladder)?;

    if options.voids > 0 {
        let voids = match void_census(config, options.voids) {
            Ok(v) => Voids::Found(v),
            Err(e) => {
                log::warn!("void census skipped: {e}");
                Voids::Unavailable { error: e.to_string() }
            }
        };
        write_json(&dir.join("voids.json"), &voids)?;
    }

    let neighbors = nearest_neighbor_stats(config, options.inner_fraction);
    let counting = counting_report(config.len(), config.dim());
    write_json(
        &dir.join("summary.json"),
        &Summary {
            n: config.len(),
            dim: config.dim(),
            complexity: report.complexity,
            rms_length: scale,
            fingerprint_hash: print.hash(),
            length_unit: "l_rms",
            nearest_neighbors: NeighborReport {
                inner_fraction: options.inner_fraction,
                sampled: neighbors.sampled,
                mean: neighbors.mean / scale,
                cv: neighbors.cv,
                histogram: neighbors
                    .histogram
                    .iter()
                    .map(|b| (b.lo / scale, b.hi / scale, b.count))
                    .collect(),
            },
            counting: &counting,
        },
    )?;
    Ok(Outcome {
        fingerprint_hash: print.hash(),
        complexity: report.complexity,
        ladder,
        neighbors,
        counting,
    })
}
