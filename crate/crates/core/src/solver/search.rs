//! Seeded multi-start searches and catalog-style deduplication.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::fingerprint::{match_classes, ShapeFingerprint};

use super::{find_from, minimize_from, perturb, CriticalPoint, Origin, Seeding, SolverConfig, SolverError};

/// Stream offset separating saddle-phase starts from minimization starts.
const SADDLE_STREAM: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Minima,
    AllCritical,
}

/// Inclusive `C` band; relative bands are multiples of the best `C` found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TargetBand {
    Absolute { lo: f64, hi: f64 },
    RelativeToMin { lo: f64, hi: f64 },
}

impl TargetBand {
    fn bounds(&self, c_min: f64) -> (f64, f64) {
        match *self {
            TargetBand::Absolute { lo, hi } => (lo, hi),
            TargetBand::RelativeToMin { lo, hi } => (lo * c_min, hi * c_min),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    /// Deduplicated points, ascending by `C`.
    pub points: Vec<CriticalPoint>,
    /// Lowest `C` among `points`.
    pub c_min: Option<f64>,
    /// Lowest `C` found before band filtering.
    pub reference_c_min: Option<f64>,
    pub attempted: usize,
    pub converged: usize,
    pub failed: usize,
    pub duplicates: usize,
    pub outside_band: usize,
}

#[derive(Debug)]
struct StartResult {
    start: u64,
    outcome: Result<CriticalPoint, SolverError>,
}

fn run_minima(cfg: &SolverConfig, count: usize) -> Vec<StartResult> {
    (0..count as u64)
        .into_par_iter()
        .map(|start| StartResult {
            start,
            outcome: cfg
                .initial_configuration(start)
                .map_err(SolverError::from)
                .and_then(|init| minimize_from(&init, cfg, start, Origin::Random)),
        })
        .collect()
}

fn run_random_critical(cfg: &SolverConfig) -> Vec<StartResult> {
    (0..cfg.starts as u64)
        .into_par_iter()
        .map(|start| StartResult {
            start,
            outcome: cfg
                .initial_configuration(start)
                .map_err(SolverError::from)
                .and_then(|init| find_from(&init, cfg, start, Origin::Random)),
        })
        .collect()
}

fn run_perturbed(cfg: &SolverConfig, parents: &[CriticalPoint], sigmas: &[f64]) -> Vec<StartResult> {
    (0..cfg.starts as u64)
        .into_par_iter()
        .map(|k| {
            let start = SADDLE_STREAM + k;
            let parent = &parents[k as usize % parents.len()];
            let sigma = sigmas[(k as usize / parents.len()) % sigmas.len()];
            let mut rng = cfg.rng(start);
            let origin = Origin::PerturbedMinimum {
                parent_start: parent.provenance.start_index,
                sigma,
            };
            StartResult {
                start,
                outcome: perturb(parent.config(), sigma, &mut rng)
                    .map_err(SolverError::from)
                    .and_then(|init| find_from(&init, cfg, start, origin)),
            }
        })
        .collect()
}

/// Sort by `(C, spectrum, start)` and merge fingerprint-matching points.
/// Returns the kept points and the number of duplicates removed.
pub(crate) fn deduplicate(mut points: Vec<CriticalPoint>) -> (Vec<CriticalPoint>, usize) {
    points.sort_by(|a, b| {
        a.complexity
            .total_cmp(&b.complexity)
            .then_with(|| a.fingerprint.cmp_spectrum(&b.fingerprint))
            .then_with(|| a.provenance.start_index.cmp(&b.provenance.start_index))
    });
    let prints: Vec<ShapeFingerprint> = points.iter().map(|p| p.fingerprint.clone()).collect();
    let classes = match_classes(&prints);
    let total = points.len();
    let kept: Vec<CriticalPoint> = points
        .into_iter()
        .enumerate()
        .filter(|(i, _)| classes[*i] == *i)
        .map(|(_, p)| p)
        .collect();
    let removed = total - kept.len();
    (kept, removed)
}

/// Run `cfg.starts` seeded searches and collect distinct critical points.
///
/// The output depends only on `cfg` (including the master seed), not on the
/// number of worker threads.
pub fn multi_start_search(cfg: &SolverConfig, mode: SearchMode, band: Option<TargetBand>) -> Result<SearchSummary, SolverError> {
    cfg.validate()?;
    let mut results = Vec::new();
    match (mode, &cfg.seeding) {
        (SearchMode::Minima, _) => results.extend(run_minima(cfg, cfg.starts)),
        (SearchMode::AllCritical, Seeding::Random) => results.extend(run_random_critical(cfg)),
        (SearchMode::AllCritical, Seeding::PerturbedMinima { minima_starts, sigmas }) => {
            let minima = run_minima(cfg, *minima_starts);
            let parents: Vec<CriticalPoint> = minima
                .iter()
                .filter_map(|r| r.outcome.as_ref().ok().cloned())
                .collect();
            let (parents, _) = deduplicate(parents);
            if !parents.is_empty() {
                results.extend(run_perturbed(cfg, &parents, sigmas));
            }
            results.extend(minima);
        }
    }
    results.sort_by_key(|r| r.start);

    let attempted = results.len();
    let mut found = Vec::new();
    let mut failed = 0;
    for r in results {
        match r.outcome {
            Ok(p) if p.converged => found.push(p),
            Ok(_) | Err(_) => failed += 1,
        }
    }
    let converged = found.len();
    let (mut points, duplicates) = deduplicate(found);
    let reference_c_min = points.first().map(|p| p.complexity);
    let mut outside_band = 0;
    if let (Some(band), Some(c_min)) = (band, reference_c_min) {
        let (lo, hi) = band.bounds(c_min);
        let before = points.len();
        points.retain(|p| p.complexity >= lo && p.complexity <= hi);
        outside_band = before - points.len();
    }
    Ok(SearchSummary {
        c_min: points.first().map(|p| p.complexity),
        reference_c_min,
        points,
        attempted,
        converged,
        failed,
        duplicates,
        outside_band,
    })
}

/// Lowest `C` over a minima-mode search.
pub fn estimate_c_min(cfg: &SolverConfig) -> Result<f64, SolverError> {
    let summary = multi_start_search(cfg, SearchMode::Minima, None)?;
    summary.c_min.ok_or(SolverError::NoConvergedStarts {
        attempted: summary.attempted,
    })
}
