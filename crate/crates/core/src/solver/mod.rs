//! Central configurations as critical points of `C` on shape space.

mod hessian;
mod lbfgs;
mod objective;
mod search;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::fingerprint::{fingerprint, ShapeFingerprint};
use crate::complexity::complexity;
use crate::config::{MassConfiguration, MassSpec};
use crate::error::ShapeError;
use crate::gauge::{gauge_fix, residual_of_fixed, ShapeRepresentative};

pub use hessian::{Classification, DENSE_LIMIT, ITERATIVE_EIGENVALUES, ZERO_MODE_RELATIVE};
pub use search::{estimate_c_min, multi_start_search, SearchMode, SearchSummary, TargetBand};

use lbfgs::{LbfgsSettings, Status};
use objective::{ComplexityObjective, GradientNormObjective};

/// Residual at which quasi-Newton descent hands over to Newton polishing.
const NEWTON_SWITCH: [f64; 3] = [1e-6, 1e-8, 1e-9];
const NEWTON_STEPS: usize = 25;
/// Iterations of gradient-norm descent allowed without halving `G`.
const PROGRESS_WINDOW: usize = 2_000;
/// Cap on Levenberg-Marquardt iterations after gradient-norm descent.
const LM_ITERATIONS: usize = 500;
/// Saddle escapes attempted by [`minimize_complexity`] before giving up.
const MAX_ESCAPES: usize = 20;
/// Converged points are Newton-polished towards this residual while it keeps falling.
const POLISH_TARGET: f64 = 1e-15;
const POLISH_STEPS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// Uniform in the unit ball (disk in 2D).
    #[default]
    UniformBall,
    /// Cubic lattice sites nearest the origin, jittered by a quarter spacing.
    JitteredLattice,
}

/// Where all-critical searches start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Seeding {
    /// Fresh samples from [`Sampling`].
    #[default]
    Random,
    /// Perturb minima found by a preliminary minimization with Gaussian noise
    /// of the given scales (cycled), in gauge-fixed coordinates.
    PerturbedMinima {
        minima_starts: usize,
        sigmas: Vec<f64>,
    },
}

impl Seeding {
    pub fn perturbed_minima(minima_starts: usize) -> Self {
        Seeding::PerturbedMinima {
            minima_starts,
            sigmas: vec![0.01, 0.03, 0.1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub n: usize,
    pub dim: usize,
    #[serde(default = "default_masses")]
    pub masses: MassSpec,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tolerance")]
    pub gradient_tolerance: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    #[serde(default = "default_starts")]
    pub starts: usize,
    #[serde(default)]
    pub seeding: Seeding,
}

fn default_masses() -> MassSpec {
    MassSpec::Equal
}
fn default_tolerance() -> f64 {
    1e-10
}
fn default_max_iterations() -> usize {
    50_000
}
fn default_starts() -> usize {
    1
}

impl SolverConfig {
    pub fn new(n: usize, dim: usize) -> Self {
        Self {
            n,
            dim,
            masses: MassSpec::Equal,
            sampling: Sampling::UniformBall,
            seed: 0,
            gradient_tolerance: default_tolerance(),
            max_iterations: default_max_iterations(),
            starts: default_starts(),
            seeding: Seeding::Random,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_starts(mut self, starts: usize) -> Self {
        self.starts = starts;
        self
    }

    pub fn with_masses(mut self, masses: MassSpec) -> Self {
        self.masses = masses;
        self
    }

    /// Check field constraints, naming the offending field.
    pub fn validate(&self) -> Result<(), SolverError> {
        let fail = |field: &str, msg: String| Err(SolverError::InvalidConfig { field: field.to_string(), message: msg });
        if self.n < 2 {
            return fail("n", format!("must be at least 2, got {}", self.n));
        }
        if self.dim != 2 && self.dim != 3 {
            return fail("dim", format!("must be 2 or 3, got {}", self.dim));
        }
        if !(self.gradient_tolerance > 0.0 && self.gradient_tolerance.is_finite()) {
            return fail("gradient_tolerance", format!("must be positive, got {}", self.gradient_tolerance));
        }
        if self.starts < 1 {
            return fail("starts", "must be at least 1".to_string());
        }
        if self.max_iterations < 1 {
            return fail("max_iterations", "must be at least 1".to_string());
        }
        if let MassSpec::Explicit(m) = &self.masses {
            if m.len() != self.n {
                return fail("masses", format!("has {} entries but n = {}", m.len(), self.n));
            }
            if m.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                return fail("masses", "entries must be positive and finite".to_string());
            }
        }
        if let Seeding::PerturbedMinima { minima_starts, sigmas } = &self.seeding {
            if *minima_starts < 1 {
                return fail("seeding.minima_starts", "must be at least 1".to_string());
            }
            if sigmas.is_empty() || sigmas.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
                return fail("seeding.sigmas", "must be a non-empty list of positive scales".to_string());
            }
        }
        Ok(())
    }

    pub fn masses(&self) -> Result<Vec<f64>, ShapeError> {
        self.masses.masses(self.n)
    }

    /// Deterministic generator for stream `stream` of this config's master seed.
    pub(crate) fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    /// Gauge-fixed random initial configuration for start `index`.
    pub fn initial_configuration(&self, index: u64) -> Result<MassConfiguration, ShapeError> {
        let mut rng = self.rng(index);
        let positions = match self.sampling {
            Sampling::UniformBall => uniform_ball(&mut rng, self.n, self.dim),
            Sampling::JitteredLattice => jittered_lattice(&mut rng, self.n, self.dim),
        };
        let config = MassConfiguration::new(self.dim, self.masses()?, positions)?;
        Ok(gauge_fix(&config).into_config())
    }
}

fn uniform_ball(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n * d);
    while out.len() < n * d {
        let p: Vec<f64> = (0..d).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect();
        if p.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            out.extend(p);
        }
    }
    out
}

fn jittered_lattice(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<f64> {
    let side = (n as f64).powf(1.0 / d as f64).ceil() as i64 + 2;
    let half = side / 2;
    let mut sites: Vec<Vec<f64>> = Vec::new();
    let mut idx = vec![0i64; d];
    loop {
        sites.push(idx.iter().map(|&k| (k - half) as f64).collect());
        let mut k = 0;
        loop {
            if k == d {
                break;
            }
            idx[k] += 1;
            if idx[k] < side {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == d {
            break;
        }
    }
    let norm2 = |p: &Vec<f64>| p.iter().map(|x| x * x).sum::<f64>();
    sites.sort_by(|a, b| norm2(a).total_cmp(&norm2(b)).then_with(|| a.partial_cmp(b).unwrap()));
    sites
        .into_iter()
        .take(n)
        .flat_map(|p| p.into_iter().map(|x| x + 0.5 * (rng.random::<f64>() - 0.5)).collect::<Vec<_>>())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    Minimum,
    Saddle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Origin {
    Given,
    Random,
    PerturbedMinimum { parent_start: u64, sigma: f64 },
}

/// How a critical point was found. Wall time is informational and excluded from equality.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub start_index: u64,
    pub origin: Origin,
    pub iterations: usize,
    pub wall_time_ms: f64,
}

impl PartialEq for Provenance {
    fn eq(&self, other: &Self) -> bool {
        self.seed == other.seed
            && self.start_index == other.start_index
            && self.origin == other.origin
            && self.iterations == other.iterations
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub shape: ShapeRepresentative,
    pub complexity: f64,
    pub residual: f64,
    pub index: usize,
    pub zero_modes: usize,
    /// Zero-mode count differs from the gauge dimension.
    pub degenerate: bool,
    pub kind: PointKind,
    /// `false` for a best iterate returned after the iteration cap.
    pub converged: bool,
    pub fingerprint: ShapeFingerprint,
    pub provenance: Provenance,
}

impl CriticalPoint {
    pub fn config(&self) -> &MassConfiguration {
        self.shape.config()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        best: Box<CriticalPoint>,
    },
    #[error("gradient-norm descent stalled at a non-critical point (residual {residual:e})")]
    SpuriousMinimum { residual: f64 },
    #[error("configuration is not critical: residual {residual:e} exceeds {tolerance:e}")]
    NotCritical { residual: f64, tolerance: f64 },
    #[error("none of {attempted} starts converged")]
    NoConvergedStarts { attempted: usize },
    #[error("invalid solver config field `{field}`: {message}")]
    InvalidConfig { field: String, message: String },
}

fn check_start(start: &MassConfiguration, cfg: &SolverConfig) -> Result<(), SolverError> {
    cfg.validate()?;
    if start.len() != cfg.n || start.dim() != cfg.dim {
        return Err(SolverError::InvalidConfig {
            field: "n".to_string(),
            message: format!(
                "start has N = {}, d = {} but config has N = {}, d = {}",
                start.len(),
                start.dim(),
                cfg.n,
                cfg.dim
            ),
        });
    }
    // Rejects collisions up front.
    complexity(start)?;
    Ok(())
}

fn build_point(
    template: &MassConfiguration,
    x: Vec<f64>,
    converged: bool,
    provenance: Provenance,
    classification: Option<Classification>,
) -> Result<CriticalPoint, SolverError> {
    let x = if converged && x.len() <= DENSE_LIMIT && template.len() > 2 {
        hessian::newton_polish(template, x, POLISH_TARGET, POLISH_STEPS)?.0
    } else {
        x
    };
    let shape = gauge_fix(&template.with_positions_unchecked(x));
    let report = complexity(shape.config())?;
    let residual = residual_of_fixed(shape.config())?;
    let classification = match classification {
        Some(c) => c,
        None => hessian::classify_unchecked(shape.config(), DENSE_LIMIT)?,
    };
    let fingerprint = fingerprint(shape.config())?;
    Ok(CriticalPoint {
        complexity: report.complexity,
        residual,
        index: classification.index,
        zero_modes: classification.zero_modes,
        degenerate: classification.degenerate,
        kind: if classification.index == 0 {
            PointKind::Minimum
        } else {
            PointKind::Saddle
        },
        converged,
        fingerprint,
        provenance,
        shape,
    })
}

fn settings(cfg: &SolverConfig, tolerance: f64, max_iterations: usize) -> LbfgsSettings {
    LbfgsSettings {
        tolerance: tolerance.max(cfg.gradient_tolerance),
        max_iterations,
        ..LbfgsSettings::default()
    }
}

fn provenance(cfg: &SolverConfig, start_index: u64, origin: Origin, iterations: usize, started: Instant) -> Provenance {
    Provenance {
        seed: cfg.seed,
        start_index,
        origin,
        iterations,
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
    }
}

/// Descend `C` to a local minimum on shape space.
///
/// Quasi-Newton descent with backtracking, re-gauge-fixing after every step,
/// then Newton polishing. A converged point whose projected Hessian has a
/// negative eigenvalue is pushed off along that direction and descent resumes.
pub fn minimize_complexity(start: &MassConfiguration, cfg: &SolverConfig) -> Result<CriticalPoint, SolverError> {
    minimize_from(start, cfg, 0, Origin::Given)
}

pub(crate) fn minimize_from(
    start: &MassConfiguration,
    cfg: &SolverConfig,
    start_index: u64,
    origin: Origin,
) -> Result<CriticalPoint, SolverError> {
    let started = Instant::now();
    check_start(start, cfg)?;
    let template = gauge_fix(start).into_config();
    let mut x = template.positions().to_vec();
    let mut iterations = 0;
    let tol = cfg.gradient_tolerance;
    let dense = x.len() <= DENSE_LIMIT;
    if cfg.n == 2 {
        return build_point(&template, x, true, provenance(cfg, start_index, origin, 0, started), None);
    }
    let mut escapes = 0;
    let mut switch = 0;
    loop {
        let remaining = cfg.max_iterations.saturating_sub(iterations);
        let target = if dense { NEWTON_SWITCH[switch] } else { tol };
        let out = lbfgs::minimize(
            &mut ComplexityObjective { template: &template },
            x,
            &settings(cfg, target, remaining),
        )?;
        iterations += out.iterations;
        x = out.x;
        let mut residual = out.eval.residual;
        if residual > tol && dense && (out.status == Status::Converged || out.status == Status::Stalled) {
            let (xp, rp) = hessian::newton_polish(&template, x.clone(), tol, NEWTON_STEPS)?;
            let c_before = out.eval.value;
            let c_after = complexity(&template.with_positions_unchecked(xp.clone()))?.complexity;
            // Newton may not climb.
            if c_after <= c_before + 1e-13 * c_before {
                x = xp;
                residual = rp;
            }
        }
        if residual <= tol {
            let fixed = gauge_fix(&template.with_positions_unchecked(x.clone())).into_config();
            let class = hessian::classify_unchecked(&fixed, DENSE_LIMIT)?;
            if class.index == 0 || escapes >= MAX_ESCAPES {
                let converged = class.index == 0;
                let point = build_point(
                    &template,
                    x,
                    converged,
                    provenance(cfg, start_index, origin, iterations, started),
                    Some(class),
                )?;
                return if converged {
                    Ok(point)
                } else {
                    Err(SolverError::NonConvergence {
                        iterations,
                        residual: point.residual,
                        best: Box::new(point),
                    })
                };
            }
            escapes += 1;
            x = escape_saddle(&template, &fixed, class.lowest_mode.as_deref())?;
            switch = 0;
            continue;
        }
        let exhausted = iterations >= cfg.max_iterations;
        if out.status == Status::Converged && !exhausted && switch + 1 < NEWTON_SWITCH.len() {
            switch += 1;
            continue;
        }
        if exhausted || out.status != Status::Converged {
            let point = build_point(
                &template,
                x,
                false,
                provenance(cfg, start_index, origin, iterations, started),
                None,
            )?;
            return Err(SolverError::NonConvergence {
                iterations,
                residual: point.residual,
                best: Box::new(point),
            });
        }
    }
}

/// Step off a saddle along its most negative mode, choosing the sign that lowers `C`.
fn escape_saddle(
    template: &MassConfiguration,
    fixed: &MassConfiguration,
    mode: Option<&[f64]>,
) -> Result<Vec<f64>, SolverError> {
    let x = fixed.positions();
    let Some(mode) = mode else {
        return Ok(x.to_vec());
    };
    let c0 = complexity(fixed)?.complexity;
    let mut best = x.to_vec();
    let mut best_c = c0;
    for scale in [1e-2, 3e-3, 1e-3] {
        for sign in [1.0, -1.0] {
            let trial: Vec<f64> = x.iter().zip(mode).map(|(a, v)| a + sign * scale * v).collect();
            let trial = objective::regauge_positions(template, trial);
            if let Ok(r) = complexity(&template.with_positions_unchecked(trial.clone())) {
                if r.complexity < best_c {
                    best_c = r.complexity;
                    best = trial;
                }
            }
        }
        if best_c < c0 {
            break;
        }
    }
    Ok(best)
}

/// Converge to a nearby critical point of any index by minimizing
/// `G = |P grad C|^2`, whose gradient `2 P H P grad C` comes from Hessian-vector
/// products; finished by Newton polishing.
pub fn find_critical_point(start: &MassConfiguration, cfg: &SolverConfig) -> Result<CriticalPoint, SolverError> {
    find_from(start, cfg, 0, Origin::Given)
}

pub(crate) fn find_from(
    start: &MassConfiguration,
    cfg: &SolverConfig,
    start_index: u64,
    origin: Origin,
) -> Result<CriticalPoint, SolverError> {
    let started = Instant::now();
    check_start(start, cfg)?;
    let template = gauge_fix(start).into_config();
    let mut x = template.positions().to_vec();
    let tol = cfg.gradient_tolerance;
    if cfg.n == 2 {
        return build_point(&template, x, true, provenance(cfg, start_index, origin, 0, started), None);
    }
    let dense = x.len() <= DENSE_LIMIT;
    let mut iterations = 0;
    let target = if dense { NEWTON_SWITCH[0] } else { 0.0 };
    let mut s = settings(cfg, target, cfg.max_iterations);
    s.progress_window = Some(PROGRESS_WINDOW);
    let out = lbfgs::minimize(&mut GradientNormObjective { template: &template }, x, &s)?;
    iterations += out.iterations;
    x = out.x;
    let mut residual = out.eval.residual;
    let mut stalled = out.status == Status::Stalled;
    if residual > tol && dense {
        let remaining = cfg.max_iterations.saturating_sub(iterations).min(LM_ITERATIONS);
        let (xl, rl, status, used) = hessian::levenberg_marquardt(&template, x, tol, remaining)?;
        iterations += used;
        x = xl;
        residual = rl;
        stalled = status == hessian::LmStatus::Stalled;
    }
    if residual <= tol {
        return build_point(
            &template,
            x,
            true,
            provenance(cfg, start_index, origin, iterations, started),
            None,
        );
    }
    if stalled {
        return Err(SolverError::SpuriousMinimum { residual });
    }
    let point = build_point(
        &template,
        x,
        false,
        provenance(cfg, start_index, origin, iterations, started),
        None,
    )?;
    Err(SolverError::NonConvergence {
        iterations,
        residual: point.residual,
        best: Box::new(point),
    })
}

/// Index and zero-mode count of a critical configuration.
///
/// Dense eigendecomposition of the gauge-projected Hessian for `N d <= 3000`,
/// Lanczos estimates of the smallest eigenvalues above that.
pub fn classify_critical_point(config: &MassConfiguration, tolerance: f64) -> Result<Classification, SolverError> {
    let fixed = gauge_fix(config).into_config();
    let residual = residual_of_fixed(&fixed)?;
    if residual > tolerance {
        return Err(SolverError::NotCritical { residual, tolerance });
    }
    Ok(hessian::classify_unchecked(&fixed, DENSE_LIMIT)?)
}

/// Gaussian perturbation of every coordinate, followed by gauge fixing.
pub fn perturb(config: &MassConfiguration, sigma: f64, rng: &mut impl Rng) -> Result<MassConfiguration, ShapeError> {
    let fixed = gauge_fix(config).into_config();
    let positions = fixed
        .positions()
        .iter()
        .map(|x| x + sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok(gauge_fix(&fixed.with_positions(positions)?).into_config())
}
