//! Limited-memory quasi-Newton descent with backtracking line search, working
//! in gauge-fixed coordinates.

use std::collections::VecDeque;

use crate::error::ShapeError;
use crate::summation::dot;

/// One objective evaluation.
#[derive(Debug, Clone)]
pub(crate) struct Evaluation {
    pub value: f64,
    /// Gradient with gauge components removed.
    pub gradient: Vec<f64>,
    /// Convergence measure compared against the stopping tolerance.
    pub residual: f64,
}

pub(crate) trait GaugedObjective {
    fn evaluate(&mut self, x: &[f64]) -> Result<Evaluation, ShapeError>;
    /// Map a point back onto the gauge slice.
    fn regauge(&self, x: Vec<f64>) -> Vec<f64>;
    /// Remove gauge components of a direction at `x`.
    fn project(&self, x: &[f64], v: &mut [f64]);
}

#[derive(Debug, Clone)]
pub(crate) struct LbfgsSettings {
    pub memory: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub armijo: f64,
    pub backtrack: f64,
    pub max_backtracks: usize,
    pub max_collision_backtracks: usize,
    /// Length of the very first trial step.
    pub initial_step: f64,
    /// Relative level below which value differences are rounding noise.
    pub noise: f64,
    /// Stop as stalled when the value fails to halve over this many iterations.
    pub progress_window: Option<usize>,
}

impl Default for LbfgsSettings {
    fn default() -> Self {
        Self {
            memory: 12,
            max_iterations: 50_000,
            tolerance: 1e-10,
            armijo: 1e-4,
            backtrack: 0.5,
            max_backtracks: 60,
            max_collision_backtracks: 5,
            initial_step: 0.05,
            noise: 1e-14,
            progress_window: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Status {
    Converged,
    MaxIterations,
    /// The line search found no acceptable step.
    Stalled,
}

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub x: Vec<f64>,
    pub eval: Evaluation,
    pub iterations: usize,
    pub status: Status,
    /// Objective value after every accepted step, starting with the initial point.
    #[cfg_attr(not(test), allow(dead_code))]
    pub trace: Vec<f64>,
}

struct Pair {
    s: Vec<f64>,
    y: Vec<f64>,
    rho: f64,
}

fn two_loop(history: &VecDeque<Pair>, grad: &[f64]) -> Vec<f64> {
    let mut q: Vec<f64> = grad.iter().map(|g| -g).collect();
    let mut alphas = Vec::with_capacity(history.len());
    for p in history.iter().rev() {
        let a = p.rho * dot(&p.s, &q);
        q.iter_mut().zip(&p.y).for_each(|(qi, yi)| *qi -= a * yi);
        alphas.push(a);
    }
    if let Some(last) = history.back() {
        let gamma = dot(&last.s, &last.y) / dot(&last.y, &last.y);
        q.iter_mut().for_each(|qi| *qi *= gamma);
    }
    for (p, a) in history.iter().zip(alphas.into_iter().rev()) {
        let b = p.rho * dot(&p.y, &q);
        q.iter_mut().zip(&p.s).for_each(|(qi, si)| *qi += (a - b) * si);
    }
    q
}

pub(crate) fn minimize<O: GaugedObjective>(
    objective: &mut O,
    start: Vec<f64>,
    settings: &LbfgsSettings,
) -> Result<Outcome, ShapeError> {
    let mut x = objective.regauge(start);
    let mut eval = objective.evaluate(&x)?;
    let mut history: VecDeque<Pair> = VecDeque::with_capacity(settings.memory);
    let mut trace = vec![eval.value];
    let mut iterations = 0;

    let status = loop {
        if eval.residual <= settings.tolerance {
            break Status::Converged;
        }
        if iterations >= settings.max_iterations {
            break Status::MaxIterations;
        }
        if let Some(window) = settings.progress_window {
            if iterations >= window && trace[iterations] > 0.5 * trace[iterations - window] {
                break Status::Stalled;
            }
        }
        let mut dir = two_loop(&history, &eval.gradient);
        objective.project(&x, &mut dir);
        let mut slope = dot(&eval.gradient, &dir);
        if !(slope < 0.0) {
            history.clear();
            dir = eval.gradient.iter().map(|g| -g).collect();
            slope = -dot(&eval.gradient, &eval.gradient);
        }
        let mut alpha = if history.is_empty() {
            (settings.initial_step / dot(&dir, &dir).sqrt()).min(1.0)
        } else {
            1.0
        };

        let mut collisions = 0;
        let mut accepted = None;
        for _ in 0..settings.max_backtracks {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + alpha * di).collect();
            let trial = objective.regauge(trial);
            match objective.evaluate(&trial) {
                Err(ShapeError::Collision { .. }) if collisions < settings.max_collision_backtracks => {
                    collisions += 1;
                }
                Err(e) => return Err(e),
                Ok(t) => {
                    let armijo = t.value <= eval.value + settings.armijo * alpha * slope;
                    // Near convergence, value differences drown in rounding; fall
                    // back to the directional derivative.
                    let noise = settings.noise * eval.value.abs().max(f64::MIN_POSITIVE);
                    let flat = t.value <= eval.value + noise && dot(&t.gradient, &dir) <= 0.8 * slope.abs();
                    if armijo || flat {
                        accepted = Some((trial, t));
                        break;
                    }
                }
            }
            alpha *= settings.backtrack;
        }
        let Some((x_new, eval_new)) = accepted else {
            break Status::Stalled;
        };

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = eval_new.gradient.iter().zip(&eval.gradient).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if history.len() == settings.memory {
                history.pop_front();
            }
            history.push_back(Pair { s, y, rho: 1.0 / sy });
        }
        x = x_new;
        eval = eval_new;
        trace.push(eval.value);
        iterations += 1;
    };

    Ok(Outcome {
        x,
        eval,
        iterations,
        status,
        trace,
    })
}
