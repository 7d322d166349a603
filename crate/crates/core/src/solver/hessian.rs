//! Second-order information on the shape tangent space: classification of
//! critical points and Newton polishing.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complexity::{complexity_with_gradient, hessian, hessian_vector_product};
use crate::config::MassConfiguration;
use crate::error::ShapeError;
use crate::gauge::{gauge_dimension, GaugeBasis};
use crate::summation::dot;

use super::objective::regauge_positions;

/// Largest `N d` handled with a dense eigendecomposition.
pub const DENSE_LIMIT: usize = 3000;
/// Number of smallest eigenvalues estimated above [`DENSE_LIMIT`].
pub const ITERATIVE_EIGENVALUES: usize = 20;
/// Zero-mode band, relative to the largest eigenvalue magnitude.
pub const ZERO_MODE_RELATIVE: f64 = 1e-7;

const LANCZOS_STEPS: usize = 300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    /// Negative eigenvalues of the projected Hessian.
    pub index: usize,
    /// Eigenvalues within the zero band, gauge directions included.
    pub zero_modes: usize,
    pub expected_zero_modes: usize,
    /// Zero-mode count differs from the gauge dimension.
    pub degenerate: bool,
    /// Smallest eigenvalues, ascending (all of them on the dense path).
    pub smallest_eigenvalues: Vec<f64>,
    /// Whether the index was computed from a full decomposition.
    pub exact: bool,
    #[serde(skip)]
    pub(crate) lowest_mode: Option<Vec<f64>>,
}

fn gauge_matrix(basis: &GaugeBasis, nd: usize) -> DMatrix<f64> {
    let k = basis.len();
    DMatrix::from_fn(nd, k, |r, c| basis.vectors()[c][r])
}

/// `P H P` with `P = I - Q Q^T`.
fn projected_hessian(config: &MassConfiguration, basis: &GaugeBasis) -> Result<DMatrix<f64>, ShapeError> {
    let h = hessian(config)?;
    let q = gauge_matrix(basis, h.nrows());
    let hq = &h * &q;
    let qhq = q.transpose() * &hq;
    let m = &h - &hq * q.transpose() - &q * hq.transpose() + &q * qhq * q.transpose();
    // Symmetrize rounding.
    Ok((&m + m.transpose()) * 0.5)
}

/// Classify a configuration without checking its residual.
pub(crate) fn classify_unchecked(config: &MassConfiguration, dense_limit: usize) -> Result<Classification, ShapeError> {
    let nd = config.positions().len();
    if nd <= dense_limit {
        classify_dense(config)
    } else {
        classify_lanczos(config)
    }
}

fn classify_dense(config: &MassConfiguration) -> Result<Classification, ShapeError> {
    let basis = GaugeBasis::at(config);
    let m = projected_hessian(config, &basis)?;
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let band = ZERO_MODE_RELATIVE * scale;
    let index = values.iter().filter(|&&v| v < -band).count();
    let zero_modes = values.iter().filter(|&&v| v.abs() <= band).count();
    let expected = gauge_dimension(config.dim());
    let lowest_mode = (index > 0).then(|| eig.eigenvectors.column(order[0]).iter().copied().collect());
    Ok(Classification {
        index,
        zero_modes,
        expected_zero_modes: expected,
        degenerate: zero_modes != expected,
        smallest_eigenvalues: values,
        exact: true,
        lowest_mode,
    })
}

/// Lanczos with full reorthogonalization on `P H P`, restricted to the
/// complement of the gauge directions.
fn classify_lanczos(config: &MassConfiguration) -> Result<Classification, ShapeError> {
    let nd = config.positions().len();
    let basis = GaugeBasis::at(config);
    let steps = LANCZOS_STEPS.min(nd - basis.len());
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v: Vec<f64> = (0..nd).map(|_| rng.random::<f64>() - 0.5).collect();
    basis.project(&mut v);
    let norm = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= norm);

    let mut krylov: Vec<Vec<f64>> = Vec::with_capacity(steps);
    let mut alphas = Vec::with_capacity(steps);
    let mut betas: Vec<f64> = Vec::with_capacity(steps);
    for _ in 0..steps {
        let mut w = hessian_vector_product(config, &v)?;
        basis.project(&mut w);
        let alpha = dot(&w, &v);
        krylov.push(v);
        alphas.push(alpha);
        for u in &krylov {
            let c = dot(u, &w);
            w.iter_mut().zip(u).for_each(|(a, b)| *a -= c * b);
        }
        basis.project(&mut w);
        let beta = dot(&w, &w).sqrt();
        if beta <= 1e-12 * alpha.abs().max(1.0) {
            break;
        }
        betas.push(beta);
        v = w.into_iter().map(|x| x / beta).collect();
    }
    let m = alphas.len();
    let t = DMatrix::from_fn(m, m, |r, c| {
        if r == c {
            alphas[r]
        } else if r + 1 == c || c + 1 == r {
            betas[r.min(c)]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let ritz: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let scale = ritz.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let band = ZERO_MODE_RELATIVE * scale;
    let smallest: Vec<f64> = ritz.iter().copied().take(ITERATIVE_EIGENVALUES).collect();
    let index = smallest.iter().filter(|&&v| v < -band).count();
    // Gauge directions are projected out and never appear as Ritz values.
    let zero_modes = basis.len() + smallest.iter().filter(|&&v| v.abs() <= band).count();
    let expected = gauge_dimension(config.dim());
    let lowest_mode = (index > 0).then(|| {
        let y = eig.eigenvectors.column(order[0]);
        let mut out = vec![0.0; nd];
        for (coef, u) in y.iter().zip(&krylov) {
            out.iter_mut().zip(u).for_each(|(o, x)| *o += coef * x);
        }
        out
    });
    Ok(Classification {
        index,
        zero_modes,
        expected_zero_modes: expected,
        degenerate: zero_modes != expected,
        smallest_eigenvalues: smallest,
        exact: false,
        lowest_mode,
    })
}

/// Newton iterations on `P grad C = 0` in gauge-fixed coordinates.
///
/// Each step solves `(P H P + s Q Q^T) dx = -P grad C`; a step is kept only if it
/// lowers the residual (after up to four halvings). Returns the final point and
/// its residual. Above [`DENSE_LIMIT`] the input is returned unchanged.
pub(crate) fn newton_polish(
    template: &MassConfiguration,
    x: Vec<f64>,
    tolerance: f64,
    max_steps: usize,
) -> Result<(Vec<f64>, f64), ShapeError> {
    let residual_at = |x: &[f64]| -> Result<(f64, Vec<f64>, GaugeBasis), ShapeError> {
        let config = template.with_positions_unchecked(x.to_vec());
        let (c, grad) = complexity_with_gradient(&config)?;
        let basis = GaugeBasis::at(&config);
        let pg = basis.projected(grad.as_slice());
        Ok((dot(&pg, &pg).sqrt() / c.max(1.0), pg, basis))
    };
    let mut x = regauge_positions(template, x);
    let (mut residual, mut pg, mut basis) = residual_at(&x)?;
    if x.len() > DENSE_LIMIT {
        return Ok((x, residual));
    }
    for _ in 0..max_steps {
        if residual <= tolerance {
            break;
        }
        let config = template.with_positions_unchecked(x.clone());
        let m = projected_hessian(&config, &basis)?;
        let shift = m.diagonal().amax().max(1e-300);
        let q = gauge_matrix(&basis, x.len());
        let system = m + (&q * q.transpose()) * shift;
        let rhs = -DVector::from_column_slice(&pg);
        let Some(step) = system.lu().solve(&rhs) else {
            break;
        };
        let mut step: Vec<f64> = step.iter().copied().collect();
        basis.project(&mut step);
        let mut improved = false;
        for _ in 0..5 {
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + b).collect();
            let trial = regauge_positions(template, trial);
            if let Ok((r, g, b)) = residual_at(&trial) {
                if r < residual {
                    x = trial;
                    residual = r;
                    pg = g;
                    basis = b;
                    improved = true;
                    break;
                }
            }
            step.iter_mut().for_each(|s| *s *= 0.5);
        }
        if !improved {
            break;
        }
    }
    Ok((x, residual))
}

/// Result of [`levenberg_marquardt`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LmStatus {
    Converged,
    /// Damping grew without further decrease of `G`: a non-critical local minimum.
    Stalled,
    MaxIterations,
}

/// Levenberg-Marquardt on `P grad C = 0`, i.e. Gauss-Newton minimization of
/// `G = |P grad C|^2` with Jacobian `P H P`.
///
/// Steps `dx = -sum_k l_k (u_k . g) / (l_k^2 + mu) u_k` over the eigenpairs of
/// the projected Hessian; `mu -> 0` recovers Newton's method on any index.
/// Dense only; returns `(x, residual, status, iterations)`.
pub(crate) fn levenberg_marquardt(
    template: &MassConfiguration,
    x: Vec<f64>,
    tolerance: f64,
    max_iterations: usize,
) -> Result<(Vec<f64>, f64, LmStatus, usize), ShapeError> {
    let state_at = |x: &[f64]| -> Result<(f64, Vec<f64>, GaugeBasis), ShapeError> {
        let config = template.with_positions_unchecked(x.to_vec());
        let (c, grad) = complexity_with_gradient(&config)?;
        let basis = GaugeBasis::at(&config);
        let pg = basis.projected(grad.as_slice());
        Ok((dot(&pg, &pg).sqrt() / c.max(1.0), pg, basis))
    };
    let mut x = regauge_positions(template, x);
    let (mut residual, mut pg, mut basis) = state_at(&x)?;
    let mut mu: Option<f64> = None;
    let mut iterations = 0;
    while iterations < max_iterations {
        if residual <= tolerance {
            return Ok((x, residual, LmStatus::Converged, iterations));
        }
        iterations += 1;
        let config = template.with_positions_unchecked(x.clone());
        let eig = SymmetricEigen::new(projected_hessian(&config, &basis)?);
        let scale = eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let band = ZERO_MODE_RELATIVE * scale;
        let coeffs: Vec<(f64, f64)> = (0..eig.eigenvalues.len())
            .filter(|&k| eig.eigenvalues[k].abs() > band)
            .map(|k| {
                let u = eig.eigenvectors.column(k);
                let ug: f64 = u.iter().zip(&pg).map(|(a, b)| a * b).sum();
                (eig.eigenvalues[k], ug)
            })
            .collect();
        let kept: Vec<usize> = (0..eig.eigenvalues.len())
            .filter(|&k| eig.eigenvalues[k].abs() > band)
            .collect();
        let mut damping = mu.unwrap_or(1e-3 * scale * scale);
        let mut accepted = false;
        for _ in 0..40 {
            let mut step = vec![0.0; x.len()];
            for (&k, &(l, ug)) in kept.iter().zip(&coeffs) {
                let w = -l * ug / (l * l + damping);
                let u = eig.eigenvectors.column(k);
                step.iter_mut().zip(u.iter()).for_each(|(s, v)| *s += w * v);
            }
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + b).collect();
            let trial = regauge_positions(template, trial);
            if let Ok((r, g, b)) = state_at(&trial) {
                if r < residual {
                    x = trial;
                    residual = r;
                    pg = g;
                    basis = b;
                    accepted = true;
                    damping /= 3.0;
                    break;
                }
            }
            damping *= 4.0;
        }
        mu = Some(damping.max(1e-30 * scale * scale));
        if !accepted {
            let status = if residual <= tolerance { LmStatus::Converged } else { LmStatus::Stalled };
            return Ok((x, residual, status, iterations));
        }
    }
    let status = if residual <= tolerance { LmStatus::Converged } else { LmStatus::MaxIterations };
    Ok((x, residual, status, iterations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::gauge_fix;

    fn random_config(n: usize, d: usize, seed: u64) -> MassConfiguration {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = (0..n * d).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        gauge_fix(&MassConfiguration::equal_masses(d, p).unwrap()).into_config()
    }

    #[test]
    fn lanczos_agrees_with_dense_on_smallest_eigenvalues() {
        let c = random_config(30, 2, 3);
        let dense = classify_unchecked(&c, usize::MAX).unwrap();
        let iterative = classify_unchecked(&c, 0).unwrap();
        assert!(!iterative.exact);
        // The dense spectrum contains the 4 projected-out zeros.
        let dense_nonzero: Vec<f64> = dense
            .smallest_eigenvalues
            .iter()
            .copied()
            .filter(|v| v.abs() > 1e-9)
            .collect();
        for (a, b) in iterative.smallest_eigenvalues.iter().zip(&dense_nonzero) {
            assert!((a - b).abs() < 1e-8 * (1.0 + b.abs()), "{a} vs {b}");
        }
        assert_eq!(dense.index.min(ITERATIVE_EIGENVALUES), iterative.index);
    }
}
