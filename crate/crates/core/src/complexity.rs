//! The root-mean-square and mean-harmonic lengths, their ratio (the shape
//! complexity `C`), and first and second derivatives of `C`.
//!
//! With `I = sum_{i<j} m_i m_j r_ij^2` and `V = sum_{i<j} m_i m_j / r_ij`,
//! `l_rms = sqrt(I)`, `l_mhl = 1 / V` and `C = l_rms * V`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::config::MassConfiguration;
use crate::error::{Result, ShapeError};
use crate::summation::{dot, CompensatedSum};

/// Collision guard relative to `l_rms`.
pub const COLLISION_GUARD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub rms_length: f64,
    pub mhl_length: f64,
    pub complexity: f64,
    pub min_separation: f64,
}

/// `dC/dr_i` for every particle, flat particle-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    dim: usize,
    values: Vec<f64>,
}

impl GradientField {
    pub fn new(dim: usize, values: Vec<f64>) -> Self {
        Self { dim, values }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn particle(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn norm(&self) -> f64 {
        dot(&self.values, &self.values).sqrt()
    }

    /// `sum_i dC/dr_i`; zero by translation invariance.
    pub fn translation_sum(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|k| {
                self.values
                    .iter()
                    .skip(k)
                    .step_by(self.dim)
                    .copied()
                    .collect::<CompensatedSum>()
                    .value()
            })
            .collect()
    }

    /// `sum_i (r_i - r_cm) . dC/dr_i`; zero by scale invariance.
    pub fn dilation_sum(&self, config: &MassConfiguration) -> f64 {
        dot(&config.centered_positions(), &self.values)
    }
}

struct PairSums {
    inertia: f64,
    potential: f64,
    min_separation: f64,
    min_pair: (usize, usize),
}

fn pair_sums(config: &MassConfiguration) -> PairSums {
    let n = config.len();
    let m = config.masses();
    let mut inertia = CompensatedSum::new();
    let mut potential = CompensatedSum::new();
    let mut min_separation = f64::INFINITY;
    let mut min_pair = (0, 1);
    for i in 0..n {
        let pi = config.position(i);
        for j in i + 1..n {
            let r2: f64 = pi
                .iter()
                .zip(config.position(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let r = r2.sqrt();
            let mm = m[i] * m[j];
            inertia.add(mm * r2);
            potential.add(mm / r);
            if r < min_separation {
                min_separation = r;
                min_pair = (i, j);
            }
        }
    }
    PairSums {
        inertia: inertia.value(),
        potential: potential.value(),
        min_separation,
        min_pair,
    }
}

fn check_collision(sums: &PairSums) -> Result<()> {
    let guard = COLLISION_GUARD * sums.inertia.sqrt();
    if !(sums.min_separation >= guard) || !sums.potential.is_finite() {
        return Err(ShapeError::Collision {
            i: sums.min_pair.0,
            j: sums.min_pair.1,
            separation: sums.min_separation,
            guard,
        });
    }
    Ok(())
}

/// `l_rms = sqrt(sum_{i<j} m_i m_j r_ij^2)`.
pub fn rms_length(config: &MassConfiguration) -> f64 {
    let n = config.len();
    let m = config.masses();
    let mut acc = CompensatedSum::new();
    for i in 0..n {
        for j in i + 1..n {
            let r = config.separation(i, j);
            acc.add(m[i] * m[j] * r * r);
        }
    }
    acc.value().sqrt()
}

/// `l_mhl = 1 / sum_{i<j} m_i m_j / r_ij`.
pub fn mhl_length(config: &MassConfiguration) -> Result<f64> {
    let sums = pair_sums(config);
    check_collision(&sums)?;
    Ok(1.0 / sums.potential)
}

pub fn complexity(config: &MassConfiguration) -> Result<ComplexityReport> {
    let sums = pair_sums(config);
    check_collision(&sums)?;
    let rms_length = sums.inertia.sqrt();
    Ok(ComplexityReport {
        rms_length,
        mhl_length: 1.0 / sums.potential,
        complexity: rms_length * sums.potential,
        min_separation: sums.min_separation,
    })
}

/// Everything the first and second derivatives need, from one pass over pairs.
pub(crate) struct Kernel {
    rms: f64,
    potential: f64,
    complexity: f64,
    /// Centered positions `q_i = r_i - r_cm`.
    centered: Vec<f64>,
    /// `A_i = sum_{j != i} m_j (r_i - r_j) / r_ij^3`.
    attraction: Vec<f64>,
}

impl Kernel {
    pub(crate) fn new(config: &MassConfiguration) -> Result<Self> {
        let n = config.len();
        let d = config.dim();
        let m = config.masses();
        let mut inertia = CompensatedSum::new();
        let mut potential = CompensatedSum::new();
        let mut attraction = vec![CompensatedSum::new(); n * d];
        let mut min_separation = f64::INFINITY;
        let mut min_pair = (0, 1);
        let pos = config.positions();
        let mut diff = [0.0; 3];
        for i in 0..n {
            let pi = &pos[i * d..(i + 1) * d];
            let mut own = [CompensatedSum::new(); 3];
            for j in i + 1..n {
                let pj = &pos[j * d..(j + 1) * d];
                let mut r2 = 0.0;
                for k in 0..d {
                    diff[k] = pi[k] - pj[k];
                    r2 += diff[k] * diff[k];
                }
                let r = r2.sqrt();
                if r < min_separation {
                    min_separation = r;
                    min_pair = (i, j);
                }
                let mm = m[i] * m[j];
                inertia.add(mm * r2);
                potential.add(mm / r);
                let inv_r3 = 1.0 / (r2 * r);
                for k in 0..d {
                    let f = diff[k] * inv_r3;
                    own[k].add(m[j] * f);
                    attraction[j * d + k].add(-m[i] * f);
                }
            }
            for k in 0..d {
                attraction[i * d + k].add(own[k].value());
            }
        }
        let sums = PairSums {
            inertia: inertia.value(),
            potential: potential.value(),
            min_separation,
            min_pair,
        };
        check_collision(&sums)?;
        let rms = sums.inertia.sqrt();
        Ok(Self {
            rms,
            potential: sums.potential,
            complexity: rms * sums.potential,
            centered: config.centered_positions(),
            attraction: attraction.iter().map(CompensatedSum::value).collect(),
        })
    }

    pub(crate) fn complexity(&self) -> f64 {
        self.complexity
    }

    pub(crate) fn gradient(&self, config: &MassConfiguration) -> Vec<f64> {
        let d = config.dim();
        let scale = self.potential / self.rms;
        config
            .masses()
            .iter()
            .enumerate()
            .flat_map(|(i, &mi)| {
                (0..d).map(move |k| {
                    let idx = i * d + k;
                    mi * (scale * self.centered[idx] - self.rms * self.attraction[idx])
                })
            })
            .collect()
    }
}

/// `C` together with its gradient.
pub fn complexity_with_gradient(config: &MassConfiguration) -> Result<(f64, GradientField)> {
    let kernel = Kernel::new(config)?;
    let grad = kernel.gradient(config);
    Ok((kernel.complexity, GradientField::new(config.dim(), grad)))
}

/// `dC/dr_i = (V / l_rms) m_i (r_i - r_cm) - l_rms m_i sum_{j != i} m_j (r_i - r_j) / r_ij^3`.
pub fn complexity_gradient(config: &MassConfiguration) -> Result<GradientField> {
    complexity_with_gradient(config).map(|(_, g)| g)
}

/// Analytic Hessian-vector product `H v` of `C`.
pub fn hessian_vector_product(config: &MassConfiguration, direction: &[f64]) -> Result<Vec<f64>> {
    let n = config.len();
    let d = config.dim();
    if direction.len() != n * d {
        return Err(ShapeError::DimensionMismatch {
            expected: n * d,
            actual: direction.len(),
        });
    }
    let kernel = Kernel::new(config)?;
    Ok(hvp_with_kernel(config, &kernel, direction))
}

/// Hessian-vector product reusing a kernel already evaluated at `config`.
pub(crate) fn hvp_with_kernel(config: &MassConfiguration, kernel: &Kernel, direction: &[f64]) -> Vec<f64> {
    let n = config.len();
    let d = config.dim();
    let m = config.masses();
    let rms = kernel.rms;
    let v_cm: Vec<f64> = (0..d)
        .map(|k| (0..n).map(|i| m[i] * direction[i * d + k]).collect::<CompensatedSum>().value())
        .collect();
    let d_rms = (0..n)
        .flat_map(|i| (0..d).map(move |k| (i, k)))
        .map(|(i, k)| m[i] * kernel.centered[i * d + k] * direction[i * d + k])
        .collect::<CompensatedSum>()
        .value()
        / rms;

    let mut d_potential = CompensatedSum::new();
    let mut d_attraction = vec![CompensatedSum::new(); n * d];
    let pos = config.positions();
    let mut diff = [0.0; 3];
    let mut vdiff = [0.0; 3];
    for i in 0..n {
        let mut own = [CompensatedSum::new(); 3];
        for j in i + 1..n {
            let mut r2 = 0.0;
            let mut rv = 0.0;
            for k in 0..d {
                diff[k] = pos[i * d + k] - pos[j * d + k];
                vdiff[k] = direction[i * d + k] - direction[j * d + k];
                r2 += diff[k] * diff[k];
                rv += diff[k] * vdiff[k];
            }
            let r = r2.sqrt();
            let inv_r3 = 1.0 / (r2 * r);
            let inv_r5 = inv_r3 / r2;
            d_potential.add(-m[i] * m[j] * rv * inv_r3);
            for k in 0..d {
                let t = vdiff[k] * inv_r3 - 3.0 * diff[k] * rv * inv_r5;
                own[k].add(m[j] * t);
                d_attraction[j * d + k].add(-m[i] * t);
            }
        }
        for k in 0..d {
            d_attraction[i * d + k].add(own[k].value());
        }
    }
    let d_potential = d_potential.value();
    let v = kernel.potential;
    let coef_q = d_potential / rms - v * d_rms / (rms * rms);
    let coef_v = v / rms;
    let mut out = Vec::with_capacity(n * d);
    for i in 0..n {
        for k in 0..d {
            let idx = i * d + k;
            out.push(
                m[i] * (coef_q * kernel.centered[idx] + coef_v * (direction[idx] - v_cm[k])
                    - d_rms * kernel.attraction[idx]
                    - rms * d_attraction[idx].value()),
            );
        }
    }
    out
}

/// Finite-difference Hessian-vector product: symmetric difference of the
/// analytic gradient with step `1e-5 * max(1, |x|) / |v|`.
pub fn hessian_vector_product_fd(config: &MassConfiguration, direction: &[f64]) -> Result<Vec<f64>> {
    let nd = config.positions().len();
    if direction.len() != nd {
        return Err(ShapeError::DimensionMismatch {
            expected: nd,
            actual: direction.len(),
        });
    }
    let vnorm = dot(direction, direction).sqrt();
    if vnorm == 0.0 {
        return Ok(vec![0.0; nd]);
    }
    let xnorm = dot(config.positions(), config.positions()).sqrt();
    let h = 1e-5 * xnorm.max(1.0) / vnorm;
    let shifted = |sign: f64| {
        let p = config
            .positions()
            .iter()
            .zip(direction)
            .map(|(x, v)| x + sign * h * v)
            .collect();
        config.with_positions_unchecked(p)
    };
    let plus = complexity_gradient(&shifted(1.0))?;
    let minus = complexity_gradient(&shifted(-1.0))?;
    Ok(plus
        .as_slice()
        .iter()
        .zip(minus.as_slice())
        .map(|(a, b)| (a - b) / (2.0 * h))
        .collect())
}

/// Dense analytic Hessian of `C`, `Nd x Nd`.
pub fn hessian(config: &MassConfiguration) -> Result<DMatrix<f64>> {
    let n = config.len();
    let d = config.dim();
    let nd = n * d;
    let kernel = Kernel::new(config)?;
    let m = config.masses();
    let rms = kernel.rms;
    let v = kernel.potential;
    let q = &kernel.centered;
    let a = &kernel.attraction;
    let mut h = DMatrix::<f64>::zeros(nd, nd);

    // Mean-field part, dense in (i, j).
    for i in 0..n {
        for j in 0..n {
            let mm = m[i] * m[j];
            for ka in 0..d {
                let ia = i * d + ka;
                for kb in 0..d {
                    let jb = j * d + kb;
                    let mut val = -mm
                        * ((a[jb] * q[ia] + q[jb] * a[ia]) / rms + v * q[ia] * q[jb] / (rms * rms * rms));
                    if ka == kb {
                        val -= v / rms * mm;
                        if i == j {
                            val += v / rms * m[i];
                        }
                    }
                    h[(ia, jb)] = val;
                }
            }
        }
    }
    // Pair tidal tensors K_ab = delta_ab / r^3 - 3 d_a d_b / r^5.
    let mut diff = [0.0; 3];
    for i in 0..n {
        for j in i + 1..n {
            let mut r2 = 0.0;
            for k in 0..d {
                diff[k] = config.positions()[i * d + k] - config.positions()[j * d + k];
                r2 += diff[k] * diff[k];
            }
            let r = r2.sqrt();
            let inv_r3 = 1.0 / (r2 * r);
            let inv_r5 = inv_r3 / r2;
            let w = rms * m[i] * m[j];
            for ka in 0..d {
                for kb in 0..d {
                    let mut kab = -3.0 * diff[ka] * diff[kb] * inv_r5;
                    if ka == kb {
                        kab += inv_r3;
                    }
                    let t = w * kab;
                    h[(i * d + ka, j * d + kb)] += t;
                    h[(j * d + ka, i * d + kb)] += t;
                    h[(i * d + ka, i * d + kb)] -= t;
                    h[(j * d + ka, j * d + kb)] -= t;
                }
            }
        }
    }
    Ok(h)
}
