//! Mass configurations: the raw state on which the length scales are evaluated.

use serde::{Deserialize, Serialize};

use crate::error::{Result, ShapeError};
use crate::summation::CompensatedSum;

/// Tolerance on the total mass after normalization.
pub const MASS_SUM_TOLERANCE: f64 = 1e-12;

/// How particle masses are chosen for a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassSpec {
    /// `m_i = 1/N`.
    Equal,
    /// Explicit masses, rescaled to unit total.
    Explicit(Vec<f64>),
}

impl MassSpec {
    pub fn masses(&self, n: usize) -> Result<Vec<f64>> {
        match self {
            MassSpec::Equal => Ok(vec![1.0 / n as f64; n]),
            MassSpec::Explicit(m) if m.len() == n => Ok(m.clone()),
            MassSpec::Explicit(m) => Err(ShapeError::InvalidConfiguration(format!(
                "mass list has {} entries but N = {n}",
                m.len()
            ))),
        }
    }

    /// Short stable label, used to namespace catalogs.
    pub fn label(&self) -> String {
        match self {
            MassSpec::Equal => "equal".to_string(),
            MassSpec::Explicit(m) => {
                let joined = m.iter().map(|x| format!("{x:.17e}")).collect::<Vec<_>>().join(",");
                crate::hashing::short_hash(joined.as_bytes())
            }
        }
    }
}

/// Masses plus `d`-dimensional positions of `N` particles.
///
/// Masses are normalized to unit total on construction. Positions are stored
/// flat, particle-major: `positions[i * d + k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassConfiguration {
    dim: usize,
    masses: Vec<f64>,
    positions: Vec<f64>,
}

impl MassConfiguration {
    pub fn new(dim: usize, masses: Vec<f64>, positions: Vec<f64>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(ShapeError::InvalidConfiguration(format!(
                "dimension must be 2 or 3, got {dim}"
            )));
        }
        let n = masses.len();
        if n < 2 {
            return Err(ShapeError::InvalidConfiguration(format!(
                "need at least 2 particles, got {n}"
            )));
        }
        if positions.len() != n * dim {
            return Err(ShapeError::DimensionMismatch {
                expected: n * dim,
                actual: positions.len(),
            });
        }
        if let Some((i, m)) = masses.iter().enumerate().find(|(_, m)| !(m.is_finite() && **m > 0.0)) {
            return Err(ShapeError::InvalidConfiguration(format!(
                "mass {i} must be positive and finite, got {m}"
            )));
        }
        if positions.iter().any(|x| !x.is_finite()) {
            return Err(ShapeError::InvalidConfiguration(
                "positions must be finite".to_string(),
            ));
        }
        let total = masses.iter().copied().collect::<CompensatedSum>().value();
        let masses = if (total - 1.0).abs() > MASS_SUM_TOLERANCE {
            log::info!("rescaling masses by 1/{total} to unit total");
            masses.iter().map(|m| m / total).collect()
        } else {
            masses
        };
        let config = Self {
            dim,
            masses,
            positions,
        };
        if let Some((i, j)) = config.first_coincident_pair() {
            return Err(ShapeError::Collision {
                i,
                j,
                separation: 0.0,
                guard: 0.0,
            });
        }
        Ok(config)
    }

    /// Equal masses `1/N` at the given flat positions.
    pub fn equal_masses(dim: usize, positions: Vec<f64>) -> Result<Self> {
        if dim == 0 || positions.len() % dim != 0 {
            return Err(ShapeError::InvalidConfiguration(format!(
                "{} coordinates do not split into {dim}-vectors",
                positions.len()
            )));
        }
        let n = positions.len() / dim;
        Self::new(dim, vec![1.0 / n.max(1) as f64; n], positions)
    }

    /// Build from a list of points.
    pub fn from_points<P: AsRef<[f64]>>(dim: usize, masses: Vec<f64>, points: &[P]) -> Result<Self> {
        let mut flat = Vec::with_capacity(points.len() * dim);
        for p in points {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(ShapeError::DimensionMismatch {
                    expected: dim,
                    actual: p.len(),
                });
            }
            flat.extend_from_slice(p);
        }
        Self::new(dim, masses, flat)
    }

    /// Same masses, new positions (re-validated).
    pub fn with_positions(&self, positions: Vec<f64>) -> Result<Self> {
        Self::new(self.dim, self.masses.clone(), positions)
    }

    pub(crate) fn with_positions_unchecked(&self, positions: Vec<f64>) -> Self {
        debug_assert_eq!(positions.len(), self.positions.len());
        Self {
            dim: self.dim,
            masses: self.masses.clone(),
            positions,
        }
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn position(&self, i: usize) -> &[f64] {
        &self.positions[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.positions.chunks_exact(self.dim)
    }

    pub fn separation(&self, i: usize, j: usize) -> f64 {
        distance(self.position(i), self.position(j))
    }

    /// All `N(N-1)/2` separations in `i < j` lexicographic order.
    pub fn separations(&self) -> Vec<f64> {
        let n = self.len();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                out.push(self.separation(i, j));
            }
        }
        out
    }

    pub fn min_separation(&self) -> f64 {
        self.separations().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn center_of_mass(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|k| {
                self.masses
                    .iter()
                    .zip(self.points())
                    .map(|(m, p)| m * p[k])
                    .collect::<CompensatedSum>()
                    .value()
            })
            .collect()
    }

    /// Positions relative to the center of mass.
    pub fn centered_positions(&self) -> Vec<f64> {
        let cm = self.center_of_mass();
        self.points()
            .flat_map(|p| p.iter().zip(&cm).map(|(x, c)| x - c).collect::<Vec<_>>())
            .collect()
    }

    pub fn translated(&self, shift: &[f64]) -> Self {
        assert_eq!(shift.len(), self.dim);
        let positions = self
            .points()
            .flat_map(|p| p.iter().zip(shift).map(|(x, t)| x + t).collect::<Vec<_>>())
            .collect();
        self.with_positions_unchecked(positions)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        assert!(factor > 0.0 && factor.is_finite());
        self.with_positions_unchecked(self.positions.iter().map(|x| x * factor).collect())
    }

    /// Apply a row-major `d x d` linear map to every position.
    pub fn transformed(&self, matrix: &[f64]) -> Self {
        let d = self.dim;
        assert_eq!(matrix.len(), d * d);
        let positions = self
            .points()
            .flat_map(|p| {
                (0..d)
                    .map(|r| (0..d).map(|c| matrix[r * d + c] * p[c]).sum::<f64>())
                    .collect::<Vec<_>>()
            })
            .collect();
        self.with_positions_unchecked(positions)
    }

    /// Reorder particles: particle `k` of the result is particle `order[k]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        assert_eq!(order.len(), self.len());
        let masses = order.iter().map(|&i| self.masses[i]).collect();
        let positions = order.iter().flat_map(|&i| self.position(i).to_vec()).collect();
        Self {
            dim: self.dim,
            masses,
            positions,
        }
    }

    fn first_coincident_pair(&self) -> Option<(usize, usize)> {
        let n = self.len();
        (0..n).find_map(|i| {
            (i + 1..n)
                .find(|&j| self.position(i) == self.position(j))
                .map(|j| (i, j))
        })
    }
}

#[inline]
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
