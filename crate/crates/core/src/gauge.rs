//! Shape-space quotient: gauge fixing and projection onto the shape tangent space.

use serde::{Deserialize, Serialize};

use crate::complexity::{complexity_with_gradient, rms_length};
use crate::config::MassConfiguration;
use crate::error::Result;
use crate::summation::dot;

/// Tolerance of the gauge conditions on a [`ShapeRepresentative`].
pub const GAUGE_TOLERANCE: f64 = 1e-12;

/// Relative norm below which a gauge generator is treated as degenerate.
const GENERATOR_DROP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeCertificate {
    pub center_of_mass_norm: f64,
    pub rms_deviation: f64,
}

impl GaugeCertificate {
    pub fn of(config: &MassConfiguration) -> Self {
        let cm = config.center_of_mass();
        Self {
            center_of_mass_norm: dot(&cm, &cm).sqrt(),
            rms_deviation: (rms_length(config) - 1.0).abs(),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.center_of_mass_norm <= GAUGE_TOLERANCE && self.rms_deviation <= GAUGE_TOLERANCE
    }
}

/// Canonical representative of a shape: center of mass at the origin, `l_rms = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeRepresentative {
    config: MassConfiguration,
    certificate: GaugeCertificate,
}

impl ShapeRepresentative {
    pub fn config(&self) -> &MassConfiguration {
        &self.config
    }

    pub fn certificate(&self) -> GaugeCertificate {
        self.certificate
    }

    pub fn into_config(self) -> MassConfiguration {
        self.config
    }
}

/// Translate the center of mass to the origin and scale to `l_rms = 1`.
pub fn gauge_fix(config: &MassConfiguration) -> ShapeRepresentative {
    let centered = config.with_positions_unchecked(config.centered_positions());
    let mut rms = rms_length(&centered);
    let mut fixed = centered;
    // A second pass absorbs rounding in the first rescale.
    for _ in 0..2 {
        if rms == 1.0 {
            break;
        }
        fixed = fixed.with_positions_unchecked(fixed.positions().iter().map(|x| x / rms).collect());
        rms = rms_length(&fixed);
        if (rms - 1.0).abs() <= f64::EPSILON {
            break;
        }
    }
    let certificate = GaugeCertificate::of(&fixed);
    ShapeRepresentative {
        config: fixed,
        certificate,
    }
}

/// Orthonormal basis of the translation, rotation and dilation directions at a configuration.
#[derive(Debug, Clone)]
pub struct GaugeBasis {
    vectors: Vec<Vec<f64>>,
}

impl GaugeBasis {
    pub fn at(config: &MassConfiguration) -> Self {
        let n = config.len();
        let d = config.dim();
        let q = config.centered_positions();
        let mut generators: Vec<Vec<f64>> = Vec::new();
        for k in 0..d {
            let mut t = vec![0.0; n * d];
            for i in 0..n {
                t[i * d + k] = 1.0;
            }
            generators.push(t);
        }
        // Infinitesimal rotations in each coordinate plane (a, b).
        for a in 0..d {
            for b in a + 1..d {
                let mut rot = vec![0.0; n * d];
                for i in 0..n {
                    rot[i * d + a] = -q[i * d + b];
                    rot[i * d + b] = q[i * d + a];
                }
                generators.push(rot);
            }
        }
        generators.push(q);

        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(generators.len());
        for mut g in generators {
            let original = dot(&g, &g).sqrt();
            for u in &vectors {
                let c = dot(u, &g);
                g.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
            }
            let norm = dot(&g, &g).sqrt();
            if original == 0.0 || norm < GENERATOR_DROP * original {
                continue;
            }
            g.iter_mut().for_each(|x| *x /= norm);
            vectors.push(g);
        }
        Self { vectors }
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Remove gauge components in place.
    pub fn project(&self, v: &mut [f64]) {
        for u in &self.vectors {
            let c = dot(u, v);
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
        }
    }

    pub fn projected(&self, v: &[f64]) -> Vec<f64> {
        let mut out = v.to_vec();
        self.project(&mut out);
        out
    }
}

/// Number of gauge directions for a non-degenerate configuration in `d` dimensions.
pub fn gauge_dimension(dim: usize) -> usize {
    dim + dim * (dim - 1) / 2 + 1
}

/// `|P grad C| / max(C, 1)` at the gauge-fixed representative; zero exactly at
/// central configurations.
pub fn cc_residual(config: &MassConfiguration) -> Result<f64> {
    let shape = gauge_fix(config);
    residual_of_fixed(shape.config())
}

pub(crate) fn residual_of_fixed(fixed: &MassConfiguration) -> Result<f64> {
    let (c, grad) = complexity_with_gradient(fixed)?;
    // Two bodies: shape space is a single point.
    if fixed.len() == 2 {
        return Ok(0.0);
    }
    let basis = GaugeBasis::at(fixed);
    let projected = basis.projected(grad.as_slice());
    Ok(dot(&projected, &projected).sqrt() / c.max(1.0))
}
