//! Objectives on the gauge slice: `C` itself, and the squared projected
//! gradient norm `G = |P grad C|^2` whose zeros are critical points of any index.

use crate::complexity::{complexity_with_gradient, hvp_with_kernel, Kernel};
use crate::config::MassConfiguration;
use crate::error::ShapeError;
use crate::gauge::GaugeBasis;
use crate::summation::{dot, CompensatedSum};

use super::lbfgs::{Evaluation, GaugedObjective};

/// Centre on the center of mass and scale to `l_rms = 1`.
///
/// Uses `l_rms^2 = sum_i m_i |r_i - r_cm|^2` (unit total mass), which is O(N).
pub(crate) fn regauge_positions(template: &MassConfiguration, mut x: Vec<f64>) -> Vec<f64> {
    let d = template.dim();
    let m = template.masses();
    let cm: Vec<f64> = (0..d)
        .map(|k| {
            m.iter()
                .enumerate()
                .map(|(i, mi)| mi * x[i * d + k])
                .collect::<CompensatedSum>()
                .value()
        })
        .collect();
    for p in x.chunks_exact_mut(d) {
        p.iter_mut().zip(&cm).for_each(|(a, c)| *a -= c);
    }
    let inertia = m
        .iter()
        .zip(x.chunks_exact(d))
        .map(|(mi, p)| mi * p.iter().map(|v| v * v).sum::<f64>())
        .collect::<CompensatedSum>()
        .value();
    let rms = inertia.sqrt();
    if rms > 0.0 && rms.is_finite() {
        x.iter_mut().for_each(|v| *v /= rms);
    }
    x
}

pub(crate) struct ComplexityObjective<'a> {
    pub template: &'a MassConfiguration,
}

impl GaugedObjective for ComplexityObjective<'_> {
    fn evaluate(&mut self, x: &[f64]) -> Result<Evaluation, ShapeError> {
        let config = self.template.with_positions_unchecked(x.to_vec());
        let (c, grad) = complexity_with_gradient(&config)?;
        let basis = GaugeBasis::at(&config);
        let gradient = basis.projected(grad.as_slice());
        let residual = dot(&gradient, &gradient).sqrt() / c.max(1.0);
        Ok(Evaluation {
            value: c,
            gradient,
            residual,
        })
    }

    fn regauge(&self, x: Vec<f64>) -> Vec<f64> {
        regauge_positions(self.template, x)
    }

    fn project(&self, x: &[f64], v: &mut [f64]) {
        GaugeBasis::at(&self.template.with_positions_unchecked(x.to_vec())).project(v);
    }
}

pub(crate) struct GradientNormObjective<'a> {
    pub template: &'a MassConfiguration,
}

impl GaugedObjective for GradientNormObjective<'_> {
    fn evaluate(&mut self, x: &[f64]) -> Result<Evaluation, ShapeError> {
        let config = self.template.with_positions_unchecked(x.to_vec());
        let kernel = Kernel::new(&config)?;
        let c = kernel.complexity();
        let basis = GaugeBasis::at(&config);
        let pg = basis.projected(&kernel.gradient(&config));
        let value = dot(&pg, &pg);
        let mut gradient = hvp_with_kernel(&config, &kernel, &pg);
        gradient.iter_mut().for_each(|v| *v *= 2.0);
        basis.project(&mut gradient);
        Ok(Evaluation {
            value,
            gradient,
            residual: value.sqrt() / c.max(1.0),
        })
    }

    fn regauge(&self, x: Vec<f64>) -> Vec<f64> {
        regauge_positions(self.template, x)
    }

    fn project(&self, x: &[f64], v: &mut [f64]) {
        GaugeBasis::at(&self.template.with_positions_unchecked(x.to_vec())).project(v);
    }
}
