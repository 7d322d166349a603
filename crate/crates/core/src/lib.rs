//! Shape complexity of N-body configurations and its critical points.
//!
//! For masses `m_i` (unit total) and separations `r_ij`, the root-mean-square
//! length `l_rms = sqrt(sum m_i m_j r_ij^2)` and the mean-harmonic length
//! `l_mhl = 1 / sum m_i m_j / r_ij` give the scale-invariant complexity
//! `C = l_rms / l_mhl`. Critical points of `C` on shape space are central
//! configurations; [`solver`] finds and classifies them and [`analysis`]
//! measures their structure.

pub mod analysis;
pub mod complexity;
pub mod config;
pub mod error;
pub mod gauge;
mod hashing;
pub mod solver;
pub mod summation;

pub use complexity::{
    complexity, complexity_gradient, complexity_with_gradient, hessian, hessian_vector_product,
    hessian_vector_product_fd, mhl_length, rms_length, ComplexityReport, GradientField,
};
pub use config::{MassConfiguration, MassSpec};
pub use error::{Result, ShapeError};
pub use gauge::{cc_residual, gauge_fix, GaugeBasis, GaugeCertificate, ShapeRepresentative};
pub use hashing::short_hash;
