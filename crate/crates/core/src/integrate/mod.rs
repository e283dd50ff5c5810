//! Numerical integration: radial quadrature against the polar weight
//! `r^{Q−1}`, randomized quasi-Monte-Carlo over `ℝ^N`, and the measure of
//! the unit quasi-sphere.

mod qmc;
mod quadrature;
mod sphere;

use serde::{Deserialize, Serialize};

pub use qmc::{qmc_integral, qmc_integrate_vec, QmcEstimate, QmcOptions, MIN_SAMPLES};
pub use quadrature::{
    integrate_interval, radial_integral, RadialIntegrand, DEFAULT_MAX_EVALS, DEFAULT_REL_TOL,
};
pub use sphere::{analytic_sphere_measure, sphere_measure, SphereMeasure, SphereMethod};

/// Value of an integral together with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}
