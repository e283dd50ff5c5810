//! Sharp anisotropic Shannon and Kubo–Ogawa–Suguro entropy inequalities on
//! homogeneous dilation structures `(ℝ^N, D_λ)` with a homogeneous quasi-norm.
//!
//! Entropies and logarithms are in natural units. A deficit is always the
//! right-hand side minus the left-hand side, so valid inequalities produce
//! nonnegative deficits up to the reported error estimate.

pub mod cli;
pub mod constants;
pub mod dilation;
pub mod error;
pub mod functionals;
pub mod integrate;
pub mod specfun;
pub mod verify;

pub use constants::{kos_constant, shannon_constant, ConstantOverride, SharpConstants};
pub use dilation::{DilationStructure, NormKind, NormSpec, QuasiNorm};
pub use error::{Error, Result};
pub use functionals::{
    dilate_function, evaluate_functionals, kos_rhs, library_function, shannon_rhs, Budgets,
    FunctionalValues, TestFunction,
};
pub use integrate::{sphere_measure, IntegrationResult, SphereMeasure, SphereMethod};
pub use specfun::{log_beta, log_gamma};
pub use verify::{
    kos_deficit, lambda_optimization_check, run_suite, shannon_deficit, shannon_via_b_deficit,
    DeficitRecord, Inequality, VerificationReport,
};
