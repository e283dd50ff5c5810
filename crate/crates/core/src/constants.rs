//! Sharp constants of the anisotropic Shannon and Kubo–Ogawa–Suguro
//! inequalities, carried in log-space.
//!
//! ```text
//! A^{Q/α}  = |𝔖| Γ(Q/α) / α
//! C^{Q}    = |𝔖| Γ(Q/α) Γ(Q/α′) / (α Γ(Q)),     1/α + 1/α′ = 1
//! B        = α^α (α − 1)^{1−α} C^α
//! ```

use serde::Serialize;

use crate::dilation::QuasiNorm;
use crate::error::{Error, Result};
use crate::integrate::{sphere_measure, QmcOptions, SphereMeasure, SphereMethod};
use crate::specfun::ln_gamma_pos;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SharpConstants {
    pub q: f64,
    pub alpha: f64,
    pub sphere: SphereMeasure,
    /// `ln A_{Q,α}`
    pub log_a: f64,
    /// `ln C_{Q,α}`, present for `α > 1`
    pub log_c: Option<f64>,
    /// `ln B_{Q,α}`, present for `α > 1`
    pub log_b: Option<f64>,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::domain(format!(
            "α must be positive and finite, got {alpha}"
        )));
    }
    Ok(())
}

/// `ln A_{Q,α} = (α/Q)(ln|𝔖| + ln Γ(Q/α) − ln α)`.
pub fn log_shannon_constant(q: f64, alpha: f64, ln_sphere: f64) -> f64 {
    (alpha / q) * (ln_sphere + ln_gamma_pos(q / alpha) - alpha.ln())
}

/// `ln C_{Q,α} = (1/Q)(ln|𝔖| + ln Γ(Q/α) + ln Γ(Q/α′) − ln α − ln Γ(Q))`.
pub fn log_kos_constant(q: f64, alpha: f64, ln_sphere: f64) -> f64 {
    let alpha_conj = alpha / (alpha - 1.0);
    (ln_sphere + ln_gamma_pos(q / alpha) + ln_gamma_pos(q / alpha_conj)
        - alpha.ln()
        - ln_gamma_pos(q))
        / q
}

/// `ln B_{Q,α} = α ln α + (1 − α) ln(α − 1) + α ln C_{Q,α}`.
pub fn log_b_from_c(alpha: f64, log_c: f64) -> f64 {
    alpha * alpha.ln() + (1.0 - alpha) * (alpha - 1.0).ln() + alpha * log_c
}

impl SharpConstants {
    /// All constants defined at `α` for a given sphere measure.
    pub fn from_sphere(q: f64, alpha: f64, sphere: SphereMeasure) -> Result<Self> {
        check_alpha(alpha)?;
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::domain(format!("Q must be positive, got {q}")));
        }
        let ln_s = sphere.ln();
        let log_a = log_shannon_constant(q, alpha, ln_s);
        let (log_c, log_b) = if alpha > 1.0 {
            let c = log_kos_constant(q, alpha, ln_s);
            (Some(c), Some(log_b_from_c(alpha, c)))
        } else {
            (None, None)
        };
        Ok(Self {
            q,
            alpha,
            sphere,
            log_a,
            log_c,
            log_b,
        })
    }

    /// Constants for `qn` using the closed-form sphere measure.
    pub fn for_norm(qn: &QuasiNorm, alpha: f64) -> Result<Self> {
        let sphere = sphere_measure(qn, SphereMethod::Analytic, &QmcOptions::default())?;
        Self::from_sphere(qn.q(), alpha, sphere)
    }

    pub fn a(&self) -> f64 {
        self.log_a.exp()
    }

    pub fn c(&self) -> Option<f64> {
        self.log_c.map(f64::exp)
    }

    pub fn b(&self) -> Option<f64> {
        self.log_b.map(f64::exp)
    }

    /// `ln(α e A / Q)`, the Shannon right-hand-side factor.
    pub fn log_shannon_factor(&self) -> f64 {
        self.alpha.ln() + 1.0 + self.log_a - self.q.ln()
    }

    /// `ln(B / (α e A / Q))`; nonnegative whenever both are defined.
    pub fn log_ratio(&self) -> Option<f64> {
        self.log_b.map(|b| b - self.log_shannon_factor())
    }

    pub fn require_kos(&self) -> Result<(f64, f64)> {
        match (self.log_c, self.log_b) {
            (Some(c), Some(b)) => Ok((c, b)),
            _ => Err(Error::domain(format!(
                "C and B need α > 1, got α = {}",
                self.alpha
            ))),
        }
    }

    /// Replace a constant (negative-path testing only).
    pub fn with_override(mut self, which: ConstantOverride) -> Self {
        match which {
            ConstantOverride::A(v) => self.log_a = v.ln(),
            ConstantOverride::B(v) => self.log_b = Some(v.ln()),
            ConstantOverride::C(v) => self.log_c = Some(v.ln()),
        }
        self
    }
}

/// Shannon constant `A_{Q,α}` for any `α > 0`.
pub fn shannon_constant(qn: &QuasiNorm, alpha: f64) -> Result<SharpConstants> {
    SharpConstants::for_norm(qn, alpha)
}

/// KOS constant `C_{Q,α}` and the derived `B_{Q,α}`; requires `α > 1`.
pub fn kos_constant(qn: &QuasiNorm, alpha: f64) -> Result<SharpConstants> {
    check_alpha(alpha)?;
    if alpha <= 1.0 {
        return Err(Error::domain(format!(
            "KOS constant needs α > 1, got {alpha}"
        )));
    }
    SharpConstants::for_norm(qn, alpha)
}

/// Unstable hook replacing one of the constants, e.g. `A=1.0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstantOverride {
    A(f64),
    B(f64),
    C(f64),
}

impl std::fmt::Display for ConstantOverride {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::A(v) => write!(f, "A={v}"),
            Self::B(v) => write!(f, "B={v}"),
            Self::C(v) => write!(f, "C={v}"),
        }
    }
}

impl std::str::FromStr for ConstantOverride {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, value) = s
            .split_once('=')
            .ok_or_else(|| Error::config(format!("constant override {s:?} is not NAME=VALUE")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::config(format!("bad override value in {s:?}")))?;
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::config(format!(
                "override value must be positive, got {v}"
            )));
        }
        match name.trim() {
            "A" => Ok(Self::A(v)),
            "B" => Ok(Self::B(v)),
            "C" => Ok(Self::C(v)),
            other => Err(Error::config(format!(
                "unknown constant {other:?}; expected A, B or C"
            ))),
        }
    }
}

/// One row of the A-versus-B comparison table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub label: String,
    pub q: f64,
    pub alpha: f64,
    pub sphere: f64,
    pub a: f64,
    pub c: Option<f64>,
    pub b: Option<f64>,
    /// `α e A / Q`
    pub shannon_factor: f64,
    /// `B / (α e A / Q)`
    pub ratio: Option<f64>,
}

impl ComparisonRow {
    pub fn from_constants(label: impl Into<String>, k: &SharpConstants) -> Self {
        Self {
            label: label.into(),
            q: k.q,
            alpha: k.alpha,
            sphere: k.sphere.value,
            a: k.a(),
            c: k.c(),
            b: k.b(),
            shannon_factor: k.log_shannon_factor().exp(),
            ratio: k.log_ratio().map(f64::exp),
        }
    }
}

/// Rows `(Q, α, |𝔖|, A, C, B, αeA/Q, ratio)` over norms × alphas.
///
/// Intended for scanning how far `B` sits above `αeA/Q`; no limit is asserted.
pub fn constant_comparison_table(
    norms: &[(String, QuasiNorm)],
    alphas: &[f64],
) -> Result<Vec<ComparisonRow>> {
    let mut rows = Vec::with_capacity(norms.len() * alphas.len());
    for (label, qn) in norms {
        for &alpha in alphas {
            let k = SharpConstants::for_norm(qn, alpha)?;
            rows.push(ComparisonRow::from_constants(label.clone(), &k));
        }
    }
    Ok(rows)
}
