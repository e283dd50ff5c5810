//! Test functions and the integral functionals entering the inequalities:
//! the normalized entropy `∫ (u/‖u‖₁) log(‖u‖₁/u) dx`, the moments
//! `∫ |x|^α u dx` and `∫ ⟨x⟩^α u dx`, and the two right-hand sides.
//!
//! Radial functions are reduced to `|𝔖| ∫₀^∞ (…) r^{Q−1} dr` and integrated by
//! adaptive quadrature; general functions go through randomized QMC. The
//! entropy integrand `u log u` is taken to be 0 wherever `u = 0`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constants::SharpConstants;
use crate::dilation::{check_lambda, japanese_bracket_of, QuasiNorm};
use crate::error::{Error, Result};
use crate::integrate::{
    analytic_sphere_measure, qmc_integrate_vec, radial_integral, IntegrationResult, QmcOptions,
    RadialIntegrand, DEFAULT_MAX_EVALS, DEFAULT_REL_TOL,
};

pub type RadialProfile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type PointEvaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Integration budgets shared by every functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    pub rel_tol: f64,
    pub max_evals: usize,
    pub samples: usize,
    pub replicates: usize,
    pub seed: u64,
    #[serde(skip, default = "default_parallel")]
    pub parallel: bool,
}

fn default_parallel() -> bool {
    true
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            rel_tol: DEFAULT_REL_TOL,
            max_evals: DEFAULT_MAX_EVALS,
            samples: 1 << 18,
            replicates: 16,
            seed: 0x5eed,
            parallel: true,
        }
    }
}

impl Budgets {
    pub fn qmc(&self, scale: f64) -> QmcOptions {
        QmcOptions {
            samples: self.samples,
            replicates: self.replicates,
            seed: self.seed,
            parallel: self.parallel,
            scale,
        }
    }
}

/// Tail behaviour, used to decide which moments exist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// Faster than any power of `|x|`.
    Fast,
    /// `u(x) ~ |x|^{−d}` as `|x| → ∞`.
    Power(f64),
}

#[derive(Clone)]
pub enum Shape {
    Radial(RadialProfile),
    General(PointEvaluator),
}

/// A nonnegative integrable function on a homogeneous structure.
#[derive(Clone)]
pub struct TestFunction {
    id: String,
    shape: Shape,
    norm: QuasiNorm,
    decay: Decay,
    scale: f64,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("id", &self.id)
            .field("radial", &self.is_radial())
            .field("decay", &self.decay)
            .field("scale", &self.scale)
            .finish()
    }
}

impl TestFunction {
    /// `x ↦ profile(|x|)`.
    pub fn radial(
        id: impl Into<String>,
        norm: QuasiNorm,
        profile: impl Fn(f64) -> f64 + Send + Sync + 'static,
        decay: Decay,
    ) -> Self {
        Self {
            id: id.into(),
            shape: Shape::Radial(Arc::new(profile)),
            norm,
            decay,
            scale: 1.0,
        }
    }

    pub fn general(
        id: impl Into<String>,
        norm: QuasiNorm,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        decay: Decay,
    ) -> Self {
        Self {
            id: id.into(),
            shape: Shape::General(Arc::new(eval)),
            norm,
            decay,
            scale: 1.0,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn norm(&self) -> &QuasiNorm {
        &self.norm
    }

    pub fn decay(&self) -> Decay {
        self.decay
    }

    pub fn is_radial(&self) -> bool {
        matches!(self.shape, Shape::Radial(_))
    }

    /// Characteristic length used to place QMC nodes.
    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    /// `|u(x)|`.
    pub fn value(&self, x: &[f64]) -> f64 {
        match &self.shape {
            Shape::Radial(p) => p(self.norm.eval(x)).abs(),
            Shape::General(g) => g(x).abs(),
        }
    }

    /// The same radial function viewed as a general evaluator.
    pub fn as_general(&self) -> Self {
        match &self.shape {
            Shape::General(_) => self.clone(),
            Shape::Radial(p) => {
                let p = p.clone();
                let n = self.norm.clone();
                Self {
                    shape: Shape::General(Arc::new(move |x| p(n.eval(x)))),
                    ..self.clone()
                }
            }
        }
    }

    /// `c · u`.
    pub fn scaled(&self, c: f64) -> Self {
        let shape = match &self.shape {
            Shape::Radial(p) => {
                let p = p.clone();
                Shape::Radial(Arc::new(move |r| c * p(r)))
            }
            Shape::General(g) => {
                let g = g.clone();
                Shape::General(Arc::new(move |x| c * g(x)))
            }
        };
        Self {
            id: format!("{}*{c}", self.id),
            shape,
            ..self.clone()
        }
    }

    /// Whether `∫ |x|^β u dx < ∞`.
    pub fn has_finite_moment(&self, beta: f64) -> bool {
        match self.decay {
            Decay::Fast => true,
            Decay::Power(d) => beta < d - self.norm.q(),
        }
    }
}

/// `u_λ(x) = λ^Q u(D_λ x)`, which preserves the L¹ norm.
pub fn dilate_function(u: &TestFunction, lambda: f64) -> Result<TestFunction> {
    check_lambda(lambda)?;
    let lq = lambda.powf(u.norm.q());
    let shape = match &u.shape {
        Shape::Radial(p) => {
            let p = p.clone();
            Shape::Radial(Arc::new(move |r| lq * p(lambda * r)))
        }
        Shape::General(g) => {
            let g = g.clone();
            let s = u.norm.structure().clone();
            Shape::General(Arc::new(move |x| {
                let mut y = [0.0; 16];
                if x.len() <= y.len() {
                    s.dilate_into(lambda, x, &mut y[..x.len()]);
                    lq * g(&y[..x.len()])
                } else {
                    let mut y = vec![0.0; x.len()];
                    s.dilate_into(lambda, x, &mut y);
                    lq * g(&y)
                }
            }))
        }
    };
    Ok(TestFunction {
        id: format!("{}@{lambda}", u.id),
        shape,
        scale: u.scale / lambda,
        ..u.clone()
    })
}

/// A value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalErrors {
    pub l1: f64,
    pub entropy: f64,
    pub moment_alpha: f64,
    pub bracket_moment: f64,
}

/// Functionals of `u` at a given `α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalValues {
    pub alpha: f64,
    pub q: f64,
    /// `‖u‖₁`
    pub l1: f64,
    /// `∫ (u/‖u‖₁) log(‖u‖₁/u) dx`
    pub entropy: f64,
    /// `∫ |x|^α u dx`
    pub moment_alpha: f64,
    /// `∫ ⟨x⟩^α u dx`
    pub bracket_moment: f64,
    pub errors: FunctionalErrors,
}

// L, ∫u ln u, ∫|x|^α u, ∫⟨x⟩^α u, ∫u ln(1+|x|^α)
const N_RAW: usize = 5;

fn u_ln_u(u: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u * u.ln()
    }
}

struct Raw {
    values: FunctionalValues,
    /// `∫ (u/L) ln(1 + |x|^α) dx`
    log_moment: Estimate,
}

fn entropy_from(l: f64, j: f64) -> f64 {
    l.ln() - j / l
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::domain(format!(
            "α must be positive and finite, got {alpha}"
        )));
    }
    Ok(())
}

fn degenerate(l: f64) -> Result<()> {
    if l.is_nan() || l < 1e-300 {
        return Err(Error::Degenerate(format!("L¹ norm {l:e} is below 1e-300")));
    }
    Ok(())
}

fn measure(u: &TestFunction, alpha: f64, budgets: &Budgets, with_moments: bool) -> Result<Raw> {
    check_alpha(alpha)?;
    let q = u.norm.q();
    match &u.shape {
        Shape::Radial(p) => {
            let sphere = analytic_sphere_measure(&u.norm)?;
            let quad = |g: &dyn Fn(f64) -> f64| -> Result<IntegrationResult> {
                let r = radial_integral(
                    &RadialIntegrand::new(g, q),
                    budgets.rel_tol,
                    budgets.max_evals,
                )?;
                Ok(IntegrationResult {
                    value: sphere * r.value,
                    abs_error_estimate: sphere * r.abs_error_estimate,
                    evaluations: r.evaluations,
                })
            };
            let prof = |r: f64| p(r).abs();
            let l = quad(&prof)?;
            degenerate(l.value)?;
            let j = quad(&|r| u_ln_u(prof(r)))?;
            let lm = quad(&|r| prof(r) * r.powf(alpha).ln_1p())?;
            let (m, b) = if with_moments {
                (
                    quad(&|r| r.powf(alpha) * prof(r))?,
                    quad(&|r| japanese_bracket_of(r).powf(alpha) * prof(r))?,
                )
            } else {
                let nan = IntegrationResult {
                    value: f64::NAN,
                    abs_error_estimate: f64::NAN,
                    evaluations: 0,
                };
                (nan, nan)
            };
            let (lv, le) = (l.value, l.abs_error_estimate);
            let (jv, je) = (j.value, j.abs_error_estimate);
            let entropy_err = le / lv + je / lv + jv.abs() * le / (lv * lv);
            let values = FunctionalValues {
                alpha,
                q,
                l1: lv,
                entropy: entropy_from(lv, jv),
                moment_alpha: m.value,
                bracket_moment: b.value,
                errors: FunctionalErrors {
                    l1: le,
                    entropy: entropy_err,
                    moment_alpha: m.abs_error_estimate,
                    bracket_moment: b.abs_error_estimate,
                },
            };
            let log_moment = Estimate {
                value: lm.value / lv,
                error: lm.abs_error_estimate / lv + lm.value.abs() * le / (lv * lv),
            };
            Ok(Raw { values, log_moment })
        }
        Shape::General(g) => {
            let norm = &u.norm;
            let est = qmc_integrate_vec(
                norm.structure(),
                N_RAW,
                |x, out| {
                    let v = g(x).abs();
                    if v == 0.0 {
                        out.iter_mut().for_each(|o| *o = 0.0);
                        return;
                    }
                    let r = norm.eval(x);
                    let ra = r.powf(alpha);
                    out[0] = v;
                    out[1] = u_ln_u(v);
                    out[2] = ra * v;
                    out[3] = japanese_bracket_of(r).powf(alpha) * v;
                    out[4] = ra.ln_1p() * v;
                },
                &budgets.qmc(u.scale),
            )?;
            let l = est.mean(0);
            degenerate(l)?;
            let (entropy, entropy_err) = est.derived(|v| entropy_from(v[0], v[1]));
            let (log_moment, log_moment_err) = est.derived(|v| v[4] / v[0]);
            let values = FunctionalValues {
                alpha,
                q,
                l1: l,
                entropy,
                moment_alpha: est.mean(2),
                bracket_moment: est.mean(3),
                errors: FunctionalErrors {
                    l1: est.std_error(0),
                    entropy: entropy_err,
                    moment_alpha: est.std_error(2),
                    bracket_moment: est.std_error(3),
                },
            };
            Ok(Raw {
                values,
                log_moment: Estimate {
                    value: log_moment,
                    error: log_moment_err,
                },
            })
        }
    }
}

/// L¹ norm, entropy, `α`-moment and bracket moment of `|u|`.
pub fn evaluate_functionals(
    u: &TestFunction,
    alpha: f64,
    budgets: &Budgets,
) -> Result<FunctionalValues> {
    Ok(measure(u, alpha, budgets, true)?.values)
}

/// Shannon right-hand side `(Q/α) ln((αeA/Q) · M_α/‖u‖₁)`.
pub fn shannon_rhs(values: &FunctionalValues, consts: &SharpConstants) -> Result<f64> {
    Ok(shannon_rhs_estimate(values, consts.log_shannon_factor(), consts)?.value)
}

/// Right-hand side of the B-form `(Q/α) ln(B · M_α/‖u‖₁)`.
pub fn shannon_via_b_rhs(values: &FunctionalValues, consts: &SharpConstants) -> Result<f64> {
    let (_, log_b) = consts.require_kos()?;
    Ok(shannon_rhs_estimate(values, log_b, consts)?.value)
}

pub(crate) fn shannon_rhs_estimate(
    values: &FunctionalValues,
    log_factor: f64,
    consts: &SharpConstants,
) -> Result<Estimate> {
    let m = values.moment_alpha;
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::domain(format!(
            "Shannon right-hand side needs a positive finite moment, got {m}"
        )));
    }
    let k = consts.q / consts.alpha;
    Ok(Estimate {
        value: k * (log_factor + (m / values.l1).ln()),
        error: k * (values.errors.moment_alpha / m + values.errors.l1 / values.l1),
    })
}

/// KOS right-hand side in normalized form `Q ∫ (u/‖u‖₁) ln(C (1 + |x|^α)) dx`.
pub fn kos_rhs(
    u: &TestFunction,
    alpha: f64,
    consts: &SharpConstants,
    budgets: &Budgets,
) -> Result<Estimate> {
    if alpha <= 1.0 {
        return Err(Error::domain(format!(
            "KOS inequality needs α > 1, got {alpha}"
        )));
    }
    let raw = measure(u, alpha, budgets, false)?;
    kos_rhs_from(&raw.log_moment, consts)
}

fn kos_rhs_from(log_moment: &Estimate, consts: &SharpConstants) -> Result<Estimate> {
    let (log_c, _) = consts.require_kos()?;
    Ok(Estimate {
        value: consts.q * (log_c + log_moment.value),
        error: consts.q * log_moment.error,
    })
}

/// Everything the three deficits need, from one pass over `u`.
#[derive(Debug, Clone, Copy)]
pub struct FunctionalBundle {
    pub values: FunctionalValues,
    pub kos_rhs: Option<Estimate>,
}

pub fn evaluate_bundle(
    u: &TestFunction,
    consts: &SharpConstants,
    budgets: &Budgets,
) -> Result<FunctionalBundle> {
    let moments = u.has_finite_moment(consts.alpha);
    let raw = measure(u, consts.alpha, budgets, moments)?;
    let kos_rhs = match consts.log_c {
        Some(_) => Some(kos_rhs_from(&raw.log_moment, consts)?),
        None => None,
    };
    Ok(FunctionalBundle {
        values: raw.values,
        kos_rhs,
    })
}

// ---------------------------------------------------------------------------
// Shipped library
// ---------------------------------------------------------------------------

/// Library ids used when none are requested.
pub const DEFAULT_LIBRARY: [&str; 7] = [
    "extremizer",
    "kos-profile",
    "gaussian",
    "stretched",
    "bump",
    "mixture",
    "offset-mixture",
];

/// Parsed library id such as `gaussian:c=2` or `stretched:c=1,beta=3`.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    /// `exp(−A_{Q,α} |x|^α)`
    Extremizer,
    /// `c_{Q,α} (1 + |x|^α)^{−Q}` with `c = C^{−Q}`
    KosProfile,
    Gaussian {
        c: f64,
    },
    Stretched {
        c: f64,
        beta: f64,
    },
    /// `exp(1 − 1/(1 − |x|²))` on the unit ball
    Bump,
    /// `0.6 e^{−|x|²} + 0.4 e^{−|x|²/9}`
    Mixture,
    /// `E_α (1 + ε · bump)`
    Perturbed {
        eps: f64,
    },
    /// Two unit Gaussians of the quasi-norm centred at `±a e₁`; not radial.
    OffsetMixture {
        a: f64,
    },
}

fn parse_params(id: &str, rest: &str, allowed: &[&str]) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    if rest.is_empty() {
        return Ok(out);
    }
    for kv in rest.split(',') {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::config(format!("bad parameter {kv:?} in function id {id:?}")))?;
        let k = k.trim();
        if !allowed.contains(&k) {
            return Err(Error::config(format!(
                "unknown parameter {k:?} in function id {id:?}; allowed: {allowed:?}"
            )));
        }
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::config(format!("bad value {v:?} in function id {id:?}")))?;
        if !v.is_finite() {
            return Err(Error::config(format!("non-finite parameter in {id:?}")));
        }
        out.push((k.to_string(), v));
    }
    Ok(out)
}

fn param(params: &[(String, f64)], key: &str, default: f64) -> f64 {
    params
        .iter()
        .rev()
        .find(|(k, _)| k == key)
        .map_or(default, |(_, v)| *v)
}

impl std::str::FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(id: &str) -> Result<Self> {
        let id = id.trim();
        let (name, rest) = id.split_once(':').unwrap_or((id, ""));
        let spec = match name {
            "extremizer" => {
                parse_params(id, rest, &[])?;
                FunctionSpec::Extremizer
            }
            "kos-profile" => {
                parse_params(id, rest, &[])?;
                FunctionSpec::KosProfile
            }
            "gaussian" => {
                let p = parse_params(id, rest, &["c"])?;
                FunctionSpec::Gaussian {
                    c: param(&p, "c", 1.0),
                }
            }
            "stretched" => {
                let p = parse_params(id, rest, &["c", "beta"])?;
                FunctionSpec::Stretched {
                    c: param(&p, "c", 1.0),
                    beta: param(&p, "beta", 1.0),
                }
            }
            "bump" => {
                parse_params(id, rest, &[])?;
                FunctionSpec::Bump
            }
            "mixture" => {
                parse_params(id, rest, &[])?;
                FunctionSpec::Mixture
            }
            "perturbed" => {
                let p = parse_params(id, rest, &["eps"])?;
                FunctionSpec::Perturbed {
                    eps: param(&p, "eps", 0.1),
                }
            }
            "offset-mixture" => {
                let p = parse_params(id, rest, &["a"])?;
                FunctionSpec::OffsetMixture {
                    a: param(&p, "a", 1.5),
                }
            }
            _ => {
                return Err(Error::config(format!(
                    "unknown test function {id:?}; known: extremizer, kos-profile, gaussian[:c=], \
                     stretched[:c=,beta=], bump, mixture, perturbed[:eps=], offset-mixture[:a=]"
                )))
            }
        };
        match spec {
            FunctionSpec::Gaussian { c } | FunctionSpec::Stretched { c, .. } if c <= 0.0 => {
                Err(Error::config(format!("{id:?}: c must be positive")))
            }
            FunctionSpec::Stretched { beta, .. } if beta <= 0.0 => {
                Err(Error::config(format!("{id:?}: beta must be positive")))
            }
            FunctionSpec::Perturbed { eps } if eps <= -1.0 => {
                Err(Error::config(format!("{id:?}: eps must exceed -1")))
            }
            _ => Ok(spec),
        }
    }
}

pub fn bump_profile(r: f64) -> f64 {
    if r < 1.0 {
        (1.0 - 1.0 / (1.0 - r * r)).exp()
    } else {
        0.0
    }
}

impl FunctionSpec {
    /// Instantiates the function on `norm` for exponent `alpha`.
    pub fn build(&self, id: &str, norm: &QuasiNorm, alpha: f64) -> Result<TestFunction> {
        check_alpha(alpha)?;
        let n = norm.clone();
        let f = match *self {
            FunctionSpec::Extremizer => {
                let a = SharpConstants::for_norm(norm, alpha)?.a();
                TestFunction::radial(id, n, move |r| (-a * r.powf(alpha)).exp(), Decay::Fast)
            }
            FunctionSpec::KosProfile => {
                let k = SharpConstants::for_norm(norm, alpha)?;
                let (log_c, _) = k.require_kos()?;
                let q = norm.q();
                let c = (-q * log_c).exp();
                TestFunction::radial(
                    id,
                    n,
                    move |r| c * (-q * r.powf(alpha).ln_1p()).exp(),
                    Decay::Power(alpha * q),
                )
            }
            FunctionSpec::Gaussian { c } => {
                TestFunction::radial(id, n, move |r| (-c * r * r).exp(), Decay::Fast)
                    .with_scale(c.powf(-0.5))
            }
            FunctionSpec::Stretched { c, beta } => {
                TestFunction::radial(id, n, move |r| (-c * r.powf(beta)).exp(), Decay::Fast)
                    .with_scale(c.powf(-1.0 / beta))
            }
            FunctionSpec::Bump => TestFunction::radial(id, n, bump_profile, Decay::Fast),
            FunctionSpec::Mixture => TestFunction::radial(
                id,
                n,
                |r| 0.6 * (-r * r).exp() + 0.4 * (-r * r / 9.0).exp(),
                Decay::Fast,
            ),
            FunctionSpec::Perturbed { eps } => {
                let a = SharpConstants::for_norm(norm, alpha)?.a();
                TestFunction::radial(
                    id,
                    n,
                    move |r| (-a * r.powf(alpha)).exp() * (1.0 + eps * bump_profile(r)),
                    Decay::Fast,
                )
            }
            FunctionSpec::OffsetMixture { a } => TestFunction::general(
                id,
                n.clone(),
                move |x| {
                    let mut y = [0.0; 16];
                    let d = x.len().min(16);
                    y[..d].copy_from_slice(&x[..d]);
                    y[0] = x[0] - a;
                    let r1 = n.eval(&y[..d]);
                    y[0] = x[0] + a;
                    let r2 = n.eval(&y[..d]);
                    0.5 * (-r1 * r1).exp() + 0.5 * (-r2 * r2).exp()
                },
                Decay::Fast,
            )
            .with_scale(1.0 + a),
        };
        Ok(f)
    }
}

/// Library function by id, e.g. `library_function("gaussian:c=2", &norm, 2.0)`.
pub fn library_function(id: &str, norm: &QuasiNorm, alpha: f64) -> Result<TestFunction> {
    if norm.dim() > 16 {
        let spec: FunctionSpec = id.parse()?;
        if matches!(spec, FunctionSpec::OffsetMixture { .. }) {
            return Err(Error::config(
                "offset-mixture supports at most 16 coordinates",
            ));
        }
    }
    id.parse::<FunctionSpec>()?.build(id, norm, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation::DilationStructure;
    use std::f64::consts::PI;

    fn line() -> QuasiNorm {
        QuasiNorm::euclidean(1).unwrap()
    }

    fn fast() -> Budgets {
        Budgets {
            samples: 1 << 14,
            ..Budgets::default()
        }
    }

    #[test]
    fn extremizer_closed_forms() {
        let u = library_function("extremizer", &line(), 2.0).unwrap();
        let v = evaluate_functionals(&u, 2.0, &fast()).unwrap();
        assert!((v.l1 - 1.0).abs() < 1e-9, "{v:?}");
        assert!((v.entropy - 0.5).abs() < 1e-9, "{v:?}");
        assert!((v.moment_alpha - 1.0 / (2.0 * PI)).abs() < 1e-9, "{v:?}");
        assert!(v.moment_alpha <= v.bracket_moment);
        let k = SharpConstants::for_norm(&line(), 2.0).unwrap();
        assert!((shannon_rhs(&v, &k).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn cauchy_entropy() {
        let u = library_function("kos-profile", &line(), 2.0).unwrap();
        let v = evaluate_functionals(
            &TestFunction::radial(
                "cauchy",
                line(),
                |r| 1.0 / (PI * (1.0 + r * r)),
                Decay::Power(2.0),
            ),
            0.5,
            &fast(),
        )
        .unwrap();
        assert!((v.l1 - 1.0).abs() < 1e-9);
        assert!((v.entropy - (4.0 * PI).ln()).abs() < 1e-8, "{v:?}");
        let k = SharpConstants::for_norm(&line(), 2.0).unwrap();
        let rhs = kos_rhs(&u, 2.0, &k, &fast()).unwrap();
        assert!((rhs.value - (4.0 * PI).ln()).abs() < 1e-8, "{rhs:?}");
    }

    #[test]
    fn scalar_multiples() {
        let u = library_function("gaussian", &line(), 2.0).unwrap();
        let cu = u.scaled(7.0);
        let a = evaluate_functionals(&u, 2.0, &fast()).unwrap();
        let b = evaluate_functionals(&cu, 2.0, &fast()).unwrap();
        assert!((a.entropy - b.entropy).abs() < 1e-10);
        assert!((b.l1 - 7.0 * a.l1).abs() < 1e-9);
        assert!((b.moment_alpha - 7.0 * a.moment_alpha).abs() < 1e-9);
        let k = SharpConstants::for_norm(&line(), 2.0).unwrap();
        assert!((shannon_rhs(&a, &k).unwrap() - shannon_rhs(&b, &k).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn dilation_examples() {
        let u = library_function("gaussian", &line(), 2.0).unwrap();
        let same = dilate_function(&u, 1.0).unwrap();
        assert_eq!(same.value(&[0.3]), u.value(&[0.3]));
        let a = evaluate_functionals(&u, 2.0, &fast()).unwrap();
        let d = dilate_function(&u, 2.0).unwrap();
        let b = evaluate_functionals(&d, 2.0, &fast()).unwrap();
        assert!((a.l1 - b.l1).abs() < 1e-9);
        // normalize first: entropy(u_λ) = entropy(u) − Q ln λ holds for any mass
        assert!((b.entropy - (a.entropy - 2f64.ln())).abs() < 1e-9);
        assert!(dilate_function(&u, 0.0).is_err());
    }

    #[test]
    fn general_dilation_uses_structure_weights() {
        let s = DilationStructure::new(vec![1.0, 2.0]).unwrap();
        let n = QuasiNorm::max(s);
        let u = library_function("offset-mixture", &n, 2.0).unwrap();
        let d = dilate_function(&u, 2.0).unwrap();
        let x = [0.3, -0.2];
        assert!((d.value(&x) - 8.0 * u.value(&[0.6, -0.8])).abs() < 1e-15);
    }

    #[test]
    fn radial_and_general_routes_agree() {
        let heis = QuasiNorm::koranyi_from_weights(DilationStructure::heisenberg()).unwrap();
        let u = library_function("gaussian", &heis, 2.0).unwrap();
        let b = Budgets::default();
        let r = evaluate_functionals(&u, 2.0, &b).unwrap();
        let g = evaluate_functionals(&u.as_general(), 2.0, &b).unwrap();
        let close = |x: f64, y: f64, ex: f64, ey: f64| (x - y).abs() <= 3.0 * (ex + ey);
        assert!(close(r.l1, g.l1, r.errors.l1, g.errors.l1), "{r:?}\n{g:?}");
        assert!(
            close(r.entropy, g.entropy, r.errors.entropy, g.errors.entropy),
            "{r:?}\n{g:?}"
        );
        assert!(close(
            r.moment_alpha,
            g.moment_alpha,
            r.errors.moment_alpha,
            g.errors.moment_alpha
        ));
        assert!(close(
            r.bracket_moment,
            g.bracket_moment,
            r.errors.bracket_moment,
            g.errors.bracket_moment
        ));
    }

    #[test]
    fn degenerate_and_domain_errors() {
        let z = TestFunction::radial("zero", line(), |_| 0.0, Decay::Fast);
        assert!(matches!(
            evaluate_functionals(&z, 2.0, &fast()),
            Err(Error::Degenerate(_))
        ));
        let u = library_function("gaussian", &line(), 2.0).unwrap();
        assert!(evaluate_functionals(&u, 0.0, &fast()).is_err());
        let v = FunctionalValues {
            moment_alpha: 0.0,
            ..evaluate_functionals(&u, 2.0, &fast()).unwrap()
        };
        let k = SharpConstants::for_norm(&line(), 2.0).unwrap();
        assert!(matches!(shannon_rhs(&v, &k), Err(Error::Domain(_))));
        assert!(kos_rhs(&u, 1.0, &k, &fast()).is_err());
    }

    #[test]
    fn doubling_moment_shifts_rhs() {
        let u = library_function("bump", &line(), 2.0).unwrap();
        let v = evaluate_functionals(&u, 2.0, &fast()).unwrap();
        let k = SharpConstants::for_norm(&line(), 2.0).unwrap();
        let w = FunctionalValues {
            moment_alpha: 2.0 * v.moment_alpha,
            ..v
        };
        let d = shannon_rhs(&w, &k).unwrap() - shannon_rhs(&v, &k).unwrap();
        assert!((d - 0.5 * 2f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn compact_support_bounds_kos_rhs() {
        for n in [
            line(),
            QuasiNorm::koranyi_from_weights(DilationStructure::heisenberg()).unwrap(),
        ] {
            let u = library_function("bump", &n, 2.0).unwrap();
            let k = SharpConstants::for_norm(&n, 2.0).unwrap();
            let rhs = kos_rhs(&u, 2.0, &k, &fast()).unwrap();
            assert!(rhs.value <= n.q() * (2.0 * k.c().unwrap()).ln());
        }
    }

    #[test]
    fn library_ids() {
        assert_eq!(
            "stretched:c=2,beta=3".parse::<FunctionSpec>().unwrap(),
            FunctionSpec::Stretched { c: 2.0, beta: 3.0 }
        );
        assert_eq!(
            "gaussian".parse::<FunctionSpec>().unwrap(),
            FunctionSpec::Gaussian { c: 1.0 }
        );
        assert!("gaussian:d=1".parse::<FunctionSpec>().is_err());
        assert!("gaussian:c=-1".parse::<FunctionSpec>().is_err());
        assert!("sinc".parse::<FunctionSpec>().is_err());
        assert!(library_function("kos-profile", &line(), 1.0).is_err());
        let phi = library_function("kos-profile", &line(), 2.0).unwrap();
        assert!(!phi.has_finite_moment(2.0));
        assert!(phi.has_finite_moment(0.5));
    }
}
