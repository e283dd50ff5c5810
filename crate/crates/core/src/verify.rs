//! Deficits (right-hand side minus left-hand side, in nats) of the three
//! inequalities, the `λ`-optimization check and the verification suite.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{ConstantOverride, SharpConstants};
use crate::dilation::{NormSpec, QuasiNorm};
use crate::error::{Error, Result};
use crate::functionals::{
    evaluate_bundle, evaluate_functionals, shannon_rhs_estimate, Budgets, Estimate, FunctionSpec,
    TestFunction,
};
use crate::integrate::{analytic_sphere_measure, MIN_SAMPLES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    /// `H(u) ≤ (Q/α) ln((αeA/Q) ‖|x|^α u‖₁/‖u‖₁)`
    Shannon,
    /// `H(u) ≤ (Q/α) ln(B ‖|x|^α u‖₁/‖u‖₁)`
    ShannonViaB,
    /// `H(u) ≤ Q ∫ (u/‖u‖₁) ln(C (1 + |x|^α))`
    Kos,
}

impl Inequality {
    pub const ALL: [Inequality; 3] = [
        Inequality::Shannon,
        Inequality::ShannonViaB,
        Inequality::Kos,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Inequality::Shannon => "shannon",
            Inequality::ShannonViaB => "shannon_via_b",
            Inequality::Kos => "kos",
        }
    }

    pub fn needs_alpha_above_one(self) -> bool {
        self != Inequality::Shannon
    }

    pub fn needs_moment(self) -> bool {
        self != Inequality::Kos
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Inequality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "shannon" => Ok(Inequality::Shannon),
            "shannon_via_b" | "via_b" => Ok(Inequality::ShannonViaB),
            "kos" => Ok(Inequality::Kos),
            _ => Err(Error::config(format!(
                "unknown inequality {s:?}; expected shannon, shannon-via-b or kos"
            ))),
        }
    }
}

/// Outcome for one `(inequality, function, α)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeficitRecord {
    pub inequality: Inequality,
    pub function_id: String,
    pub alpha: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`
    pub deficit: f64,
    pub error_estimate: f64,
    /// `deficit ≥ −3 · error_estimate`
    pub passed: bool,
}

/// Tolerance multiplier in the pass criterion.
pub const PASS_SIGMAS: f64 = 3.0;

fn roundoff(lhs: f64, rhs: f64) -> f64 {
    100.0 * f64::EPSILON * (1.0 + lhs.abs() + rhs.abs())
}

impl DeficitRecord {
    pub fn new(
        inequality: Inequality,
        function_id: &str,
        alpha: f64,
        lhs: f64,
        rhs: Estimate,
        lhs_err: f64,
    ) -> Self {
        let deficit = rhs.value - lhs;
        let error_estimate = lhs_err + rhs.error + roundoff(lhs, rhs.value);
        Self {
            inequality,
            function_id: function_id.to_string(),
            alpha,
            lhs,
            rhs: rhs.value,
            deficit,
            error_estimate,
            passed: deficit >= -PASS_SIGMAS * error_estimate,
        }
    }

    fn key(&self) -> (Inequality, &str, f64) {
        (self.inequality, &self.function_id, self.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipKind {
    /// `α ≤ 1` for an inequality that needs `α > 1`.
    Domain,
    /// Quadrature ran out of evaluations.
    Budget,
    /// The `α`-moment of the function is infinite.
    NotApplicable,
    /// Any other numerical failure.
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkippedRecord {
    pub inequality: Inequality,
    pub function_id: String,
    pub alpha: f64,
    pub kind: SkipKind,
    pub reason: String,
}

impl SkippedRecord {
    fn key(&self) -> (Inequality, &str, f64) {
        (self.inequality, &self.function_id, self.alpha)
    }
}

type Outcome = std::result::Result<DeficitRecord, (SkipKind, String)>;

fn skip_kind(e: &Error) -> SkipKind {
    match e {
        Error::BudgetExceeded { .. } => SkipKind::Budget,
        Error::Domain(_) => SkipKind::Domain,
        _ => SkipKind::Error,
    }
}

/// Evaluates the requested deficits of `u` from a single pass over it.
fn deficits(
    u: &TestFunction,
    consts: &SharpConstants,
    budgets: &Budgets,
    which: &[Inequality],
) -> Vec<Outcome> {
    let alpha = consts.alpha;
    let gate = |ineq: Inequality| -> Option<(SkipKind, String)> {
        if ineq.needs_alpha_above_one() && alpha <= 1.0 {
            return Some((SkipKind::Domain, format!("{ineq} needs α > 1")));
        }
        if ineq.needs_moment() && !u.has_finite_moment(alpha) {
            return Some((
                SkipKind::NotApplicable,
                format!("∫|x|^{alpha} u dx diverges for {}", u.id()),
            ));
        }
        None
    };
    let gates: Vec<_> = which.iter().map(|&i| gate(i)).collect();
    if gates.iter().all(Option::is_some) {
        return gates.into_iter().map(|g| Err(g.unwrap())).collect();
    }
    let bundle = match evaluate_bundle(u, consts, budgets) {
        Ok(b) => b,
        Err(e) => {
            let kind = skip_kind(&e);
            let msg = e.to_string();
            return gates
                .into_iter()
                .map(|g| Err(g.unwrap_or_else(|| (kind, msg.clone()))))
                .collect();
        }
    };
    let v = &bundle.values;
    which
        .iter()
        .zip(gates)
        .map(|(&ineq, g)| {
            if let Some(g) = g {
                return Err(g);
            }
            let rhs = match ineq {
                Inequality::Shannon => shannon_rhs_estimate(v, consts.log_shannon_factor(), consts),
                Inequality::ShannonViaB => consts
                    .require_kos()
                    .and_then(|(_, log_b)| shannon_rhs_estimate(v, log_b, consts)),
                Inequality::Kos => bundle
                    .kos_rhs
                    .ok_or_else(|| Error::domain("KOS constant unavailable")),
            };
            match rhs {
                Ok(rhs) => Ok(DeficitRecord::new(
                    ineq,
                    u.id(),
                    alpha,
                    v.entropy,
                    rhs,
                    v.errors.entropy,
                )),
                Err(e) => Err((skip_kind(&e), e.to_string())),
            }
        })
        .collect()
}

fn single(
    u: &TestFunction,
    alpha: f64,
    budgets: &Budgets,
    ineq: Inequality,
) -> Result<DeficitRecord> {
    let consts = SharpConstants::for_norm(u.norm(), alpha)?;
    deficit_with_constants(u, &consts, budgets, ineq)
}

/// Deficit against explicit (possibly overridden) constants.
pub fn deficit_with_constants(
    u: &TestFunction,
    consts: &SharpConstants,
    budgets: &Budgets,
    ineq: Inequality,
) -> Result<DeficitRecord> {
    if ineq.needs_alpha_above_one() && consts.alpha <= 1.0 {
        return Err(Error::domain(format!(
            "{ineq} needs α > 1, got {}",
            consts.alpha
        )));
    }
    if ineq.needs_moment() && !u.has_finite_moment(consts.alpha) {
        return Err(Error::domain(format!(
            "∫|x|^{} u dx diverges for {}",
            consts.alpha,
            u.id()
        )));
    }
    if ineq.needs_moment() {
        let v = evaluate_functionals(u, consts.alpha, budgets)?;
        let factor = match ineq {
            Inequality::Shannon => consts.log_shannon_factor(),
            _ => consts.require_kos()?.1,
        };
        let rhs = shannon_rhs_estimate(&v, factor, consts)?;
        return Ok(DeficitRecord::new(
            ineq,
            u.id(),
            consts.alpha,
            v.entropy,
            rhs,
            v.errors.entropy,
        ));
    }
    let b = evaluate_bundle(u, consts, budgets)?;
    let rhs = b
        .kos_rhs
        .ok_or_else(|| Error::domain("KOS constant unavailable"))?;
    Ok(DeficitRecord::new(
        ineq,
        u.id(),
        consts.alpha,
        b.values.entropy,
        rhs,
        b.values.errors.entropy,
    ))
}

pub fn shannon_deficit(u: &TestFunction, alpha: f64, budgets: &Budgets) -> Result<DeficitRecord> {
    single(u, alpha, budgets, Inequality::Shannon)
}

pub fn shannon_via_b_deficit(
    u: &TestFunction,
    alpha: f64,
    budgets: &Budgets,
) -> Result<DeficitRecord> {
    single(u, alpha, budgets, Inequality::ShannonViaB)
}

pub fn kos_deficit(u: &TestFunction, alpha: f64, budgets: &Budgets) -> Result<DeficitRecord> {
    single(u, alpha, budgets, Inequality::Kos)
}

// ---------------------------------------------------------------------------
// λ-optimization
// ---------------------------------------------------------------------------

/// `Q ln C + Q ln(λ + λ^{1−α} M)` over a grid of `λ`, with `M = ‖|x|^α u‖₁/‖u‖₁`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaCheck {
    pub alpha: f64,
    pub normalized_moment: f64,
    pub grid: Vec<(f64, f64)>,
    /// `((α − 1) M)^{1/α}`
    pub lambda_star: f64,
    pub bound_at_star: f64,
    /// `(Q/α) ln(B M)`
    pub closed_form: f64,
    pub grid_argmin: f64,
    pub grid_min: f64,
    /// Bound at `λ*` does not exceed the grid minimum and `λ*` lies between
    /// the grid neighbours of the grid minimizer.
    pub star_is_minimal: bool,
}

impl LambdaCheck {
    pub fn closed_form_residual(&self) -> f64 {
        (self.bound_at_star - self.closed_form).abs()
    }
}

pub fn lambda_bound(q: f64, alpha: f64, log_c: f64, m: f64, lambda: f64) -> f64 {
    // ln(λ + λ^{1−α} M) = ln λ + ln(1 + λ^{−α} M)
    q * log_c + q * (lambda.ln() + (m * lambda.powf(-alpha)).ln_1p())
}

/// `λ`-check from a given normalized moment.
pub fn lambda_check_from_moment(
    consts: &SharpConstants,
    m: f64,
    lambdas: &[f64],
) -> Result<LambdaCheck> {
    let (log_c, log_b) = consts.require_kos()?;
    let (q, alpha) = (consts.q, consts.alpha);
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::domain(format!(
            "normalized moment must be positive, got {m}"
        )));
    }
    let mut lambdas: Vec<f64> = lambdas.to_vec();
    if lambdas.iter().any(|&l| !(l > 0.0 && l.is_finite())) || lambdas.is_empty() {
        return Err(Error::domain("λ grid must be nonempty and positive"));
    }
    lambdas.sort_by(f64::total_cmp);
    let grid: Vec<(f64, f64)> = lambdas
        .iter()
        .map(|&l| (l, lambda_bound(q, alpha, log_c, m, l)))
        .collect();
    let lambda_star = ((alpha - 1.0) * m).powf(1.0 / alpha);
    let bound_at_star = lambda_bound(q, alpha, log_c, m, lambda_star);
    let closed_form = (q / alpha) * (log_b + m.ln());
    let (i, &(grid_argmin, grid_min)) = grid
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .expect("nonempty grid");
    let lo = if i == 0 { 0.0 } else { grid[i - 1].0 };
    let hi = grid.get(i + 1).map_or(f64::INFINITY, |g| g.0);
    let slack = 1e-12 * (1.0 + grid_min.abs());
    let star_is_minimal =
        bound_at_star <= grid_min + slack && lo <= lambda_star && lambda_star <= hi;
    Ok(LambdaCheck {
        alpha,
        normalized_moment: m,
        grid,
        lambda_star,
        bound_at_star,
        closed_form,
        grid_argmin,
        grid_min,
        star_is_minimal,
    })
}

/// Tabulates the `λ`-family of KOS-derived bounds for `u`.
pub fn lambda_optimization_check(
    u: &TestFunction,
    alpha: f64,
    lambdas: &[f64],
    budgets: &Budgets,
) -> Result<LambdaCheck> {
    let consts = SharpConstants::for_norm(u.norm(), alpha)?;
    consts.require_kos()?;
    let v = evaluate_functionals(u, alpha, budgets)?;
    lambda_check_from_moment(&consts, v.moment_alpha / v.l1, lambdas)
}

// ---------------------------------------------------------------------------
// Suite
// ---------------------------------------------------------------------------

/// Everything needed to run a verification suite on one structure and norm.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub label: String,
    pub norm: QuasiNorm,
    pub alphas: Vec<f64>,
    pub functions: Vec<String>,
    pub inequalities: Vec<Inequality>,
    pub budgets: Budgets,
    pub overrides: Vec<ConstantOverride>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureInfo {
    pub weights: Vec<f64>,
    pub dim: usize,
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationReport {
    pub label: String,
    pub structure: StructureInfo,
    pub norm: NormSpec,
    /// Closed-form `|𝔖|` used by every constant in the report.
    pub sphere_measure: f64,
    pub alphas: Vec<f64>,
    pub functions: Vec<String>,
    pub inequalities: Vec<Inequality>,
    pub records: Vec<DeficitRecord>,
    pub skipped: Vec<SkippedRecord>,
    pub seed: u64,
    pub budgets: Budgets,
    #[serde(default)]
    pub constant_overrides: Vec<String>,
    /// Unix seconds.
    pub timestamp: u64,
}

fn key_cmp(a: (Inequality, &str, f64), b: (Inequality, &str, f64)) -> Ordering {
    a.0.cmp(&b.0)
        .then_with(|| a.1.cmp(b.1))
        .then_with(|| a.2.total_cmp(&b.2))
}

fn validate_config(config: &SuiteConfig) -> Result<Vec<FunctionSpec>> {
    if config.alphas.is_empty() {
        return Err(Error::config("no exponents α given"));
    }
    if let Some(a) = config.alphas.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
        return Err(Error::config(format!(
            "α must be positive and finite, got {a}"
        )));
    }
    if config.functions.is_empty() {
        return Err(Error::config("no test functions given"));
    }
    if config.inequalities.is_empty() {
        return Err(Error::config("no inequalities selected"));
    }
    let b = &config.budgets;
    if !(b.rel_tol > 0.0 && b.rel_tol <= 1e-2) {
        return Err(Error::config(format!(
            "rel_tol must lie in (0, 1e-2], got {}",
            b.rel_tol
        )));
    }
    if b.samples < MIN_SAMPLES || b.replicates < 2 {
        return Err(Error::config(format!(
            "need at least {MIN_SAMPLES} QMC samples and 2 replicates"
        )));
    }
    if b.max_evals < 21 {
        return Err(Error::config("max_evals must be at least 21"));
    }
    let mut seen = HashSet::new();
    config
        .functions
        .iter()
        .map(|id| {
            if !seen.insert(id.as_str()) {
                return Err(Error::config(format!("duplicate test function {id:?}")));
            }
            id.parse::<FunctionSpec>()
        })
        .collect()
}

/// Runs every `(function, α, inequality)` combination.
///
/// Records are sorted by `(inequality, function_id, α)`. Combinations that
/// cannot be evaluated land in `skipped` with a reason.
pub fn run_suite(config: &SuiteConfig) -> Result<VerificationReport> {
    let specs = validate_config(config)?;
    let mut inequalities = config.inequalities.clone();
    inequalities.sort();
    inequalities.dedup();
    let sphere = analytic_sphere_measure(&config.norm)?;

    let jobs: Vec<(usize, f64)> = (0..specs.len())
        .flat_map(|i| config.alphas.iter().map(move |&a| (i, a)))
        .collect();
    let results: Vec<Vec<(Inequality, String, f64, Outcome)>> = jobs
        .par_iter()
        .map(|&(i, alpha)| {
            let id = &config.functions[i];
            let tag = |o: Vec<Outcome>| -> Vec<(Inequality, String, f64, Outcome)> {
                inequalities
                    .iter()
                    .zip(o)
                    .map(|(&q, o)| (q, id.clone(), alpha, o))
                    .collect()
            };
            let all = |kind: SkipKind, msg: String| tag(vec![Err((kind, msg)); inequalities.len()]);
            let u = match specs[i].build(id, &config.norm, alpha) {
                Ok(u) => u,
                Err(e) => return all(skip_kind(&e), e.to_string()),
            };
            let consts = match SharpConstants::for_norm(&config.norm, alpha) {
                Ok(k) => config.overrides.iter().fold(k, |k, o| k.with_override(*o)),
                Err(e) => return all(skip_kind(&e), e.to_string()),
            };
            tag(deficits(&u, &consts, &config.budgets, &inequalities))
        })
        .collect();

    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for (inequality, function_id, alpha, outcome) in results.into_iter().flatten() {
        match outcome {
            Ok(r) => records.push(r),
            Err((kind, reason)) => skipped.push(SkippedRecord {
                inequality,
                function_id,
                alpha,
                kind,
                reason,
            }),
        }
    }
    records.sort_by(|a, b| key_cmp(a.key(), b.key()));
    skipped.sort_by(|a, b| key_cmp(a.key(), b.key()));

    let s = config.norm.structure();
    Ok(VerificationReport {
        label: config.label.clone(),
        structure: StructureInfo {
            weights: s.weights().to_vec(),
            dim: s.dim(),
            q: s.q(),
        },
        norm: config.norm.spec(),
        sphere_measure: sphere,
        alphas: config.alphas.clone(),
        functions: config.functions.clone(),
        inequalities,
        records,
        skipped,
        seed: config.budgets.seed,
        budgets: config.budgets,
        constant_overrides: config.overrides.iter().map(ToString::to_string).collect(),
        timestamp: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
    })
}

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// One line of the flat scan table; skipped combinations carry their kind in `status`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub function_id: String,
    pub alpha: f64,
    pub inequality: Inequality,
    pub deficit: Option<f64>,
    pub error_estimate: Option<f64>,
    pub passed: Option<bool>,
    pub status: String,
}

/// CSV row of `inequality,function_id,alpha,deficit,error_estimate,passed`.
#[derive(Debug, Clone, Serialize)]
pub struct RecordRow<'a> {
    pub inequality: Inequality,
    pub function_id: &'a str,
    pub alpha: f64,
    pub deficit: f64,
    pub error_estimate: f64,
    pub passed: bool,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.records.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &DeficitRecord> {
        self.records.iter().filter(|r| !r.passed)
    }

    pub fn budget_exhausted(&self) -> bool {
        self.skipped.iter().any(|s| s.kind == SkipKind::Budget)
    }

    /// Copy with every float rounded to 12 significant digits.
    pub fn rounded(&self) -> Self {
        let mut r = self.clone();
        r.sphere_measure = round_sig(r.sphere_measure);
        for rec in &mut r.records {
            rec.lhs = round_sig(rec.lhs);
            rec.rhs = round_sig(rec.rhs);
            rec.deficit = round_sig(rec.deficit);
            rec.error_estimate = round_sig(rec.error_estimate);
        }
        r
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.rounded())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.records {
            w.serialize(RecordRow {
                inequality: r.inequality,
                function_id: &r.function_id,
                alpha: r.alpha,
                deficit: round_sig(r.deficit),
                error_estimate: round_sig(r.error_estimate),
                passed: r.passed,
            })
            .map_err(csv_err)?;
        }
        if self.records.is_empty() {
            w.write_record([
                "inequality",
                "function_id",
                "alpha",
                "deficit",
                "error_estimate",
                "passed",
            ])
            .map_err(csv_err)?;
        }
        into_string(w)
    }

    /// One row per requested `(function, α, inequality)` in input order.
    pub fn scan_rows(&self) -> Vec<ScanRow> {
        let mut rows = Vec::new();
        for f in &self.functions {
            for &alpha in &self.alphas {
                for &ineq in &self.inequalities {
                    let k = (ineq, f.as_str(), alpha);
                    if let Some(r) = self.records.iter().find(|r| r.key() == k) {
                        rows.push(ScanRow {
                            function_id: f.clone(),
                            alpha,
                            inequality: ineq,
                            deficit: Some(round_sig(r.deficit)),
                            error_estimate: Some(round_sig(r.error_estimate)),
                            passed: Some(r.passed),
                            status: "ok".into(),
                        });
                    } else if let Some(s) = self.skipped.iter().find(|s| s.key() == k) {
                        let status = serde_json::to_value(s.kind)
                            .ok()
                            .and_then(|v| v.as_str().map(|s| format!("skipped:{s}")))
                            .unwrap_or_else(|| "skipped".into());
                        rows.push(ScanRow {
                            function_id: f.clone(),
                            alpha,
                            inequality: ineq,
                            deficit: None,
                            error_estimate: None,
                            passed: None,
                            status,
                        });
                    }
                }
            }
        }
        rows
    }

    pub fn scan_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let rows = self.scan_rows();
        for r in &rows {
            w.serialize(r).map_err(csv_err)?;
        }
        if rows.is_empty() {
            w.write_record([
                "function_id",
                "alpha",
                "inequality",
                "deficit",
                "error_estimate",
                "passed",
                "status",
            ])
            .map_err(csv_err)?;
        }
        into_string(w)
    }

    /// Structural problems with a (possibly hand-edited) report; empty when sound.
    pub fn validate(&self) -> Vec<String> {
        let mut d = Vec::new();
        let s = &self.structure;
        if s.weights.len() != s.dim {
            d.push(format!(
                "structure.dim {} does not match {} weights",
                s.dim,
                s.weights.len()
            ));
        }
        if s.weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            d.push("structure.weights must be finite and positive".into());
        }
        let q: f64 = s.weights.iter().sum();
        if (q - s.q).abs() > 1e-9 * q.max(1.0) {
            d.push(format!(
                "structure.q {} is not the sum of the weights {q}",
                s.q
            ));
        }
        if !(self.sphere_measure > 0.0 && self.sphere_measure.is_finite()) {
            d.push("sphere_measure must be positive and finite".into());
        }
        if self.seed != self.budgets.seed {
            d.push("seed differs from budgets.seed".into());
        }
        let mut seen = HashSet::new();
        for r in &self.records {
            let at = format!("record ({}, {}, {})", r.inequality, r.function_id, r.alpha);
            if !seen.insert((r.inequality, r.function_id.clone(), r.alpha.to_bits())) {
                d.push(format!("{at}: duplicate"));
            }
            if !(r.alpha > 0.0 && r.alpha.is_finite()) {
                d.push(format!("{at}: α must be positive"));
            }
            if r.inequality.needs_alpha_above_one() && r.alpha <= 1.0 {
                d.push(format!("{at}: needs α > 1"));
            }
            if ![r.lhs, r.rhs, r.deficit, r.error_estimate]
                .iter()
                .all(|v| v.is_finite())
            {
                d.push(format!("{at}: non-finite value"));
                continue;
            }
            if r.error_estimate < 0.0 {
                d.push(format!("{at}: negative error estimate"));
            }
            let slack = 1e-10 * (r.lhs.abs() + r.rhs.abs() + 1.0);
            if (r.rhs - r.lhs - r.deficit).abs() > slack {
                d.push(format!("{at}: deficit is not rhs − lhs"));
            }
            let margin = r.deficit + PASS_SIGMAS * r.error_estimate;
            if margin.abs() > slack && r.passed != (margin >= 0.0) {
                d.push(format!(
                    "{at}: passed flag inconsistent with deficit and error estimate"
                ));
            }
        }
        for sk in &self.skipped {
            if !seen.insert((sk.inequality, sk.function_id.clone(), sk.alpha.to_bits())) {
                d.push(format!(
                    "skipped ({}, {}, {}): duplicate",
                    sk.inequality, sk.function_id, sk.alpha
                ));
            }
        }
        if self
            .records
            .windows(2)
            .any(|w| key_cmp(w[0].key(), w[1].key()) == Ordering::Greater)
        {
            d.push("records are not sorted by (inequality, function_id, alpha)".into());
        }
        d
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(std::io::Error::other(e)))
}
