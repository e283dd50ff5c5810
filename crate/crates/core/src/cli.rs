//! Command-line front end. `run` is the whole program minus process exit.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::constants::{ComparisonRow, ConstantOverride, SharpConstants};
use crate::dilation::{parse_weights, preset, DilationStructure, NormSpec, QuasiNorm};
use crate::error::{Error, Result};
use crate::functionals::{Budgets, DEFAULT_LIBRARY};
use crate::integrate::{sphere_measure, SphereMeasure, SphereMethod};
use crate::verify::{round_sig, run_suite, Inequality, SuiteConfig, VerificationReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "aniso-shannon",
    version,
    about = "Sharp Shannon and KOS entropy inequalities on homogeneous dilation structures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate A, C, B and the ratio B/(αeA/Q).
    Constants(RunArgs),
    /// Compare the closed-form sphere measure with two Monte-Carlo routes.
    Sphere(RunArgs),
    /// Evaluate deficits on the test-function library.
    Verify(RunArgs),
    /// Flat deficit table over functions × exponents.
    Scan(RunArgs),
    /// Validate a JSON report written by `verify`.
    CheckReport { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// abelian:N, heisenberg or anisotropic:w1,w2,... (repeatable for `constants`).
    #[arg(long)]
    pub preset: Vec<String>,
    /// Inline dilation weights, e.g. 1,1,2.
    #[arg(long)]
    pub weights: Option<String>,
    /// p, p:<value>, max or koranyi.
    #[arg(long)]
    pub norm: Option<String>,
    /// Homogeneity exponent α (repeatable).
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Vec<f64>,
    /// Test-function ids, separated by ';' or ',' (repeatable).
    #[arg(long)]
    pub functions: Vec<String>,
    /// shannon, shannon-via-b or kos (repeatable).
    #[arg(long)]
    pub inequality: Vec<String>,
    /// QMC nodes per integral.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Randomized QMC replicates.
    #[arg(long)]
    pub replicates: Option<usize>,
    /// Relative tolerance of the radial quadrature.
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Evaluation budget per radial integral.
    #[arg(long)]
    pub max_evals: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Replace a constant, e.g. A=1.0 (for testing failure paths).
    #[arg(long)]
    pub constant_override: Vec<String>,
    /// Disable multithreading.
    #[arg(long)]
    pub serial: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum NormField {
    Flag(String),
    Spec(NormSpec),
}

/// JSON configuration file; every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    preset: Option<OneOrMany>,
    weights: Option<Vec<f64>>,
    norm: Option<NormField>,
    alpha: Option<Vec<f64>>,
    functions: Option<Vec<String>>,
    inequalities: Option<Vec<String>>,
    samples: Option<usize>,
    replicates: Option<usize>,
    rel_tol: Option<f64>,
    max_evals: Option<usize>,
    seed: Option<u64>,
    format: Option<Format>,
    out: Option<PathBuf>,
    constant_override: Option<Vec<String>>,
}

const DEFAULT_ALPHAS: [f64; 3] = [1.5, 2.0, 3.0];
const LOW_ALPHAS: [f64; 2] = [0.5, 1.0];

struct Resolved {
    groups: Vec<(String, QuasiNorm)>,
    alphas: Vec<f64>,
    alphas_explicit: bool,
    functions: Vec<String>,
    inequalities: Vec<Inequality>,
    budgets: Budgets,
    format: Option<Format>,
    out: Option<PathBuf>,
    overrides: Vec<ConstantOverride>,
}

/// Splits `a,b;c` into ids, keeping `name:k=v,k2=v2` parameter lists together.
pub fn split_function_ids(list: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for part in list
        .split([';', ','])
        .map(str::trim)
        .filter(|s| !s.is_empty())
    {
        match out.last_mut() {
            Some(prev) if part.contains('=') && !part.contains(':') && prev.contains(':') => {
                prev.push(',');
                prev.push_str(part);
            }
            _ => out.push(part.to_string()),
        }
    }
    out
}

fn group_label(base: &str, spec: &NormSpec) -> String {
    format!("{base}/{}", spec.label())
}

fn resolve(args: &RunArgs) -> Result<Resolved> {
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str::<FileConfig>(&text)
                .map_err(|e| Error::config(format!("{}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };

    let presets: Vec<String> = if !args.preset.is_empty() {
        args.preset.clone()
    } else {
        match file.preset {
            Some(OneOrMany::One(s)) => vec![s],
            Some(OneOrMany::Many(v)) => v,
            None => Vec::new(),
        }
    };
    let weights = match &args.weights {
        Some(w) => Some(parse_weights(w)?),
        None => file.weights.clone(),
    };
    let norm = match &args.norm {
        Some(n) => Some(NormSpec::parse_flag(n)?),
        None => match file.norm {
            Some(NormField::Flag(s)) => Some(NormSpec::parse_flag(&s)?),
            Some(NormField::Spec(s)) => Some(s),
            None => None,
        },
    };
    if !presets.is_empty() && weights.is_some() {
        return Err(Error::config("give either a preset or weights, not both"));
    }
    let mut groups = Vec::new();
    if let Some(w) = weights {
        let label = format!(
            "weights:{}",
            w.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
        let s = DilationStructure::new(w)?;
        let spec = norm.clone().unwrap_or(NormSpec::WeightedP { p: None });
        groups.push((group_label(&label, &spec), spec.build(s)?));
    } else {
        let names = if presets.is_empty() {
            vec!["abelian:1".to_string()]
        } else {
            presets
        };
        for name in names {
            let (s, default) = preset(&name)?;
            let spec = norm.clone().unwrap_or(default);
            groups.push((group_label(&name, &spec), spec.build(s)?));
        }
    }

    let (alphas, alphas_explicit) = if !args.alpha.is_empty() {
        (args.alpha.clone(), true)
    } else if let Some(a) = file.alpha {
        (a, true)
    } else {
        (DEFAULT_ALPHAS.to_vec(), false)
    };
    if let Some(a) = alphas.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
        return Err(Error::config(format!(
            "α must be positive and finite, got {a}"
        )));
    }

    let functions: Vec<String> = if !args.functions.is_empty() {
        args.functions
            .iter()
            .flat_map(|f| split_function_ids(f))
            .collect()
    } else if let Some(f) = file.functions {
        f
    } else {
        DEFAULT_LIBRARY.iter().map(|s| s.to_string()).collect()
    };

    let ineq_names = if !args.inequality.is_empty() {
        args.inequality.clone()
    } else {
        file.inequalities.unwrap_or_default()
    };
    let mut inequalities = ineq_names
        .iter()
        .flat_map(|s| s.split(',').map(str::to_string).collect::<Vec<_>>())
        .map(|s| s.parse())
        .collect::<Result<Vec<Inequality>>>()?;
    if inequalities.is_empty() {
        inequalities = Inequality::ALL.to_vec();
    }

    let defaults = Budgets::default();
    let budgets = Budgets {
        rel_tol: args.rel_tol.or(file.rel_tol).unwrap_or(defaults.rel_tol),
        max_evals: args
            .max_evals
            .or(file.max_evals)
            .unwrap_or(defaults.max_evals),
        samples: args.samples.or(file.samples).unwrap_or(defaults.samples),
        replicates: args
            .replicates
            .or(file.replicates)
            .unwrap_or(defaults.replicates),
        seed: args.seed.or(file.seed).unwrap_or(defaults.seed),
        parallel: !args.serial,
    };

    let override_strs = if !args.constant_override.is_empty() {
        args.constant_override.clone()
    } else {
        file.constant_override.unwrap_or_default()
    };
    let overrides = override_strs
        .iter()
        .map(|s| s.parse())
        .collect::<Result<Vec<ConstantOverride>>>()?;

    Ok(Resolved {
        groups,
        alphas,
        alphas_explicit,
        functions,
        inequalities,
        budgets,
        format: args.format.or(file.format),
        out: args.out.clone().or(file.out),
        overrides,
    })
}

impl Resolved {
    fn single_group(&self) -> Result<(String, QuasiNorm)> {
        match self.groups.as_slice() {
            [g] => Ok(g.clone()),
            _ => Err(Error::config("this command takes a single preset")),
        }
    }

    /// Exponents `α ≤ 1` are added to the default grid only when KOS is not requested.
    fn alphas_for(&self, with_low: bool) -> Vec<f64> {
        if self.alphas_explicit || !with_low {
            return self.alphas.clone();
        }
        LOW_ALPHAS
            .iter()
            .chain(DEFAULT_ALPHAS.iter())
            .copied()
            .collect()
    }
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)
        .map_err(|e| Error::config(format!("cannot write {}: {e}", path.display())))
}

fn csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(std::io::Error::other(e)))
}

fn round_opt(x: Option<f64>) -> Option<f64> {
    x.map(round_sig)
}

fn cmd_constants(r: &Resolved, stdout: &mut dyn Write) -> Result<i32> {
    let alphas = r.alphas_for(true);
    let mut rows = Vec::new();
    for (label, qn) in &r.groups {
        for &alpha in &alphas {
            let k = r
                .overrides
                .iter()
                .fold(SharpConstants::for_norm(qn, alpha)?, |k, o| {
                    k.with_override(*o)
                });
            let row = ComparisonRow::from_constants(label.clone(), &k);
            rows.push(ComparisonRow {
                q: round_sig(row.q),
                sphere: round_sig(row.sphere),
                a: round_sig(row.a),
                c: round_opt(row.c),
                b: round_opt(row.b),
                shannon_factor: round_sig(row.shannon_factor),
                ratio: round_opt(row.ratio),
                ..row
            });
        }
    }
    let text = match r.format.unwrap_or(Format::Csv) {
        Format::Csv => csv_string(&rows)?,
        Format::Json => serde_json::to_string_pretty(&rows)?,
    };
    emit(&r.out, &text, stdout)?;
    Ok(EXIT_OK)
}

/// Output of the `sphere` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SphereReport {
    pub label: String,
    pub q: f64,
    pub estimates: Vec<SphereMeasure>,
    pub samples: usize,
    pub seed: u64,
    /// Largest pairwise relative difference.
    pub max_rel_diff: f64,
    /// Largest pairwise difference in combined standard errors.
    pub max_sigma_diff: f64,
    /// Every pair within 1% and within 3 combined standard errors.
    pub agree: bool,
}

pub fn sphere_report(label: &str, qn: &QuasiNorm, budgets: &Budgets) -> Result<SphereReport> {
    let opts = budgets.qmc(1.0);
    let estimates = [
        SphereMethod::Analytic,
        SphereMethod::BallVolumeMc,
        SphereMethod::GaussWeightMc,
    ]
    .into_iter()
    .map(|m| sphere_measure(qn, m, &opts))
    .collect::<Result<Vec<_>>>()?;
    let mut max_rel = 0.0f64;
    let mut max_sigma = 0.0f64;
    let mut agree = true;
    for (i, a) in estimates.iter().enumerate() {
        for b in &estimates[i + 1..] {
            let diff = (a.value - b.value).abs();
            let rel = diff / a.value.abs().max(b.value.abs());
            let se = a.std_error.hypot(b.std_error);
            let sigma = if se > 0.0 { diff / se } else { 0.0 };
            max_rel = max_rel.max(rel);
            max_sigma = max_sigma.max(sigma);
            agree &= rel <= 0.01 && diff <= 3.0 * se + 1e-12 * a.value.abs();
        }
    }
    Ok(SphereReport {
        label: label.to_string(),
        q: qn.q(),
        estimates: estimates
            .into_iter()
            .map(|e| SphereMeasure {
                value: round_sig(e.value),
                std_error: round_sig(e.std_error),
                ..e
            })
            .collect(),
        samples: budgets.samples,
        seed: budgets.seed,
        max_rel_diff: round_sig(max_rel),
        max_sigma_diff: round_sig(max_sigma),
        agree,
    })
}

fn cmd_sphere(r: &Resolved, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let (label, qn) = r.single_group()?;
    let rep = sphere_report(&label, &qn, &r.budgets)?;
    let text = match r.format.unwrap_or(Format::Json) {
        Format::Json => serde_json::to_string_pretty(&rep)?,
        Format::Csv => csv_string(&rep.estimates)?,
    };
    emit(&r.out, &text, stdout)?;
    if !rep.agree {
        writeln!(
            stderr,
            "sphere measure routes disagree: max relative difference {:.3e}, {:.2} σ",
            rep.max_rel_diff, rep.max_sigma_diff
        )?;
        return Ok(EXIT_FAILED);
    }
    Ok(EXIT_OK)
}

fn suite(r: &Resolved) -> Result<VerificationReport> {
    let (label, norm) = r.single_group()?;
    let without_kos = !r.inequalities.contains(&Inequality::Kos);
    run_suite(&SuiteConfig {
        label,
        norm,
        alphas: r.alphas_for(without_kos),
        functions: r.functions.clone(),
        inequalities: r.inequalities.clone(),
        budgets: r.budgets,
        overrides: r.overrides.clone(),
    })
}

fn suite_exit(rep: &VerificationReport, stderr: &mut dyn Write) -> Result<i32> {
    let failed = rep.failures().count();
    writeln!(
        stderr,
        "{} records, {failed} failed, {} skipped",
        rep.records.len(),
        rep.skipped.len()
    )?;
    for f in rep.failures() {
        writeln!(
            stderr,
            "FAILED {} {} α={}: deficit {:.6e} ± {:.2e}",
            f.inequality, f.function_id, f.alpha, f.deficit, f.error_estimate
        )?;
    }
    if failed > 0 {
        Ok(EXIT_FAILED)
    } else if rep.budget_exhausted() {
        writeln!(stderr, "evaluation budget exhausted; report is partial")?;
        Ok(EXIT_BUDGET)
    } else {
        Ok(EXIT_OK)
    }
}

fn cmd_verify(r: &Resolved, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let rep = suite(r)?;
    let text = match r.format.unwrap_or(Format::Json) {
        Format::Json => rep.to_json()?,
        Format::Csv => rep.to_csv()?,
    };
    emit(&r.out, &text, stdout)?;
    suite_exit(&rep, stderr)
}

fn cmd_scan(r: &Resolved, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let rep = suite(r)?;
    let text = match r.format.unwrap_or(Format::Csv) {
        Format::Csv => rep.scan_csv()?,
        Format::Json => serde_json::to_string_pretty(&rep.scan_rows())?,
    };
    emit(&r.out, &text, stdout)?;
    suite_exit(&rep, stderr)
}

fn cmd_check_report(path: &Path, stdout: &mut dyn Write) -> Result<i32> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
    let rep = VerificationReport::from_json(&text)
        .map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
    let diags = rep.validate();
    if diags.is_empty() {
        writeln!(
            stdout,
            "ok: {} records, {} skipped",
            rep.records.len(),
            rep.skipped.len()
        )?;
        Ok(EXIT_OK)
    } else {
        for d in &diags {
            writeln!(stdout, "invalid: {d}")?;
        }
        Ok(EXIT_FAILED)
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Domain(_) | Error::Json(_) => EXIT_CONFIG,
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        _ => EXIT_FAILED,
    }
}

/// Runs the program on `args` (including the binary name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::CheckReport { path } => cmd_check_report(path, stdout),
        Command::Constants(a) => resolve(a).and_then(|r| cmd_constants(&r, stdout)),
        Command::Sphere(a) => resolve(a).and_then(|r| cmd_sphere(&r, stdout, stderr)),
        Command::Verify(a) => resolve(a).and_then(|r| cmd_verify(&r, stdout, stderr)),
        Command::Scan(a) => resolve(a).and_then(|r| cmd_scan(&r, stdout, stderr)),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
