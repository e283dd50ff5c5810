//! Anisotropic dilation structures and homogeneous quasi-norms.
//!
//! A homogeneous group is modelled only through what its integrals see:
//! the dilation weights `ν_i` acting as `D_λ(x) = (λ^{ν_1} x_1, …, λ^{ν_N} x_N)`
//! and a quasi-norm `|·|` with `|D_λ x| = λ |x|`. Haar measure is Lebesgue
//! measure, so no group law is needed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Topological dimension and dilation weights of a homogeneous structure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DilationStructure {
    weights: Vec<f64>,
}

impl DilationStructure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::config(
                "dilation structure needs at least one weight",
            ));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::config(format!(
                "dilation weights must be finite and strictly positive, got {w}"
            )));
        }
        Ok(Self { weights })
    }

    /// Euclidean space `ℝ^N` with isotropic dilations.
    pub fn abelian(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    /// The Heisenberg group `ℍ^1` with weights (1, 1, 2).
    pub fn heisenberg() -> Self {
        Self {
            weights: vec![1.0, 1.0, 2.0],
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Homogeneous dimension `Q = ν_1 + … + ν_N`.
    pub fn q(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::MIN, f64::max)
    }

    /// `D_λ(x)`.
    pub fn dilate(&self, lambda: f64, x: &[f64]) -> Result<Vec<f64>> {
        check_lambda(lambda)?;
        self.check_dim(x)?;
        let mut out = vec![0.0; x.len()];
        self.dilate_into(lambda, x, &mut out);
        Ok(out)
    }

    /// Unchecked `D_λ(x)` into a caller buffer.
    pub(crate) fn dilate_into(&self, lambda: f64, x: &[f64], out: &mut [f64]) {
        for ((o, xi), nu) in out.iter_mut().zip(x).zip(&self.weights) {
            *o = lambda.powf(*nu) * xi;
        }
    }

    pub(crate) fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::domain(format!(
                "point has {} coordinates, structure has dimension {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::domain(format!(
            "dilation parameter must be positive and finite, got {lambda}"
        )));
    }
    Ok(())
}

/// The shipped quasi-norm families.
#[derive(Debug, Clone, PartialEq)]
pub enum NormKind {
    /// `(Σ |x_i|^{p/ν_i})^{1/p}`.
    WeightedP { p: f64 },
    /// `max_i |x_i|^{1/ν_i}`.
    Max,
    /// `((Σ_{V1} x_i²)² + Σ_{V2} x_j²)^{1/4}` on weights 1 (first layer) and 2 (second layer).
    Koranyi {
        first_layer: Vec<usize>,
        second_layer: Vec<usize>,
    },
}

/// A homogeneous quasi-norm bound to its dilation structure.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiNorm {
    structure: DilationStructure,
    kind: NormKind,
    // ν_i / p for WeightedP, 1/ν_i for Max
    exponents: Vec<f64>,
}

impl QuasiNorm {
    pub fn weighted_p(structure: DilationStructure, p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::config(format!(
                "weighted p-norm needs p > 0, got {p}"
            )));
        }
        let exponents = structure.weights().iter().map(|nu| p / nu).collect();
        Ok(Self {
            structure,
            kind: NormKind::WeightedP { p },
            exponents,
        })
    }

    /// Weighted p-norm with `p = 2·max_i ν_i`.
    pub fn weighted_p_default(structure: DilationStructure) -> Self {
        let p = 2.0 * structure.max_weight();
        Self::weighted_p(structure, p).expect("default exponent is positive")
    }

    /// Euclidean norm; only homogeneous for unit weights.
    pub fn euclidean(n: usize) -> Result<Self> {
        Self::weighted_p(DilationStructure::abelian(n)?, 2.0)
    }

    pub fn max(structure: DilationStructure) -> Self {
        let exponents = structure.weights().iter().map(|nu| 1.0 / nu).collect();
        Self {
            structure,
            kind: NormKind::Max,
            exponents,
        }
    }

    /// Korányi gauge with explicit layers. Every index must appear exactly
    /// once, first-layer weights must be 1 and second-layer weights 2.
    pub fn koranyi(
        structure: DilationStructure,
        first_layer: Vec<usize>,
        second_layer: Vec<usize>,
    ) -> Result<Self> {
        let n = structure.dim();
        let mut seen = vec![false; n];
        for (layer, want) in [(&first_layer, 1.0), (&second_layer, 2.0)] {
            for &i in layer {
                if i >= n || seen[i] {
                    return Err(Error::config(format!(
                        "Korányi layers must partition 0..{n}; bad or repeated index {i}"
                    )));
                }
                seen[i] = true;
                if structure.weights()[i] != want {
                    return Err(Error::config(format!(
                        "Korányi norm needs weight {want} at index {i}, found {}",
                        structure.weights()[i]
                    )));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::config("Korányi layers must cover every coordinate"));
        }
        if first_layer.is_empty() {
            return Err(Error::config("Korányi norm needs a nonempty first layer"));
        }
        Ok(Self {
            structure,
            kind: NormKind::Koranyi {
                first_layer,
                second_layer,
            },
            exponents: Vec::new(),
        })
    }

    /// Korányi gauge with layers read off the weights (1 → first, 2 → second).
    pub fn koranyi_from_weights(structure: DilationStructure) -> Result<Self> {
        let mut first = Vec::new();
        let mut second = Vec::new();
        for (i, &w) in structure.weights().iter().enumerate() {
            if w == 1.0 {
                first.push(i);
            } else if w == 2.0 {
                second.push(i);
            } else {
                return Err(Error::config(format!(
                    "Korányi norm needs weights in {{1, 2}}, found {w} at index {i}"
                )));
            }
        }
        Self::koranyi(structure, first, second)
    }

    pub fn structure(&self) -> &DilationStructure {
        &self.structure
    }

    pub fn kind(&self) -> &NormKind {
        &self.kind
    }

    pub fn q(&self) -> f64 {
        self.structure.q()
    }

    pub fn dim(&self) -> usize {
        self.structure.dim()
    }

    /// `|x|`, checking the dimension.
    pub fn norm(&self, x: &[f64]) -> Result<f64> {
        self.structure.check_dim(x)?;
        Ok(self.eval(x))
    }

    /// `|x|` without a dimension check; hot path for the integrators.
    pub(crate) fn eval(&self, x: &[f64]) -> f64 {
        match &self.kind {
            NormKind::WeightedP { p } => {
                let s: f64 = x
                    .iter()
                    .zip(&self.exponents)
                    .map(|(xi, e)| xi.abs().powf(*e))
                    .sum();
                s.powf(1.0 / p)
            }
            NormKind::Max => x
                .iter()
                .zip(&self.exponents)
                .map(|(xi, e)| xi.abs().powf(*e))
                .fold(0.0, f64::max),
            NormKind::Koranyi {
                first_layer,
                second_layer,
            } => {
                let h: f64 = first_layer.iter().map(|&i| x[i] * x[i]).sum();
                let v: f64 = second_layer.iter().map(|&j| x[j] * x[j]).sum();
                (h * h + v).sqrt().sqrt()
            }
        }
    }

    /// Japanese bracket `⟨x⟩ = (1 + |x|²)^{1/2}`.
    pub fn japanese_bracket(&self, x: &[f64]) -> Result<f64> {
        Ok(japanese_bracket_of(self.norm(x)?))
    }

    /// `| |D_λ x| − λ|x| |`.
    pub fn homogeneity_residual(&self, lambda: f64, x: &[f64]) -> Result<f64> {
        let dx = self.structure.dilate(lambda, x)?;
        Ok((self.eval(&dx) - lambda * self.eval(x)).abs())
    }

    /// Serializable description of this norm.
    pub fn spec(&self) -> NormSpec {
        match &self.kind {
            NormKind::WeightedP { p } => NormSpec::WeightedP { p: Some(*p) },
            NormKind::Max => NormSpec::Max,
            NormKind::Koranyi {
                first_layer,
                second_layer,
            } => NormSpec::Koranyi {
                layers: Some((first_layer.clone(), second_layer.clone())),
            },
        }
    }

    /// True when this is the Euclidean norm on `ℝ^N`.
    pub fn is_euclidean(&self) -> bool {
        matches!(self.kind, NormKind::WeightedP { p } if p == 2.0)
            && self.structure.weights().iter().all(|w| *w == 1.0)
    }
}

pub fn japanese_bracket_of(norm: f64) -> f64 {
    norm.hypot(1.0)
}

/// JSON form of a norm: `{"variant": "max" | "weighted_p" | "koranyi", ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum NormSpec {
    WeightedP {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<f64>,
    },
    Max,
    Koranyi {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        layers: Option<(Vec<usize>, Vec<usize>)>,
    },
}

impl NormSpec {
    /// Parses the command-line form: `p`, `p:<val>`, `max` or `koranyi`.
    pub fn parse_flag(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "max" => Ok(NormSpec::Max),
            "koranyi" => Ok(NormSpec::Koranyi { layers: None }),
            "p" => Ok(NormSpec::WeightedP { p: None }),
            _ => match s.strip_prefix("p:") {
                Some(v) => v
                    .parse::<f64>()
                    .map(|p| NormSpec::WeightedP { p: Some(p) })
                    .map_err(|_| Error::config(format!("bad norm exponent in {s:?}"))),
                None => Err(Error::config(format!(
                    "unknown norm {s:?}; expected p, p:<val>, max or koranyi"
                ))),
            },
        }
    }

    pub fn build(&self, structure: DilationStructure) -> Result<QuasiNorm> {
        match self {
            NormSpec::WeightedP { p: Some(p) } => QuasiNorm::weighted_p(structure, *p),
            NormSpec::WeightedP { p: None } => Ok(QuasiNorm::weighted_p_default(structure)),
            NormSpec::Max => Ok(QuasiNorm::max(structure)),
            NormSpec::Koranyi {
                layers: Some((a, b)),
            } => QuasiNorm::koranyi(structure, a.clone(), b.clone()),
            NormSpec::Koranyi { layers: None } => QuasiNorm::koranyi_from_weights(structure),
        }
    }

    /// Short label, e.g. `p:2`, `max`, `koranyi`.
    pub fn label(&self) -> String {
        match self {
            NormSpec::WeightedP { p: Some(p) } => format!("p:{p}"),
            NormSpec::WeightedP { p: None } => "p".to_string(),
            NormSpec::Max => "max".to_string(),
            NormSpec::Koranyi { .. } => "koranyi".to_string(),
        }
    }
}

/// JSON preset: `{"weights": [...], "norm": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    pub weights: Vec<f64>,
    pub norm: NormSpec,
}

impl GroupConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self) -> Result<QuasiNorm> {
        self.norm
            .build(DilationStructure::new(self.weights.clone())?)
    }
}

/// Named presets: `abelian:N`, `heisenberg`, `anisotropic:ν1,ν2,...`.
///
/// Returns the structure together with the preset's default norm
/// (Euclidean, Korányi and Max respectively).
pub fn preset(name: &str) -> Result<(DilationStructure, NormSpec)> {
    let name = name.trim();
    if name == "heisenberg" {
        return Ok((
            DilationStructure::heisenberg(),
            NormSpec::Koranyi { layers: None },
        ));
    }
    if let Some(n) = name.strip_prefix("abelian:") {
        let n: usize = n
            .parse()
            .map_err(|_| Error::config(format!("bad dimension in preset {name:?}")))?;
        return Ok((
            DilationStructure::abelian(n)?,
            NormSpec::WeightedP { p: Some(2.0) },
        ));
    }
    if let Some(list) = name.strip_prefix("anisotropic:") {
        let weights = parse_weights(list)?;
        return Ok((DilationStructure::new(weights)?, NormSpec::Max));
    }
    Err(Error::config(format!(
        "unknown preset {name:?}; expected abelian:N, heisenberg or anisotropic:w1,w2,..."
    )))
}

pub fn parse_weights(list: &str) -> Result<Vec<f64>> {
    list.split(',')
        .map(|w| {
            w.trim()
                .parse::<f64>()
                .map_err(|_| Error::config(format!("bad weight {w:?}")))
        })
        .collect()
}
