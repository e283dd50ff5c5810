//! Randomized quasi-Monte-Carlo integration over `ℝ^N`.
//!
//! Nodes come from the Kronecker `R_d` sequence (generalized golden ratio) in
//! 64-bit fixed point, randomized by an independent uniform shift per
//! replicate. Each unit coordinate `u` is pushed to the real line through
//!
//! ```text
//! w = 2u − 1,  t = 1 − |w|,  x = sign(w) · s · (t^{−k} − 1),  dx/du = 2 s k t^{−k−1}
//! ```
//!
//! whose implied density has a power tail `|x|^{−(1 + 1/k)}`. The tail index
//! `k` is the coordinate's dilation weight, so coordinates that dilate faster
//! get heavier tails, and the scale is `s = scale^{ν_i}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::IntegrationResult;
use crate::dilation::DilationStructure;
use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 1 << 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QmcOptions {
    /// Total number of nodes, split evenly over the replicates.
    pub samples: usize,
    pub replicates: usize,
    pub seed: u64,
    pub parallel: bool,
    /// Characteristic length of the integrand in quasi-norm units.
    pub scale: f64,
}

impl Default for QmcOptions {
    fn default() -> Self {
        Self {
            samples: 1 << 18,
            replicates: 16,
            seed: 0x5eed,
            parallel: true,
            scale: 1.0,
        }
    }
}

/// Per-replicate means of a vector-valued integral.
#[derive(Debug, Clone)]
pub struct QmcEstimate {
    pub replicate_means: Vec<Vec<f64>>,
    pub evaluations: usize,
    pub nonfinite: usize,
}

impl QmcEstimate {
    pub fn replicates(&self) -> usize {
        self.replicate_means.len()
    }

    pub fn mean(&self, j: usize) -> f64 {
        tree_sum(self.replicate_means.iter().map(|r| r[j]).collect()) / self.replicates() as f64
    }

    pub fn std_error(&self, j: usize) -> f64 {
        self.derived(|v| v[j]).1
    }

    /// Point estimate `g(means)` and the standard error of `g` across replicates.
    pub fn derived(&self, g: impl Fn(&[f64]) -> f64) -> (f64, f64) {
        let n_out = self.replicate_means.first().map_or(0, Vec::len);
        let means: Vec<f64> = (0..n_out).map(|j| self.mean(j)).collect();
        let point = g(&means);
        let per: Vec<f64> = self.replicate_means.iter().map(|r| g(r)).collect();
        let m = per.len() as f64;
        let avg = tree_sum(per.clone()) / m;
        let var = tree_sum(per.iter().map(|v| (v - avg) * (v - avg)).collect()) / (m - 1.0);
        (point, (var / m).sqrt())
    }

    pub fn result(&self, j: usize) -> IntegrationResult {
        IntegrationResult {
            value: self.mean(j),
            abs_error_estimate: self.std_error(j),
            evaluations: self.evaluations,
        }
    }
}

// pairwise summation in a fixed tree order
fn tree_sum(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    while v.len() > 1 {
        v = v
            .chunks(2)
            .map(|c| if c.len() == 2 { c[0] + c[1] } else { c[0] })
            .collect();
    }
    v[0]
}

fn rd_generators(dim: usize) -> Vec<u64> {
    // φ_d is the positive root of x^{d+1} = x + 1
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (dim as f64 + 1.0));
    }
    (1..=dim)
        .map(|j| {
            let a = phi.powi(-(j as i32)).fract();
            (a * 2f64.powi(64)) as u64
        })
        .collect()
}

#[inline]
fn to_unit(v: u64) -> f64 {
    // midpoint of a 2^-53 cell, never 0 or 1
    (v >> 11) as f64 * 2f64.powi(-53) + 2f64.powi(-54)
}

struct Transform {
    scales: Vec<f64>,
    tails: Vec<f64>,
}

impl Transform {
    fn new(s: &DilationStructure, scale: f64) -> Self {
        Self {
            scales: s.weights().iter().map(|nu| scale.powf(*nu)).collect(),
            tails: s.weights().to_vec(),
        }
    }

    /// Maps unit coordinates to `ℝ^N` in place, returning the Jacobian.
    fn apply(&self, u: &mut [f64]) -> f64 {
        let mut jac = 1.0;
        for ((ui, s), k) in u.iter_mut().zip(&self.scales).zip(&self.tails) {
            let w = 2.0 * *ui - 1.0;
            let t = 1.0 - w.abs();
            let tk = t.powf(-k);
            *ui = w.signum() * s * (tk - 1.0);
            jac *= 2.0 * s * k * tk / t;
        }
        jac
    }
}

/// Integrates a vector-valued `f: ℝ^N → ℝ^{n_out}` by randomized QMC.
///
/// `f` writes its values into the output slice. Results are deterministic in
/// `(samples, replicates, seed)` and identical in serial and parallel mode,
/// since every replicate is summed sequentially and reduced in a fixed order.
pub fn qmc_integrate_vec<F>(
    s: &DilationStructure,
    n_out: usize,
    f: F,
    opts: &QmcOptions,
) -> Result<QmcEstimate>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    if opts.samples < MIN_SAMPLES {
        return Err(Error::domain(format!(
            "QMC needs at least {MIN_SAMPLES} samples, got {}",
            opts.samples
        )));
    }
    if opts.replicates < 2 || opts.replicates > opts.samples {
        return Err(Error::domain(format!(
            "QMC needs between 2 and {} replicates, got {}",
            opts.samples, opts.replicates
        )));
    }
    if !(opts.scale.is_finite() && opts.scale > 0.0) {
        return Err(Error::domain(format!(
            "QMC scale must be positive, got {}",
            opts.scale
        )));
    }
    let dim = s.dim();
    let gens = rd_generators(dim);
    let transform = Transform::new(s, opts.scale);
    let per = opts.samples / opts.replicates;

    let replicate = |r: usize| -> (Vec<f64>, usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(r as u64);
        let shift: Vec<u64> = (0..dim).map(|_| rng.gen()).collect();
        let mut x = vec![0.0; dim];
        let mut vals = vec![0.0; n_out];
        let mut sums = vec![0.0; n_out];
        let mut bad = 0;
        for k in 0..per as u64 {
            for j in 0..dim {
                x[j] = to_unit(shift[j].wrapping_add((k + 1).wrapping_mul(gens[j])));
            }
            let jac = transform.apply(&mut x);
            f(&x, &mut vals);
            let contrib: Option<Vec<f64>> = vals
                .iter()
                .map(|v| {
                    let c = if *v == 0.0 { 0.0 } else { v * jac };
                    c.is_finite().then_some(c)
                })
                .collect();
            match contrib {
                Some(c) => sums.iter_mut().zip(c).for_each(|(s, c)| *s += c),
                None => bad += 1,
            }
        }
        (sums.into_iter().map(|s| s / per as f64).collect(), bad)
    };

    let runs: Vec<(Vec<f64>, usize)> = if opts.parallel {
        (0..opts.replicates)
            .into_par_iter()
            .map(replicate)
            .collect()
    } else {
        (0..opts.replicates).map(replicate).collect()
    };

    let evaluations = per * opts.replicates;
    let nonfinite: usize = runs.iter().map(|r| r.1).sum();
    if nonfinite as f64 > 1e-4 * evaluations as f64 {
        return Err(Error::Integrand(format!(
            "{nonfinite} of {evaluations} QMC nodes produced non-finite values"
        )));
    }
    Ok(QmcEstimate {
        replicate_means: runs.into_iter().map(|r| r.0).collect(),
        evaluations,
        nonfinite,
    })
}

/// Scalar `∫_{ℝ^N} f(x) dx` with a replicate-based error estimate.
pub fn qmc_integral<F>(
    s: &DilationStructure,
    f: F,
    samples: usize,
    seed: u64,
) -> Result<IntegrationResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let opts = QmcOptions {
        samples,
        seed,
        ..QmcOptions::default()
    };
    let est = qmc_integrate_vec(s, 1, |x, out| out[0] = f(x), &opts)?;
    Ok(est.result(0))
}
