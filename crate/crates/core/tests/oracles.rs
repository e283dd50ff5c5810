//! Closed-form anchors and special-function values against independent oracles.

mod common;

use std::f64::consts::PI;

use aniso_shannon::functionals::{
    evaluate_functionals, kos_rhs, library_function, Budgets, Decay, TestFunction,
};
use aniso_shannon::integrate::{radial_integral, RadialIntegrand};
use aniso_shannon::{
    kos_constant, kos_deficit, log_beta, log_gamma, shannon_constant, shannon_deficit,
    shannon_via_b_deficit, QuasiNorm,
};
use common::{exp_sinh, ln_gamma_oracle, rel, tanh_sinh};

/// High-precision reference values of `ln Γ`, computed at 30 digits.
#[allow(clippy::excessive_precision, clippy::inconsistent_digit_grouping)]
const LN_GAMMA_FROZEN: [(f64, f64); 20] = [
    (0.001, 6.907_178_885_383_853_661_684),
    (0.01, 4.599_479_878_042_021_701_581),
    (0.1, 2.252_712_651_734_205_902_006),
    (0.3, 1.095_797_994_818_075_560_563),
    (0.5, 0.572_364_942_924_700_087_071_7),
    (0.9, 0.066_376_239_734_742_954_425_97),
    (1.0, 0.0),
    (1.2, -0.085_374_090_003_315_836_883_75),
    (1.5, -0.120_782_237_635_245_222_345_5),
    (1.9999, -0.000_042_275_208_772_153_458_011_34),
    (2.0, 0.0),
    (2.5, 0.284_682_870_472_919_159_632_5),
    (3.7, 1.428_072_326_665_388_129_2),
    (7.25, 7.052_185_450_738_539_444_926),
    (10.0, 12.801_827_480_081_469_611_21),
    (15.5, 26.536_914_491_115_613_623_95),
    (42.0, 114.034_211_781_461_703_232_9),
    (100.0, 359.134_205_369_575_398_776),
    (1234.5, 7550.550_901_077_894_895_73),
    (1e6, 12_815_504.569_147_611_659_98),
];

#[test]
fn log_gamma_matches_frozen_values() {
    for (x, want) in LN_GAMMA_FROZEN {
        let got = log_gamma(x).unwrap();
        let tol = 1e-12 * want.abs().max(1.0);
        assert!((got - want).abs() <= tol, "lnΓ({x}) = {got}, want {want}");
    }
}

#[test]
fn log_gamma_matches_shifted_stirling() {
    for i in 0..400 {
        let x = 0.02 + i as f64 * 0.137;
        let got = log_gamma(x).unwrap();
        let want = ln_gamma_oracle(x);
        assert!(
            (got - want).abs() <= 1e-12 * want.abs().max(1.0),
            "x={x}: {got} vs {want}"
        );
    }
}

#[test]
fn oracle_self_check() {
    for (x, want) in LN_GAMMA_FROZEN.iter().filter(|(x, _)| *x < 1e5) {
        assert!(
            (ln_gamma_oracle(*x) - want).abs() < 1e-12 * want.abs().max(1.0),
            "x={x}"
        );
    }
    assert!(rel(exp_sinh(|x| (-x).exp()), 1.0) < 1e-14);
    assert!(rel(tanh_sinh(f64::sin, 0.0, PI), 2.0) < 1e-14);
}

#[test]
fn log_gamma_recurrence_grid() {
    for x in [0.1, 0.5, 1.0, 2.5, 10.0, 100.0] {
        let r = log_gamma(x + 1.0).unwrap() - log_gamma(x).unwrap() - f64::ln(x);
        assert!(r.abs() <= 1e-12, "x={x}: {r}");
    }
}

#[test]
fn log_beta_against_integral() {
    for (a, b) in [(0.5, 0.5), (1.0, 2.0), (2.5, 3.5), (0.25, 3.0)] {
        // split at 1/2 so each singular endpoint sits at 0
        let integral = tanh_sinh(|t| t.powf(a - 1.0) * (1.0 - t).powf(b - 1.0), 0.0, 0.5)
            + tanh_sinh(|s| s.powf(b - 1.0) * (1.0 - s).powf(a - 1.0), 0.0, 0.5);
        assert!(
            rel(log_beta(a, b).unwrap().exp(), integral) < 1e-10,
            "B({a},{b}) {} {integral}",
            log_beta(a, b).unwrap().exp()
        );
        assert_eq!(log_beta(a, b).unwrap(), log_beta(b, a).unwrap());
    }
}

fn line() -> QuasiNorm {
    QuasiNorm::euclidean(1).unwrap()
}

/// Oracle values on the line for `α = 2`.
struct LineAnchors {
    a: f64,
    c: f64,
    b: f64,
    entropy_e2: f64,
    moment_e2: f64,
    entropy_cauchy: f64,
}

fn line_anchors() -> LineAnchors {
    // A normalizes e^{−A x²}: A = (2∫₀^∞ e^{−x²})²
    let a = (2.0 * exp_sinh(|x| (-x * x).exp())).powi(2);
    // C^{−1} normalizes (1 + x²)^{−1}
    let c = 2.0 * exp_sinh(|x| 1.0 / (1.0 + x * x));
    let b = 4.0 * c * c;
    let u = |x: f64| (-a * x * x).exp();
    let l = 2.0 * exp_sinh(u);
    let j = 2.0 * exp_sinh(|x| u(x) * (-a * x * x));
    let m = 2.0 * exp_sinh(|x| x * x * u(x));
    let phi = |x: f64| 1.0 / (c * (1.0 + x * x));
    let lc = 2.0 * exp_sinh(phi);
    let jc = 2.0 * exp_sinh(|x| phi(x) * phi(x).ln());
    LineAnchors {
        a,
        c,
        b,
        entropy_e2: l.ln() - j / l,
        moment_e2: m / l,
        entropy_cauchy: lc.ln() - jc / lc,
    }
}

#[test]
fn oracle_reproduces_closed_forms() {
    let o = line_anchors();
    assert!(rel(o.a, PI) < 1e-12);
    assert!(rel(o.c, PI) < 1e-12);
    assert!(rel(o.b, 4.0 * PI * PI) < 1e-12);
    assert!((o.entropy_e2 - 0.5).abs() < 1e-12);
    assert!(rel(o.moment_e2, 1.0 / (2.0 * PI)) < 1e-12);
    assert!((o.entropy_cauchy - 2.531_024_246_969_290_8).abs() < 1e-11);
}

#[test]
fn library_matches_oracle_anchors() {
    let o = line_anchors();
    let k = kos_constant(&line(), 2.0).unwrap();
    assert!(rel(k.a(), o.a) < 1e-8);
    assert!(rel(k.c().unwrap(), o.c) < 1e-8);
    assert!(rel(k.b().unwrap(), o.b) < 1e-8);
    let b = Budgets::default();
    let e2 = library_function("extremizer", &line(), 2.0).unwrap();
    let v = evaluate_functionals(&e2, 2.0, &b).unwrap();
    assert!((v.entropy - o.entropy_e2).abs() < 1e-8);
    assert!(rel(v.moment_alpha / v.l1, o.moment_e2) < 1e-8);
    let cauchy = TestFunction::radial("cauchy", line(), |r| 1.0 / (1.0 + r * r), Decay::Power(2.0));
    let v = evaluate_functionals(&cauchy, 0.5, &b).unwrap();
    assert!((v.entropy - o.entropy_cauchy).abs() < 1e-8);
}

#[test]
fn deficits_on_the_line() {
    let b = Budgets::default();
    let e2 = library_function("extremizer", &line(), 2.0).unwrap();
    assert!(shannon_deficit(&e2, 2.0, &b).unwrap().deficit.abs() < 1e-9);
    let via_b = 0.5 * (2.0 * PI).ln() - 0.5;
    assert!((shannon_via_b_deficit(&e2, 2.0, &b).unwrap().deficit - via_b).abs() < 1e-9);
    let kos = 1.277_626_490_974_024 - 0.5;
    assert!((kos_deficit(&e2, 2.0, &b).unwrap().deficit - kos).abs() < 1e-9);
    let k = kos_constant(&line(), 2.0).unwrap();
    let rhs = kos_rhs(&e2, 2.0, &k, &b).unwrap();
    assert!((rhs.value - 1.277_626_490_974_024).abs() < 1e-9);

    // Laplace density e^{−|x|}: every quantity by oracle
    let laplace = library_function("stretched", &line(), 2.0).unwrap();
    let l: f64 = 2.0;
    let h = l.ln() - 2.0 * exp_sinh(|x| (-x).exp() * -x) / l;
    let m = 2.0 * exp_sinh(|x| x * x * (-x).exp()) / l;
    let rhs = 0.5 * (2.0 * std::f64::consts::E * PI * m).ln();
    let want = rhs - h;
    assert!((want - 0.072_364_942_924_700_1).abs() < 1e-12);
    let got = shannon_deficit(&laplace, 2.0, &b).unwrap();
    assert!(got.deficit > 0.0);
    assert!((got.deficit - want).abs() < 1e-8);
}

#[test]
fn radial_quadrature_against_oracle() {
    for q in [0.4, 1.0, 2.5, 4.0, 7.0] {
        for alpha in [0.7, 1.5, 2.0, 3.0] {
            let g = |r: f64| (-r.powf(alpha)).exp();
            let got = radial_integral(&RadialIntegrand::new(g, q), 1e-10, 1_000_000).unwrap();
            let want = exp_sinh(|r| g(r) * r.powf(q - 1.0));
            assert!(rel(got.value, want) < 1e-9, "Q={q} α={alpha}");
        }
        let poly = |r: f64| (1.0 + r * r).powf(-(q + 1.0) / 2.0 - 0.5);
        let got = radial_integral(&RadialIntegrand::new(poly, q), 1e-10, 1_000_000).unwrap();
        let want = exp_sinh(|r| poly(r) * r.powf(q - 1.0));
        assert!(rel(got.value, want) < 1e-9, "poly Q={q}");
    }
}

#[test]
fn shannon_constant_defined_below_one() {
    let k = shannon_constant(&line(), 0.5).unwrap();
    let a = k.a();
    let norm = 2.0 * exp_sinh(|x| (-a * x.sqrt()).exp());
    assert!(rel(norm, 1.0) < 1e-10);
}

#[test]
fn kos_deficit_of_dilates_matches_oracle() {
    // u = e^{−x²} on the line, α = 2: the KOS deficit moves under dilation
    let n = line();
    let k = kos_constant(&n, 2.0).unwrap();
    let u = library_function("gaussian", &n, 2.0).unwrap();
    let b = Budgets::default();
    for lambda in [0.5f64, 2.0, 10.0] {
        let ul = |x: f64| lambda * (-(lambda * x).powi(2)).exp();
        let l = 2.0 * exp_sinh(ul);
        let h = l.ln() - 2.0 * exp_sinh(|x| ul(x) * (ul(x)).ln()) / l;
        let rhs = k.c().unwrap().ln() + 2.0 * exp_sinh(|x| ul(x) * (x * x).ln_1p()) / l;
        let d = aniso_shannon::functionals::dilate_function(&u, lambda).unwrap();
        let got = kos_deficit(&d, 2.0, &b).unwrap();
        assert!(
            (got.deficit - (rhs - h)).abs() < 1e-8,
            "λ={lambda}: {got:?} vs {}",
            rhs - h
        );
    }
}
