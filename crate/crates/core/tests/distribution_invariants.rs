mod common;

use attrconform::distributions::{beta_cdf, beta_quantile, betabin_cdf};
use attrconform::{BetaBinomial, BetaParams, BivariateBetaBinomial};
use common::{ln_beta_integral, ln_choose, PRESET_SHAPES};
use proptest::prelude::*;

const SAMPLE_SIZES: [u64; 5] = [1, 10, 80, 315, 1200];

fn beta(a: f64, b: f64) -> BetaParams {
    BetaParams::new(a, b).unwrap()
}

fn small_grid_shapes() -> Vec<BetaParams> {
    let mut v: Vec<_> = PRESET_SHAPES.iter().map(|&(a, b)| beta(a, b)).collect();
    v.extend([beta(2.0, 5.0), beta(0.5, 3.0)]);
    v
}

#[test]
fn pmf_normalizes() {
    for &(a, b) in &PRESET_SHAPES {
        for &n in &SAMPLE_SIZES {
            let d = BetaBinomial::new(n, beta(a, b));
            let total: f64 = (0..=n as i64).map(|z| d.pmf(z)).sum();
            assert!((total - 1.0).abs() <= 1e-12, "n={n} ({a},{b}): {total}");
        }
    }
}

#[test]
fn pmf_two_forms_agree() {
    for &(a, b) in &PRESET_SHAPES {
        for &n in &SAMPLE_SIZES {
            let d = BetaBinomial::new(n, beta(a, b));
            for z in 0..=n as i64 {
                let (p, q) = (d.pmf(z), d.pmf_coefficient_form(z));
                if p == 0.0 && q == 0.0 {
                    continue;
                }
                let rel = (p - q).abs() / p.abs().max(q.abs());
                assert!(rel <= 1e-10, "n={n} z={z} ({a},{b}): {p:e} vs {q:e}");
            }
        }
    }
}

#[test]
fn bivariate_two_forms_agree() {
    for shape in small_grid_shapes() {
        for (n1, n2) in [(3, 5), (8, 8), (80, 1120), (315, 885)] {
            let d = BivariateBetaBinomial::new(n1, n2, shape);
            let step1 = (n1 / 16).max(1) as usize;
            let step2 = (n2 / 16).max(1) as usize;
            for z1 in (0..=n1 as i64).step_by(step1) {
                for z2 in (0..=n2 as i64).step_by(step2) {
                    let (p, q) = (d.pmf(z1, z2), d.pmf_coefficient_form(z1, z2));
                    if p == 0.0 && q == 0.0 {
                        continue;
                    }
                    let rel = (p - q).abs() / p.abs().max(q.abs());
                    assert!(rel <= 1e-10, "({n1},{n2},{z1},{z2}) {shape:?}: {rel:e}");
                }
            }
        }
    }
}

/// C(n,z)·∫ p^{z+a−1}(1−p)^{n−z+b−1} dp / ∫ p^{a−1}(1−p)^{b−1} dp.
fn mixture_by_quadrature(n: u64, a: f64, b: f64, z: u64) -> f64 {
    let num = ln_beta_integral(a + z as f64, b + (n - z) as f64, a);
    let den = ln_beta_integral(a, b, a);
    (ln_choose(n, z) + num - den).exp()
}

#[test]
fn pmf_equals_binomial_mixture() {
    for &(a, b) in &PRESET_SHAPES {
        for &n in &[1u64, 10, 80] {
            let d = BetaBinomial::new(n, beta(a, b));
            for z in 0..=n {
                let q = mixture_by_quadrature(n, a, b, z);
                let p = d.pmf(z as i64);
                assert!((p - q).abs() <= 1e-8, "n={n} z={z} ({a},{b}): {p:e} vs {q:e}");
            }
        }
    }
}

#[test]
fn pmf_equals_binomial_mixture_large_n() {
    for &(a, b) in &PRESET_SHAPES {
        for &n in &[315u64, 1200] {
            let d = BetaBinomial::new(n, beta(a, b));
            for z in [0u64, 1, 2, 5, 12, 40, n / 2, n] {
                let q = mixture_by_quadrature(n, a, b, z);
                let p = d.pmf(z as i64);
                assert!((p - q).abs() <= 1e-8, "n={n} z={z} ({a},{b}): {p:e} vs {q:e}");
            }
        }
    }
}

#[test]
fn bivariate_marginals_and_conditionals() {
    for shape in small_grid_shapes() {
        for n1 in 0..=8u64 {
            for n2 in 0..=8u64 {
                let d = BivariateBetaBinomial::new(n1, n2, shape);
                let m1 = BetaBinomial::new(n1, shape);
                let m2 = BetaBinomial::new(n2, shape);
                for z1 in 0..=n1 as i64 {
                    let row: f64 = (0..=n2 as i64).map(|z2| d.pmf(z1, z2)).sum();
                    assert!((row - m1.pmf(z1)).abs() <= 1e-12);
                    let cond = BetaBinomial::new(
                        n2,
                        beta(shape.a() + z1 as f64, shape.b() + (n1 as i64 - z1) as f64),
                    );
                    let lib_cond = d.conditional_second(z1 as u64).unwrap();
                    for z2 in 0..=n2 as i64 {
                        let ratio = d.pmf(z1, z2) / m1.pmf(z1);
                        assert!((ratio - cond.pmf(z2)).abs() <= 1e-10);
                        assert!((lib_cond.pmf(z2) - cond.pmf(z2)).abs() <= 1e-14);
                    }
                }
                for z2 in 0..=n2 as i64 {
                    let col: f64 = (0..=n1 as i64).map(|z1| d.pmf(z1, z2)).sum();
                    assert!((col - m2.pmf(z2)).abs() <= 1e-12);
                }
                assert_eq!(d.marginal_first(), m1);
                assert_eq!(d.marginal_second(), m2);
            }
        }
    }
}

#[test]
fn cdf_is_running_sum() {
    for &(a, b) in &PRESET_SHAPES {
        for &n in &[10u64, 80, 1120] {
            let d = BetaBinomial::new(n, beta(a, b));
            let mut acc = 0.0;
            for z in 0..=n as i64 {
                acc += d.pmf(z);
                assert!((betabin_cdf(&d, z) - acc).abs() <= 1e-12, "n={n} z={z}");
            }
            assert_eq!(betabin_cdf(&d, -1), 0.0);
            assert_eq!(betabin_cdf(&d, n as i64), 1.0);
        }
    }
}

#[test]
fn degenerate_zero_trials() {
    let d = BetaBinomial::new(0, beta(0.57, 37.67));
    assert_eq!(d.pmf(0), 1.0);
    assert_eq!(d.pmf(1), 0.0);
    assert_eq!(d.cdf(0), 1.0);
    assert_eq!(d.cdf(-1), 0.0);
}

#[test]
fn beta_cdf_matches_quadrature() {
    // ∫₀^x p^{a−1}(1−p)^{b−1} dp via p = t^{1/a}, over [0, x^a].
    for &(a, b) in &PRESET_SHAPES[1..] {
        let den = ln_beta_integral(a, b, a).exp();
        for &x in &[0.001f64, 0.01, 0.03, 0.09, 0.2] {
            let k = 1.0 / a;
            let f = |t: f64| k * ((b - 1.0) * (-t.powf(k)).ln_1p()).exp();
            let num = common::integrate(&f, 0.0, x.powf(a), 64, 1e-15);
            let v = beta_cdf(beta(a, b), x);
            assert!((v - num / den).abs() <= 1e-10, "({a},{b}) x={x}");
        }
    }
}

proptest! {
    #[test]
    fn quantile_round_trips(
        la in -0.7f64..2.0,
        lb in -0.7f64..2.5,
        x in 1e-4f64..0.9999,
    ) {
        let p = beta(10f64.powf(la), 10f64.powf(lb));
        let rho = beta_cdf(p, x);
        prop_assume!(rho > 1e-300 && rho < 1.0 - 1e-12);
        let back = beta_quantile(p, rho).unwrap();
        // Where the CDF is flat the inverse is ill-conditioned; compare in
        // probability there instead.
        let ok = (back - x).abs() <= 1e-9 || (beta_cdf(p, back) - rho).abs() <= 1e-12 * rho.max(1e-300).max(1e-3);
        prop_assert!(ok, "x={} back={} rho={}", x, back, rho);
    }

    #[test]
    fn cdf_nondecreasing(
        la in -0.7f64..2.0,
        lb in -0.7f64..2.5,
        x in 0.0f64..1.0,
        dx in 0.0f64..0.05,
    ) {
        let p = beta(10f64.powf(la), 10f64.powf(lb));
        prop_assert!(beta_cdf(p, (x + dx).min(1.0)) >= beta_cdf(p, x));
    }
}
