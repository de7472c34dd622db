//! Test-only oracles, written without the library's special functions.
#![allow(dead_code)]

/// Adaptive Simpson quadrature of `f` over [lo, hi], starting from `panels`
/// equal pieces, each refined until its local error is below `tol` times the
/// panel's share.
pub fn integrate(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, panels: usize, tol: f64) -> f64 {
    let h = (hi - lo) / panels as f64;
    (0..panels)
        .map(|i| {
            let a = lo + h * i as f64;
            let b = a + h;
            let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
            let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
            simpson(f, a, b, fa, fm, fb, whole, tol / panels as f64, 60)
        })
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn simpson(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

/// ln ∫₀¹ p^{s−1} (1−p)^{r−1} dp, for s ≥ a_sub > 0 and r ≥ 1.
///
/// Substitutes p = t^{1/a_sub} so the p^{a_sub − 1} singularity at 0 vanishes,
/// and divides the integrand by its value at the mode so the quadrature
/// tolerance is relative.
pub fn ln_beta_integral(s: f64, r: f64, a_sub: f64) -> f64 {
    let k = 1.0 / a_sub;
    let ln_kernel = |t: f64| (s - a_sub) * k * t.ln() + (r - 1.0) * (-t.powf(k)).ln_1p();
    let mode = if s > a_sub && r > 1.0 {
        let p = (s - a_sub) / (s - a_sub + r - 1.0);
        p.powf(a_sub)
    } else {
        0.0
    };
    let shift = if mode > 0.0 { ln_kernel(mode) } else { 0.0 };
    let f = |t: f64| {
        if t <= 0.0 {
            return if s == a_sub { (-shift).exp() } else { 0.0 };
        }
        if t >= 1.0 {
            return if r == 1.0 { (-shift).exp() } else { 0.0 };
        }
        (ln_kernel(t) - shift).exp()
    };
    integrate(&f, 0.0, 1.0, 512, 1e-14).ln() + shift + k.ln()
}

/// Binomial coefficient C(n, k) for small integers by exact-ish product.
pub fn choose(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (1..=k).fold(1.0, |acc, i| acc * (n - k + i) as f64 / i as f64)
}

/// ln C(n, k) as a sum of logs.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

/// The eight reference priors, (a, b).
pub const PRESET_SHAPES: [(f64, f64); 8] = [
    (1.00, 1.00),
    (0.78, 25.21),
    (0.67, 32.67),
    (0.57, 37.67),
    (0.52, 46.79),
    (0.43, 60.46),
    (0.35, 69.50),
    (0.24, 78.12),
];

/// Small deterministic generator (SplitMix64) for grid sampling in tests.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}
