//! Beta, beta-binomial and bivariate beta-binomial distributions, and the
//! conjugate posterior constructors used by the risk computations.
//!
//! All mass functions are evaluated as
//! `exp(ln C(n, z) + ln B(z + a, n − z + b) − ln B(a, b))` so that trial
//! counts in the thousands neither overflow nor underflow.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{inc_beta, ln_beta, ln_choose, log_abs_binom_coeff};

/// Shape parameters of a BETA(a, b) distribution on [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    a: f64,
    b: f64,
}

impl BetaParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(
                    "BetaParams::new",
                    format!("shape {name} must be finite and > 0, got {v}"),
                ));
            }
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn mean(&self) -> f64 {
        self.a / (self.a + self.b)
    }

    /// Density; zero outside the open unit interval.
    pub fn pdf(&self, x: f64) -> f64 {
        if !(x > 0.0 && x < 1.0) {
            return 0.0;
        }
        self.ln_pdf(x).exp()
    }

    fn ln_pdf(&self, x: f64) -> f64 {
        (self.a - 1.0) * x.ln() + (self.b - 1.0) * (-x).ln_1p() - ln_beta(self.a, self.b)
    }

    /// CDF, clamped to 0 below the support and 1 above it.
    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        inc_beta(x, self.a, self.b).0
    }

    /// Upper tail 1 − F(x), evaluated directly rather than by subtraction.
    pub fn sf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        inc_beta(1.0 - x, self.b, self.a).0
    }

    /// Quantile function: the x with F(x) = rho, for 0 < rho < 1.
    ///
    /// Safeguarded Newton iteration on the log of the nearer tail, falling
    /// back to (geometric) bisection whenever a step leaves the bracket.
    pub fn quantile(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::domain(
                "beta_quantile",
                format!("level must lie in (0, 1), got {rho}"),
            ));
        }
        if rho <= 0.5 {
            lower_tail_quantile(self.a, self.b, rho)
        } else {
            // mirror: X ~ BETA(a, b)  <=>  1 − X ~ BETA(b, a)
            lower_tail_quantile(self.b, self.a, 1.0 - rho).map(|w| 1.0 - w)
        }
    }

    /// Conjugate update after observing `y` nonconforming units among `n`.
    pub fn posterior(&self, n: u64, y: u64) -> Result<BetaParams> {
        posterior_process(*self, n, y)
    }
}

const QUANTILE_MAX_ITER: usize = 400;

/// Solves I_x(a, b) = r by Newton steps in ln x on ln I_x(a, b).
fn lower_tail_quantile(a: f64, b: f64, r: f64) -> Result<f64> {
    let ln_b = ln_beta(a, b);
    let ln_r = r.ln();
    let cdf = |x: f64| inc_beta(x, a, b).0;

    // small-x asymptote F(x) ≈ x^a / (a B(a, b))
    let mut x = ((ln_r + a.ln() + ln_b) / a).exp();
    if !(x > 0.0 && x < 1.0) {
        x = a / (a + b);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..QUANTILE_MAX_ITER {
        let f = cdf(x);
        if f == r {
            return Ok(x);
        }
        if f < r {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(x);
        }
        let ln_x = x.ln();
        let ln_f = f.ln();
        let ln_dens = (a - 1.0) * ln_x + (b - 1.0) * (-x).ln_1p() - ln_b;
        let slope = (ln_x + ln_dens - ln_f).exp();
        let step = (ln_f - ln_r) / slope;
        let mut next = (ln_x - step).exp();
        if !(next.is_finite() && next > lo && next < hi) {
            next = if lo == 0.0 {
                hi / 16.0
            } else if hi / lo > 4.0 {
                (lo * hi).sqrt()
            } else {
                0.5 * (lo + hi)
            };
        } else if step.abs() <= 4.0 * f64::EPSILON * ln_x.abs().max(1.0) {
            return Ok(next);
        }
        x = next;
    }
    if (cdf(x) - r).abs() <= 1e-12 {
        Ok(x)
    } else {
        Err(Error::NonConvergence {
            op: "beta_quantile",
            iterations: QUANTILE_MAX_ITER,
        })
    }
}

/// Density of BETA(a, b) at x; zero outside (0, 1).
pub fn beta_pdf(p: BetaParams, x: f64) -> f64 {
    p.pdf(x)
}

/// CDF of BETA(a, b) at x.
pub fn beta_cdf(p: BetaParams, x: f64) -> f64 {
    p.cdf(x)
}

/// Quantile of BETA(a, b) at level rho.
pub fn beta_quantile(p: BetaParams, rho: f64) -> Result<f64> {
    p.quantile(rho)
}

/// BETA-Bi(n, a, b): binomial(n, π) mixed over π ~ BETA(a, b).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaBinomial {
    n: u64,
    shape: BetaParams,
}

impl BetaBinomial {
    pub fn new(n: u64, shape: BetaParams) -> Self {
        Self { n, shape }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn shape(&self) -> BetaParams {
        self.shape
    }

    /// ln f(z) for 0 ≤ z ≤ n, −∞ elsewhere.
    pub fn ln_pmf(&self, z: i64) -> f64 {
        if z < 0 || z as u64 > self.n {
            return f64::NEG_INFINITY;
        }
        let z = z as u64;
        let (a, b) = (self.shape.a, self.shape.b);
        ln_choose(self.n, z) + ln_beta(z as f64 + a, (self.n - z) as f64 + b) - ln_beta(a, b)
    }

    pub fn pmf(&self, z: i64) -> f64 {
        self.ln_pmf(z).exp()
    }

    /// The same mass function written with negative binomial coefficients,
    /// C(−a, z) C(−b, n − z) / C(−a − b, n); evaluated without gamma functions.
    pub fn pmf_coefficient_form(&self, z: i64) -> f64 {
        if z < 0 || z as u64 > self.n {
            return 0.0;
        }
        let n = self.n as i64;
        let (a, b) = (self.shape.a, self.shape.b);
        let (l1, s1) = log_abs_binom_coeff(-a, z);
        let (l2, s2) = log_abs_binom_coeff(-b, n - z);
        let (l3, s3) = log_abs_binom_coeff(-a - b, n);
        s1 * s2 * s3 * (l1 + l2 - l3).exp()
    }

    /// P(Z ≤ z), summed from whichever tail is nearer.
    pub fn cdf(&self, z: i64) -> f64 {
        if z < 0 {
            return 0.0;
        }
        if z as u64 >= self.n {
            return 1.0;
        }
        let n = self.n as i64;
        let v = if 2 * z <= n {
            (0..=z).map(|k| self.pmf(k)).sum::<f64>()
        } else {
            1.0 - ((z + 1)..=n).map(|k| self.pmf(k)).sum::<f64>()
        };
        v.clamp(0.0, 1.0)
    }

    /// P(Z > z) = 1 − cdf(z), computed by the same path so the two complement exactly.
    pub fn sf(&self, z: i64) -> f64 {
        1.0 - self.cdf(z)
    }

    pub fn mean(&self) -> f64 {
        self.n as f64 * self.shape.mean()
    }
}

pub fn betabin_pmf(d: &BetaBinomial, z: i64) -> f64 {
    d.pmf(z)
}

pub fn betabin_cdf(d: &BetaBinomial, z: i64) -> f64 {
    d.cdf(z)
}

/// Joint law of two binomial counts sharing one BETA(a, b) success probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BivariateBetaBinomial {
    n1: u64,
    n2: u64,
    shape: BetaParams,
}

impl BivariateBetaBinomial {
    pub fn new(n1: u64, n2: u64, shape: BetaParams) -> Self {
        Self { n1, n2, shape }
    }

    pub fn n1(&self) -> u64 {
        self.n1
    }

    pub fn n2(&self) -> u64 {
        self.n2
    }

    pub fn shape(&self) -> BetaParams {
        self.shape
    }

    fn on_grid(&self, z1: i64, z2: i64) -> bool {
        z1 >= 0 && z2 >= 0 && z1 as u64 <= self.n1 && z2 as u64 <= self.n2
    }

    pub fn pmf(&self, z1: i64, z2: i64) -> f64 {
        if !self.on_grid(z1, z2) {
            return 0.0;
        }
        let (z1, z2) = (z1 as u64, z2 as u64);
        let (a, b) = (self.shape.a, self.shape.b);
        let s = z1 + z2;
        let m = self.n1 + self.n2;
        (ln_choose(self.n1, z1) + ln_choose(self.n2, z2) + ln_beta(a + s as f64, b + (m - s) as f64)
            - ln_beta(a, b))
        .exp()
    }

    /// C(n1,z1) C(n2,z2) / C(n1+n2, z1+z2) · C(−a, s) C(−b, m−s) / C(−a−b, m),
    /// with s = z1 + z2 and m = n1 + n2.
    pub fn pmf_coefficient_form(&self, z1: i64, z2: i64) -> f64 {
        if !self.on_grid(z1, z2) {
            return 0.0;
        }
        let (a, b) = (self.shape.a, self.shape.b);
        let (n1, n2) = (self.n1 as i64, self.n2 as i64);
        let s = z1 + z2;
        let m = n1 + n2;
        let terms = [
            (log_abs_binom_coeff(n1 as f64, z1), 1.0),
            (log_abs_binom_coeff(n2 as f64, z2), 1.0),
            (log_abs_binom_coeff(m as f64, s), -1.0),
            (log_abs_binom_coeff(-a, s), 1.0),
            (log_abs_binom_coeff(-b, m - s), 1.0),
            (log_abs_binom_coeff(-a - b, m), -1.0),
        ];
        let (ln, sign) = terms
            .iter()
            .fold((0.0, 1.0), |(ln, sign), &((l, s), e)| (ln + e * l, sign * s));
        sign * ln.exp()
    }

    /// Marginal law of the first count.
    pub fn marginal_first(&self) -> BetaBinomial {
        BetaBinomial::new(self.n1, self.shape)
    }

    /// Marginal law of the second count.
    pub fn marginal_second(&self) -> BetaBinomial {
        BetaBinomial::new(self.n2, self.shape)
    }

    /// Law of the second count given the first equals `z1`.
    pub fn conditional_second(&self, z1: u64) -> Result<BetaBinomial> {
        let post = posterior_process(self.shape, self.n1, z1)?;
        Ok(BetaBinomial::new(self.n2, post))
    }
}

pub fn bibetabin_pmf(d: &BivariateBetaBinomial, z1: i64, z2: i64) -> f64 {
    d.pmf(z1, z2)
}

/// Posterior of the process proportion after `y` nonconforming in `n`: BETA(a + y, b + n − y).
pub fn posterior_process(prior: BetaParams, n: u64, y: u64) -> Result<BetaParams> {
    if y > n {
        return Err(Error::domain(
            "posterior_process",
            format!("observed count y={y} exceeds sample size n={n}"),
        ));
    }
    BetaParams::new(prior.a + y as f64, prior.b + (n - y) as f64)
}

/// Posterior law of the uninspected remainder X − Y of a lot of size
/// `lot_size` after `y` nonconforming in a sample of `n`:
/// BETA-Bi(N − n, a + y, b + n − y). The law of X itself is this shifted by y.
pub fn posterior_lot_remainder(prior: BetaParams, lot_size: u64, n: u64, y: u64) -> Result<BetaBinomial> {
    if n > lot_size {
        return Err(Error::domain(
            "posterior_lot_remainder",
            format!("sample size n={n} exceeds lot size N={lot_size}"),
        ));
    }
    let post = posterior_process(prior, n, y)?;
    Ok(BetaBinomial::new(lot_size - n, post))
}
