//! Beta priors for the process proportion nonconforming: fitting from
//! elicited summaries and the built-in table of reference priors.

use serde::Serialize;

use crate::distributions::BetaParams;
use crate::error::{Error, Result};
use crate::special::inc_beta;

/// Name under which [`preset_table`] is exposed to front ends.
pub const PRESET_TABLE_NAME: &str = "builtin-table3";

/// Summary constraints from which a beta prior is fitted.
///
/// Supply the mean and one quantile, a fixed first shape plus either the
/// mean or one quantile. The support must be the full unit interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElicitationSpec {
    pub mean: Option<f64>,
    /// Quantile level rho together with the value p_rho, F(p_rho) = rho.
    pub quantile: Option<(f64, f64)>,
    pub fixed_a: Option<f64>,
    pub support: (f64, f64),
}

impl Default for ElicitationSpec {
    fn default() -> Self {
        Self {
            mean: None,
            quantile: None,
            fixed_a: None,
            support: (0.0, 1.0),
        }
    }
}

impl ElicitationSpec {
    pub fn mean_and_quantile(mean: f64, rho: f64, p_rho: f64) -> Self {
        Self {
            mean: Some(mean),
            quantile: Some((rho, p_rho)),
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.support != (0.0, 1.0) {
            return Err(Error::Unsupported(format!(
                "prior support [{}; {}]: only the full support [0; 1] is supported",
                self.support.0, self.support.1
            )));
        }
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if let Some(m) = self.mean {
            if !open_unit(m) {
                return Err(Error::domain(
                    "elicit",
                    format!("mean must lie in (0, 1), got {m}"),
                ));
            }
        }
        if let Some((rho, p)) = self.quantile {
            if !open_unit(rho) || !open_unit(p) {
                return Err(Error::domain(
                    "elicit",
                    format!("quantile level and value must lie in (0, 1), got ({rho}, {p})"),
                ));
            }
        }
        if let Some(a) = self.fixed_a {
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::domain("elicit", format!("fixed a must be > 0, got {a}")));
            }
        }
        let count = [
            self.mean.is_some(),
            self.quantile.is_some(),
            self.fixed_a.is_some(),
        ]
        .iter()
        .filter(|&&x| x)
        .count();
        if count != 2 {
            return Err(Error::domain(
                "elicit",
                "exactly two constraints are required (mean, quantile, fixed a)",
            ));
        }
        Ok(())
    }
}

/// Search range for the first shape parameter.
const A_MIN: f64 = 1e-6;
const A_MAX: f64 = 1e6;
const SCAN_POINTS: usize = 481;
const BISECT_MAX_ITER: usize = 200;
const BISECT_REL_TOL: f64 = 1e-12;
const CONSTRAINT_TOL: f64 = 1e-9;

/// Fits BETA(a, b) to the constraints in `spec`.
pub fn elicit(spec: &ElicitationSpec) -> Result<BetaParams> {
    spec.validate()?;
    match (spec.mean, spec.quantile, spec.fixed_a) {
        (Some(mean), None, Some(a)) => BetaParams::new(a, a * (1.0 - mean) / mean),
        (None, Some((rho, p)), Some(1.0)) => elicit_a1_from_quantile(rho, p),
        (None, Some((rho, p)), Some(a)) => {
            // F_{a,b}(p) increases with b for fixed a
            let g = |ln_b: f64| inc_beta(p, a, ln_b.exp()).0 - rho;
            let ln_b = largest_root(g, "elicit")?;
            let params = BetaParams::new(a, ln_b.exp())?;
            check_quantile(params, rho, p)?;
            Ok(params)
        }
        (Some(mean), Some((rho, p)), None) => {
            let ratio = (1.0 - mean) / mean;
            let g = |ln_a: f64| {
                let a = ln_a.exp();
                inc_beta(p, a, a * ratio).0 - rho
            };
            let ln_a = largest_root(g, "elicit")?;
            let a = ln_a.exp();
            let params = BetaParams::new(a, a * ratio)?;
            check_quantile(params, rho, p)?;
            Ok(params)
        }
        _ => unreachable!("validate() admits exactly two constraints"),
    }
}

fn check_quantile(params: BetaParams, rho: f64, p: f64) -> Result<()> {
    if (params.cdf(p) - rho).abs() <= CONSTRAINT_TOL {
        Ok(())
    } else {
        Err(Error::NonConvergence {
            op: "elicit",
            iterations: BISECT_MAX_ITER,
        })
    }
}

/// Finds the largest root of `g` over ln-shape in [ln A_MIN, ln A_MAX].
///
/// The quantile constraint is not monotone in the shape when the mean is
/// held fixed: for small means it can dip below the target and come back,
/// giving a second, near-degenerate root at tiny shapes. A log-grid scan
/// locates every sign change and the root with the largest shape is refined
/// by bisection.
fn largest_root(g: impl Fn(f64) -> f64, op: &'static str) -> Result<f64> {
    let (lo, hi) = (A_MIN.ln(), A_MAX.ln());
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let grid: Vec<(f64, f64)> = (0..SCAN_POINTS)
        .map(|i| {
            let t = lo + step * i as f64;
            (t, g(t))
        })
        .collect();
    if let Some(&(t, _)) = grid.iter().rev().find(|(_, v)| *v == 0.0) {
        return Ok(t);
    }
    let bracket = grid
        .windows(2)
        .rev()
        .find(|w| w[0].1.signum() != w[1].1.signum())
        .ok_or_else(|| {
            Error::NoSolution(
                "no beta distribution on the searched shape range satisfies the constraints".to_string(),
            )
        })?;
    let (mut l, mut gl) = bracket[0];
    let (mut r, _) = bracket[1];
    for _ in 0..BISECT_MAX_ITER {
        let m = 0.5 * (l + r);
        if r - l <= BISECT_REL_TOL * m.abs().max(1.0) {
            return Ok(m);
        }
        let gm = g(m);
        if gm == 0.0 {
            return Ok(m);
        }
        if gm.signum() == gl.signum() {
            l = m;
            gl = gm;
        } else {
            r = m;
        }
    }
    Err(Error::NonConvergence {
        op,
        iterations: BISECT_MAX_ITER,
    })
}

/// BETA(1, b) with F(p_rho) = rho, closed form b = ln(1 − rho) / ln(1 − p_rho).
pub fn elicit_a1_from_quantile(rho: f64, p_rho: f64) -> Result<BetaParams> {
    for (name, v) in [("rho", rho), ("p_rho", p_rho)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::domain(
                "elicit_a1_from_quantile",
                format!("{name} must lie in (0, 1), got {v}"),
            ));
        }
    }
    BetaParams::new(1.0, (-rho).ln_1p() / (-p_rho).ln_1p())
}

/// One row of the built-in reference prior table, as printed (two decimals on
/// the shapes, three on the summaries).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PriorPreset {
    pub a: f64,
    pub b: f64,
    pub mean: f64,
    pub q99: f64,
}

impl PriorPreset {
    pub fn params(&self) -> BetaParams {
        BetaParams::new(self.a, self.b).expect("preset shapes are positive")
    }
}

static PRESETS: [PriorPreset; 8] = [
    PriorPreset {
        a: 1.00,
        b: 1.00,
        mean: 0.500,
        q99: 0.990,
    },
    PriorPreset {
        a: 0.78,
        b: 25.21,
        mean: 0.030,
        q99: 0.150,
    },
    PriorPreset {
        a: 0.67,
        b: 32.67,
        mean: 0.020,
        q99: 0.110,
    },
    PriorPreset {
        a: 0.57,
        b: 37.67,
        mean: 0.015,
        q99: 0.090,
    },
    PriorPreset {
        a: 0.52,
        b: 46.79,
        mean: 0.011,
        q99: 0.070,
    },
    PriorPreset {
        a: 0.43,
        b: 60.46,
        mean: 0.007,
        q99: 0.050,
    },
    PriorPreset {
        a: 0.35,
        b: 69.50,
        mean: 0.005,
        q99: 0.040,
    },
    PriorPreset {
        a: 0.24,
        b: 78.12,
        mean: 0.003,
        q99: 0.030,
    },
];

/// The eight reference priors, from uninformative BETA(1, 1) to the most
/// restrictive BETA(0.24, 78.12).
pub fn preset_table() -> &'static [PriorPreset] {
    &PRESETS
}

/// Looks up a preset by its 1-based row number.
pub fn preset(row: usize) -> Result<PriorPreset> {
    row.checked_sub(1)
        .and_then(|i| PRESETS.get(i))
        .copied()
        .ok_or_else(|| {
            Error::domain(
                "preset",
                format!("{PRESET_TABLE_NAME} has rows 1..={}, got {row}", PRESETS.len()),
            )
        })
}
