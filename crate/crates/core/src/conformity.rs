//! Conformance probabilities and consumer's/producer's risks for a single
//! sampling plan (n, c) under a beta prior on the process proportion.
//!
//! Two targets are supported. For a process the target is the proportion
//! nonconforming π with tolerance region [0, x_C], x_C a proportion; the
//! posterior given Y = y is BETA(a + y, b + n − y). For a lot of size N the
//! target is the count X of nonconforming units with tolerance region
//! {0, …, x_C}; given Y = y the uninspected remainder X − Y follows
//! BETA-Bi(N − n, a + y, b + n − y), so P(X ≤ x_C | Y = y) is that CDF at x_C − y.
//!
//! Acceptance region is {0, …, c}. Global risks satisfy
//! R_Con = P(Y ≤ c) − P(X ∈ C) + R_Pro, reported as `identity_residual`.

use serde::Serialize;

use crate::distributions::{posterior_lot_remainder, posterior_process, BetaBinomial, BetaParams};
use crate::error::{Error, Result};
use crate::special::ln_choose;

/// Upper tolerance limit x_C, typed by target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "target", rename_all = "snake_case")]
pub enum ToleranceSpec {
    /// Process proportion nonconforming must not exceed `x_c` ∈ [0, 1].
    Process { x_c: f64 },
    /// At most `x_c` nonconforming units in a lot of `lot_size`.
    Lot { lot_size: u64, x_c: u64 },
}

/// The specific risk that applies to an observed sample count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecificRisk {
    /// y ≤ c: accepted, risk that the target is nonconforming.
    Consumer(f64),
    /// y ≥ c + 1: rejected, risk that the target is conforming.
    Producer(f64),
}

impl SpecificRisk {
    pub fn value(&self) -> f64 {
        match *self {
            SpecificRisk::Consumer(v) | SpecificRisk::Producer(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GlobalRisks {
    /// P(X ∉ C, Y ∈ A)
    pub consumer: f64,
    /// P(X ∈ C, Y ∉ A)
    pub producer: f64,
}

fn check_plan(op: &'static str, n: u64, c: u64) -> Result<()> {
    if c > n {
        return Err(Error::domain(
            op,
            format!("acceptance number c={c} exceeds sample size n={n}"),
        ));
    }
    Ok(())
}

fn check_count(op: &'static str, n: u64, y: u64) -> Result<()> {
    if y > n {
        return Err(Error::domain(
            op,
            format!("sample count y={y} exceeds sample size n={n}"),
        ));
    }
    Ok(())
}

fn check_proportion(op: &'static str, x_c: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x_c) {
        return Err(Error::domain(
            op,
            format!("tolerance limit x_C must lie in [0, 1], got {x_c}"),
        ));
    }
    Ok(())
}

fn check_lot(op: &'static str, lot_size: u64, n: u64, x_c: u64) -> Result<()> {
    if n > lot_size {
        return Err(Error::domain(
            op,
            format!("sample size n={n} exceeds lot size N={lot_size}"),
        ));
    }
    if x_c > lot_size {
        return Err(Error::domain(
            op,
            format!("tolerance limit x_C={x_c} exceeds lot size N={lot_size}"),
        ));
    }
    Ok(())
}

fn split_specific(p_conform: f64, y: u64, c: u64) -> SpecificRisk {
    if y <= c {
        SpecificRisk::Consumer(1.0 - p_conform)
    } else {
        SpecificRisk::Producer(p_conform)
    }
}

/// P(π ≤ x_C | Y = y) = F_{BETA(a+y, b+n−y)}(x_C).
pub fn process_conformance_prob(prior: BetaParams, n: u64, y: u64, x_c: f64) -> Result<f64> {
    const OP: &str = "process_conformance_prob";
    check_count(OP, n, y)?;
    check_proportion(OP, x_c)?;
    Ok(posterior_process(prior, n, y)?.cdf(x_c))
}

pub fn process_specific_risks(prior: BetaParams, n: u64, y: u64, c: u64, x_c: f64) -> Result<SpecificRisk> {
    check_plan("process_specific_risks", n, c)?;
    let p = process_conformance_prob(prior, n, y, x_c)?;
    Ok(split_specific(p, y, c))
}

pub fn process_global_risks(prior: BetaParams, n: u64, c: u64, x_c: f64) -> Result<GlobalRisks> {
    const OP: &str = "process_global_risks";
    check_plan(OP, n, c)?;
    check_proportion(OP, x_c)?;
    let marginal = BetaBinomial::new(n, prior);
    let mut consumer = 0.0;
    let mut producer = 0.0;
    for y in 0..=n {
        let w = marginal.pmf(y as i64);
        let p = posterior_process(prior, n, y)?.cdf(x_c);
        if y <= c {
            consumer += w * (1.0 - p);
        } else {
            producer += w * p;
        }
    }
    Ok(GlobalRisks { consumer, producer })
}

/// P(X ≤ x_C | Y = y) = F_{BETA-Bi(N−n, a+y, b+n−y)}(x_C − y); zero when y > x_C.
pub fn lot_conformance_prob(prior: BetaParams, lot_size: u64, n: u64, y: u64, x_c: u64) -> Result<f64> {
    const OP: &str = "lot_conformance_prob";
    check_lot(OP, lot_size, n, x_c)?;
    check_count(OP, n, y)?;
    let remainder = posterior_lot_remainder(prior, lot_size, n, y)?;
    Ok(remainder.cdf(x_c as i64 - y as i64))
}

pub fn lot_specific_risks(
    prior: BetaParams,
    lot_size: u64,
    n: u64,
    y: u64,
    c: u64,
    x_c: u64,
) -> Result<SpecificRisk> {
    check_plan("lot_specific_risks", n, c)?;
    let p = lot_conformance_prob(prior, lot_size, n, y, x_c)?;
    Ok(split_specific(p, y, c))
}

pub fn lot_global_risks(prior: BetaParams, lot_size: u64, n: u64, c: u64, x_c: u64) -> Result<GlobalRisks> {
    const OP: &str = "lot_global_risks";
    check_plan(OP, n, c)?;
    check_lot(OP, lot_size, n, x_c)?;
    let marginal = BetaBinomial::new(n, prior);
    let mut consumer = 0.0;
    let mut producer = 0.0;
    for y in 0..=n {
        let w = marginal.pmf(y as i64);
        let p = posterior_lot_remainder(prior, lot_size, n, y)?.cdf(x_c as i64 - y as i64);
        if y <= c {
            consumer += w * (1.0 - p);
        } else {
            producer += w * p;
        }
    }
    Ok(GlobalRisks { consumer, producer })
}

/// Operating-characteristic probabilities at a fixed true proportion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OcProbabilities {
    /// P(Y ≤ c | π = p)
    pub accept: f64,
    /// P(Y > c | π = p)
    pub reject: f64,
}

/// Which conditioning the fixed-quality (OC) risks use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsoConditioning {
    /// Binomial sampling from a process with proportion p.
    Process,
    /// Hypergeometric sampling from a lot with a fixed count; not implemented.
    Lot { lot_size: u64 },
}

/// Acceptance and rejection probabilities of plan (n, c) at process proportion `p`.
pub fn iso_specific_risks(n: u64, c: u64, p: f64) -> Result<OcProbabilities> {
    const OP: &str = "iso_specific_risks";
    check_plan(OP, n, c)?;
    check_proportion(OP, p)?;
    let accept = if p == 0.0 {
        1.0
    } else if p == 1.0 {
        if c >= n {
            1.0
        } else {
            0.0
        }
    } else {
        let (lp, lq) = (p.ln(), (-p).ln_1p());
        (0..=c)
            .map(|y| (ln_choose(n, y) + y as f64 * lp + (n - y) as f64 * lq).exp())
            .sum::<f64>()
            .min(1.0)
    };
    Ok(OcProbabilities {
        accept,
        reject: 1.0 - accept,
    })
}

pub fn iso_specific_risks_conditioned(
    conditioning: IsoConditioning,
    n: u64,
    c: u64,
    p: f64,
) -> Result<OcProbabilities> {
    match conditioning {
        IsoConditioning::Process => iso_specific_risks(n, c, p),
        IsoConditioning::Lot { lot_size } => Err(Error::Unsupported(format!(
            "lot-conditioned (hypergeometric) OC risks for N={lot_size} are not implemented; \
             only process conditioning is available"
        ))),
    }
}

/// A prior, a plan (n, c) and a tolerance region: everything needed to
/// evaluate conformity indicators for any observed count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssessmentScenario {
    pub prior: BetaParams,
    pub n: u64,
    pub c: u64,
    pub tolerance: ToleranceSpec,
}

/// Every indicator for one scenario and one observed sample count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConformityReport {
    pub y: u64,
    pub p_conform_given_y: f64,
    pub specific_consumer_risk: Option<f64>,
    pub specific_producer_risk: Option<f64>,
    pub global_consumer_risk: f64,
    pub global_producer_risk: f64,
    /// P(Y ∈ A)
    pub accept_prob: f64,
    /// P(X ∈ C)
    pub prior_conform_prob: f64,
    /// R_Con − P(Y ∈ A) + P(X ∈ C) − R_Pro
    pub identity_residual: f64,
}

impl AssessmentScenario {
    pub fn new(prior: BetaParams, n: u64, c: u64, tolerance: ToleranceSpec) -> Result<Self> {
        const OP: &str = "AssessmentScenario::new";
        check_plan(OP, n, c)?;
        match tolerance {
            ToleranceSpec::Process { x_c } => check_proportion(OP, x_c)?,
            ToleranceSpec::Lot { lot_size, x_c } => {
                if lot_size == 0 {
                    return Err(Error::domain(OP, "lot size must be >= 1"));
                }
                check_lot(OP, lot_size, n, x_c)?
            }
        }
        Ok(Self {
            prior,
            n,
            c,
            tolerance,
        })
    }

    pub fn conformance_prob(&self, y: u64) -> Result<f64> {
        match self.tolerance {
            ToleranceSpec::Process { x_c } => process_conformance_prob(self.prior, self.n, y, x_c),
            ToleranceSpec::Lot { lot_size, x_c } => {
                lot_conformance_prob(self.prior, lot_size, self.n, y, x_c)
            }
        }
    }

    pub fn specific_risk(&self, y: u64) -> Result<SpecificRisk> {
        Ok(split_specific(self.conformance_prob(y)?, y, self.c))
    }

    pub fn global_risks(&self) -> Result<GlobalRisks> {
        match self.tolerance {
            ToleranceSpec::Process { x_c } => process_global_risks(self.prior, self.n, self.c, x_c),
            ToleranceSpec::Lot { lot_size, x_c } => {
                lot_global_risks(self.prior, lot_size, self.n, self.c, x_c)
            }
        }
    }

    /// P(Y ≤ c) under the prior predictive BETA-Bi(n, a, b).
    pub fn accept_prob(&self) -> f64 {
        BetaBinomial::new(self.n, self.prior).cdf(self.c as i64)
    }

    /// P(X ∈ C) under the prior.
    pub fn prior_conform_prob(&self) -> f64 {
        match self.tolerance {
            ToleranceSpec::Process { x_c } => self.prior.cdf(x_c),
            ToleranceSpec::Lot { lot_size, x_c } => BetaBinomial::new(lot_size, self.prior).cdf(x_c as i64),
        }
    }

    pub fn report(&self, y: u64) -> Result<ConformityReport> {
        let p = self.conformance_prob(y)?;
        let risk = split_specific(p, y, self.c);
        let global = self.global_risks()?;
        let accept_prob = self.accept_prob();
        let prior_conform_prob = self.prior_conform_prob();
        Ok(ConformityReport {
            y,
            p_conform_given_y: p,
            specific_consumer_risk: match risk {
                SpecificRisk::Consumer(v) => Some(v),
                SpecificRisk::Producer(_) => None,
            },
            specific_producer_risk: match risk {
                SpecificRisk::Producer(v) => Some(v),
                SpecificRisk::Consumer(_) => None,
            },
            global_consumer_risk: global.consumer,
            global_producer_risk: global.producer,
            accept_prob,
            prior_conform_prob,
            identity_residual: global.consumer - accept_prob + prior_conform_prob - global.producer,
        })
    }
}
