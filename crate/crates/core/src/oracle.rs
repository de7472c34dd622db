//! Independent checks for the analytic risk formulas: exhaustive enumeration
//! of the joint law of (Y, X − Y) on small lots, and seeded Monte Carlo
//! simulation of the sampling model at full scale.
//!
//! Random streams are ChaCha20 (`rand_chacha::ChaCha20Rng`). Trials are split
//! into fixed partitions of [`PARTITION_TRIALS`]; partition `i` uses the
//! generator seeded by `seed_from_u64(seed)` with its stream set to `i`. Hit
//! counts are integers summed exactly, so results do not depend on the
//! number of threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution, Open01};
use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::{BetaParams, BivariateBetaBinomial};
use crate::error::{Error, Result};

/// Largest lot size the enumeration oracle accepts.
pub const MAX_ENUMERATION_LOT: u64 = 20;

/// Trials per random-stream partition.
pub const PARTITION_TRIALS: u64 = 1 << 16;

/// Documented generator name, printed in reports.
pub const RNG_ALGORITHM: &str = "ChaCha20 (rand_chacha), stream = partition index, 65536 trials/partition";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::domain("McConfig::new", "trials must be >= 1"));
        }
        Ok(Self { trials, seed })
    }
}

/// A Monte Carlo proportion with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub trials: u64,
    pub hits: u64,
}

impl McEstimate {
    fn from_hits(hits: u64, trials: u64) -> Self {
        let estimate = hits as f64 / trials as f64;
        Self {
            estimate,
            std_error: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
            trials,
            hits,
        }
    }

    /// Standard error the estimate would have if `value` were the true probability.
    pub fn std_error_at(&self, value: f64) -> f64 {
        let v = value.clamp(0.0, 1.0);
        (v * (1.0 - v) / self.trials as f64).sqrt()
    }

    /// |estimate − value| in units of the larger of the observed standard
    /// error and the standard error implied by `value`.
    ///
    /// The implied error keeps rare events (estimate 0, zero observed error)
    /// comparable to small nonzero analytic values.
    pub fn z_score(&self, value: f64) -> f64 {
        let diff = (self.estimate - value).abs();
        let se = self.std_error.max(self.std_error_at(value));
        if se == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / se
        }
    }

    pub fn agrees_with(&self, value: f64, sigmas: f64) -> bool {
        self.z_score(value) <= sigmas
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BruteForceLotRisks {
    pub consumer: f64,
    pub producer: f64,
    /// P(X ≤ x_C | Y = y) for y = 0..=n.
    pub p_conform_given_y: Vec<f64>,
}

fn check_lot_scenario(op: &'static str, lot_size: u64, n: u64, c: u64, x_c: u64) -> Result<()> {
    if c > n || n > lot_size || x_c > lot_size {
        return Err(Error::domain(
            op,
            format!("need c <= n <= N and x_C <= N, got c={c}, n={n}, N={lot_size}, x_C={x_c}"),
        ));
    }
    Ok(())
}

/// Global risks and conditional conformance probabilities of a lot by
/// summing the joint PMF of (Y, X − Y) over the whole grid.
pub fn brute_force_lot_risks(
    prior: BetaParams,
    lot_size: u64,
    n: u64,
    c: u64,
    x_c: u64,
) -> Result<BruteForceLotRisks> {
    const OP: &str = "brute_force_lot_risks";
    if lot_size > MAX_ENUMERATION_LOT {
        return Err(Error::TooLarge(format!(
            "lot size {lot_size} exceeds the enumeration bound {MAX_ENUMERATION_LOT}"
        )));
    }
    check_lot_scenario(OP, lot_size, n, c, x_c)?;
    let joint = BivariateBetaBinomial::new(n, lot_size - n, prior);
    let mut consumer = 0.0;
    let mut producer = 0.0;
    let mut p_conform_given_y = Vec::with_capacity(n as usize + 1);
    for y in 0..=n {
        let mut row = 0.0;
        let mut row_conforming = 0.0;
        for rest in 0..=(lot_size - n) {
            let w = joint.pmf(y as i64, rest as i64);
            let conforming = y + rest <= x_c;
            let accepted = y <= c;
            row += w;
            if conforming {
                row_conforming += w;
            }
            match (conforming, accepted) {
                (false, true) => consumer += w,
                (true, false) => producer += w,
                _ => {}
            }
        }
        p_conform_given_y.push(row_conforming / row);
    }
    Ok(BruteForceLotRisks {
        consumer,
        producer,
        p_conform_given_y,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McRisks {
    pub consumer: McEstimate,
    pub producer: McEstimate,
}

/// Runs `trial` over all partitions and sums (consumer, producer) hits.
fn run_partitioned<F>(cfg: McConfig, trial: F) -> Result<McRisks>
where
    F: Fn(&mut ChaCha20Rng) -> Result<(bool, bool)> + Sync,
{
    let partitions = cfg.trials.div_ceil(PARTITION_TRIALS);
    let (consumer, producer) = (0..partitions)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i);
            let count = PARTITION_TRIALS.min(cfg.trials - i * PARTITION_TRIALS);
            let mut hits = (0u64, 0u64);
            for _ in 0..count {
                let (con, pro) = trial(&mut rng)?;
                hits.0 += u64::from(con);
                hits.1 += u64::from(pro);
            }
            Ok(hits)
        })
        .try_reduce(|| (0, 0), |x, y| Ok((x.0 + y.0, x.1 + y.1)))?;
    Ok(McRisks {
        consumer: McEstimate::from_hits(consumer, cfg.trials),
        producer: McEstimate::from_hits(producer, cfg.trials),
    })
}

fn draw_proportion(prior: BetaParams, rng: &mut ChaCha20Rng) -> Result<f64> {
    let u: f64 = rng.sample(Open01);
    prior.quantile(u)
}

fn draw_binomial(trials: u64, p: f64, rng: &mut ChaCha20Rng) -> Result<u64> {
    if trials == 0 {
        return Ok(0);
    }
    let dist =
        Binomial::new(trials, p).map_err(|e| Error::domain("mc", format!("binomial({trials}, {p}): {e}")))?;
    Ok(dist.sample(rng))
}

/// Monte Carlo estimate of the lot global risks.
///
/// Per trial: π ~ BETA(a, b) by inversion, then the sample count Y ~ Bi(n, π)
/// and the independent remainder X − Y ~ Bi(N − n, π).
pub fn mc_lot_risks(
    prior: BetaParams,
    lot_size: u64,
    n: u64,
    c: u64,
    x_c: u64,
    cfg: McConfig,
) -> Result<McRisks> {
    check_lot_scenario("mc_lot_risks", lot_size, n, c, x_c)?;
    McConfig::new(cfg.trials, cfg.seed)?;
    run_partitioned(cfg, |rng| {
        let p = draw_proportion(prior, rng)?;
        let y = draw_binomial(n, p, rng)?;
        let x = y + draw_binomial(lot_size - n, p, rng)?;
        Ok((x > x_c && y <= c, x <= x_c && y > c))
    })
}

/// Monte Carlo estimate of the process global risks: π ~ BETA(a, b), Y ~ Bi(n, π).
pub fn mc_process_risks(prior: BetaParams, n: u64, c: u64, x_c: f64, cfg: McConfig) -> Result<McRisks> {
    const OP: &str = "mc_process_risks";
    if c > n {
        return Err(Error::domain(
            OP,
            format!("acceptance number c={c} exceeds sample size n={n}"),
        ));
    }
    if !(0.0..=1.0).contains(&x_c) {
        return Err(Error::domain(
            OP,
            format!("tolerance limit must lie in [0, 1], got {x_c}"),
        ));
    }
    McConfig::new(cfg.trials, cfg.seed)?;
    run_partitioned(cfg, |rng| {
        let p = draw_proportion(prior, rng)?;
        let y = draw_binomial(n, p, rng)?;
        Ok((p > x_c && y <= c, p <= x_c && y > c))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformity::lot_global_risks;

    fn beta(a: f64, b: f64) -> BetaParams {
        BetaParams::new(a, b).unwrap()
    }

    #[test]
    fn brute_force_small_example() {
        let u = beta(1.0, 1.0);
        let bf = brute_force_lot_risks(u, 4, 2, 0, 1).unwrap();
        let g = lot_global_risks(u, 4, 2, 0, 1).unwrap();
        assert!((bf.consumer - g.consumer).abs() < 1e-12);
        assert!((bf.producer - g.producer).abs() < 1e-12);
        assert_eq!(bf.p_conform_given_y.len(), 3);
    }

    #[test]
    fn brute_force_census() {
        let bf = brute_force_lot_risks(beta(2.0, 5.0), 9, 9, 3, 3).unwrap();
        assert_eq!((bf.consumer, bf.producer), (0.0, 0.0));
    }

    #[test]
    fn brute_force_bounds() {
        assert!(matches!(
            brute_force_lot_risks(beta(1.0, 1.0), 21, 3, 0, 1),
            Err(Error::TooLarge(_))
        ));
        assert!(brute_force_lot_risks(beta(1.0, 1.0), 10, 3, 4, 1).is_err());
    }

    #[test]
    fn mc_is_deterministic() {
        let cfg = McConfig::new(1, 42).unwrap();
        let a = mc_lot_risks(beta(1.0, 1.0), 4, 2, 0, 1, cfg).unwrap();
        let b = mc_lot_risks(beta(1.0, 1.0), 4, 2, 0, 1, cfg).unwrap();
        assert_eq!(a, b);
        let cfg = McConfig::new(200_000, 7).unwrap();
        let a = mc_process_risks(beta(0.57, 37.67), 80, 2, 0.01, cfg).unwrap();
        let b = mc_process_risks(beta(0.57, 37.67), 80, 2, 0.01, cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mc_degenerate_cases() {
        let cfg = McConfig::new(50_000, 3).unwrap();
        let r = mc_process_risks(beta(2.0, 5.0), 20, 3, 1.0, cfg).unwrap();
        assert_eq!(r.consumer.estimate, 0.0);
        let r = mc_process_risks(beta(2.0, 5.0), 20, 20, 0.3, cfg).unwrap();
        assert_eq!(r.producer.estimate, 0.0);
        assert!(McConfig::new(0, 1).is_err());
    }

    #[test]
    fn z_score_handles_zero_error() {
        let e = McEstimate::from_hits(0, 1_000_000);
        assert_eq!(e.std_error, 0.0);
        assert!(e.agrees_with(1e-8, 4.0));
        assert!(!e.agrees_with(1e-3, 4.0));
        assert!(e.agrees_with(0.0, 4.0));
    }
}
