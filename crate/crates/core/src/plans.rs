//! Single sampling plans for normal inspection, general inspection level II,
//! at lot size 1200, and the AQL-to-tolerance-limit rounding rule.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// The only lot size the embedded plan table covers.
pub const SUPPORTED_LOT_SIZE: u64 = 1200;

/// An AQL percentage held exactly, in thousandths of a percent.
///
/// `Aql::from_str("0.150")` is 150 units; converting to a tolerance limit
/// uses integer arithmetic so table values never misround.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Aql(u32);

impl Aql {
    pub const SCALE: u32 = 1000;

    pub const fn from_milli_percent(units: u32) -> Self {
        Aql(units)
    }

    pub fn milli_percent(self) -> u32 {
        self.0
    }

    pub fn percent(self) -> f64 {
        f64::from(self.0) / f64::from(Self::SCALE)
    }

    /// Proportion nonconforming, AQL / 100.
    pub fn proportion(self) -> f64 {
        self.percent() / 100.0
    }
}

impl fmt::Display for Aql {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:03}", self.0 / Self::SCALE, self.0 % Self::SCALE)
    }
}

impl Serialize for Aql {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for Aql {
    type Err = Error;

    /// Parses a plain decimal percentage with at most three decimals.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::domain("Aql::from_str", format!("not a decimal percentage: {s:?}"));
        let s = s.trim();
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let frac_trimmed = frac.trim_end_matches('0');
        if frac_trimmed.len() > 3 {
            return Err(Error::domain(
                "Aql::from_str",
                format!("{s:?} has more than three significant decimals"),
            ));
        }
        let int_units: u32 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let frac_units: u32 = format!("{frac_trimmed:0<3}").parse().map_err(|_| bad())?;
        int_units
            .checked_mul(Self::SCALE)
            .and_then(|v| v.checked_add(frac_units))
            .map(Aql)
            .ok_or_else(bad)
    }
}

/// A single sampling plan (n, c) with its row index and AQL.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SamplingPlan {
    pub index: u32,
    pub aql: Aql,
    pub n: u64,
    pub c: u64,
}

macro_rules! plan {
    ($i:expr, $aql:expr, $n:expr, $c:expr) => {
        SamplingPlan {
            index: $i,
            aql: Aql::from_milli_percent($aql),
            n: $n,
            c: $c,
        }
    };
}

static PLANS: [SamplingPlan; 19] = [
    plan!(1, 10, 1200, 0),
    plan!(2, 15, 800, 0),
    plan!(3, 25, 500, 0),
    plan!(4, 40, 315, 0),
    plan!(5, 65, 200, 0),
    plan!(6, 100, 125, 0),
    plan!(7, 150, 80, 0),
    plan!(8, 250, 50, 0),
    plan!(9, 400, 125, 1),
    plan!(10, 650, 80, 1),
    plan!(11, 1_000, 80, 2),
    plan!(12, 1_500, 80, 3),
    plan!(13, 2_500, 80, 5),
    plan!(14, 4_000, 80, 7),
    plan!(15, 6_500, 80, 10),
    plan!(16, 10_000, 80, 14),
    plan!(17, 15_000, 80, 21),
    plan!(18, 25_000, 50, 21),
    plan!(19, 40_000, 32, 21),
];

/// The 19 plans for lot size 1200 (normal inspection, general level II).
pub fn plan_table() -> &'static [SamplingPlan] {
    &PLANS
}

/// The plan table for `lot_size`; only 1200 is embedded.
pub fn plan_table_for(lot_size: u64) -> Result<&'static [SamplingPlan]> {
    if lot_size == SUPPORTED_LOT_SIZE {
        Ok(&PLANS)
    } else {
        Err(Error::Unsupported(format!(
            "unsupported lot size {lot_size}: plans are embedded for N = {SUPPORTED_LOT_SIZE} only"
        )))
    }
}

/// Plan by 1-based row index.
pub fn plan_by_index(index: u32) -> Result<SamplingPlan> {
    PLANS
        .iter()
        .find(|p| p.index == index)
        .copied()
        .ok_or_else(|| Error::domain("plan_by_index", format!("no plan with index {index} (1..=19)")))
}

/// Plan by exact AQL.
pub fn plan_by_aql(aql: Aql) -> Result<SamplingPlan> {
    PLANS
        .iter()
        .find(|p| p.aql == aql)
        .copied()
        .ok_or_else(|| Error::domain("plan_by_aql", format!("no plan with AQL {aql}")))
}

/// Upper tolerance limit x_C = ⌊AQL/100 · N⌋ for the count of nonconforming units.
pub fn tolerance_limit(aql: Aql, lot_size: u64) -> Result<u64> {
    if aql.0 == 0 {
        return Err(Error::domain("tolerance_limit", "AQL must be > 0"));
    }
    if lot_size == 0 {
        return Err(Error::domain("tolerance_limit", "lot size must be >= 1"));
    }
    let units = u128::from(aql.0) * u128::from(lot_size);
    Ok((units / (100 * u128::from(Aql::SCALE))) as u64)
}

impl SamplingPlan {
    pub fn tolerance_limit(&self, lot_size: u64) -> Result<u64> {
        tolerance_limit(self.aql, lot_size)
    }
}
