//! Subcommand implementations. Each returns its rendered output; nothing
//! here touches stdout.

use attrconform::conformity::{lot_global_risks, process_global_risks};
use attrconform::oracle::{
    brute_force_lot_risks, mc_lot_risks, mc_process_risks, McConfig, McEstimate, MAX_ENUMERATION_LOT,
    RNG_ALGORITHM,
};
use attrconform::plans::{plan_by_aql, plan_by_index, plan_table_for, tolerance_limit, SUPPORTED_LOT_SIZE};
use attrconform::prior::{elicit, preset, preset_table, ElicitationSpec};
use attrconform::{
    Aql, AssessmentScenario, BetaParams, GlobalRisks, SamplingPlan, SpecificRisk, ToleranceSpec,
};
use rayon::prelude::*;

use crate::args::{CurvesArgs, ElicitArgs, Format, PlanArgs, PlansArgs, PriorArgs, RiskArgs, VerifyArgs};
use crate::config::Config;
use crate::error::CliError;
use crate::output::{Cell, Record, Table};

pub const DEFAULT_TRIALS: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 1;
/// Monte Carlo agreement band, in standard errors.
pub const MC_SIGMAS: f64 = 4.0;
/// Enumeration agreement tolerance, absolute.
pub const EXACT_TOLERANCE: f64 = 1e-10;

pub const CURVE_COLUMNS: [&str; 10] = [
    "plan_index",
    "aql",
    "n",
    "c",
    "x_C",
    "p_conform_y0",
    "r_con_at_c",
    "r_pro_at_c_plus_1",
    "r_con_global",
    "r_pro_global",
];

/// Rendered command output, and whether a verification passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub verified: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, verified: true }
    }
}

fn resolve_prior(flags: &PriorArgs, cfg: &Config) -> Result<BetaParams, CliError> {
    let from_pair = |(a, b): (f64, f64)| BetaParams::new(a, b).map_err(CliError::from);
    let from_row = |row: usize| Ok::<_, CliError>(preset(row)?.params());
    match (flags.prior, flags.preset) {
        (Some(p), _) => from_pair(p),
        (None, Some(row)) => from_row(row),
        (None, None) => match (cfg.prior, cfg.preset) {
            (Some(p), _) => from_pair(p),
            (None, Some(row)) => from_row(row),
            (None, None) => Err(CliError::usage("no prior given; use --prior a,b or --preset ROW")),
        },
    }
}

fn lot_size(flag: Option<u64>, cfg: &Config) -> u64 {
    flag.or(cfg.lot_size).unwrap_or(SUPPORTED_LOT_SIZE)
}

fn format_or(flag: Option<Format>, cfg: &Config, default: Format) -> Format {
    flag.or(cfg.format).unwrap_or(default)
}

/// The plan and, when it comes from the table, its AQL.
fn resolve_plan(flags: &PlanArgs, lot_size: u64, process: bool) -> Result<(u64, u64, Option<Aql>), CliError> {
    let table_plan = |p: SamplingPlan| -> Result<_, CliError> {
        if !process {
            plan_table_for(lot_size)?;
        }
        Ok((p.n, p.c, Some(p.aql)))
    };
    if let Some(i) = flags.plan_index {
        return table_plan(plan_by_index(i)?);
    }
    match (flags.n, flags.c, flags.aql) {
        (Some(n), Some(c), aql) => Ok((n, c, aql)),
        (None, None, Some(aql)) => table_plan(plan_by_aql(aql)?),
        _ => Err(CliError::usage(
            "no plan given; use --plan-index, --aql, or --n with --c",
        )),
    }
}

fn resolve_tolerance(
    x_c: Option<&str>,
    aql: Option<Aql>,
    lot_size: u64,
    process: bool,
) -> Result<ToleranceSpec, CliError> {
    if process {
        let x_c = match x_c {
            Some(s) => s
                .parse::<f64>()
                .map_err(|e| CliError::usage(format!("--x-c {s:?}: {e}")))?,
            None => aql
                .ok_or_else(|| CliError::usage("--x-c is required for a plan outside the table"))?
                .proportion(),
        };
        Ok(ToleranceSpec::Process { x_c })
    } else {
        let x_c = match x_c {
            Some(s) => s
                .parse::<u64>()
                .map_err(|e| CliError::usage(format!("--x-c {s:?} must be a count: {e}")))?,
            None => tolerance_limit(
                aql.ok_or_else(|| CliError::usage("--x-c is required for a plan outside the table"))?,
                lot_size,
            )?,
        };
        Ok(ToleranceSpec::Lot { lot_size, x_c })
    }
}

fn tolerance_cell(t: ToleranceSpec) -> Cell {
    match t {
        ToleranceSpec::Process { x_c } => Cell::Num(x_c),
        ToleranceSpec::Lot { x_c, .. } => Cell::Int(x_c),
    }
}

pub fn plans(args: &PlansArgs, cfg: &Config) -> Result<Outcome, CliError> {
    let lot_size = lot_size(args.lot_size, cfg);
    let mut table = Table::new(&["index", "aql", "x_C", "n", "c"]);
    for p in plan_table_for(lot_size)? {
        table.push(vec![
            Cell::Int(p.index.into()),
            Cell::Text(p.aql.to_string()),
            Cell::Int(p.tolerance_limit(lot_size)?),
            Cell::Int(p.n),
            Cell::Int(p.c),
        ]);
    }
    Ok(Outcome::ok(table.render(format_or(
        args.output.format,
        cfg,
        Format::Text,
    ))))
}

/// One row of the curve dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub plan: SamplingPlan,
    pub tolerance: ToleranceSpec,
    pub p_conform: f64,
    pub r_con_at_c: f64,
    pub r_pro_at_c_plus_1: f64,
    pub global: GlobalRisks,
}

/// Curve rows for every embedded plan under `prior`, evaluating the
/// conformance-probability column at `y`.
pub fn curve_rows(
    prior: BetaParams,
    lot_size: u64,
    process: bool,
    y: u64,
) -> Result<Vec<CurveRow>, CliError> {
    let plans = plan_table_for(lot_size)?;
    if let Some(p) = plans.iter().find(|p| y > p.n) {
        return Err(CliError::usage(format!(
            "--y {y} exceeds the sample size n={} of plan {}",
            p.n, p.index
        )));
    }
    plans
        .par_iter()
        .map(|&plan| {
            let tolerance = if process {
                ToleranceSpec::Process {
                    x_c: plan.aql.proportion(),
                }
            } else {
                ToleranceSpec::Lot {
                    lot_size,
                    x_c: plan.tolerance_limit(lot_size)?,
                }
            };
            let s = AssessmentScenario::new(prior, plan.n, plan.c, tolerance)?;
            let at_c = s.specific_risk(plan.c)?;
            let at_c1 = s.specific_risk(plan.c + 1)?;
            let (SpecificRisk::Consumer(r_con_at_c), SpecificRisk::Producer(r_pro_at_c_plus_1)) =
                (at_c, at_c1)
            else {
                unreachable!("y = c accepts and y = c + 1 rejects");
            };
            Ok(CurveRow {
                plan,
                tolerance,
                p_conform: s.conformance_prob(y)?,
                r_con_at_c,
                r_pro_at_c_plus_1,
                global: s.global_risks()?,
            })
        })
        .collect()
}

pub fn curves(args: &CurvesArgs, cfg: &Config) -> Result<Outcome, CliError> {
    let lot_size = lot_size(args.lot_size, cfg);
    let y = args.y.unwrap_or(0);
    let priors: Vec<(Option<usize>, BetaParams)> = if args.sweep_priors {
        preset_table()
            .iter()
            .enumerate()
            .map(|(i, p)| (Some(i + 1), p.params()))
            .collect()
    } else {
        vec![(args.prior.preset.or(cfg.preset), resolve_prior(&args.prior, cfg)?)]
    };

    let mut header: Vec<String> = CURVE_COLUMNS.iter().map(|s| s.to_string()).collect();
    header[5] = format!("p_conform_y{y}");
    if args.sweep_priors {
        header.splice(0..0, ["prior_row".to_string(), "a".into(), "b".into()]);
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut table = Table::new(&header);
    let target = if args.process {
        "process proportion"
    } else {
        "lot count"
    };
    table.comments.push(format!("target: {target}; N = {lot_size}"));
    if args.sweep_priors {
        table
            .comments
            .push(format!("priors: all {} built-in presets", preset_table().len()));
    } else {
        let (_, p) = priors[0];
        table.comments.push(format!("prior: BETA({}, {})", p.a(), p.b()));
    }

    for (row, prior) in priors {
        for r in curve_rows(prior, lot_size, args.process, y)? {
            let mut cells = Vec::with_capacity(header.len());
            if args.sweep_priors {
                cells.extend([
                    Cell::Int(row.unwrap_or(0) as u64),
                    Cell::Num(prior.a()),
                    Cell::Num(prior.b()),
                ]);
            }
            cells.extend([
                Cell::Int(r.plan.index.into()),
                Cell::Text(r.plan.aql.to_string()),
                Cell::Int(r.plan.n),
                Cell::Int(r.plan.c),
                tolerance_cell(r.tolerance),
                Cell::Num(r.p_conform),
                Cell::Num(r.r_con_at_c),
                Cell::Num(r.r_pro_at_c_plus_1),
                Cell::Num(r.global.consumer),
                Cell::Num(r.global.producer),
            ]);
            table.push(cells);
        }
    }
    Ok(Outcome::ok(table.render(format_or(
        args.output.format,
        cfg,
        Format::Csv,
    ))))
}

pub fn risk(args: &RiskArgs, cfg: &Config) -> Result<Outcome, CliError> {
    let prior = resolve_prior(&args.prior, cfg)?;
    let lot_size = lot_size(args.lot_size, cfg);
    let (n, c, aql) = resolve_plan(&args.plan, lot_size, args.process)?;
    let tolerance = resolve_tolerance(args.x_c.as_deref(), aql, lot_size, args.process)?;
    let scenario = AssessmentScenario::new(prior, n, c, tolerance)?;
    let y = args.y.unwrap_or(c);
    let r = scenario.report(y)?;

    let mut rec = Record::default();
    rec.field("a", prior.a());
    rec.field("b", prior.b());
    match tolerance {
        ToleranceSpec::Lot { lot_size, .. } => {
            rec.field("target", "lot");
            rec.field("lot_size", lot_size);
        }
        ToleranceSpec::Process { .. } => {
            rec.field("target", "process");
            rec.field("lot_size", Cell::Missing);
        }
    }
    rec.field("n", n);
    rec.field("c", c);
    rec.field("x_C", tolerance_cell(tolerance));
    rec.field("y", y);
    rec.field("p_conform_given_y", r.p_conform_given_y);
    rec.field("specific_consumer_risk", r.specific_consumer_risk);
    rec.field("specific_producer_risk", r.specific_producer_risk);
    rec.field("global_consumer_risk", r.global_consumer_risk);
    rec.field("global_producer_risk", r.global_producer_risk);
    rec.field("accept_prob", r.accept_prob);
    rec.field("prior_conform_prob", r.prior_conform_prob);
    rec.field("identity_residual", r.identity_residual);
    Ok(Outcome::ok(rec.render(format_or(
        args.output.format,
        cfg,
        Format::Text,
    ))))
}

pub fn elicit_cmd(args: &ElicitArgs, cfg: &Config) -> Result<Outcome, CliError> {
    let spec = ElicitationSpec {
        mean: args.mean,
        quantile: args.quantile.map(|q| (args.level, q)),
        fixed_a: args.fixed_a,
        ..Default::default()
    };
    let fitted = elicit(&spec)?;
    let q = fitted.quantile(args.level)?;
    let mut rec = Record::default();
    rec.field("a", fitted.a());
    rec.field("b", fitted.b());
    rec.field("mean", fitted.mean());
    rec.field("level", args.level);
    rec.field("quantile", q);
    rec.field("mean_residual", args.mean.map(|m| fitted.mean() - m));
    rec.field("quantile_residual", args.quantile.map(|p| q - p));
    Ok(Outcome::ok(rec.render(format_or(
        args.output.format,
        cfg,
        Format::Text,
    ))))
}

fn mc_fields(rec: &mut Record, side: &str, analytic: f64, est: &McEstimate) -> bool {
    rec.field(&format!("analytic_{side}"), analytic);
    rec.field(&format!("oracle_{side}"), est.estimate);
    rec.field(&format!("{side}_std_error"), est.std_error);
    rec.field(&format!("{side}_z"), est.z_score(analytic));
    est.agrees_with(analytic, MC_SIGMAS)
}

pub fn verify(args: &VerifyArgs, cfg: &Config) -> Result<Outcome, CliError> {
    let prior = resolve_prior(&args.prior, cfg)?;
    let lot_size = lot_size(args.lot_size, cfg);
    let (n, c, aql) = resolve_plan(&args.plan, lot_size, args.process)?;
    let tolerance = resolve_tolerance(args.x_c.as_deref(), aql, lot_size, args.process)?;
    let oracle_tolerance = match &args.oracle_x_c {
        Some(s) => resolve_tolerance(Some(s), aql, lot_size, args.process)?,
        None => tolerance,
    };
    AssessmentScenario::new(prior, n, c, tolerance)?;
    let trials = args.trials.or(cfg.trials).unwrap_or(DEFAULT_TRIALS);
    let seed = args.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);

    let mut rec = Record::default();
    if oracle_tolerance != tolerance {
        rec.comments
            .push("oracle tolerance limit differs from the analytic one (negative control)".into());
    }
    rec.field("a", prior.a());
    rec.field("b", prior.b());
    rec.field("n", n);
    rec.field("c", c);
    rec.field("x_C", tolerance_cell(tolerance));
    rec.field("oracle_x_C", tolerance_cell(oracle_tolerance));

    let verified = match (tolerance, oracle_tolerance) {
        (ToleranceSpec::Lot { lot_size, x_c }, ToleranceSpec::Lot { x_c: oracle_x_c, .. })
            if lot_size <= MAX_ENUMERATION_LOT =>
        {
            let exact = lot_global_risks(prior, lot_size, n, c, x_c)?;
            let bf = brute_force_lot_risks(prior, lot_size, n, c, oracle_x_c)?;
            let mut worst = (exact.consumer - bf.consumer)
                .abs()
                .max((exact.producer - bf.producer).abs());
            for (y, p) in bf.p_conform_given_y.iter().enumerate() {
                let s = AssessmentScenario::new(prior, n, c, tolerance)?;
                worst = worst.max((s.conformance_prob(y as u64)? - p).abs());
            }
            let ok = worst <= EXACT_TOLERANCE;
            rec.comments.insert(0, "method: exhaustive enumeration".into());
            rec.field("lot_size", lot_size);
            rec.field("analytic_consumer", exact.consumer);
            rec.field("oracle_consumer", bf.consumer);
            rec.field("analytic_producer", exact.producer);
            rec.field("oracle_producer", bf.producer);
            rec.field("max_abs_difference", worst);
            rec.field("status", if ok { "EXACT MATCH" } else { "MISMATCH" });
            ok
        }
        _ => {
            let mc_cfg = McConfig::new(trials, seed)?;
            let (exact, mc) = match (tolerance, oracle_tolerance) {
                (ToleranceSpec::Lot { lot_size, x_c }, ToleranceSpec::Lot { x_c: ox, .. }) => {
                    rec.field("lot_size", lot_size);
                    (
                        lot_global_risks(prior, lot_size, n, c, x_c)?,
                        mc_lot_risks(prior, lot_size, n, c, ox, mc_cfg)?,
                    )
                }
                (ToleranceSpec::Process { x_c }, ToleranceSpec::Process { x_c: ox }) => {
                    rec.field("lot_size", Cell::Missing);
                    (
                        process_global_risks(prior, n, c, x_c)?,
                        mc_process_risks(prior, n, c, ox, mc_cfg)?,
                    )
                }
                _ => unreachable!("both tolerances share one target"),
            };
            rec.comments
                .insert(0, format!("method: Monte Carlo, {RNG_ALGORITHM}"));
            rec.field("trials", trials);
            rec.field("seed", seed);
            let con_ok = mc_fields(&mut rec, "consumer", exact.consumer, &mc.consumer);
            let pro_ok = mc_fields(&mut rec, "producer", exact.producer, &mc.producer);
            let ok = con_ok && pro_ok;
            rec.field("status", if ok { "AGREE" } else { "DISAGREE" });
            ok
        }
    };
    Ok(Outcome {
        text: rec.render(format_or(args.output.format, cfg, Format::Text)),
        verified,
    })
}
