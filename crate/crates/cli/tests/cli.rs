use std::process::Command;

use attrconform_cli::args::Cli;
use attrconform_cli::{dispatch, exit, run};
use clap::Parser;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_attrconform"))
}

fn run_args(args: &[&str]) -> (i32, String, String) {
    let cli = Cli::try_parse_from(std::iter::once("attrconform").chain(args.iter().copied())).unwrap();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&cli, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| {
            let mut parts = l.split_whitespace();
            (parts.next() == Some(key)).then(|| parts.next().unwrap_or(""))
        })
        .unwrap_or_else(|| panic!("no field {key} in\n{text}"))
}

#[test]
fn plans_csv_contract() {
    let (code, out, _) = run_args(&["plans", "--lot-size", "1200", "--format", "csv"]);
    assert_eq!(code, exit::OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "index,aql,x_C,n,c");
    assert_eq!(lines.len(), 20);
    assert_eq!(lines[4], "4,0.040,0,315,0");
    assert_eq!(lines[19], "19,40.000,480,32,21");
    assert!(out.ends_with('\n'));
}

#[test]
fn plans_rejects_other_lot_sizes() {
    let (code, _, err) = run_args(&["plans", "--lot-size", "500"]);
    assert_eq!(code, exit::DOMAIN);
    assert!(err.contains("unsupported lot size"), "{err}");
}

#[test]
fn curves_have_one_row_per_plan() {
    let (code, out, _) = run_args(&["curves", "--prior", "1,1"]);
    assert_eq!(code, exit::OK);
    let data: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(
        data[0],
        "plan_index,aql,n,c,x_C,p_conform_y0,r_con_at_c,r_pro_at_c_plus_1,r_con_global,r_pro_global"
    );
    assert_eq!(data.len(), 20);
    for row in &data[1..] {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), 10);
        for v in &cells[5..] {
            let p: f64 = v.parse().unwrap();
            assert!((0.0..=1.0).contains(&p), "{row}");
            assert!(v.trim_start_matches("0.").len() <= 17, "{v}");
        }
    }
}

#[test]
fn curves_are_deterministic_and_sweepable() {
    let a = run_args(&["curves", "--preset", "4", "--process"]);
    let b = run_args(&["curves", "--preset", "4", "--process"]);
    assert_eq!(a, b);
    let (code, out, _) = run_args(&["curves", "--sweep-priors"]);
    assert_eq!(code, exit::OK);
    let data: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(data[0].starts_with("prior_row,a,b,plan_index"));
    assert_eq!(data.len(), 1 + 8 * 19);
    let (_, out, _) = run_args(&["curves", "--prior", "1,1", "--y", "3"]);
    assert!(out.contains(",p_conform_y3,"));
}

#[test]
fn risk_report_branches() {
    let (code, out, _) = run_args(&["risk", "--preset", "4", "--plan-index", "11"]);
    assert_eq!(code, exit::OK);
    assert_eq!(field(&out, "specific_producer_risk"), "-");
    assert_eq!(field(&out, "global_consumer_risk"), "0.260806133606");
    let residual: f64 = field(&out, "identity_residual").parse().unwrap();
    assert!(residual.abs() <= 1e-10);

    let (_, out, _) = run_args(&["risk", "--preset", "4", "--plan-index", "11", "--y", "3"]);
    assert_eq!(field(&out, "specific_consumer_risk"), "-");
    assert_ne!(field(&out, "specific_producer_risk"), "-");
}

#[test]
fn risk_census_has_no_global_risk() {
    let (code, out, _) = run_args(&[
        "risk",
        "--prior",
        "2,5",
        "--lot-size",
        "30",
        "--n",
        "30",
        "--c",
        "4",
        "--x-c",
        "4",
    ]);
    assert_eq!(code, exit::OK);
    assert_eq!(field(&out, "global_consumer_risk"), "0");
    assert_eq!(field(&out, "global_producer_risk"), "0");
}

#[test]
fn risk_json_and_process_target() {
    let (code, out, _) = run_args(&[
        "risk",
        "--prior",
        "0.57,37.67",
        "--process",
        "--n",
        "315",
        "--c",
        "0",
        "--x-c",
        "0.0004",
        "--y",
        "0",
        "--format",
        "json",
    ]);
    assert_eq!(code, exit::OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["target"], "process");
    assert!(v["lot_size"].is_null());
    let r = v["specific_consumer_risk"].as_f64().unwrap();
    assert!((r - 0.650380236672886946).abs() < 1e-12);
}

#[test]
fn elicit_examples() {
    let (code, out, _) = run_args(&[
        "elicit",
        "--mean",
        "0.015",
        "--quantile",
        "0.090",
        "--level",
        "0.99",
    ]);
    assert_eq!(code, exit::OK);
    let a: f64 = field(&out, "a").parse().unwrap();
    let b: f64 = field(&out, "b").parse().unwrap();
    assert!((a - 0.57).abs() < 0.01 && (b - 37.67).abs() < 0.1, "{a} {b}");

    let (_, out, _) = run_args(&["elicit", "--fixed-a", "1", "--mean", "0.01"]);
    assert_eq!(field(&out, "b"), "99");

    let (code, _, err) = run_args(&["elicit", "--mean", "0.5", "--quantile", "0.4"]);
    assert_eq!(code, exit::DOMAIN);
    assert!(!err.is_empty());
    let (code, _, _) = run_args(&["elicit", "--mean", "0.5"]);
    assert_eq!(code, exit::DOMAIN);
}

#[test]
fn verify_small_lot_is_exact() {
    let (code, out, _) = run_args(&[
        "verify",
        "--prior",
        "1,1",
        "--lot-size",
        "4",
        "--n",
        "2",
        "--c",
        "0",
        "--x-c",
        "1",
    ]);
    assert_eq!(code, exit::OK);
    assert_eq!(out.lines().last().unwrap(), "status              EXACT MATCH");
}

#[test]
fn verify_negative_controls_fail() {
    let (code, out, _) = run_args(&[
        "verify",
        "--prior",
        "1,1",
        "--lot-size",
        "12",
        "--n",
        "5",
        "--c",
        "1",
        "--x-c",
        "3",
        "--oracle-x-c",
        "4",
    ]);
    assert_eq!(code, exit::VERIFICATION);
    assert!(out.contains("MISMATCH"));
    let (code, out, _) = run_args(&[
        "verify",
        "--preset",
        "4",
        "--plan-index",
        "11",
        "--trials",
        "100000",
        "--oracle-x-c",
        "10",
    ]);
    assert_eq!(code, exit::VERIFICATION);
    assert!(out.contains("DISAGREE"));
}

#[test]
fn verify_monte_carlo_is_reproducible() {
    let args = [
        "verify",
        "--preset",
        "1",
        "--plan-index",
        "16",
        "--trials",
        "100000",
        "--seed",
        "5",
    ];
    let a = run_args(&args);
    let b = run_args(&args);
    assert_eq!(a.0, exit::OK, "{}", a.1);
    assert_eq!(a, b);
    assert_eq!(field(&a.1, "seed"), "5");
}

#[test]
fn config_file_defaults_and_override() {
    let dir = std::env::temp_dir().join(format!("attrconform-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("defaults.conf");
    std::fs::write(&cfg, "# test defaults\npreset = 4\nlot_size = 1200\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let (code, out, _) = run_args(&["--config", cfg, "risk", "--plan-index", "11"]);
    assert_eq!(code, exit::OK);
    assert_eq!(field(&out, "a"), "0.57");
    let (_, out, _) = run_args(&["--config", cfg, "risk", "--plan-index", "11", "--prior", "1,1"]);
    assert_eq!(field(&out, "a"), "1");

    std::fs::write(dir.join("bad.conf"), "colour = blue\n").unwrap();
    let (code, _, _) = run_args(&["--config", dir.join("bad.conf").to_str().unwrap(), "plans"]);
    assert_eq!(code, exit::USAGE);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("attrconform-plans-{}.csv", std::process::id()));
    let (code, out, _) = run_args(&["plans", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(code, exit::OK);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("index,aql,x_C,n,c\n"));
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn usage_errors() {
    for args in [
        vec!["risk", "--plan-index", "3"],
        vec!["risk", "--prior", "1,1"],
        vec!["risk", "--prior", "1,1", "--n", "10", "--c", "1"],
        vec!["curves", "--prior", "1,1", "--y", "40"],
    ] {
        let (code, _, err) = run_args(&args);
        assert_eq!(code, exit::USAGE, "{args:?}: {err}");
    }
    let (code, _, _) = run_args(&[
        "risk",
        "--prior",
        "1,1",
        "--n",
        "10",
        "--c",
        "11",
        "--lot-size",
        "20",
        "--x-c",
        "2",
    ]);
    assert_eq!(code, exit::DOMAIN);
    assert!(Cli::try_parse_from(["attrconform", "risk", "--prior", "1,1", "--preset", "2"]).is_err());
}

#[test]
fn binary_exit_codes() {
    let status = bin().args(["plans"]).output().unwrap();
    assert_eq!(status.status.code(), Some(exit::OK));
    assert!(String::from_utf8_lossy(&status.stdout).lines().count() == 20);
    assert_eq!(
        bin().arg("bogus").output().unwrap().status.code(),
        Some(exit::USAGE)
    );
    assert_eq!(
        bin()
            .args(["risk", "--prior", "x"])
            .output()
            .unwrap()
            .status
            .code(),
        Some(exit::USAGE)
    );
    assert_eq!(
        bin()
            .args(["plans", "--lot-size", "500"])
            .output()
            .unwrap()
            .status
            .code(),
        Some(exit::DOMAIN)
    );
    assert_eq!(
        bin().arg("--help").output().unwrap().status.code(),
        Some(exit::OK)
    );
}

#[test]
fn dispatch_returns_text_without_writing() {
    let cli = Cli::try_parse_from(["attrconform", "plans", "--format", "csv"]).unwrap();
    let outcome = dispatch(&cli).unwrap();
    assert!(outcome.verified);
    assert_eq!(outcome.text.lines().count(), 20);
}
