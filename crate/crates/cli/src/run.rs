//! The four commands and their artifacts.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use lie_diffuse::evolve::{evolve, EnergyReport, EvolutionProblem, Forcing};
use lie_diffuse::harmonic::Group;
use lie_diffuse::reduce::{direct_solution, extract_u, reduce_to_first_order, solve_reduced, HigherOrderProblem};
use lie_diffuse::symbol::{build_operator_symbol, chebyshev_times, OperatorSpec};
use lie_diffuse::wellposed::{classify_problem, Classification, ClassifyReport, ScanOptions};
use lie_diffuse::{SpectralField64, Symbol64};
use serde::Serialize;

use crate::config::RunConfig;
use crate::selftest::{transform_selftest, SelftestReport};
use crate::CliError;

/// Random fields used by `transform-selftest`.
pub const SELFTEST_FIELDS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Check,
    Evolve,
    Reduce,
    TransformSelftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Evolve => "evolve",
            Command::Reduce => "reduce",
            Command::TransformSelftest => "transform-selftest",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "check" => Ok(Command::Check),
            "evolve" => Ok(Command::Evolve),
            "reduce" => Ok(Command::Reduce),
            "transform-selftest" => Ok(Command::TransformSelftest),
            other => Err(CliError::Config(format!(
                "unknown command `{other}` (expected check, evolve, reduce or transform-selftest)"
            ))),
        }
    }
}

#[derive(Serialize)]
struct CheckOut<'a> {
    command: &'static str,
    group: Group,
    operator: &'a str,
    scan_two_l: u32,
    scan_times: usize,
    verified: bool,
    report: &'a ClassifyReport,
}

#[derive(Serialize)]
struct EvolveOut<'a> {
    command: &'static str,
    group: Group,
    #[serde(rename = "two_L")]
    two_l: u32,
    operator: &'a str,
    #[serde(rename = "T")]
    horizon: f64,
    steps: usize,
    verified: bool,
    classification: &'a ClassifyReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy: Option<&'a EnergyReport>,
}

#[derive(Serialize)]
struct ReduceOut<'a> {
    command: &'static str,
    group: Group,
    #[serde(rename = "two_L")]
    two_l: u32,
    time_order: usize,
    coefficients: Vec<Option<String>>,
    #[serde(rename = "T")]
    horizon: f64,
    steps: usize,
    /// Times at which the reduced solution was compared with the direct one.
    compared_times: Vec<f64>,
    /// Largest coefficient difference; absent when no direct solution exists.
    max_difference: Option<f64>,
    u_l2_norms: Vec<f64>,
    system: &'a EnergyReport,
}

#[derive(Serialize)]
struct SelftestOut<'a> {
    command: &'static str,
    #[serde(flatten)]
    report: &'a SelftestReport,
}

fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    fs::write(dir.join(name), text)?;
    Ok(())
}

fn write_csv(dir: &Path, report: &EnergyReport) -> Result<(), CliError> {
    let mut buf = Vec::new();
    report.write_csv(&mut buf)?;
    fs::write(dir.join("trajectory.csv"), buf)?;
    Ok(())
}

/// `count` evenly spaced state indices among `0..=steps`, ending at `steps`.
fn snapshot_indices(steps: usize, count: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (1..=count).map(|k| (k * steps + count / 2) / count).collect();
    idx.dedup();
    idx
}

fn write_snapshots(dir: &Path, states: &[SpectralField64], count: usize) -> Result<(), CliError> {
    if count == 0 {
        return Ok(());
    }
    let snap = dir.join("snapshots");
    fs::create_dir_all(&snap)?;
    for i in snapshot_indices(states.len() - 1, count) {
        write_json(&snap, &format!("step_{i:06}.json"), &states[i].to_json())?;
    }
    Ok(())
}

fn operator(cfg: &RunConfig) -> Result<(&OperatorSpec<f64>, &str), CliError> {
    match (&cfg.operator, &cfg.operator_text) {
        (Some(op), Some(text)) => Ok((op, text)),
        _ => Err(CliError::Config("this command needs an `operator`".into())),
    }
}

fn classify(cfg: &RunConfig, spec: &OperatorSpec<f64>) -> Result<ClassifyReport, CliError> {
    let sym = build_operator_symbol(spec, cfg.check.two_l)?;
    let mut opts = ScanOptions::new(cfg.check.two_l, cfg.horizon);
    opts.times = chebyshev_times(cfg.horizon, cfg.check.times);
    opts.x_band = cfg.check.x_band;
    opts.tail = cfg.check.tail;
    Ok(classify_problem(&sym, &opts)?)
}

fn unverified_message(report: &ClassifyReport) -> String {
    match &report.classification {
        Classification::Unverified { reason, witness } => match witness {
            Some(w) => format!(
                "unverified: {reason} (witness two_ell = {}, slot = {}, t = {}, eigenvalue = {:e})",
                w.two_ell, w.slot, w.t, w.eig
            ),
            None => format!("unverified: {reason}"),
        },
        other => format!("{other:?}"),
    }
}

/// Runs `command`, writing its artifacts under `cfg.out`. Returns a one-line
/// summary; checker failures are reported as errors after the report is
/// written, unless `allow_unverified` is set.
pub fn run_command(cfg: &RunConfig, command: Command, allow_unverified: bool) -> Result<String, CliError> {
    fs::create_dir_all(&cfg.out)?;
    match command {
        Command::Check => check(cfg, allow_unverified),
        Command::Evolve => run_evolve(cfg, allow_unverified),
        Command::Reduce => run_reduce(cfg),
        Command::TransformSelftest => selftest(cfg),
    }
}

fn check(cfg: &RunConfig, allow: bool) -> Result<String, CliError> {
    let (spec, text) = operator(cfg)?;
    let report = classify(cfg, spec)?;
    let verified = report.verified();
    write_json(
        &cfg.out,
        "report.json",
        &CheckOut {
            command: "check",
            group: cfg.group,
            operator: text,
            scan_two_l: cfg.check.two_l,
            scan_times: cfg.check.times,
            verified,
            report: &report,
        },
    )?;
    if !verified && !allow {
        return Err(CliError::Checker(unverified_message(&report)));
    }
    Ok(match &report.classification {
        Classification::CaseI { c, m, .. } => format!("check: case I (C = {c}, m = {m})"),
        Classification::CaseII { varkappa, m } => format!("check: case II (varkappa = {varkappa}, m = {m})"),
        Classification::Unverified { .. } => format!("check: {} (allowed)", unverified_message(&report)),
    })
}

fn run_evolve(cfg: &RunConfig, allow: bool) -> Result<String, CliError> {
    let (spec, text) = operator(cfg)?;
    let u0 = cfg.build_data(cfg.u0.as_ref().ok_or_else(|| CliError::Config("evolve needs `u0`".into()))?)?;
    let report = classify(cfg, spec)?;
    let verified = report.verified();
    let mut out = EvolveOut {
        command: "evolve",
        group: cfg.group,
        two_l: cfg.two_l,
        operator: text,
        horizon: cfg.horizon,
        steps: 0,
        verified,
        classification: &report,
        energy: None,
    };
    if !verified && !allow {
        write_json(&cfg.out, "report.json", &out)?;
        return Err(CliError::Checker(unverified_message(&report)));
    }
    let sym: Symbol64 = build_operator_symbol(spec, cfg.two_l)?;
    let forcing = match &cfg.forcing {
        None => Forcing::Zero,
        Some(f) => Forcing::Separable { field: vec![cfg.build_data(&f.field)?], profile: f.profile },
    };
    let problem =
        EvolutionProblem::scalar(sym, u0, cfg.horizon).with_forcing(forcing).with_norm(cfg.s, cfg.kind);
    let run = evolve(&problem, cfg.scheme, cfg.dt)?;
    out.steps = run.trajectory.states.len() - 1;
    out.energy = Some(&run.report);
    write_json(&cfg.out, "report.json", &out)?;
    write_csv(&cfg.out, &run.report)?;
    write_snapshots(&cfg.out, &run.trajectory.component(0), cfg.snapshots)?;
    let fit = &run.report.estimate;
    Ok(format!(
        "evolve: {} steps with {}, final L2 norm {:e}, C = {}, C' = {}",
        out.steps,
        run.scheme,
        run.report.l2_norms.last().copied().unwrap_or(0.0),
        fit.c,
        fit.c_prime
    ))
}

fn run_reduce(cfg: &RunConfig) -> Result<String, CliError> {
    let r = cfg.reduce.as_ref().ok_or_else(|| CliError::Config("reduce needs `time_order`".into()))?;
    let coeffs = r
        .coefficients
        .iter()
        .map(|c| c.as_ref().map(|s| build_operator_symbol(s, cfg.two_l)).transpose())
        .collect::<Result<Vec<_>, _>>()?;
    let data = r.data.iter().map(|d| cfg.build_data(d)).collect::<Result<Vec<_>, _>>()?;
    let forcing = match &cfg.forcing {
        None => Forcing::Zero,
        Some(f) => Forcing::Separable { field: vec![cfg.build_data(&f.field)?], profile: f.profile },
    };
    let problem = HigherOrderProblem { order: r.order, coeffs, data, forcing, horizon: cfg.horizon };
    let sys = reduce_to_first_order(&problem).map_err(|e| CliError::Config(e.to_string()))?;
    let run = solve_reduced(&sys, cfg.scheme, cfg.dt)?;
    let u = extract_u(&sys, &run.trajectory);
    let steps = u.len() - 1;
    let idx: Vec<usize> = (0..=10).map(|k| k * steps / 10).collect();
    let times: Vec<f64> = idx.iter().map(|&i| run.trajectory.times[i]).collect();
    let max_difference = direct_solution(&problem, &times)?.map(|direct| {
        idx.iter().zip(&direct).map(|(&i, d)| u[i].max_abs_diff(d)).fold(0.0, f64::max)
    });
    write_json(
        &cfg.out,
        "report.json",
        &ReduceOut {
            command: "reduce",
            group: cfg.group,
            two_l: cfg.two_l,
            time_order: r.order,
            coefficients: r.coefficient_text.clone(),
            horizon: cfg.horizon,
            steps,
            compared_times: times,
            max_difference,
            u_l2_norms: u.iter().map(|f| f.norm()).collect(),
            system: &run.report,
        },
    )?;
    write_csv(&cfg.out, &run.report)?;
    write_snapshots(&cfg.out, &u, cfg.snapshots)?;
    Ok(match max_difference {
        Some(d) => format!("reduce: {steps} steps, max difference from the direct solution {d:e}"),
        None => format!("reduce: {steps} steps (no direct solution for varying coefficients)"),
    })
}

fn selftest(cfg: &RunConfig) -> Result<String, CliError> {
    let report = transform_selftest(cfg.group, cfg.two_l, SELFTEST_FIELDS, cfg.seed)?;
    write_json(&cfg.out, "report.json", &SelftestOut { command: "transform-selftest", report: &report })?;
    let line = format!(
        "transform-selftest: plancherel {:e}, round trip {:e}, orthogonality {:e}",
        report.plancherel_max_rel_err, report.roundtrip_max_rel_err, report.orthogonality_max_err
    );
    if report.passed {
        Ok(line)
    } else {
        Err(CliError::Checker(line))
    }
}
