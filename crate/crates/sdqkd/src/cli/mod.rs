//! Command-line surface: reference-figure parameter sweeps, single-point
//! JSON reports, the invariant self-check, and generic one-variable sweeps.
//!
//! Every sweep accepts flags plus an optional `--config <file>` with the
//! same keys (flags win), emits CSV or JSON with a mandatory header, and is
//! byte-deterministic for a fixed configuration. Exit codes: 0 success,
//! 1 validation error, 2 numerical invariant failure, 3 I/O error.

mod config;
mod output;

pub use output::{fmt_sig, Cell, OutputFormat, Table};

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::eavesdrop::{
    branch_functions, brute_force_optimum, optimal_params, optimal_success_prob,
    success_prob_closed_form, success_prob_type1, success_prob_type2, BranchReport,
};
use crate::error::{Error, Result};
use crate::keyrate::{
    joint_ab, joint_abe, postprocess_ab, postprocess_be, secret_key_rate_via, shannon_entropy,
    JointDistribution,
};
use crate::optics::{noisy_secret_key_rate, noisy_success_prob, NoiseParams};
use crate::scenario::{optimal_bob_alphas, NoiseKind, ScenarioParams, Structure};
use crate::selfcheck;
use config::{pick, ConfigFile};
use output::{render, write_output};

#[derive(Parser)]
#[command(
    name = "sdqkd",
    version,
    about = "Eavesdropping success probabilities and secret key rates for B92 sequential discrimination",
    args_conflicts_with_subcommands = false,
    propagate_version = true,
    subcommand_required = true
)]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Branch analysis of the optimal eavesdropping probability vs overlap
    Fig3(Fig3Args),
    /// Secret key rate vs overlap for channel efficiencies 0.9..0.6
    Fig5(Fig5Args),
    /// Noisy-bench success probability and key rate sweeps
    Fig7(Fig7Args),
    /// JSON report of every intermediate quantity at one parameter point
    Point(PointArgs),
    /// Run the numerical invariant suite
    Selfcheck(SelfcheckArgs),
    /// Sweep one variable with everything else fixed
    Sweep(SweepArgs),
}

#[derive(Args)]
struct CommonOutput {
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Key-value config file; flags override file entries
    #[arg(long)]
    config: Option<PathBuf>,
    /// Evaluate sweep points in parallel (output order is unaffected)
    #[arg(long)]
    parallel: bool,
}

#[derive(Args)]
struct Fig3Args {
    /// Prior probability of the first signal state
    #[arg(long)]
    q0: Option<f64>,
    /// Channel efficiency between sender and receiver
    #[arg(long = "eta-ab")]
    eta_ab: Option<f64>,
    /// First overlap value
    #[arg(long)]
    start: Option<f64>,
    /// Last overlap value
    #[arg(long)]
    stop: Option<f64>,
    /// Number of sweep points
    #[arg(long)]
    steps: Option<usize>,
    /// Add a grid-search oracle column and verify agreement to 1e-4
    #[arg(long)]
    audit: bool,
    #[command(flatten)]
    common: CommonOutput,
}

#[derive(Args)]
struct Fig5Args {
    #[arg(long)]
    start: Option<f64>,
    #[arg(long)]
    stop: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Attack structure used to build the tables (both give identical rates)
    #[arg(long)]
    structure: Option<String>,
    #[command(flatten)]
    common: CommonOutput,
}

#[derive(Args)]
struct Fig7Args {
    /// Series layout: 'a' sweeps D0=De=D over three damping values,
    /// 'b' fixes De=0.4 and sweeps D0 over {0.1, 0.2}
    #[arg(long)]
    panel: Option<String>,
    #[arg(long = "eta-ab")]
    eta_ab: Option<f64>,
    /// Entangled-resource fidelity weight
    #[arg(long = "eta-ent")]
    eta_ent: Option<f64>,
    /// Detector efficiency
    #[arg(long = "eta-det")]
    eta_det: Option<f64>,
    #[arg(long)]
    start: Option<f64>,
    #[arg(long)]
    stop: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[command(flatten)]
    common: CommonOutput,
}

#[derive(Args)]
struct PointArgs {
    #[arg(long)]
    q0: Option<f64>,
    /// State overlap
    #[arg(long)]
    s: Option<f64>,
    #[arg(long = "eta-ab")]
    eta_ab: Option<f64>,
    #[arg(long)]
    structure: Option<String>,
    /// Include a noisy-bench section with this resource noise kind
    #[arg(long)]
    noise: Option<String>,
    #[arg(long = "eta-ent")]
    eta_ent: Option<f64>,
    #[arg(long = "eta-det")]
    eta_det: Option<f64>,
    /// Damping rate on the direct sender→receiver leg
    #[arg(long)]
    d0: Option<f64>,
    /// Damping rate on each entangled leg
    #[arg(long)]
    de: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SelfcheckArgs {
    /// Test hook: add a deliberately failing check
    #[arg(long, hide = true)]
    inject_failure: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Variable to sweep: s | eta-ab | d
    #[arg(long)]
    var: String,
    #[arg(long)]
    start: Option<f64>,
    #[arg(long)]
    stop: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    q0: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long = "eta-ab")]
    eta_ab: Option<f64>,
    #[arg(long)]
    structure: Option<String>,
    /// Resource noise kind; selects the noisy-bench pipeline
    #[arg(long)]
    noise: Option<String>,
    #[arg(long = "eta-ent")]
    eta_ent: Option<f64>,
    #[arg(long = "eta-det")]
    eta_det: Option<f64>,
    #[arg(long)]
    d0: Option<f64>,
    #[arg(long)]
    de: Option<f64>,
    #[command(flatten)]
    common: CommonOutput,
}

/// Parses arguments and runs; returns the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fig3(args) => cmd_fig3(args),
        Command::Fig5(args) => cmd_fig5(args),
        Command::Fig7(args) => cmd_fig7(args),
        Command::Point(args) => cmd_point(args),
        Command::Selfcheck(args) => cmd_selfcheck(args),
        Command::Sweep(args) => cmd_sweep(args),
    }
}

fn load_config(path: Option<&PathBuf>, allowed: &[&str]) -> Result<ConfigFile> {
    let cfg = match path {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    cfg.check_keys(allowed)?;
    Ok(cfg)
}

fn resolve_output(
    common: &CommonOutput,
    cfg: &ConfigFile,
) -> Result<(Option<PathBuf>, OutputFormat, bool)> {
    let out = common
        .out
        .clone()
        .or_else(|| cfg.get_str("out").map(PathBuf::from));
    let format = match (&common.format, cfg.get_str("format")) {
        (Some(f), _) => *f,
        (None, Some(text)) => text.parse()?,
        (None, None) => OutputFormat::Csv,
    };
    let parallel = common.parallel || cfg.get_bool("parallel")?.unwrap_or(false);
    Ok((out, format, parallel))
}

fn parse_structure(text: Option<&str>) -> Result<Structure> {
    match text {
        None | Some("type1") => Ok(Structure::TypeI),
        Some("type2") => Ok(Structure::TypeII),
        Some(other) => Err(Error::Config(format!(
            "unknown structure '{other}' (expected type1 or type2)"
        ))),
    }
}

fn parse_noise_kind(text: &str) -> Result<NoiseKind> {
    match text {
        "white" => Ok(NoiseKind::White),
        "colored" => Ok(NoiseKind::Colored),
        other => Err(Error::Config(format!(
            "unknown noise kind '{other}' (expected white or colored)"
        ))),
    }
}

fn grid(start: f64, stop: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::Parameter(format!("steps must be ≥ 2, got {steps}")));
    }
    if !(start < stop) {
        return Err(Error::Parameter(format!(
            "start must be below stop, got {start} ≥ {stop}"
        )));
    }
    Ok((0..steps)
        .map(|i| start + (stop - start) * i as f64 / (steps - 1) as f64)
        .collect())
}

fn run_jobs<T, F>(jobs: &[T], parallel: bool, eval: F) -> Result<Vec<Vec<Cell>>>
where
    T: Sync,
    F: Fn(&T) -> Result<Vec<Cell>> + Sync,
{
    if parallel {
        jobs.par_iter().map(&eval).collect()
    } else {
        jobs.iter().map(&eval).collect()
    }
}

fn cmd_fig3(args: Fig3Args) -> Result<()> {
    let cfg = load_config(
        args.common.config.as_ref(),
        &["q0", "eta-ab", "start", "stop", "steps", "audit", "parallel", "out", "format"],
    )?;
    let q0 = pick(args.q0, cfg.get_f64("q0")?, 0.4);
    let q1 = 1.0 - q0;
    let eta_ab = pick(args.eta_ab, cfg.get_f64("eta-ab")?, 0.5);
    let start = pick(args.start, cfg.get_f64("start")?, 0.0);
    let stop = pick(args.stop, cfg.get_f64("stop")?, 0.81);
    let steps = pick(args.steps, cfg.get_usize("steps")?, 811);
    let audit = args.audit || cfg.get_bool("audit")?.unwrap_or(false);
    let (out, format, parallel) = resolve_output(&args.common, &cfg)?;

    if !(0.0 < q0 && q0 < 1.0) {
        return Err(Error::Parameter(format!("q0 must lie in (0, 1), got {q0}")));
    }
    let edge = (q0 / q1).sqrt().min((q1 / q0).sqrt());
    if stop >= edge {
        return Err(Error::Parameter(format!(
            "stop = {stop} reaches the optimal-weight validity edge {edge:.4}; pick stop below it"
        )));
    }
    let points = grid(start.max(0.0), stop, steps)?;
    let rows = run_jobs(&points, parallel, |&s| {
        let (f0, f1) = branch_functions(q0, q1, s);
        let (alpha0, alpha1) = optimal_bob_alphas(q0, q1, s)?;
        let interior = (1.0 - eta_ab) / (2.0 * (1.0 - s * s))
            * (alpha0 + alpha1 - 2.0 * (alpha0 * alpha1).sqrt() * s);
        let boundary = (1.0 - eta_ab) / 2.0 * alpha0.max(alpha1);
        let (p_opt, report) = optimal_success_prob(q0, q1, s, eta_ab)?;
        let mut row = vec![
            Cell::Num(s),
            Cell::Num(f0),
            Cell::Num(f1),
            Cell::Num(interior),
            Cell::Num(boundary),
            Cell::Num(p_opt),
            Cell::Text(report.branch.to_string()),
        ];
        if audit {
            let brute = brute_force_optimum(q0, q1, s, eta_ab, 100_000)?;
            if (brute - p_opt).abs() > 1e-4 {
                return Err(Error::Consistency(format!(
                    "closed-form optimum {p_opt} deviates from grid search {brute} at s = {s}"
                )));
            }
            row.push(Cell::Num(brute));
        }
        Ok(row)
    })?;
    let mut columns = vec!["s", "f0", "f1", "p_opt_interior", "p_opt_boundary", "p_opt", "branch"];
    if audit {
        columns.push("p_brute");
    }
    let table = Table {
        command: "fig3",
        columns,
        rows,
    };
    write_output(out.as_deref(), &render(&table, format))
}

fn cmd_fig5(args: Fig5Args) -> Result<()> {
    let cfg = load_config(
        args.common.config.as_ref(),
        &["start", "stop", "steps", "structure", "parallel", "out", "format"],
    )?;
    let start = pick(args.start, cfg.get_f64("start")?, 0.01);
    let stop = pick(args.stop, cfg.get_f64("stop")?, 0.99);
    let steps = pick(args.steps, cfg.get_usize("steps")?, 99);
    let structure = parse_structure(args.structure.as_deref().or(cfg.get_str("structure")))?;
    let (out, format, parallel) = resolve_output(&args.common, &cfg)?;

    if !(0.0..1.0).contains(&start) || stop >= 1.0 {
        return Err(Error::Parameter(
            "overlap sweep must stay inside [0, 1)".into(),
        ));
    }
    let etas = [0.9, 0.8, 0.7, 0.6];
    let points = grid(start, stop, steps)?;
    let jobs: Vec<(f64, f64)> = etas
        .iter()
        .flat_map(|&eta| points.iter().map(move |&s| (eta, s)))
        .collect();
    let rows = run_jobs(&jobs, parallel, |&(eta, s)| {
        let p = ScenarioParams::symmetric(s, eta)?;
        let k = secret_key_rate_via(&p, structure)?;
        Ok(vec![Cell::Num(eta), Cell::Num(s), Cell::Num(k)])
    })?;
    let table = Table {
        command: "fig5",
        columns: vec!["eta_ab", "s", "k"],
        rows,
    };
    write_output(out.as_deref(), &render(&table, format))
}

fn cmd_fig7(args: Fig7Args) -> Result<()> {
    let cfg = load_config(
        args.common.config.as_ref(),
        &["panel", "eta-ab", "eta-ent", "eta-det", "start", "stop", "steps", "parallel", "out", "format"],
    )?;
    let panel = args
        .panel
        .as_deref()
        .or(cfg.get_str("panel"))
        .unwrap_or("a")
        .to_string();
    let eta_ab = pick(args.eta_ab, cfg.get_f64("eta-ab")?, 0.5);
    let eta_ent = pick(args.eta_ent, cfg.get_f64("eta-ent")?, 0.5);
    let eta_det = pick(args.eta_det, cfg.get_f64("eta-det")?, 0.8);
    let start = pick(args.start, cfg.get_f64("start")?, 0.05);
    let stop = pick(args.stop, cfg.get_f64("stop")?, 0.9);
    let steps = pick(args.steps, cfg.get_usize("steps")?, 18);
    let (out, format, parallel) = resolve_output(&args.common, &cfg)?;

    let series: Vec<(NoiseKind, f64, f64)> = match panel.as_str() {
        "a" => [NoiseKind::White, NoiseKind::Colored]
            .iter()
            .flat_map(|&kind| [0.1, 0.2, 0.3].iter().map(move |&d| (kind, d, d)))
            .collect(),
        "b" => [NoiseKind::White, NoiseKind::Colored]
            .iter()
            .flat_map(|&kind| [0.1, 0.2].iter().map(move |&d0| (kind, d0, 0.4)))
            .collect(),
        other => {
            return Err(Error::Config(format!(
                "unknown panel '{other}' (expected a or b)"
            )))
        }
    };
    let points = grid(start, stop, steps)?;
    let jobs: Vec<(NoiseKind, f64, f64, f64)> = series
        .iter()
        .flat_map(|&(kind, d0, de)| points.iter().map(move |&s| (kind, d0, de, s)))
        .collect();
    let rows = run_jobs(&jobs, parallel, |&(kind, d0, de, s)| {
        let p = ScenarioParams::symmetric(s, eta_ab)?;
        let n = NoiseParams::new(eta_ent, kind, d0, de, eta_det, 0.0)?;
        let p_s = noisy_success_prob(&p, &n)?;
        let k = noisy_secret_key_rate(&p, &n)?;
        Ok(vec![
            Cell::Text(kind.to_string()),
            Cell::Num(d0),
            Cell::Num(de),
            Cell::Num(s),
            Cell::Num(p_s),
            Cell::Num(k),
        ])
    })?;
    let table = Table {
        command: "fig7",
        columns: vec!["kind", "d0", "de", "s", "p_s", "k"],
        rows,
    };
    write_output(out.as_deref(), &render(&table, format))
}

/// Fully expanded single-point evaluation, serialized as versioned JSON.
#[derive(Serialize)]
struct PointRecord {
    schema_version: u32,
    params: ScenarioParams,
    branch: BranchReport,
    success_probability: SuccessSection,
    distributions: DistributionSection,
    entropies: EntropySection,
    key_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    optics: Option<OpticsSection>,
}

#[derive(Serialize)]
struct SuccessSection {
    closed_form: f64,
    type1: f64,
    type2: f64,
    optimal: f64,
    structure_difference: f64,
}

#[derive(Serialize)]
struct DistributionSection {
    joint_ab: JointDistribution,
    joint_be: JointDistribution,
    postprocessed_ab: JointDistribution,
    postprocessed_be: Option<JointDistribution>,
    structure_table_difference: f64,
}

#[derive(Serialize)]
struct EntropySection {
    h_a: f64,
    h_ab: f64,
    h_e: Option<f64>,
    h_be: Option<f64>,
}

#[derive(Serialize)]
struct OpticsSection {
    noise: NoiseParams,
    p_s: f64,
    key_rate: f64,
}

fn cmd_point(args: PointArgs) -> Result<()> {
    let cfg = load_config(
        args.config.as_ref(),
        &["q0", "s", "eta-ab", "structure", "noise", "eta-ent", "eta-det", "d0", "de", "out"],
    )?;
    let q0 = pick(args.q0, cfg.get_f64("q0")?, 0.5);
    let s = pick(args.s, cfg.get_f64("s")?, 0.5);
    let eta_ab = pick(args.eta_ab, cfg.get_f64("eta-ab")?, 0.5);
    let structure = parse_structure(args.structure.as_deref().or(cfg.get_str("structure")))?;
    let out = args
        .out
        .clone()
        .or_else(|| cfg.get_str("out").map(PathBuf::from));

    let mut offending = Vec::new();
    if !(0.0 < q0 && q0 < 1.0) {
        offending.push("q0");
    }
    if !(0.0..1.0).contains(&s) {
        offending.push("s");
    }
    if !(0.0..=1.0).contains(&eta_ab) {
        offending.push("eta-ab");
    }
    let optics_requested = args.noise.is_some()
        || cfg.get_str("noise").is_some()
        || args.eta_ent.is_some()
        || args.eta_det.is_some()
        || args.d0.is_some()
        || args.de.is_some()
        || cfg.get_str("eta-ent").is_some()
        || cfg.get_str("eta-det").is_some()
        || cfg.get_str("d0").is_some()
        || cfg.get_str("de").is_some();
    let eta_ent = pick(args.eta_ent, cfg.get_f64("eta-ent")?, 1.0);
    let eta_det = pick(args.eta_det, cfg.get_f64("eta-det")?, 1.0);
    let d0 = pick(args.d0, cfg.get_f64("d0")?, 0.0);
    let de = pick(args.de, cfg.get_f64("de")?, 0.0);
    for (name, v) in [("eta-ent", eta_ent), ("eta-det", eta_det), ("d0", d0), ("de", de)] {
        if !(0.0..=1.0).contains(&v) {
            offending.push(name);
        }
    }
    if !offending.is_empty() {
        return Err(Error::Parameter(format!(
            "invalid value for: {}",
            offending.join(", ")
        )));
    }

    let q1 = 1.0 - q0;
    let (params, branch) = optimal_params(q0, q1, s, eta_ab)?;
    let closed_form = success_prob_closed_form(&params);
    let type1 = success_prob_type1(&params)?;
    let type2 = success_prob_type2(&params)?;
    let (optimal, _) = optimal_success_prob(q0, q1, s, eta_ab)?;

    let abe1 = joint_abe(&params, Structure::TypeI)?;
    let abe2 = joint_abe(&params, Structure::TypeII)?;
    let structure_table_difference = abe1.max_abs_diff(&abe2);
    let ab = joint_ab(&params);
    let be = abe1.marginal(&["b", "e"])?;
    let postprocessed_ab = postprocess_ab(&ab)?;
    let postprocessed_be = postprocess_be(&be).ok();

    let h_a = shannon_entropy([q0, q1]);
    let h_ab = postprocessed_ab.entropy();
    let h_e = postprocessed_be
        .as_ref()
        .map(|d| d.marginal(&["e"]).map(|m| m.entropy()))
        .transpose()?;
    let h_be = postprocessed_be.as_ref().map(JointDistribution::entropy);
    let key_rate = secret_key_rate_via(&params, structure)?;

    let optics = if optics_requested {
        let kind = match args.noise.as_deref().or(cfg.get_str("noise")) {
            Some(text) => parse_noise_kind(text)?,
            None => NoiseKind::White,
        };
        let noise = NoiseParams::new(eta_ent, kind, d0, de, eta_det, 0.0)?;
        let p_s = noisy_success_prob(&params, &noise)?;
        let k = noisy_secret_key_rate(&params, &noise)?;
        Some(OpticsSection {
            noise,
            p_s,
            key_rate: k,
        })
    } else {
        None
    };

    let record = PointRecord {
        schema_version: 1,
        params,
        branch,
        success_probability: SuccessSection {
            closed_form,
            type1,
            type2,
            optimal,
            structure_difference: (type1 - type2).abs(),
        },
        distributions: DistributionSection {
            joint_ab: ab,
            joint_be: be,
            postprocessed_ab,
            postprocessed_be,
            structure_table_difference,
        },
        entropies: EntropySection { h_a, h_ab, h_e, h_be },
        key_rate,
        optics,
    };
    let mut text = serde_json::to_string_pretty(&record)
        .map_err(|e| Error::Consistency(format!("JSON serialization failed: {e}")))?;
    text.push('\n');
    write_output(out.as_deref(), &text)
}

fn cmd_selfcheck(args: SelfcheckArgs) -> Result<()> {
    let report = selfcheck::run_all(args.inject_failure);
    let mut passed = 0usize;
    for check in &report.checks {
        let verdict = if check.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {} — {}", check.name, check.detail);
        if check.passed {
            passed += 1;
        }
    }
    println!("self-check: {passed}/{} passed", report.checks.len());
    if report.all_passed() {
        Ok(())
    } else {
        Err(Error::Consistency(format!(
            "{} invariant check(s) failed",
            report.checks.len() - passed
        )))
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let cfg = load_config(
        args.common.config.as_ref(),
        &[
            "var", "start", "stop", "steps", "q0", "s", "eta-ab", "structure", "noise",
            "eta-ent", "eta-det", "d0", "de", "parallel", "out", "format",
        ],
    )?;
    let var = args.var.clone();
    let q0 = pick(args.q0, cfg.get_f64("q0")?, 0.5);
    let q1 = 1.0 - q0;
    let s_fixed = pick(args.s, cfg.get_f64("s")?, 0.5);
    let eta_fixed = pick(args.eta_ab, cfg.get_f64("eta-ab")?, 0.5);
    let structure = parse_structure(args.structure.as_deref().or(cfg.get_str("structure")))?;
    let noise_kind = match args.noise.as_deref().or(cfg.get_str("noise")) {
        Some(text) => Some(parse_noise_kind(text)?),
        None => None,
    };
    let eta_ent = pick(args.eta_ent, cfg.get_f64("eta-ent")?, 1.0);
    let eta_det = pick(args.eta_det, cfg.get_f64("eta-det")?, 1.0);
    let d0 = pick(args.d0, cfg.get_f64("d0")?, 0.0);
    let de = pick(args.de, cfg.get_f64("de")?, 0.0);
    let (out, format, parallel) = resolve_output(&args.common, &cfg)?;

    let (default_start, default_stop, default_steps, column) = match var.as_str() {
        "s" => (0.05, 0.85, 17, "s"),
        "eta-ab" => (0.0, 1.0, 21, "eta_ab"),
        "d" => (0.0, 0.5, 11, "d"),
        other => {
            return Err(Error::Config(format!(
                "unknown sweep variable '{other}' (expected s, eta-ab, or d)"
            )))
        }
    };
    if var == "d" && noise_kind.is_none() {
        return Err(Error::Config(
            "sweeping d requires --noise {white|colored}".into(),
        ));
    }
    let start = pick(args.start, cfg.get_f64("start")?, default_start);
    let stop = pick(args.stop, cfg.get_f64("stop")?, default_stop);
    let steps = pick(args.steps, cfg.get_usize("steps")?, default_steps);
    let points = grid(start, stop, steps)?;

    let eval_point = |value: f64| -> Result<(f64, f64)> {
        let (s, eta_ab, damp) = match var.as_str() {
            "s" => (value, eta_fixed, (d0, de)),
            "eta-ab" => (s_fixed, value, (d0, de)),
            _ => (s_fixed, eta_fixed, (value, value)),
        };
        let (params, _) = optimal_params(q0, q1, s, eta_ab)?;
        match noise_kind {
            Some(kind) => {
                let n = NoiseParams::new(eta_ent, kind, damp.0, damp.1, eta_det, 0.0)?;
                Ok((noisy_success_prob(&params, &n)?, noisy_secret_key_rate(&params, &n)?))
            }
            None => {
                let (p_s, _) = optimal_success_prob(q0, q1, s, eta_ab)?;
                Ok((p_s, secret_key_rate_via(&params, structure)?))
            }
        }
    };
    let rows = run_jobs(&points, parallel, |&value| {
        let (p_s, k) = eval_point(value)?;
        Ok(vec![Cell::Num(value), Cell::Num(p_s), Cell::Num(k)])
    })?;
    let table = Table {
        command: "sweep",
        columns: vec![column, "p_s", "k"],
        rows,
    };
    write_output(out.as_deref(), &render(&table, format))
}
