//! Command-line front end.
//!
//! Every command produces a list of named output files. With `--out DIR`
//! they are all written there; otherwise the first (primary) one is printed
//! to stdout. Numbers are
//! rounded to 12 significant digits so repeated runs are byte-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::latency_model::{load_profiles, InterfaceProfile, ReliabilityCurve};
use crate::mc_oracle::{mc_check, McReport, SimConfig};
use crate::optimizer::{
    analytic_two_split, brute_force_optimize, expected_latency_from_objective,
    expected_latency_targets, objective, scan_two_split, GridSpec, OptimizationTarget, SigmaModel,
};
use crate::presets::{ScenarioId, ScenarioPreset};
use crate::strategy_eval::{eval_weighted, AllocationVector, Strategy, DEFAULT_DECODE_MIN};
use crate::trace_playback::{load_trace, run_playback, PlaybackReport};

pub const THREADS_ENV: &str = "IFACEDIV_THREADS";
const MC_PROBES: usize = 20;

#[derive(Debug, Parser)]
#[command(
    name = "ifacediv",
    version,
    about = "Latency-reliability of multi-interface transmission strategies"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reliability curve of one strategy over a latency grid.
    Evaluate(EvaluateArgs),
    /// Grid search for the best payload allocation.
    Optimize(OptimizeArgs),
    /// Closed-form two-interface split minimizing expected latency.
    Split2(Split2Args),
    /// Replay latency traces and compare with predicted curves.
    Playback(PlaybackArgs),
    /// Check an analytic curve against Monte Carlo simulation.
    McCheck(McCheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct InterfaceArgs {
    /// Built-in scenario.
    #[arg(long, value_parser = parse_scenario)]
    pub preset: Option<ScenarioId>,
    /// JSON file with one profile object or an array of them.
    #[arg(long)]
    pub profiles: Option<PathBuf>,
    /// Built-in technologies by name, e.g. UMTS,GPRS.
    #[arg(long, value_delimiter = ',')]
    pub interfaces: Vec<String>,
    /// Payload size B in bytes (presets default to 1500).
    #[arg(long)]
    pub payload_bytes: Option<f64>,
    /// Include the starred 900 ms target of scenario B.
    #[arg(long)]
    pub include_starred: bool,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Directory for output files; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub interfaces: InterfaceArgs,
    /// cloning | kofn:K | weighted:g1,g2,...
    #[arg(long)]
    pub strategy: String,
    #[arg(long, default_value_t = DEFAULT_DECODE_MIN)]
    pub decode_min: f64,
    #[arg(long, default_value_t = 0.0)]
    pub x_min: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub x_max: f64,
    #[arg(long, default_value_t = 10.0)]
    pub x_step: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub interfaces: InterfaceArgs,
    #[arg(long, default_value_t = 0.05)]
    pub delta_gamma: f64,
    #[arg(long, default_value_t = DEFAULT_DECODE_MIN)]
    pub decode_min: f64,
    /// Target latencies and weights as `l:w` pairs, e.g. 100:1,400:10.
    #[arg(long)]
    pub targets: Option<String>,
    /// Optimize expected latency truncated at this horizon (ms).
    #[arg(long)]
    pub expected_latency_horizon: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub expected_latency_points: usize,
    /// Add wall-clock runtime to the output (makes it non-reproducible).
    #[arg(long)]
    pub report_runtime: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct Split2Args {
    #[command(flatten)]
    pub interfaces: InterfaceArgs,
    /// Total coded fraction shared by the two interfaces.
    #[arg(long, default_value_t = 1.0)]
    pub total: f64,
    #[arg(long, default_value_t = 0.001)]
    pub grid_step: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PlaybackArgs {
    /// Trace CSV files, one per interface.
    #[arg(long = "trace", required = true)]
    pub traces: Vec<PathBuf>,
    /// Repeatable; defaults to cloning and every k-out-of-N.
    #[arg(long = "strategy")]
    pub strategies: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_DECODE_MIN)]
    pub decode_min: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct McCheckArgs {
    #[command(flatten)]
    pub interfaces: InterfaceArgs,
    /// cloning | kofn:K | weighted:g1,... | optimized
    #[arg(long)]
    pub strategy: String,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_DECODE_MIN)]
    pub decode_min: f64,
    /// Grid step for `--strategy optimized`.
    #[arg(long, default_value_t = 0.05)]
    pub delta_gamma: f64,
    /// Targets for `--strategy optimized` without a preset.
    #[arg(long)]
    pub targets: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_scenario(s: &str) -> std::result::Result<ScenarioId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A named command output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

impl OutputFile {
    fn json(name: &str, value: &impl Serialize) -> Result<Self> {
        let mut contents = serde_json::to_string_pretty(value)?;
        contents.push('\n');
        Ok(Self {
            name: name.to_string(),
            contents,
        })
    }
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn round_all(xs: &[f64]) -> Vec<f64> {
    xs.iter().copied().map(round12).collect()
}

struct Setup {
    profiles: Vec<InterfaceProfile>,
    bytes: f64,
    preset: Option<ScenarioPreset>,
}

impl Setup {
    fn curves(&self) -> Vec<ReliabilityCurve> {
        self.profiles
            .iter()
            .cloned()
            .map(ReliabilityCurve::from)
            .collect()
    }

    fn names(&self) -> Vec<String> {
        self.profiles.iter().map(|p| p.name.clone()).collect()
    }
}

fn resolve(args: &InterfaceArgs) -> Result<Setup> {
    let sources = args.preset.is_some() as u8
        + args.profiles.is_some() as u8
        + !args.interfaces.is_empty() as u8;
    if sources != 1 {
        return Err(Error::Usage(
            "give exactly one of --preset, --profiles or --interfaces".into(),
        ));
    }
    let (profiles, preset) = if let Some(id) = args.preset {
        let preset = ScenarioPreset::new(id, args.include_starred);
        (preset.profiles.clone(), Some(preset))
    } else if let Some(path) = &args.profiles {
        (load_profiles(path)?, None)
    } else {
        let profiles = args
            .interfaces
            .iter()
            .map(|n| {
                InterfaceProfile::preset(n)
                    .ok_or_else(|| Error::Usage(format!("unknown interface technology {n:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        (profiles, None)
    };
    let bytes = match (args.payload_bytes, &preset) {
        (Some(b), _) => b,
        (None, Some(p)) => p.bytes,
        (None, None) => return Err(Error::Usage("--payload-bytes is required".into())),
    };
    if !(bytes >= 0.0 && bytes.is_finite()) {
        return Err(Error::Usage(format!("invalid payload size {bytes}")));
    }
    Ok(Setup {
        profiles,
        bytes,
        preset,
    })
}

fn parse_strategy(s: &str, decode_min: f64) -> Result<Strategy> {
    match s.parse::<Strategy>()? {
        Strategy::Weighted(a) => Ok(Strategy::Weighted(a.with_decode_min(decode_min)?)),
        other => Ok(other),
    }
}

/// Parses `l:w` pairs separated by commas.
pub fn parse_targets(s: &str) -> Result<OptimizationTarget> {
    let bad = || Error::Usage(format!("bad --targets value {s:?}; expected l:w,l:w,..."));
    let mut latencies = Vec::new();
    let mut weights = Vec::new();
    for pair in s.split(',') {
        let (l, w) = pair.split_once(':').ok_or_else(bad)?;
        latencies.push(l.trim().parse::<f64>().map_err(|_| bad())?);
        weights.push(w.trim().parse::<f64>().map_err(|_| bad())?);
    }
    OptimizationTarget::new(latencies, weights)
}

/// Applies `IFACEDIV_THREADS` to the global worker pool.
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::Usage(format!("{THREADS_ENV} must be a positive integer")))?;
    // a pool that is already initialized keeps its size
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

pub fn execute(command: &Command) -> Result<Vec<OutputFile>> {
    match command {
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Optimize(a) => cmd_optimize(a),
        Command::Split2(a) => cmd_split2(a),
        Command::Playback(a) => cmd_playback(a),
        Command::McCheck(a) => cmd_mc_check(a),
    }
}

/// Writes all outputs to `out`, or the primary one to stdout.
pub fn emit(files: &[OutputFile], out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|source| Error::Io {
                path: dir.clone(),
                source,
            })?;
            for f in files {
                let path = dir.join(&f.name);
                fs::write(&path, &f.contents).map_err(|source| Error::Io { path, source })?;
            }
        }
        None => {
            if let Some(f) = files.first() {
                print!("{}", f.contents);
            }
        }
    }
    Ok(())
}

pub fn output_dir(command: &Command) -> Option<&PathBuf> {
    match command {
        Command::Evaluate(a) => a.output.out.as_ref(),
        Command::Optimize(a) => a.output.out.as_ref(),
        Command::Split2(a) => a.output.out.as_ref(),
        Command::Playback(a) => a.output.out.as_ref(),
        Command::McCheck(a) => a.output.out.as_ref(),
    }
}

#[derive(Serialize)]
struct CurvePoint {
    x_ms: f64,
    reliability: f64,
}

#[derive(Serialize)]
struct EvaluateJson {
    strategy: String,
    interfaces: Vec<String>,
    payload_bytes: f64,
    plateau: f64,
    points: Vec<CurvePoint>,
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<Vec<OutputFile>> {
    let setup = resolve(&args.interfaces)?;
    let strategy = parse_strategy(&args.strategy, args.decode_min)?;
    strategy.validate(setup.profiles.len())?;
    if !(args.x_step > 0.0 && args.x_max >= args.x_min) {
        return Err(Error::Usage(
            "need --x-step > 0 and --x-max >= --x-min".into(),
        ));
    }
    let curves = setup.curves();
    let steps = ((args.x_max - args.x_min) / args.x_step + 1e-9).floor() as usize;
    let mut points = Vec::with_capacity(steps + 1);
    for j in 0..=steps {
        let x = args.x_min + j as f64 * args.x_step;
        points.push(CurvePoint {
            x_ms: round12(x),
            reliability: round12(strategy.evaluate(&curves, setup.bytes, x)?),
        });
    }
    match args.format {
        Format::Csv => Ok(vec![OutputFile {
            name: "curve.csv".into(),
            contents: curve_csv(points.iter().map(|p| (p.x_ms, p.reliability))),
        }]),
        Format::Json => {
            let doc = EvaluateJson {
                strategy: strategy.to_string(),
                interfaces: setup.names(),
                payload_bytes: setup.bytes,
                plateau: round12(strategy.evaluate(&curves, setup.bytes, f64::INFINITY)?),
                points,
            };
            Ok(vec![OutputFile::json("curve.json", &doc)?])
        }
    }
}

fn curve_csv(points: impl Iterator<Item = (f64, f64)>) -> String {
    let mut out = String::from("x_ms,reliability\n");
    for (x, f) in points {
        writeln!(out, "{x:?},{f:?}").expect("writing to a String");
    }
    out
}

#[derive(Serialize)]
struct TargetJson {
    latency_ms: f64,
    weight: f64,
}

#[derive(Serialize)]
struct TargetReliability {
    latency_ms: f64,
    reliability: f64,
}

#[derive(Serialize)]
struct ComparisonJson {
    strategy: String,
    gamma: Vec<f64>,
    objective: f64,
    reliability_at_targets: Vec<TargetReliability>,
}

#[derive(Serialize)]
struct OptimizeJson {
    scenario: Option<String>,
    interfaces: Vec<String>,
    payload_bytes: f64,
    delta_gamma: f64,
    gamma_d: f64,
    decode_min: f64,
    targets: Vec<TargetJson>,
    gamma_star: Vec<f64>,
    objective: f64,
    reliability_at_targets: Vec<TargetReliability>,
    decode_probability: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected_latency_ms: Option<f64>,
    evaluations: u64,
    comparison: Vec<ComparisonJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    runtime_ms: Option<f64>,
}

fn target_reliabilities(target: &OptimizationTarget, values: &[f64]) -> Vec<TargetReliability> {
    target
        .latencies()
        .iter()
        .zip(values)
        .map(|(&l, &f)| TargetReliability {
            latency_ms: round12(l),
            reliability: round12(f),
        })
        .collect()
}

pub fn cmd_optimize(args: &OptimizeArgs) -> Result<Vec<OutputFile>> {
    let started = Instant::now();
    let setup = resolve(&args.interfaces)?;
    let (target, horizon) = match (&args.targets, args.expected_latency_horizon, &setup.preset) {
        (Some(t), _, _) => (parse_targets(t)?, None),
        (None, Some(h), _) => (
            expected_latency_targets(h, args.expected_latency_points)?,
            Some(h),
        ),
        (None, None, Some(p)) => (p.target.clone(), p.expected_latency_horizon_ms),
        (None, None, None) => {
            return Err(Error::Usage(
                "give --targets or --expected-latency-horizon".into(),
            ))
        }
    };
    let grid = GridSpec::new(args.delta_gamma).with_decode_min(args.decode_min);
    let curves = setup.curves();
    let sol = brute_force_optimize(&curves, setup.bytes, &target, &grid)?;
    let decode_probability = eval_weighted(&curves, &sol.gamma_star, setup.bytes, f64::INFINITY)?;

    let n = curves.len();
    let mut comparison = Vec::new();
    for s in std::iter::once(Strategy::Cloning).chain((1..=n).map(Strategy::KofN)) {
        let alloc = s.allocation(n)?;
        let values = target
            .latencies()
            .iter()
            .map(|&l| s.evaluate(&curves, setup.bytes, l))
            .collect::<Result<Vec<_>>>()?;
        comparison.push(ComparisonJson {
            strategy: s.to_string(),
            gamma: round_all(alloc.gamma()),
            objective: round12(objective(&curves, &alloc, setup.bytes, &target)?),
            reliability_at_targets: target_reliabilities(&target, &values),
        });
    }

    let doc = OptimizeJson {
        scenario: setup.preset.as_ref().map(|p| p.id.to_string()),
        interfaces: setup.names(),
        payload_bytes: setup.bytes,
        delta_gamma: args.delta_gamma,
        gamma_d: grid.gamma_d,
        decode_min: grid.decode_min,
        targets: target
            .latencies()
            .iter()
            .zip(target.weights())
            .map(|(&l, &w)| TargetJson {
                latency_ms: round12(l),
                weight: round12(w),
            })
            .collect(),
        gamma_star: round_all(sol.gamma_star.gamma()),
        objective: round12(sol.objective_value),
        reliability_at_targets: target_reliabilities(&target, &sol.per_target),
        decode_probability: round12(decode_probability),
        expected_latency_ms: horizon.map(|h| {
            round12(expected_latency_from_objective(
                h,
                sol.objective_value,
                decode_probability,
            ))
        }),
        evaluations: sol.evaluations,
        comparison,
        runtime_ms: args
            .report_runtime
            .then(|| round12(started.elapsed().as_secs_f64() * 1e3)),
    };
    Ok(vec![OutputFile::json("optimize.json", &doc)?])
}

#[derive(Serialize)]
struct Split2Json {
    interfaces: Vec<String>,
    payload_bytes: f64,
    total: f64,
    gamma: f64,
    expected_latency_ms: f64,
    xi_ms: f64,
    degenerate: bool,
    clamped: bool,
    grid_step: f64,
    grid_scan_gamma: f64,
    grid_scan_latency_ms: f64,
    delta: f64,
}

pub fn cmd_split2(args: &Split2Args) -> Result<Vec<OutputFile>> {
    let setup = resolve(&args.interfaces)?;
    let [a, b] = setup.profiles.as_slice() else {
        return Err(Error::Usage(format!(
            "split2 needs exactly two interfaces, got {}",
            setup.profiles.len()
        )));
    };
    let sol = analytic_two_split(a, b, setup.bytes, args.total)?;
    let detail = sol.analytic.expect("analytic split carries its detail");
    let (scan_gamma, scan_latency) = scan_two_split(
        a,
        b,
        setup.bytes,
        args.total,
        args.grid_step,
        SigmaModel::PerPacket,
    )?;
    let doc = Split2Json {
        interfaces: setup.names(),
        payload_bytes: setup.bytes,
        total: args.total,
        gamma: round12(detail.gamma),
        expected_latency_ms: round12(detail.expected_latency_ms),
        xi_ms: round12(detail.xi_ms),
        degenerate: detail.degenerate,
        clamped: detail.clamped,
        grid_step: args.grid_step,
        grid_scan_gamma: round12(scan_gamma),
        grid_scan_latency_ms: round12(scan_latency),
        delta: round12((detail.gamma - scan_gamma).abs()),
    };
    Ok(vec![OutputFile::json("split2.json", &doc)?])
}

#[derive(Serialize)]
struct CurveJson {
    plateau: f64,
    points: Vec<[f64; 2]>,
}

impl CurveJson {
    fn from_curve(curve: &ReliabilityCurve) -> Self {
        let points = curve
            .as_empirical()
            .map(|e| {
                e.points()
                    .iter()
                    .map(|&(x, f)| [round12(x), round12(f)])
                    .collect()
            })
            .unwrap_or_default();
        Self {
            plateau: round12(curve.plateau()),
            points,
        }
    }
}

#[derive(Serialize)]
struct StrategyJson {
    playback: CurveJson,
    predicted: CurveJson,
    ks: f64,
}

#[derive(Serialize)]
struct PlaybackJson {
    interfaces: Vec<String>,
    rows: usize,
    dropped: usize,
    strategies: BTreeMap<String, StrategyJson>,
}

fn file_label(s: &Strategy) -> String {
    s.to_string()
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn empirical_csv(curve: &ReliabilityCurve) -> String {
    let points = curve.as_empirical().map(|e| e.points()).unwrap_or(&[]);
    curve_csv(points.iter().map(|&(x, f)| (round12(x), round12(f))))
}

pub fn cmd_playback(args: &PlaybackArgs) -> Result<Vec<OutputFile>> {
    let traces = args
        .traces
        .iter()
        .map(load_trace)
        .collect::<Result<Vec<_>>>()?;
    let n = traces.len();
    let strategies = if args.strategies.is_empty() {
        std::iter::once(Strategy::Cloning)
            .chain((1..=n).map(Strategy::KofN))
            .collect()
    } else {
        args.strategies
            .iter()
            .map(|s| parse_strategy(s, args.decode_min))
            .collect::<Result<Vec<_>>>()?
    };
    let report = run_playback(&traces, &strategies)?;
    playback_outputs(&report)
}

pub fn playback_outputs(report: &PlaybackReport) -> Result<Vec<OutputFile>> {
    let mut files = Vec::new();
    let mut map = BTreeMap::new();
    for s in &report.strategies {
        let label = file_label(&s.strategy);
        files.push(OutputFile {
            name: format!("{label}.playback.csv"),
            contents: empirical_csv(&s.playback),
        });
        files.push(OutputFile {
            name: format!("{label}.predicted.csv"),
            contents: empirical_csv(&s.predicted),
        });
        map.insert(
            s.strategy.to_string(),
            StrategyJson {
                playback: CurveJson::from_curve(&s.playback),
                predicted: CurveJson::from_curve(&s.predicted),
                ks: round12(s.ks),
            },
        );
    }
    let doc = PlaybackJson {
        interfaces: report.interfaces.clone(),
        rows: report.rows,
        dropped: report.dropped,
        strategies: map,
    };
    files.insert(0, OutputFile::json("report.json", &doc)?);
    Ok(files)
}

#[derive(Serialize)]
struct McCheckJson {
    strategy: String,
    interfaces: Vec<String>,
    payload_bytes: f64,
    n_trials: u64,
    seed: u64,
    probes: Vec<ProbeJson>,
    max_abs_deviation: f64,
    pass: bool,
}

#[derive(Serialize)]
struct ProbeJson {
    x_ms: f64,
    analytic: f64,
    simulated: f64,
    bound: f64,
}

pub fn cmd_mc_check(args: &McCheckArgs) -> Result<Vec<OutputFile>> {
    let setup = resolve(&args.interfaces)?;
    let strategy = if args.strategy.trim().eq_ignore_ascii_case("optimized") {
        let target = match (&args.targets, &setup.preset) {
            (Some(t), _) => parse_targets(t)?,
            (None, Some(p)) => p.target.clone(),
            (None, None) => {
                return Err(Error::Usage(
                    "--strategy optimized needs --targets or --preset".into(),
                ))
            }
        };
        let grid = GridSpec::new(args.delta_gamma).with_decode_min(args.decode_min);
        let sol = brute_force_optimize(&setup.curves(), setup.bytes, &target, &grid)?;
        Strategy::Weighted(sol.gamma_star)
    } else {
        parse_strategy(&args.strategy, args.decode_min)?
    };
    let config = SimConfig {
        n_trials: args.trials,
        seed: args.seed,
        profiles: setup.profiles.clone(),
        strategy,
        bytes: setup.bytes,
    };
    let report: McReport = mc_check(&config, MC_PROBES)?;
    let doc = McCheckJson {
        strategy: config.strategy.to_string(),
        interfaces: setup.names(),
        payload_bytes: setup.bytes,
        n_trials: report.n_trials,
        seed: args.seed,
        probes: report
            .probes
            .iter()
            .map(|p| ProbeJson {
                x_ms: round12(p.x_ms),
                analytic: round12(p.analytic),
                simulated: round12(p.simulated),
                bound: round12(p.bound),
            })
            .collect(),
        max_abs_deviation: round12(report.max_abs_deviation),
        pass: report.pass,
    };
    Ok(vec![OutputFile::json("mc_check.json", &doc)?])
}

/// Helper for building a weighted strategy from explicit fractions.
pub fn weighted(gamma: Vec<f64>, decode_min: f64) -> Result<Strategy> {
    Ok(Strategy::Weighted(
        AllocationVector::new(gamma)?.with_decode_min(decode_min)?,
    ))
}
