//! Replays synchronized per-interface latency traces probe by probe and
//! compares the measured strategy curves with curves predicted from the
//! per-interface marginals under the independence assumption.
//!
//! Trace files are CSV with two columns, `probe_index,latency_ms`. An empty
//! latency field marks a lost probe. A header line is optional. Traces are
//! recorded at a single probe size, so the per-interface packet size of a
//! weighted strategy does not change the replayed latency.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::latency_model::{
    empirical_from_samples, EmpiricalCurve, InterfaceProfile, LatencySample, ReliabilityCurve,
};
use crate::mc_oracle::{batch_rng, decode_time, sample_latency};
use crate::strategy_eval::Strategy;

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub interface_name: String,
    records: Vec<(u64, LatencySample)>,
}

impl Trace {
    pub fn new(
        interface_name: impl Into<String>,
        records: Vec<(u64, LatencySample)>,
    ) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyInput);
        }
        if records.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidTrace(
                "probe indices must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            interface_name: interface_name.into(),
            records,
        })
    }

    pub fn records(&self) -> &[(u64, LatencySample)] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("probe_index,latency_ms\n");
        for &(i, s) in &self.records {
            match s {
                LatencySample::Delivered(x) => writeln!(out, "{i},{x}"),
                LatencySample::Lost => writeln!(out, "{i},"),
            }
            .expect("writing to a String");
        }
        out
    }
}

pub fn load_trace(path: impl AsRef<Path>) -> Result<Trace> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_trace(&name, &text, path)
}

/// Parses trace CSV text; `origin` only labels error messages.
pub fn parse_trace(name: &str, text: &str, origin: &Path) -> Result<Trace> {
    let err = |line: u64, msg: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        msg,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut records: Vec<(u64, LatencySample)> = Vec::new();
    let mut first = true;
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            err(line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() == 1 && row[0].is_empty() {
            continue;
        }
        if row.len() != 2 {
            return Err(err(line, format!("expected 2 fields, found {}", row.len())));
        }
        let index = match row[0].parse::<u64>() {
            Ok(i) => i,
            Err(_) if first => {
                first = false;
                continue;
            }
            Err(_) => return Err(err(line, format!("bad probe index {:?}", &row[0]))),
        };
        first = false;
        let sample = if row[1].is_empty() {
            LatencySample::Lost
        } else {
            match row[1].parse::<f64>() {
                Ok(x) if x.is_finite() && x >= 0.0 => LatencySample::Delivered(x),
                _ => return Err(err(line, format!("bad latency {:?}", &row[1]))),
            }
        };
        if let Some(&(prev, _)) = records.last() {
            if index <= prev {
                return Err(err(
                    line,
                    format!("probe index {index} does not increase (previous {prev})"),
                ));
            }
        }
        records.push((index, sample));
    }
    if records.is_empty() {
        return Err(err(1, "trace has no records".into()));
    }
    Trace::new(name, records)
}

/// Probes present in every trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Aligned {
    pub names: Vec<String>,
    pub probes: Vec<u64>,
    /// One sample per trace for each joined probe.
    pub rows: Vec<Vec<LatencySample>>,
    /// Probes seen in some but not all traces.
    pub dropped: usize,
}

impl Aligned {
    pub fn width(&self) -> usize {
        self.names.len()
    }

    /// Samples of trace `i` over the joined probes.
    pub fn column(&self, i: usize) -> Vec<LatencySample> {
        self.rows.iter().map(|r| r[i]).collect()
    }
}

/// Inner join of the traces on probe index.
pub fn align(traces: &[Trace]) -> Result<Aligned> {
    let first = traces.first().ok_or(Error::EmptyInput)?;
    let mut probes = Vec::new();
    let mut rows = Vec::new();
    'probe: for &(index, sample) in &first.records {
        let mut row = Vec::with_capacity(traces.len());
        row.push(sample);
        for t in &traces[1..] {
            match t.records.binary_search_by_key(&index, |r| r.0) {
                Ok(pos) => row.push(t.records[pos].1),
                Err(_) => continue 'probe,
            }
        }
        probes.push(index);
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::NoOverlap);
    }
    let union: BTreeSet<u64> = traces
        .iter()
        .flat_map(|t| t.records.iter().map(|r| r.0))
        .collect();
    Ok(Aligned {
        names: traces.iter().map(|t| t.interface_name.clone()).collect(),
        dropped: union.len() - probes.len(),
        probes,
        rows,
    })
}

/// Message latency of one probe row under `strategy`.
///
/// Cloning takes the earliest delivery, k-out-of-N the k-th earliest, and
/// weighted splitting the first instant the delivered fractions decode.
pub fn message_latency(row: &[LatencySample], strategy: &Strategy) -> Result<LatencySample> {
    strategy.validate(row.len())?;
    let mut delivered: Vec<f64> = row.iter().filter_map(|s| s.latency()).collect();
    Ok(match strategy {
        Strategy::Cloning => LatencySample::from_option(delivered.into_iter().reduce(f64::min)),
        Strategy::KofN(k) => {
            delivered.sort_by(f64::total_cmp);
            LatencySample::from_option(delivered.get(k - 1).copied())
        }
        Strategy::Weighted(alloc) => {
            let mut pairs: Vec<(f64, f64)> = row
                .iter()
                .zip(alloc.gamma())
                .filter(|(_, &g)| g > 0.0)
                .filter_map(|(s, &g)| s.latency().map(|x| (x, g)))
                .collect();
            LatencySample::from_option(decode_time(&mut pairs, alloc.decode_min()))
        }
    })
}

/// Empirical curve of each strategy over the replayed rows.
pub fn playback(
    rows: &[Vec<LatencySample>],
    strategies: &[Strategy],
) -> Result<Vec<ReliabilityCurve>> {
    strategies
        .iter()
        .map(|s| {
            let samples = rows
                .par_iter()
                .map(|row| message_latency(row, s))
                .collect::<Result<Vec<_>>>()?;
            empirical_from_samples(&samples)
        })
        .collect()
}

/// Curves predicted by combining the per-interface empirical marginals,
/// evaluated at every observed latency.
pub fn predict_from_marginals(
    aligned: &Aligned,
    strategies: &[Strategy],
) -> Result<Vec<ReliabilityCurve>> {
    let marginals = (0..aligned.width())
        .map(|i| empirical_from_samples(&aligned.column(i)))
        .collect::<Result<Vec<_>>>()?;
    let mut grid: Vec<f64> = aligned
        .rows
        .iter()
        .flatten()
        .filter_map(|s| s.latency())
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    strategies
        .iter()
        .map(|s| {
            s.validate(marginals.len())?;
            let plateau = s.evaluate(&marginals, 1.0, f64::INFINITY)?.clamp(0.0, 1.0);
            let values = grid
                .par_iter()
                .map(|&x| s.evaluate(&marginals, 1.0, x))
                .collect::<Result<Vec<_>>>()?;
            // enumeration sums may wobble by an ulp; keep the curve monotone
            let mut running = 0.0f64;
            let points = grid
                .iter()
                .zip(values)
                .map(|(&x, f)| {
                    running = running.max(f).min(plateau);
                    (x, running)
                })
                .collect();
            Ok(ReliabilityCurve::Empirical(EmpiricalCurve::new(
                points, plateau,
            )?))
        })
        .collect()
}

fn left_limit(curve: &ReliabilityCurve, x: f64, bytes: f64) -> f64 {
    match curve {
        ReliabilityCurve::Empirical(e) => {
            let idx = e.points().partition_point(|&(px, _)| px < x);
            if idx == 0 {
                0.0
            } else {
                e.points()[idx - 1].1
            }
        }
        ReliabilityCurve::Parametric(_) => curve.eval(x, bytes),
    }
}

/// Kolmogorov–Smirnov distance `sup_x |F_a(x) - F_b(x)|`, including the
/// plateau difference. Parametric curves are evaluated at zero payload on
/// a dense grid.
pub fn ks_distance(a: &ReliabilityCurve, b: &ReliabilityCurve) -> f64 {
    ks_distance_at(a, b, 0.0)
}

/// [`ks_distance`] with parametric curves evaluated at `bytes`.
pub fn ks_distance_at(a: &ReliabilityCurve, b: &ReliabilityCurve, bytes: f64) -> f64 {
    let mut xs: Vec<f64> = Vec::new();
    for c in [a, b] {
        match c {
            ReliabilityCurve::Empirical(e) => xs.extend(e.points().iter().map(|p| p.0)),
            ReliabilityCurve::Parametric(p) => {
                let mean = crate::latency_model::mean_latency(p, bytes);
                let hi = mean * (1.0 + 12.0 * p.sigma_ratio);
                xs.extend((0..=4000).map(|j| hi * j as f64 / 4000.0));
            }
        }
    }
    let mut d = (a.plateau() - b.plateau()).abs();
    for &x in &xs {
        d = d.max((a.eval(x, bytes) - b.eval(x, bytes)).abs());
        d = d.max((left_limit(a, x, bytes) - left_limit(b, x, bytes)).abs());
    }
    d.min(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyReport {
    pub strategy: Strategy,
    pub playback: ReliabilityCurve,
    pub predicted: ReliabilityCurve,
    pub ks: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlaybackReport {
    pub interfaces: Vec<String>,
    pub rows: usize,
    pub dropped: usize,
    pub strategies: Vec<StrategyReport>,
}

/// Aligns the traces, replays them and pairs each strategy's playback curve
/// with its prediction.
pub fn run_playback(traces: &[Trace], strategies: &[Strategy]) -> Result<PlaybackReport> {
    let aligned = align(traces)?;
    let played = playback(&aligned.rows, strategies)?;
    let predicted = predict_from_marginals(&aligned, strategies)?;
    let strategies = strategies
        .iter()
        .zip(played.into_iter().zip(predicted))
        .map(|(s, (playback, predicted))| StrategyReport {
            strategy: s.clone(),
            ks: ks_distance(&playback, &predicted),
            playback,
            predicted,
        })
        .collect();
    Ok(PlaybackReport {
        interfaces: aligned.names.clone(),
        rows: aligned.rows.len(),
        dropped: aligned.dropped,
        strategies,
    })
}

/// Trace of `probes` independent probes of `bytes` drawn from `profile`.
pub fn synthetic_trace(
    name: &str,
    profile: &InterfaceProfile,
    bytes: f64,
    probes: u64,
    seed: u64,
) -> Result<Trace> {
    let mut rng = batch_rng(seed, 0);
    let records = (0..probes)
        .map(|i| (i, sample_latency(&mut rng, profile, bytes)))
        .collect();
    Trace::new(name, records)
}
