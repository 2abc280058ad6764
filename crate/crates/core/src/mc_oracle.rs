//! Monte Carlo simulation of multi-interface transmissions.
//!
//! Each trial draws an independent delivery/latency outcome per interface
//! and records when the receiver first holds enough coded payload to
//! decode. The resulting empirical curve is compared against the analytic
//! evaluators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::latency_model::{
    empirical_from_samples, mean_latency, InterfaceProfile, LatencySample, ReliabilityCurve,
};
use crate::strategy_eval::{meets_threshold, Strategy};

/// Trials per independently seeded batch.
pub const BATCH_TRIALS: u64 = 1 << 14;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n_trials: u64,
    pub seed: u64,
    pub profiles: Vec<InterfaceProfile>,
    pub strategy: Strategy,
    pub bytes: f64,
}

/// Generator for batch `batch` of a run seeded with `seed`.
pub fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

/// Draws one packet outcome; negative Gaussian draws are redrawn.
pub fn sample_latency<R: Rng + ?Sized>(
    rng: &mut R,
    profile: &InterfaceProfile,
    bytes: f64,
) -> LatencySample {
    if rng.random::<f64>() >= profile.p_succ {
        return LatencySample::Lost;
    }
    let mean = mean_latency(profile, bytes);
    let normal = Normal::new(mean, profile.sigma_ratio * mean).expect("finite nonnegative sigma");
    loop {
        let x = normal.sample(rng);
        if x >= 0.0 {
            return LatencySample::Delivered(x);
        }
    }
}

/// Earliest time at which the delivered `(latency, fraction)` packets hold
/// at least `decode_min` of coded payload. Sorts `deliveries` in place.
pub fn decode_time(deliveries: &mut [(f64, f64)], decode_min: f64) -> Option<f64> {
    deliveries.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut received = 0.0;
    for &(latency, fraction) in deliveries.iter() {
        received += fraction;
        if meets_threshold(received, decode_min) {
            return Some(latency);
        }
    }
    None
}

/// Per-trial message latencies, in trial order.
pub fn simulate_samples(config: &SimConfig) -> Result<Vec<LatencySample>> {
    if config.n_trials == 0 {
        return Err(Error::EmptyInput);
    }
    let n = config.profiles.len();
    let alloc = config.strategy.allocation(n)?;
    let senders: Vec<(&InterfaceProfile, f64)> = config
        .profiles
        .iter()
        .zip(alloc.gamma())
        .filter(|(_, &g)| g > 0.0)
        .map(|(p, &g)| (p, g))
        .collect();
    let decode_min = alloc.decode_min();

    let batches = config.n_trials.div_ceil(BATCH_TRIALS);
    let per_batch: Vec<Vec<LatencySample>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = batch_rng(config.seed, b);
            let trials = BATCH_TRIALS.min(config.n_trials - b * BATCH_TRIALS);
            let mut deliveries = Vec::with_capacity(senders.len());
            (0..trials)
                .map(|_| {
                    deliveries.clear();
                    for &(profile, g) in &senders {
                        if let LatencySample::Delivered(x) =
                            sample_latency(&mut rng, profile, g * config.bytes)
                        {
                            deliveries.push((x, g));
                        }
                    }
                    LatencySample::from_option(decode_time(&mut deliveries, decode_min))
                })
                .collect()
        })
        .collect();
    Ok(per_batch.into_iter().flatten().collect())
}

/// Empirical latency-reliability curve of `config.strategy`.
pub fn simulate_strategy(config: &SimConfig) -> Result<ReliabilityCurve> {
    empirical_from_samples(&simulate_samples(config)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeCheck {
    pub x_ms: f64,
    pub analytic: f64,
    pub simulated: f64,
    /// Three binomial standard deviations at the analytic value, never
    /// below the one-trial resolution `1 / n_trials`.
    pub bound: f64,
}

impl ProbeCheck {
    pub fn deviation(&self) -> f64 {
        (self.simulated - self.analytic).abs()
    }

    pub fn passes(&self) -> bool {
        self.deviation() <= self.bound
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McReport {
    pub n_trials: u64,
    pub probes: Vec<ProbeCheck>,
    pub max_abs_deviation: f64,
    pub pass: bool,
}

/// Probe latencies where the analytic curve crosses
/// `plateau · (0.025, 0.075, …, 0.975)`, found by bisection.
pub fn probe_points(
    analytic: impl Fn(f64) -> Result<f64>,
    plateau: f64,
    count: usize,
) -> Result<Vec<f64>> {
    if plateau <= 0.0 {
        return Ok((0..count).map(|j| 100.0 * j as f64).collect());
    }
    let mut hi = 1.0;
    while analytic(hi)? < plateau * (1.0 - 0.5 / count as f64) && hi < 1e12 {
        hi *= 2.0;
    }
    let mut points = Vec::with_capacity(count);
    for j in 0..count {
        let level = plateau * (j as f64 + 0.5) / count as f64;
        let (mut a, mut b) = (0.0, hi);
        for _ in 0..100 {
            let mid = 0.5 * (a + b);
            if analytic(mid)? < level {
                a = mid;
            } else {
                b = mid;
            }
        }
        points.push(b);
    }
    Ok(points)
}

/// Checks `analytic` against `simulated` at `probes`; each probe passes when
/// the deviation is within three binomial standard deviations.
pub fn compare_with_simulation(
    analytic: impl Fn(f64) -> Result<f64>,
    simulated: &ReliabilityCurve,
    probes: &[f64],
    n_trials: u64,
) -> Result<McReport> {
    let mut checks = Vec::with_capacity(probes.len());
    for &x in probes {
        let f = analytic(x)?;
        let n = n_trials as f64;
        let bound = (3.0 * (f * (1.0 - f) / n).max(0.0).sqrt()).max(1.0 / n);
        checks.push(ProbeCheck {
            x_ms: x,
            analytic: f,
            simulated: simulated.eval(x, 0.0),
            bound,
        });
    }
    let max_abs_deviation = checks.iter().map(ProbeCheck::deviation).fold(0.0, f64::max);
    let pass = checks.iter().all(ProbeCheck::passes);
    Ok(McReport {
        n_trials,
        probes: checks,
        max_abs_deviation,
        pass,
    })
}

/// Simulates `config` and checks it against the analytic evaluator at
/// `probe_count` probe latencies.
pub fn mc_check(config: &SimConfig, probe_count: usize) -> Result<McReport> {
    let curves: Vec<ReliabilityCurve> = config
        .profiles
        .iter()
        .cloned()
        .map(ReliabilityCurve::from)
        .collect();
    let analytic = |x: f64| config.strategy.evaluate(&curves, config.bytes, x);
    let plateau = analytic(f64::INFINITY)?;
    let probes = probe_points(analytic, plateau, probe_count)?;
    let simulated = simulate_strategy(config)?;
    compare_with_simulation(analytic, &simulated, &probes, config.n_trials)
}
