//! Per-interface latency-reliability functions.
//!
//! An interface delivers a packet of `bytes` with long-term probability
//! `p_succ`; a delivered packet has Gaussian latency with mean
//! `(alpha * bytes + beta) / 2` ms and standard deviation
//! `sigma_ratio * mean`. Empirical curves come from measured samples and
//! do not depend on packet size.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal::normal_cdf;

pub const DEFAULT_SIGMA_RATIO: f64 = 0.1;

fn default_sigma_ratio() -> f64 {
    DEFAULT_SIGMA_RATIO
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterfaceProfile {
    pub name: String,
    /// Milliseconds per byte.
    pub alpha: f64,
    /// Milliseconds.
    pub beta: f64,
    /// Long-term delivery probability, the plateau of the curve.
    pub p_succ: f64,
    #[serde(default = "default_sigma_ratio")]
    pub sigma_ratio: f64,
}

impl InterfaceProfile {
    pub fn new(name: impl Into<String>, alpha: f64, beta: f64, p_succ: f64) -> Result<Self> {
        Self::with_sigma_ratio(name, alpha, beta, p_succ, DEFAULT_SIGMA_RATIO)
    }

    pub fn with_sigma_ratio(
        name: impl Into<String>,
        alpha: f64,
        beta: f64,
        p_succ: f64,
        sigma_ratio: f64,
    ) -> Result<Self> {
        let profile = Self {
            name: name.into(),
            alpha,
            beta,
            p_succ,
            sigma_ratio,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidProfile(format!("{}: {what}", self.name)));
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be finite and >= 0");
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return bad("beta must be finite and >= 0");
        }
        if !(0.0..=1.0).contains(&self.p_succ) {
            return bad("p_succ must lie in [0, 1]");
        }
        if !(self.sigma_ratio > 0.0 && self.sigma_ratio.is_finite()) {
            return bad("sigma_ratio must be finite and > 0");
        }
        Ok(())
    }

    /// Looks up one of the built-in technology presets by (case-insensitive) name.
    pub fn preset(name: &str) -> Option<Self> {
        let (label, alpha, beta, p_succ) = match name.to_ascii_uppercase().as_str() {
            "GPRS" => ("GPRS", 0.70, 400.0, 0.984),
            "EDGE" => ("EDGE", 0.46, 230.0, 0.983),
            "UMTS" => ("UMTS", 0.43, 200.0, 0.982),
            "HSDPA" => ("HSDPA", 0.35, 178.0, 0.981),
            "LTE" => ("LTE", 0.0067, 41.0, 0.980),
            _ => return None,
        };
        Some(Self {
            name: label.to_string(),
            alpha,
            beta,
            p_succ,
            sigma_ratio: DEFAULT_SIGMA_RATIO,
        })
    }

    pub fn gprs() -> Self {
        Self::preset("GPRS").unwrap()
    }

    pub fn edge() -> Self {
        Self::preset("EDGE").unwrap()
    }

    pub fn umts() -> Self {
        Self::preset("UMTS").unwrap()
    }

    pub fn hsdpa() -> Self {
        Self::preset("HSDPA").unwrap()
    }

    pub fn lte() -> Self {
        Self::preset("LTE").unwrap()
    }

    pub fn sigma(&self, bytes: f64) -> f64 {
        self.sigma_ratio * mean_latency(self, bytes)
    }
}

/// Reads profiles from a JSON document holding either one profile object or
/// an array of them.
pub fn load_profiles(path: impl AsRef<Path>) -> Result<Vec<InterfaceProfile>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_profiles(&text)
}

pub fn parse_profiles(text: &str) -> Result<Vec<InterfaceProfile>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Doc {
        Many(Vec<InterfaceProfile>),
        One(InterfaceProfile),
    }
    let profiles = match serde_json::from_str::<Doc>(text)? {
        Doc::Many(v) => v,
        Doc::One(p) => vec![p],
    };
    if profiles.is_empty() {
        return Err(Error::EmptyInput);
    }
    for p in &profiles {
        p.validate()?;
    }
    Ok(profiles)
}

/// One probe outcome: delivered after some latency, or never delivered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LatencySample {
    Delivered(f64),
    Lost,
}

impl LatencySample {
    pub fn latency(self) -> Option<f64> {
        match self {
            LatencySample::Delivered(ms) => Some(ms),
            LatencySample::Lost => None,
        }
    }

    /// Latency with `Lost` mapped to +∞, for ordering.
    pub fn or_infinity(self) -> f64 {
        self.latency().unwrap_or(f64::INFINITY)
    }

    pub fn from_option(latency: Option<f64>) -> Self {
        latency.map_or(LatencySample::Lost, LatencySample::Delivered)
    }
}

/// Right-continuous step function given by its breakpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalCurve {
    points: Vec<(f64, f64)>,
    plateau: f64,
}

impl EmpiricalCurve {
    /// `points` are `(latency_ms, cumulative_probability)` pairs with strictly
    /// increasing latency and nondecreasing probability, all at most `plateau`.
    pub fn new(points: Vec<(f64, f64)>, plateau: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&plateau) {
            return Err(Error::InvalidProfile(format!(
                "empirical plateau {plateau} outside [0, 1]"
            )));
        }
        for (i, &(x, p)) in points.iter().enumerate() {
            if !x.is_finite() || !(0.0..=plateau).contains(&p) {
                return Err(Error::InvalidProfile(format!(
                    "empirical point {i} = ({x}, {p}) is out of range"
                )));
            }
            if i > 0 {
                let (px, pp) = points[i - 1];
                if x <= px || p < pp {
                    return Err(Error::InvalidProfile(format!(
                        "empirical points not monotone at index {i}"
                    )));
                }
            }
        }
        Ok(Self { points, plateau })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn plateau(&self) -> f64 {
        self.plateau
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            return self.plateau;
        }
        let idx = self.points.partition_point(|&(px, _)| px <= x);
        if idx == 0 {
            0.0
        } else {
            self.points[idx - 1].1
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReliabilityCurve {
    Parametric(InterfaceProfile),
    Empirical(EmpiricalCurve),
}

impl ReliabilityCurve {
    pub fn eval(&self, x: f64, bytes: f64) -> f64 {
        eval_curve(self, x, bytes)
    }

    pub fn plateau(&self) -> f64 {
        match self {
            ReliabilityCurve::Parametric(p) => p.p_succ,
            ReliabilityCurve::Empirical(e) => e.plateau,
        }
    }

    pub fn as_empirical(&self) -> Option<&EmpiricalCurve> {
        match self {
            ReliabilityCurve::Empirical(e) => Some(e),
            ReliabilityCurve::Parametric(_) => None,
        }
    }
}

impl From<InterfaceProfile> for ReliabilityCurve {
    fn from(p: InterfaceProfile) -> Self {
        ReliabilityCurve::Parametric(p)
    }
}

pub fn mean_latency(profile: &InterfaceProfile, bytes: f64) -> f64 {
    (profile.alpha * bytes + profile.beta) / 2.0
}

/// Probability that `profile` delivers a `bytes`-sized packet within `x` ms.
pub fn eval_parametric(profile: &InterfaceProfile, x: f64, bytes: f64) -> f64 {
    if x == f64::INFINITY {
        return profile.p_succ;
    }
    let mean = mean_latency(profile, bytes);
    if mean <= 0.0 {
        return if x >= 0.0 { profile.p_succ } else { 0.0 };
    }
    profile.p_succ * normal_cdf(x, mean, profile.sigma_ratio * mean)
}

/// Empirical CDF of `samples`; lost samples count in the denominator only.
pub fn empirical_from_samples(samples: &[LatencySample]) -> Result<ReliabilityCurve> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let total = samples.len() as f64;
    let mut delivered: Vec<f64> = samples.iter().filter_map(|s| s.latency()).collect();
    delivered.sort_by(f64::total_cmp);

    let mut points: Vec<(f64, f64)> = Vec::new();
    for (i, &x) in delivered.iter().enumerate() {
        let p = (i + 1) as f64 / total;
        match points.last_mut() {
            Some(last) if last.0 == x => last.1 = p,
            _ => points.push((x, p)),
        }
    }
    let plateau = delivered.len() as f64 / total;
    Ok(ReliabilityCurve::Empirical(EmpiricalCurve {
        points,
        plateau,
    }))
}

/// Evaluates a curve; `bytes` is ignored by empirical curves.
pub fn eval_curve(curve: &ReliabilityCurve, x: f64, bytes: f64) -> f64 {
    match curve {
        ReliabilityCurve::Parametric(p) => eval_parametric(p, x, bytes),
        ReliabilityCurve::Empirical(e) => e.eval(x),
    }
}
