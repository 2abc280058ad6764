//! Combined latency-reliability of a multi-interface transmission strategy.
//!
//! The general evaluator enumerates every received/lost outcome of the
//! interfaces that carry payload, keeps the outcomes whose received coded
//! fractions reach the decoding threshold, and sums their probabilities.
//! Interfaces are assumed to fail independently.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::latency_model::{eval_curve, ReliabilityCurve};

pub const DEFAULT_GAMMA_D: f64 = 1.05;
pub const DEFAULT_DECODE_MIN: f64 = 1.0;
/// Largest interface count evaluated by exact enumeration.
pub const MAX_ENUMERATION: usize = 24;
/// Slack on threshold comparisons so that e.g. ten shares of 1/10 still decode.
pub const DECODE_TOLERANCE: f64 = 1e-9;

#[inline]
pub fn meets_threshold(total: f64, threshold: f64) -> bool {
    total >= threshold - DECODE_TOLERANCE
}

/// Per-interface fractions of coded payload.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationVector {
    gamma: Vec<f64>,
    gamma_d: f64,
    decode_min: f64,
}

impl AllocationVector {
    pub fn new(gamma: Vec<f64>) -> Result<Self> {
        Self::with_params(gamma, DEFAULT_GAMMA_D, DEFAULT_DECODE_MIN)
    }

    pub fn with_params(gamma: Vec<f64>, gamma_d: f64, decode_min: f64) -> Result<Self> {
        if gamma.is_empty() {
            return Err(Error::InvalidAllocation("no interfaces".into()));
        }
        if !(gamma_d > 0.0 && gamma_d.is_finite()) {
            return Err(Error::InvalidAllocation(format!("gamma_d={gamma_d}")));
        }
        if !(decode_min > 0.0 && decode_min.is_finite()) {
            return Err(Error::InvalidAllocation(format!("decode_min={decode_min}")));
        }
        if let Some((i, g)) = gamma
            .iter()
            .enumerate()
            .find(|(_, &g)| !(g >= 0.0 && g <= gamma_d + DECODE_TOLERANCE))
        {
            return Err(Error::InvalidAllocation(format!(
                "gamma[{i}]={g} outside [0, {gamma_d}]"
            )));
        }
        Ok(Self {
            gamma,
            gamma_d,
            decode_min,
        })
    }

    /// Same fraction on each of `n` interfaces.
    pub fn uniform(n: usize, fraction: f64) -> Result<Self> {
        Self::new(vec![fraction; n])
    }

    pub fn with_decode_min(mut self, decode_min: f64) -> Result<Self> {
        if !(decode_min > 0.0 && decode_min.is_finite()) {
            return Err(Error::InvalidAllocation(format!("decode_min={decode_min}")));
        }
        self.decode_min = decode_min;
        Ok(self)
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn gamma_d(&self) -> f64 {
        self.gamma_d
    }

    pub fn decode_min(&self) -> f64 {
        self.decode_min
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.gamma.iter().sum()
    }

    /// Whether the total coded fraction reaches `gamma_d`.
    pub fn is_feasible(&self) -> bool {
        meets_threshold(self.total(), self.gamma_d)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    Cloning,
    KofN(usize),
    Weighted(AllocationVector),
}

impl Strategy {
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            Strategy::Cloning if n == 0 => Err(Error::EmptyInput),
            Strategy::Cloning => Ok(()),
            Strategy::KofN(k) if *k < 1 || *k > n => Err(Error::InvalidK { k: *k, n }),
            Strategy::KofN(_) => Ok(()),
            Strategy::Weighted(a) if a.len() != n => Err(Error::DimensionMismatch {
                expected: n,
                found: a.len(),
            }),
            Strategy::Weighted(_) => Ok(()),
        }
    }

    /// The allocation that realizes this strategy over `n` interfaces.
    ///
    /// Cloning sends the full payload everywhere and decodes on any single
    /// packet; k-out-of-N sends `1/k` everywhere.
    pub fn allocation(&self, n: usize) -> Result<AllocationVector> {
        self.validate(n)?;
        match self {
            Strategy::Cloning => AllocationVector::uniform(n, 1.0),
            Strategy::KofN(k) => AllocationVector::uniform(n, 1.0 / *k as f64),
            Strategy::Weighted(a) => Ok(a.clone()),
        }
    }

    pub fn evaluate(&self, curves: &[ReliabilityCurve], bytes: f64, x: f64) -> Result<f64> {
        match self {
            Strategy::Cloning => eval_cloning(curves, bytes, x),
            Strategy::KofN(k) => eval_k_of_n(curves, *k, bytes, x),
            Strategy::Weighted(a) => eval_weighted(curves, a, bytes, x),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Cloning => write!(f, "cloning"),
            Strategy::KofN(k) => write!(f, "kofn:{k}"),
            Strategy::Weighted(a) => {
                write!(f, "weighted:")?;
                for (i, g) in a.gamma().iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{g}")?;
                }
                Ok(())
            }
        }
    }
}

/// Parses `cloning`, `kofn:K` or `weighted:g1,g2,...` (default `gamma_d` and
/// `decode_min`).
impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidStrategy(s.to_string());
        if s.eq_ignore_ascii_case("cloning") {
            return Ok(Strategy::Cloning);
        }
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        match kind.trim().to_ascii_lowercase().as_str() {
            "kofn" => arg.trim().parse().map(Strategy::KofN).map_err(|_| bad()),
            "weighted" => {
                let gamma = arg
                    .split(',')
                    .map(|g| g.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad())?;
                AllocationVector::new(gamma).map(Strategy::Weighted)
            }
            _ => Err(bad()),
        }
    }
}

/// A received/lost pattern over `width` interfaces; bit `i` set means the
/// packet on interface `i` was received.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Outcome {
    bits: u32,
    width: usize,
}

impl Outcome {
    pub fn new(bits: u32, width: usize) -> Result<Self> {
        if width > MAX_ENUMERATION {
            return Err(Error::EnumerationTooLarge {
                n: width,
                limit: MAX_ENUMERATION,
            });
        }
        if (bits as u64) >> width != 0 {
            return Err(Error::DimensionMismatch {
                expected: width,
                found: 32 - bits.leading_zeros() as usize,
            });
        }
        Ok(Self { bits, width })
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn width(self) -> usize {
        self.width
    }

    pub fn received(self, i: usize) -> bool {
        self.bits >> i & 1 == 1
    }
}

/// Whether the fractions received in `outcome` add up to `decode_min`.
pub fn decode_indicator(outcome: Outcome, alloc: &AllocationVector) -> Result<bool> {
    if outcome.width() != alloc.len() {
        return Err(Error::DimensionMismatch {
            expected: alloc.len(),
            found: outcome.width(),
        });
    }
    let received: f64 = alloc
        .gamma()
        .iter()
        .enumerate()
        .filter(|&(i, _)| outcome.received(i))
        .map(|(_, g)| g)
        .sum();
    Ok(meets_threshold(received, alloc.decode_min()))
}

/// Sums the probability of every outcome accepted by `include`, given the
/// per-interface reception probabilities `probs`. Outcomes are visited in
/// increasing bit order.
pub fn outcome_sum(probs: &[f64], mut include: impl FnMut(Outcome) -> bool) -> Result<f64> {
    let n = probs.len();
    if n > MAX_ENUMERATION {
        return Err(Error::EnumerationTooLarge {
            n,
            limit: MAX_ENUMERATION,
        });
    }
    let mut mass = Vec::new();
    outcome_probabilities(probs, &mut mass);
    let mut total = 0.0;
    for (h, &m) in mass.iter().enumerate() {
        if include(Outcome {
            bits: h as u32,
            width: n,
        }) {
            total += m;
        }
    }
    Ok(total)
}

/// Fills `out[h]` with the probability of outcome `h`. Each entry is the
/// product of its per-interface factors taken in interface order.
pub(crate) fn outcome_probabilities(probs: &[f64], out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    for &p in probs {
        let len = out.len();
        for h in 0..len {
            let base = out[h];
            out.push(base * p);
            out[h] = base * (1.0 - p);
        }
    }
}

/// `out[h]` is true when outcome `h` over the given fractions decodes.
pub(crate) fn decodable_outcomes(gammas: &[f64], decode_min: f64, out: &mut Vec<bool>) {
    out.clear();
    for h in 0..1usize << gammas.len() {
        let received: f64 = gammas
            .iter()
            .enumerate()
            .filter(|&(i, _)| h >> i & 1 == 1)
            .map(|(_, g)| g)
            .sum();
        out.push(meets_threshold(received, decode_min));
    }
}

pub(crate) fn decodable_mass(mass: &[f64], decodable: &[bool]) -> f64 {
    mass.iter()
        .zip(decodable)
        .filter(|(_, &d)| d)
        .map(|(m, _)| m)
        .sum()
}

/// Reliability at deadline `x` of weighted splitting of a `bytes`-sized
/// payload. Interfaces with zero allocation send nothing and are skipped.
pub fn eval_weighted(
    curves: &[ReliabilityCurve],
    alloc: &AllocationVector,
    bytes: f64,
    x: f64,
) -> Result<f64> {
    if curves.len() != alloc.len() {
        return Err(Error::DimensionMismatch {
            expected: alloc.len(),
            found: curves.len(),
        });
    }
    if curves.len() > MAX_ENUMERATION {
        return Err(Error::EnumerationTooLarge {
            n: curves.len(),
            limit: MAX_ENUMERATION,
        });
    }
    let (probs, gammas): (Vec<f64>, Vec<f64>) = curves
        .iter()
        .zip(alloc.gamma())
        .filter(|(_, &g)| g > 0.0)
        .map(|(c, &g)| (eval_curve(c, x, g * bytes), g))
        .unzip();
    let mut mass = Vec::new();
    let mut decodable = Vec::new();
    outcome_probabilities(&probs, &mut mass);
    decodable_outcomes(&gammas, alloc.decode_min(), &mut decodable);
    Ok(decodable_mass(&mass, &decodable))
}

/// Reliability of sending a full copy on every interface.
pub fn eval_cloning(curves: &[ReliabilityCurve], bytes: f64, x: f64) -> Result<f64> {
    if curves.is_empty() {
        return Err(Error::EmptyInput);
    }
    let all_lost: f64 = curves
        .iter()
        .map(|c| 1.0 - eval_curve(c, x, bytes))
        .product();
    Ok(1.0 - all_lost)
}

/// Reliability of k-out-of-N splitting over arbitrary interfaces.
pub fn eval_k_of_n(curves: &[ReliabilityCurve], k: usize, bytes: f64, x: f64) -> Result<f64> {
    let n = curves.len();
    if k < 1 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let alloc = AllocationVector::uniform(n, 1.0 / k as f64)?;
    eval_weighted(curves, &alloc, bytes, x)
}

fn binomial(n: usize, r: usize) -> f64 {
    let r = r.min(n - r);
    (1..=r).fold(1.0, |acc, i| acc * (n - r + i) as f64 / i as f64)
}

/// Probability that at least `k` of `n` identical independent interfaces,
/// each succeeding with probability `f`, succeed.
pub fn binomial_k_of_n(f: f64, k: usize, n: usize) -> Result<f64> {
    if k < 1 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    Ok((k..=n)
        .map(|r| binomial(n, r) * f.powi(r as i32) * (1.0 - f).powi((n - r) as i32))
        .sum())
}

fn same_model(a: &ReliabilityCurve, b: &ReliabilityCurve) -> bool {
    match (a, b) {
        (ReliabilityCurve::Parametric(p), ReliabilityCurve::Parametric(q)) => {
            p.alpha == q.alpha
                && p.beta == q.beta
                && p.p_succ == q.p_succ
                && p.sigma_ratio == q.sigma_ratio
        }
        (ReliabilityCurve::Empirical(p), ReliabilityCurve::Empirical(q)) => p == q,
        _ => false,
    }
}

/// k-out-of-N through the binomial closed form; only defined when all
/// interfaces share one model.
pub fn k_of_n_closed_form(
    curves: &[ReliabilityCurve],
    k: usize,
    bytes: f64,
    x: f64,
) -> Result<f64> {
    let first = curves.first().ok_or(Error::EmptyInput)?;
    if !curves.iter().all(|c| same_model(first, c)) {
        return Err(Error::NonIdenticalInterfaces);
    }
    let f = eval_curve(first, x, bytes / k.max(1) as f64);
    binomial_k_of_n(f, k, curves.len())
}

/// Fragments and packet size per interface when the coded payload is cut
/// into `fragment_size`-byte fragments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FragmentAssignment {
    pub fragments: u64,
    pub packet_bytes: u64,
}

pub fn fragment_plan(
    alloc: &AllocationVector,
    bytes: f64,
    fragment_size: u64,
) -> Result<Vec<FragmentAssignment>> {
    if fragment_size == 0 {
        return Err(Error::InvalidAllocation("fragment size must be > 0".into()));
    }
    Ok(alloc
        .gamma()
        .iter()
        .map(|&g| {
            let fragments = if g > 0.0 {
                (g * bytes / fragment_size as f64 - DECODE_TOLERANCE)
                    .ceil()
                    .max(0.0) as u64
            } else {
                0
            };
            FragmentAssignment {
                fragments,
                packet_bytes: fragments * fragment_size,
            }
        })
        .collect())
}
