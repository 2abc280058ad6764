//! Payload-allocation search.
//!
//! [`brute_force_optimize`] maximizes a weighted sum of reliabilities at
//! target latencies over a uniform γ grid. [`analytic_two_split`] gives the
//! closed-form split of coded payload between two Gaussian interfaces that
//! minimizes the expected latency of the later packet.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::latency_model::{eval_curve, mean_latency, InterfaceProfile, ReliabilityCurve};
use crate::normal::{inverse_normal_cdf, std_normal_cdf, std_normal_pdf};
use crate::strategy_eval::{
    decodable_mass, decodable_outcomes, eval_weighted, meets_threshold, outcome_probabilities,
    AllocationVector, DECODE_TOLERANCE, DEFAULT_DECODE_MIN, DEFAULT_GAMMA_D, MAX_ENUMERATION,
};

/// Largest number of grid allocations a brute-force search will visit.
pub const SEARCH_BUDGET: u128 = 1_000_000_000;

/// Latencies (ms) at which reliability is rewarded, with their weights.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationTarget {
    latencies: Vec<f64>,
    weights: Vec<f64>,
}

impl OptimizationTarget {
    pub fn new(latencies: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if latencies.is_empty() {
            return Err(Error::InvalidTarget("no target latencies".into()));
        }
        if latencies.len() != weights.len() {
            return Err(Error::InvalidTarget(format!(
                "{} latencies but {} weights",
                latencies.len(),
                weights.len()
            )));
        }
        if latencies.iter().any(|l| !l.is_finite()) {
            return Err(Error::InvalidTarget("latencies must be finite".into()));
        }
        if latencies.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidTarget(
                "latencies must be strictly increasing".into(),
            ));
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidTarget("weights must be positive".into()));
        }
        Ok(Self { latencies, weights })
    }

    pub fn latencies(&self) -> &[f64] {
        &self.latencies
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.latencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.latencies.is_empty()
    }
}

/// Uniform grid `l_r = r * horizon / points` with weights `1 / points`.
///
/// Maximizing the weighted reliability sum over this grid is a right
/// Riemann sum for minimizing `∫₀^horizon (1 - F(x)) dx`, the expected
/// latency truncated at `horizon`.
pub fn expected_latency_targets(horizon_ms: f64, points: usize) -> Result<OptimizationTarget> {
    if points < 2 || !(horizon_ms > 0.0 && horizon_ms.is_finite()) {
        return Err(Error::InvalidTarget(format!(
            "expected-latency grid needs horizon > 0 and points >= 2 (got {horizon_ms}, {points})"
        )));
    }
    let latencies = (1..=points)
        .map(|r| horizon_ms * r as f64 / points as f64)
        .collect();
    OptimizationTarget::new(latencies, vec![1.0 / points as f64; points])
}

/// Expected latency implied by an expected-latency-grid objective, taken
/// conditional on the message eventually being decoded with probability
/// `decode_probability`.
pub fn expected_latency_from_objective(
    horizon_ms: f64,
    objective_value: f64,
    decode_probability: f64,
) -> f64 {
    horizon_ms * (decode_probability - objective_value) / decode_probability
}

/// Per-interface γ grid `{0, δ, 2δ, …, γ_d}` plus the decoding settings used
/// during the search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub delta_gamma: f64,
    pub gamma_d: f64,
    pub decode_min: f64,
}

impl GridSpec {
    pub fn new(delta_gamma: f64) -> Self {
        Self {
            delta_gamma,
            gamma_d: DEFAULT_GAMMA_D,
            decode_min: DEFAULT_DECODE_MIN,
        }
    }

    pub fn with_decode_min(mut self, decode_min: f64) -> Self {
        self.decode_min = decode_min;
        self
    }

    pub fn with_gamma_d(mut self, gamma_d: f64) -> Self {
        self.gamma_d = gamma_d;
        self
    }

    /// Grid values; both 0 and `gamma_d` are always present exactly.
    pub fn values(&self) -> Result<Vec<f64>> {
        let d = self.delta_gamma;
        if !(self.gamma_d > 0.0 && self.gamma_d.is_finite()) {
            return Err(Error::InvalidGrid(format!("gamma_d={}", self.gamma_d)));
        }
        if !(d > 0.0 && d <= self.gamma_d + DECODE_TOLERANCE) {
            return Err(Error::InvalidGrid(format!(
                "delta_gamma={d} outside (0, {}]",
                self.gamma_d
            )));
        }
        let steps = (self.gamma_d / d + DECODE_TOLERANCE).floor() as usize;
        let mut values: Vec<f64> = (0..=steps).map(|j| j as f64 * d).collect();
        let last = values.last_mut().expect("grid has at least one point");
        if (self.gamma_d - *last).abs() <= DECODE_TOLERANCE {
            *last = self.gamma_d;
        } else {
            values.push(self.gamma_d);
        }
        Ok(values)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticDetail {
    /// Fraction of the payload on interface A; B carries `total - gamma`.
    pub gamma: f64,
    pub total: f64,
    pub expected_latency_ms: f64,
    /// √(σ_A² + σ_B²) frozen at the equal split.
    pub xi_ms: f64,
    /// Set when neither interface's latency depends on packet size.
    pub degenerate: bool,
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitSolution {
    pub gamma_star: AllocationVector,
    /// Weighted reliability sum for grid searches; expected latency (ms)
    /// for analytic splits.
    pub objective_value: f64,
    /// Reliability at each target latency (grid searches only).
    pub per_target: Vec<f64>,
    pub evaluations: u64,
    pub analytic: Option<AnalyticDetail>,
}

/// Weighted reliability sum `Σ_r F_weighted(l_r) · w_r`.
pub fn objective(
    curves: &[ReliabilityCurve],
    alloc: &AllocationVector,
    bytes: f64,
    target: &OptimizationTarget,
) -> Result<f64> {
    let mut total = 0.0;
    for (&l, &w) in target.latencies.iter().zip(&target.weights) {
        total += eval_weighted(curves, alloc, bytes, l)? * w;
    }
    Ok(total)
}

#[derive(Debug, Clone)]
struct Candidate {
    objective: f64,
    redundancy: f64,
    indices: Vec<usize>,
    per_target: Vec<f64>,
}

impl Candidate {
    /// Total order: higher objective, then less redundancy, then the
    /// lexicographically smaller index vector.
    fn rank(&self, other: &Self) -> Ordering {
        other
            .objective
            .total_cmp(&self.objective)
            .then(self.redundancy.total_cmp(&other.redundancy))
            .then_with(|| self.indices.cmp(&other.indices))
    }

    fn best(a: Option<Self>, b: Option<Self>) -> Option<Self> {
        match (a, b) {
            (Some(a), Some(b)) => Some(if b.rank(&a) == Ordering::Less { b } else { a }),
            (a, None) => a,
            (None, b) => b,
        }
    }
}

/// Exhaustive search over the γ grid for the feasible allocation
/// (`Σγ ≥ γ_d`) with the largest objective.
///
/// Work is split by the first interface's grid index; the reduction uses a
/// total order, so the result does not depend on the number of threads.
pub fn brute_force_optimize(
    curves: &[ReliabilityCurve],
    bytes: f64,
    target: &OptimizationTarget,
    grid: &GridSpec,
) -> Result<SplitSolution> {
    let n = curves.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if n > MAX_ENUMERATION {
        return Err(Error::EnumerationTooLarge {
            n,
            limit: MAX_ENUMERATION,
        });
    }
    if !(grid.decode_min > 0.0 && grid.decode_min.is_finite()) {
        return Err(Error::InvalidGrid(format!(
            "decode_min={}",
            grid.decode_min
        )));
    }
    let values = grid.values()?;
    let g = values.len();
    let points = (g as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if points > SEARCH_BUDGET {
        return Err(Error::SearchSpaceTooLarge {
            points,
            budget: SEARCH_BUDGET,
        });
    }

    // reliability of interface i carrying values[j] at target r
    let table: Vec<Vec<Vec<f64>>> = curves
        .iter()
        .map(|c| {
            values
                .iter()
                .map(|&v| {
                    target
                        .latencies
                        .iter()
                        .map(|&l| eval_curve(c, l, v * bytes))
                        .collect()
                })
                .collect()
        })
        .collect();

    let (best, evaluations) = (0..g)
        .into_par_iter()
        .map(|lead| search_subtree(lead, &values, &table, target, grid))
        .reduce(
            || (None, 0),
            |(a, ea), (b, eb)| (Candidate::best(a, b), ea + eb),
        );
    let best = best.ok_or(Error::InfeasibleGrid)?;

    let gamma: Vec<f64> = best.indices.iter().map(|&j| values[j]).collect();
    let gamma_star = AllocationVector::with_params(gamma, grid.gamma_d, grid.decode_min)?;
    Ok(SplitSolution {
        gamma_star,
        objective_value: best.objective,
        per_target: best.per_target,
        evaluations,
        analytic: None,
    })
}

fn search_subtree(
    lead: usize,
    values: &[f64],
    table: &[Vec<Vec<f64>>],
    target: &OptimizationTarget,
    grid: &GridSpec,
) -> (Option<Candidate>, u64) {
    let n = table.len();
    let g = values.len();
    let mut idx = vec![0usize; n];
    idx[0] = lead;

    let mut best: Option<Candidate> = None;
    let mut evaluations = 0u64;
    let mut gammas = Vec::with_capacity(n);
    let mut active = Vec::with_capacity(n);
    let mut probs = Vec::with_capacity(n);
    let mut sorted = Vec::with_capacity(n);
    let mut mass = Vec::new();
    let mut decodable = Vec::new();
    let mut per_target = vec![0.0; target.len()];

    loop {
        let total: f64 = idx.iter().map(|&j| values[j]).sum();
        if meets_threshold(total, grid.gamma_d) {
            evaluations += 1;
            gammas.clear();
            active.clear();
            for (i, &j) in idx.iter().enumerate() {
                if values[j] > 0.0 {
                    gammas.push(values[j]);
                    active.push(i);
                }
            }
            decodable_outcomes(&gammas, grid.decode_min, &mut decodable);
            let mut obj = 0.0;
            for (r, &w) in target.weights.iter().enumerate() {
                probs.clear();
                probs.extend(active.iter().map(|&i| table[i][idx[i]][r]));
                outcome_probabilities(&probs, &mut mass);
                let f = decodable_mass(&mass, &decodable);
                per_target[r] = f;
                obj += f * w;
            }
            sorted.clear();
            sorted.extend(idx.iter().map(|&j| values[j]));
            sorted.sort_by(f64::total_cmp);
            let cand = Candidate {
                objective: obj,
                redundancy: sorted.iter().sum(),
                indices: idx.clone(),
                per_target: per_target.clone(),
            };
            let better = match &best {
                None => true,
                Some(b) => cand.rank(b) == Ordering::Less,
            };
            if better {
                best = Some(cand);
            }
        }

        // odometer over interfaces 1..n, interface 0 fixed
        let mut pos = n - 1;
        loop {
            if pos == 0 {
                return (best, evaluations);
            }
            idx[pos] += 1;
            if idx[pos] < g {
                break;
            }
            idx[pos] = 0;
            pos -= 1;
        }
    }
}

fn clark_max_mean(mu_a: f64, mu_b: f64, xi: f64) -> f64 {
    if xi <= 0.0 {
        return mu_a.max(mu_b);
    }
    let eta = (mu_a - mu_b) / xi;
    mu_a * std_normal_cdf(eta) + mu_b * std_normal_cdf(-eta) + xi * std_normal_pdf(eta)
}

/// Clark's expression for E[max(X_A, X_B)] of independent Gaussians.
pub fn expected_max_latency(mu_a: f64, sigma_a: f64, mu_b: f64, sigma_b: f64) -> f64 {
    clark_max_mean(mu_a, mu_b, sigma_a.hypot(sigma_b))
}

/// How σ enters the two-interface latency model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaModel {
    /// σ follows each packet's own size (σ = ratio · μ).
    PerPacket,
    /// √(σ_A² + σ_B²) held at a fixed value.
    FrozenXi(f64),
}

/// Expected latency of sending `gamma · bytes` on `a` and
/// `(total - gamma) · bytes` on `b` when both packets are needed.
pub fn two_split_latency(
    a: &InterfaceProfile,
    b: &InterfaceProfile,
    bytes: f64,
    total: f64,
    gamma: f64,
    sigma: SigmaModel,
) -> f64 {
    let mu_a = mean_latency(a, gamma * bytes);
    let mu_b = mean_latency(b, (total - gamma) * bytes);
    let xi = match sigma {
        SigmaModel::PerPacket => (a.sigma_ratio * mu_a).hypot(b.sigma_ratio * mu_b),
        SigmaModel::FrozenXi(xi) => xi,
    };
    clark_max_mean(mu_a, mu_b, xi)
}

/// Which closed-form expression produced the split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitBranch {
    /// μ_A ≥ μ_B at the optimum.
    SlowerA,
    /// μ_A < μ_B at the optimum.
    FasterA,
}

/// Unclamped closed-form γ for the given branch. Returns `None` if the
/// branch's quantile argument is 0 or 1.
pub fn split_branch_gamma(
    a: &InterfaceProfile,
    b: &InterfaceProfile,
    bytes: f64,
    total: f64,
    xi: f64,
    branch: SplitBranch,
) -> Option<f64> {
    let alpha_sum = a.alpha + b.alpha;
    let scale = alpha_sum * bytes;
    let base = b.alpha * bytes * total + b.beta - a.beta;
    let adjust = match branch {
        SplitBranch::SlowerA => -2.0 * xi * inverse_normal_cdf(a.alpha / alpha_sum).ok()?,
        SplitBranch::FasterA => 2.0 * xi * inverse_normal_cdf(b.alpha / alpha_sum).ok()?,
    };
    Some((base + adjust) / scale)
}

/// Split of `total` coded payload fraction between two interfaces that
/// minimizes the expected time until both packets arrive.
///
/// ξ is evaluated once at the equal split and held fixed. The result is
/// clamped so that each side stays within `[0, γ_d]`.
pub fn analytic_two_split(
    a: &InterfaceProfile,
    b: &InterfaceProfile,
    bytes: f64,
    total: f64,
) -> Result<SplitSolution> {
    a.validate()?;
    b.validate()?;
    let gamma_d = DEFAULT_GAMMA_D;
    if !(total > 0.0 && total <= 2.0 * gamma_d + DECODE_TOLERANCE) {
        return Err(Error::InvalidAllocation(format!(
            "total fraction {total} outside (0, {}]",
            2.0 * gamma_d
        )));
    }
    if !(bytes >= 0.0 && bytes.is_finite()) {
        return Err(Error::InvalidAllocation(format!("payload bytes {bytes}")));
    }
    let lo = (total - gamma_d).max(0.0);
    let hi = total.min(gamma_d);

    let half = 0.5 * total * bytes;
    let xi = a.sigma(half).hypot(b.sigma(half));

    let alpha_sum = a.alpha + b.alpha;
    let degenerate = alpha_sum * bytes == 0.0;
    let raw = if degenerate {
        0.5 * total
    } else if a.alpha == 0.0 {
        f64::INFINITY
    } else if b.alpha == 0.0 {
        f64::NEG_INFINITY
    } else {
        // η* = Φ⁻¹(α_B / (α_A + α_B)); its sign fixes which side is slower
        let eta = inverse_normal_cdf(b.alpha / alpha_sum)?;
        let branch = if eta >= 0.0 {
            SplitBranch::SlowerA
        } else {
            SplitBranch::FasterA
        };
        split_branch_gamma(a, b, bytes, total, xi, branch)
            .expect("quantile arguments lie strictly inside (0, 1)")
    };
    let gamma = raw.clamp(lo, hi);
    let clamped = gamma != raw;

    let expected = two_split_latency(a, b, bytes, total, gamma, SigmaModel::PerPacket);
    let gamma_star = AllocationVector::with_params(vec![gamma, total - gamma], gamma_d, total)?;
    Ok(SplitSolution {
        gamma_star,
        objective_value: expected,
        per_target: Vec::new(),
        evaluations: 1,
        analytic: Some(AnalyticDetail {
            gamma,
            total,
            expected_latency_ms: expected,
            xi_ms: xi,
            degenerate,
            clamped,
        }),
    })
}

/// Grid scan of [`two_split_latency`] over `γ ∈ {0, step, …, total}`;
/// returns `(argmin γ, minimum latency)`. Ties keep the smaller γ.
pub fn scan_two_split(
    a: &InterfaceProfile,
    b: &InterfaceProfile,
    bytes: f64,
    total: f64,
    step: f64,
    sigma: SigmaModel,
) -> Result<(f64, f64)> {
    if !(step > 0.0 && total > 0.0) {
        return Err(Error::InvalidGrid(format!("step={step}, total={total}")));
    }
    let lo = (total - DEFAULT_GAMMA_D).max(0.0);
    let hi = total.min(DEFAULT_GAMMA_D);
    let steps = ((hi - lo) / step + DECODE_TOLERANCE).floor() as usize;
    let mut best = (lo, f64::INFINITY);
    for j in 0..=steps {
        let gamma = (lo + j as f64 * step).min(hi);
        let l = two_split_latency(a, b, bytes, total, gamma, sigma);
        if l < best.1 {
            best = (gamma, l);
        }
    }
    Ok(best)
}
