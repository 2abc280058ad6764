//! Latency-reliability of sending coded payload over several independent
//! network interfaces: evaluation of cloning, k-out-of-N and weighted
//! splitting, allocation search, a Monte Carlo cross-check and trace
//! playback.

pub mod cli;
pub mod error;
pub mod latency_model;
pub mod mc_oracle;
pub mod normal;
pub mod optimizer;
pub mod presets;
pub mod strategy_eval;
pub mod trace_playback;

pub use error::{Error, Result};
pub use latency_model::{
    empirical_from_samples, eval_curve, eval_parametric, mean_latency, EmpiricalCurve,
    InterfaceProfile, LatencySample, ReliabilityCurve,
};
pub use optimizer::{
    analytic_two_split, brute_force_optimize, expected_latency_targets, expected_max_latency,
    objective, GridSpec, OptimizationTarget, SplitSolution,
};
pub use strategy_eval::{
    decode_indicator, eval_cloning, eval_k_of_n, eval_weighted, fragment_plan, AllocationVector,
    Outcome, Strategy,
};
