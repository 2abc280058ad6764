//! Built-in evaluation scenarios.
//!
//! | id | interfaces                      | payload | targets (ms : weight)          |
//! |----|---------------------------------|---------|--------------------------------|
//! | A  | UMTS, GPRS                      | 1500 B  | expected-latency grid to 1000  |
//! | B  | LTE, HSDPA, UMTS, EDGE, GPRS    | 1500 B  | 100:1, 400:10 (+ 900:100)      |
//! | C  | HSDPA, HSDPA, GPRS, GPRS, GPRS  | 1500 B  | 500:1                          |

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::latency_model::{InterfaceProfile, ReliabilityCurve};
use crate::optimizer::{expected_latency_targets, OptimizationTarget};

pub const SCENARIO_A_HORIZON_MS: f64 = 1000.0;
pub const SCENARIO_A_POINTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScenarioId {
    A,
    B,
    C,
}

impl FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(ScenarioId::A),
            "B" => Ok(ScenarioId::B),
            "C" => Ok(ScenarioId::C),
            _ => Err(Error::InvalidTarget(format!("unknown scenario {s:?}"))),
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ScenarioId::A => "A",
            ScenarioId::B => "B",
            ScenarioId::C => "C",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioPreset {
    pub id: ScenarioId,
    pub profiles: Vec<InterfaceProfile>,
    pub bytes: f64,
    pub target: OptimizationTarget,
    /// Horizon of the expected-latency target grid, when the targets are one.
    pub expected_latency_horizon_ms: Option<f64>,
}

impl ScenarioPreset {
    /// `include_starred` adds the 900 ms / weight 100 target to scenario B
    /// and is ignored elsewhere.
    pub fn new(id: ScenarioId, include_starred: bool) -> Self {
        let named = |names: &[&str]| -> Vec<InterfaceProfile> {
            names
                .iter()
                .map(|n| InterfaceProfile::preset(n).expect("built-in technology"))
                .collect()
        };
        let (profiles, target, horizon) = match id {
            ScenarioId::A => (
                named(&["UMTS", "GPRS"]),
                expected_latency_targets(SCENARIO_A_HORIZON_MS, SCENARIO_A_POINTS)
                    .expect("valid grid"),
                Some(SCENARIO_A_HORIZON_MS),
            ),
            ScenarioId::B => {
                let (l, w) = if include_starred {
                    (vec![100.0, 400.0, 900.0], vec![1.0, 10.0, 100.0])
                } else {
                    (vec![100.0, 400.0], vec![1.0, 10.0])
                };
                (
                    named(&["LTE", "HSDPA", "UMTS", "EDGE", "GPRS"]),
                    OptimizationTarget::new(l, w).expect("valid targets"),
                    None,
                )
            }
            ScenarioId::C => (
                named(&["HSDPA", "HSDPA", "GPRS", "GPRS", "GPRS"]),
                OptimizationTarget::new(vec![500.0], vec![1.0]).expect("valid targets"),
                None,
            ),
        };
        Self {
            id,
            profiles,
            bytes: 1500.0,
            target,
            expected_latency_horizon_ms: horizon,
        }
    }

    pub fn curves(&self) -> Vec<ReliabilityCurve> {
        self.profiles
            .iter()
            .cloned()
            .map(ReliabilityCurve::from)
            .collect()
    }
}
