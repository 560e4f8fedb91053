use core::time::Duration;

/// How a solve ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Outcome {
    /// Single-path solve found the optimum.
    Optimal,
    /// Protected pair found.
    Pair,
    Infeasible,
    Timeout,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Optimal => "optimal",
            Self::Pair => "pair",
            Self::Infeasible => "infeasible",
            Self::Timeout => "timeout",
        }
    }

    /// A solution was produced (as opposed to a verdict or a timeout).
    pub fn is_feasible(self) -> bool {
        matches!(self, Self::Optimal | Self::Pair)
    }
}

/// Solver outcome plus instrumentation counters.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolveReport {
    pub outcome: Outcome,
    /// Stage-two cost corridors scanned up to and including the one holding
    /// the answer. Zero when the first candidate was already protected.
    pub corridors_explored: u64,
    /// Active-path candidates handed to the protection check.
    pub ap_candidates_checked: u64,
    pub pulses: u64,
    /// Pulse runs performed (bound iterations for BTBU).
    pub iterations: u64,
    /// Filled in by callers that own a clock.
    pub wall_time: Option<Duration>,
}

impl SolveReport {
    pub fn new(outcome: Outcome) -> Self {
        Self {
            outcome,
            corridors_explored: 0,
            ap_candidates_checked: 0,
            pulses: 0,
            iterations: 0,
            wall_time: None,
        }
    }
}
