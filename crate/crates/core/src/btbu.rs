//! Single-path DRCR by repeated pulse searches under a rising cost bound.
//!
//! A tight artificial bound lets the optimality pruning bite from the very
//! first pulse. If a run finds nothing, no feasible path is cheaper than the
//! bound, so the bound is raised and the search restarts from scratch. The
//! first successful run returns the true optimum.

use alloc::vec::Vec;

use crate::graph::{DrcrTask, Network, NetworkView, Path};
use crate::interrupt::Interrupt;
use crate::preprocess::ReverseTrees;
use crate::pulse::PulseSearch;
use crate::report::{Outcome, SolveReport};
use crate::INFINITY;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundStrategy {
    /// Start at twice the shortest cost, double after each failure.
    DoublingBound,
    /// Start at shortest + step; after each failure double the step and add it.
    DoublingStep,
}

/// How the initial step of [`BoundStrategy::DoublingStep`] is derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum StepBasis {
    MinEdgeCost,
    #[default]
    TwiceMinEdgeCost,
    MeanEdgeCost,
    Explicit(u64),
}

impl StepBasis {
    pub fn step(self, net: &Network) -> u64 {
        let min = net.min_edge_cost().unwrap_or(1);
        let step = match self {
            Self::MinEdgeCost => min,
            Self::TwiceMinEdgeCost => min.saturating_mul(2),
            Self::MeanEdgeCost => net.mean_edge_cost().unwrap_or(1),
            Self::Explicit(s) => s,
        };
        step.max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BtbuConfig {
    pub strategy: BoundStrategy,
    pub step_basis: StepBasis,
}

impl BtbuConfig {
    /// Doubling cost bound.
    pub const OPTION_1: Self = Self { strategy: BoundStrategy::DoublingBound, step_basis: StepBasis::TwiceMinEdgeCost };
    /// Doubling step with the default step.
    pub const OPTION_2: Self = Self { strategy: BoundStrategy::DoublingStep, step_basis: StepBasis::TwiceMinEdgeCost };

    /// Rejects an explicit zero step.
    pub fn validate(&self) -> Result<(), ZeroStep> {
        match self.step_basis {
            StepBasis::Explicit(0) => Err(ZeroStep),
            _ => Ok(()),
        }
    }
}

impl Default for BtbuConfig {
    fn default() -> Self {
        Self::OPTION_1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroStep;

impl core::fmt::Display for ZeroStep {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("explicit cost step must be positive")
    }
}

impl core::error::Error for ZeroStep {}

/// Bound sequence for one task.
#[derive(Debug, Clone)]
pub struct BoundSchedule {
    strategy: BoundStrategy,
    bound: u64,
    step: u64,
    ceiling: u64,
}

impl BoundSchedule {
    pub fn new(cfg: &BtbuConfig, net: &Network, shortest: u64) -> Self {
        let step = cfg.step_basis.step(net);
        let bound = match cfg.strategy {
            BoundStrategy::DoublingBound => shortest.saturating_mul(2),
            BoundStrategy::DoublingStep => shortest.saturating_add(step),
        };
        Self { strategy: cfg.strategy, bound, step, ceiling: net.path_cost_ceiling() }
    }

    /// Bound for the next run. Anything past the elementary-path ceiling
    /// becomes [`INFINITY`], which is the last run.
    pub fn current(&self) -> u64 {
        if self.bound > self.ceiling {
            INFINITY
        } else {
            self.bound
        }
    }

    fn advance(&mut self) {
        match self.strategy {
            BoundStrategy::DoublingBound => self.bound = self.bound.saturating_mul(2),
            BoundStrategy::DoublingStep => {
                self.step = self.step.saturating_mul(2);
                self.bound = self.bound.saturating_add(self.step);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BtbuSolution {
    pub path: Option<Path>,
    pub report: SolveReport,
    /// Bound used by each run, in order.
    pub bounds: Vec<u64>,
}

pub fn solve_btbu(
    net: &Network,
    trees: &ReverseTrees,
    task: &DrcrTask,
    cfg: &BtbuConfig,
    interrupt: &dyn Interrupt,
) -> BtbuSolution {
    let mut report = SolveReport::new(Outcome::Infeasible);
    let mut bounds = Vec::new();
    let shortest = trees.min_cost(task.source);
    if shortest == INFINITY {
        return BtbuSolution { path: None, report, bounds };
    }

    let search = PulseSearch::new(NetworkView::full(net), trees, task).with_interrupt(interrupt);
    let mut schedule = BoundSchedule::new(cfg, net, shortest);
    loop {
        let bound = schedule.current();
        bounds.push(bound);
        let run = search.optimal(bound);
        report.iterations += 1;
        report.pulses += run.stats.pulses;
        if run.interrupted {
            report.outcome = Outcome::Timeout;
            return BtbuSolution { path: None, report, bounds };
        }
        if let Some(path) = run.found {
            report.outcome = Outcome::Optimal;
            return BtbuSolution { path: Some(path), report, bounds };
        }
        if bound == INFINITY {
            return BtbuSolution { path: None, report, bounds };
        }
        schedule.advance();
    }
}
