//! Bottom-top corridor search for the min-min SRLG-disjoint problem.
//!
//! Stage one takes the cheapest feasible active path and tries to protect
//! it. If that fails the cost axis above it is cut into corridors of width
//! `min_edge_cost * alpha`; each corridor's feasible candidates are sorted
//! by cost and tried in turn until one has a protection path.
//!
//! [`solve_btcs`] runs the corridors one after another. The pieces it is
//! built from ([`first_stage`], [`scan_corridor`], [`Protector`]) are public
//! so a threaded driver can scan several corridors at once and still return
//! exactly the sequential answer.

use core::fmt;

use crate::error::PathError;
use crate::graph::{is_connected, remove_conflicting_edges, paths_conflict, ExclusionMask, Network, Path, SrlgTask};
use crate::interrupt::{Interrupt, Never};
use crate::preprocess::ReverseTrees;
use crate::pulse::{CostCorridor, PulseSearch, PulseStats};
use crate::report::{Outcome, SolveReport};
use crate::INFINITY;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BtcsConfig {
    /// Corridor width in units of the cheapest edge cost.
    pub alpha: f64,
    /// Concurrent corridor scanners. The core solver is sequential and
    /// ignores this; the threaded driver in the `drcr` crate honours it.
    pub workers: usize,
    /// Give up (timeout outcome) after this many corridors.
    pub max_corridors: Option<u64>,
}

impl Default for BtcsConfig {
    fn default() -> Self {
        Self { alpha: 10.0, workers: 1, max_corridors: None }
    }
}

impl BtcsConfig {
    pub fn new(alpha: f64, workers: usize) -> Result<Self, ConfigError> {
        let cfg = Self { alpha, workers, max_corridors: None };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(ConfigError::Alpha);
        }
        if self.workers == 0 {
            return Err(ConfigError::Workers);
        }
        Ok(())
    }

    /// `round(min_edge_cost * alpha)`, at least 1.
    pub fn corridor_width(&self, net: &Network) -> u64 {
        let base = net.min_edge_cost().unwrap_or(1) as f64;
        let w = base * self.alpha + 0.5;
        if w >= u64::MAX as f64 {
            return INFINITY;
        }
        (w as u64).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigError {
    Alpha,
    Workers,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Alpha => write!(f, "alpha must be a positive finite number"),
            Self::Workers => write!(f, "workers must be at least 1"),
        }
    }
}

impl core::error::Error for ConfigError {}

/// Active path plus its SRLG-disjoint protection path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisjointPair {
    pub ap: Path,
    pub pp: Path,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairViolation {
    Malformed(PathError),
    Endpoints,
    ApDelay,
    PpDelay,
    DelayDifference,
    SharedRisk,
}

impl fmt::Display for PairViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Malformed(e) => write!(f, "malformed path: {e}"),
            Self::Endpoints => write!(f, "path does not join source to target"),
            Self::ApDelay => write!(f, "active path delay outside the window"),
            Self::PpDelay => write!(f, "protection path delay outside the window"),
            Self::DelayDifference => write!(f, "delay difference above the limit"),
            Self::SharedRisk => write!(f, "paths share an edge or an SRLG"),
        }
    }
}

impl DisjointPair {
    pub fn ap_delay(&self) -> u64 {
        self.ap.delay()
    }

    pub fn pp_delay(&self) -> u64 {
        self.pp.delay()
    }

    /// Re-checks every pair constraint from raw edge data.
    pub fn check(&self, net: &Network, task: &SrlgTask) -> Result<(), PairViolation> {
        let base = &task.base;
        let mut delays = [0u64; 2];
        for (slot, path) in [&self.ap, &self.pp].into_iter().enumerate() {
            Path::from_edges(net, path.edges().to_vec()).map_err(PairViolation::Malformed)?;
            if path.source(net) != base.source || path.target(net) != base.target {
                return Err(PairViolation::Endpoints);
            }
            delays[slot] = path.recompute(net).1;
        }
        if !base.admits_delay(delays[0]) {
            return Err(PairViolation::ApDelay);
        }
        if !base.admits_delay(delays[1]) {
            return Err(PairViolation::PpDelay);
        }
        if delays[0].abs_diff(delays[1]) > task.d_diff {
            return Err(PairViolation::DelayDifference);
        }
        if paths_conflict(net, self.ap.edges(), self.pp.edges()) {
            return Err(PairViolation::SharedRisk);
        }
        Ok(())
    }
}

/// Delay window a protection path must meet given the active path delay:
/// `[max(d_low, d - d_diff), min(d_up, d + d_diff)]`, or `None` if empty.
pub fn pp_delay_window(task: &SrlgTask, ap_delay: u64) -> Option<(u64, u64)> {
    let lo = task.base.d_low.max(ap_delay.saturating_sub(task.d_diff));
    let hi = task.base.d_up.min(ap_delay.saturating_add(task.d_diff));
    (lo <= hi).then_some((lo, hi))
}

/// One protection attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtectAttempt {
    pub pp: Option<Path>,
    pub stats: PulseStats,
    /// Target unreachable once conflicts were removed; no pulse was sent.
    pub disconnected: bool,
    pub interrupted: bool,
}

/// Reusable protection checker: owns the exclusion mask so repeated
/// attempts do not reallocate it.
#[derive(Debug, Clone)]
pub struct Protector<'a> {
    net: &'a Network,
    trees: &'a ReverseTrees,
    task: &'a SrlgTask,
    mask: ExclusionMask,
}

impl<'a> Protector<'a> {
    pub fn new(net: &'a Network, trees: &'a ReverseTrees, task: &'a SrlgTask) -> Self {
        Self { net, trees, task, mask: ExclusionMask::new(net.edge_count()) }
    }

    pub fn attempt(&mut self, ap: &Path, interrupt: &dyn Interrupt) -> ProtectAttempt {
        let mut attempt =
            ProtectAttempt { pp: None, stats: PulseStats::default(), disconnected: false, interrupted: false };
        let Some((lo, hi)) = pp_delay_window(self.task, ap.delay()) else {
            return attempt;
        };
        let base = &self.task.base;
        let view = remove_conflicting_edges(self.net, ap, &mut self.mask);
        if !is_connected(view, base.source, base.target) {
            attempt.disconnected = true;
            return attempt;
        }
        let pp_task = base.with_window(lo, hi);
        let run = PulseSearch::new(view, self.trees, &pp_task)
            .with_interrupt(interrupt)
            .first_feasible();
        attempt.pp = run.found;
        attempt.stats = run.stats;
        attempt.interrupted = run.interrupted;
        attempt
    }
}

/// Protection path for `ap`, if one exists.
pub fn try_protect(net: &Network, trees: &ReverseTrees, task: &SrlgTask, ap: &Path) -> Option<Path> {
    Protector::new(net, trees, task).attempt(ap, &Never).pp
}

/// Corridor layout above the stage-one candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorridorPlan {
    pub first_ap: Path,
    pub starting_cost: u64,
    pub width: u64,
    /// Corridors whose lower edge is at most `node_count * max_edge_cost`.
    pub corridor_count: u64,
}

impl CorridorPlan {
    fn new(net: &Network, first_ap: Path, width: u64) -> Self {
        let starting_cost = first_ap.cost();
        let ceiling = net.path_cost_ceiling().max(starting_cost);
        let corridor_count = (ceiling - starting_cost) / width + 1;
        Self { first_ap, starting_cost, width, corridor_count }
    }

    /// Corridor `k`: `[start + k*w, start + (k+1)*w)`.
    pub fn corridor(&self, k: u64) -> CostCorridor {
        let lo = self.starting_cost.saturating_add(k.saturating_mul(self.width));
        let hi = lo.saturating_add(self.width);
        CostCorridor::new(lo, hi).expect("corridor width is positive")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StageOne {
    /// No feasible active path at all.
    NoCandidate,
    /// The cheapest candidate is protected: nothing more to do.
    Protected(DisjointPair),
    /// Trap: corridors must be scanned.
    Trapped(CorridorPlan),
    Interrupted,
}

/// Stage one: cheapest feasible AP, then one protection attempt.
pub fn first_stage(
    net: &Network,
    trees: &ReverseTrees,
    task: &SrlgTask,
    width: u64,
    protector: &mut Protector<'_>,
    interrupt: &dyn Interrupt,
    stats: &mut PulseStats,
) -> StageOne {
    let run = PulseSearch::new(crate::graph::NetworkView::full(net), trees, &task.base)
        .with_interrupt(interrupt)
        .optimal(INFINITY);
    *stats += run.stats;
    if run.interrupted {
        return StageOne::Interrupted;
    }
    let Some(ap) = run.found else {
        return StageOne::NoCandidate;
    };
    let attempt = protector.attempt(&ap, interrupt);
    *stats += attempt.stats;
    if attempt.interrupted {
        return StageOne::Interrupted;
    }
    match attempt.pp {
        Some(pp) => StageOne::Protected(DisjointPair { ap, pp }),
        None => StageOne::Trapped(CorridorPlan::new(net, ap, width)),
    }
}

/// Outcome of scanning one corridor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorridorScan {
    pub index: u64,
    pub pair: Option<DisjointPair>,
    /// Feasible candidates enumerated in the corridor.
    pub candidates: u64,
    /// Candidates handed to the protector before the scan ended.
    pub checked: u64,
    pub stats: PulseStats,
    pub interrupted: bool,
    /// The enumeration never cut a branch on cost, so no feasible path
    /// costs more than the corridor's upper edge and every corridor past
    /// the next one is empty.
    pub tail_empty: bool,
}

/// Orders candidates by cost, ties by edge-id sequence.
pub fn sort_candidates(candidates: &mut [Path]) {
    candidates.sort_by(|a, b| a.cost().cmp(&b.cost()).then_with(|| a.edges().cmp(b.edges())));
}

/// Enumerates corridor `index` of `plan` and tries candidates in order.
/// Deterministic: the same inputs always yield the same pair.
pub fn scan_corridor(
    net: &Network,
    trees: &ReverseTrees,
    task: &SrlgTask,
    plan: &CorridorPlan,
    index: u64,
    protector: &mut Protector<'_>,
    interrupt: &dyn Interrupt,
) -> CorridorScan {
    let corridor = plan.corridor(index);
    let run = PulseSearch::new(crate::graph::NetworkView::full(net), trees, &task.base)
        .with_interrupt(interrupt)
        .all_in_corridor(corridor);
    let mut scan = CorridorScan {
        index,
        pair: None,
        candidates: 0,
        checked: 0,
        stats: run.stats,
        interrupted: run.interrupted,
        tail_empty: !run.interrupted && run.stats.cost_prunes == 0,
    };
    if run.interrupted {
        return scan;
    }
    let mut candidates = run.found;
    // stage one already tried this one
    candidates.retain(|p| p.edges() != plan.first_ap.edges());
    sort_candidates(&mut candidates);
    scan.candidates = candidates.len() as u64;
    for ap in candidates {
        scan.checked += 1;
        let attempt = protector.attempt(&ap, interrupt);
        scan.stats += attempt.stats;
        if attempt.interrupted {
            scan.interrupted = true;
            return scan;
        }
        if let Some(pp) = attempt.pp {
            scan.pair = Some(DisjointPair { ap, pp });
            return scan;
        }
    }
    scan
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BtcsSolution {
    pub pair: Option<DisjointPair>,
    pub report: SolveReport,
}

/// Sequential corridor search. The returned active path is the cheapest
/// feasible one that has any valid protection path.
pub fn solve_btcs(
    net: &Network,
    trees: &ReverseTrees,
    task: &SrlgTask,
    cfg: &BtcsConfig,
    interrupt: &dyn Interrupt,
) -> BtcsSolution {
    let width = cfg.corridor_width(net);
    let mut protector = Protector::new(net, trees, task);
    let mut stats = PulseStats::default();
    let mut report = SolveReport::new(Outcome::Infeasible);
    report.iterations = 1;

    let stage = first_stage(net, trees, task, width, &mut protector, interrupt, &mut stats);
    let plan = match stage {
        StageOne::NoCandidate => {
            report.pulses = stats.pulses;
            return BtcsSolution { pair: None, report };
        }
        StageOne::Interrupted => {
            report.outcome = Outcome::Timeout;
            report.pulses = stats.pulses;
            return BtcsSolution { pair: None, report };
        }
        StageOne::Protected(pair) => {
            report.outcome = Outcome::Pair;
            report.ap_candidates_checked = 1;
            report.pulses = stats.pulses;
            return BtcsSolution { pair: Some(pair), report };
        }
        StageOne::Trapped(plan) => plan,
    };
    report.ap_candidates_checked = 1;

    let mut pair = None;
    let mut end = plan.corridor_count;
    let mut k = 0;
    while k < end {
        if cfg.max_corridors.is_some_and(|m| k >= m) {
            report.outcome = Outcome::Timeout;
            break;
        }
        let scan = scan_corridor(net, trees, task, &plan, k, &mut protector, interrupt);
        stats += scan.stats;
        report.iterations += 1;
        report.corridors_explored = k + 1;
        report.ap_candidates_checked += scan.checked;
        if scan.interrupted {
            report.outcome = Outcome::Timeout;
            break;
        }
        if let Some(found) = scan.pair {
            report.outcome = Outcome::Pair;
            pair = Some(found);
            break;
        }
        if scan.tail_empty {
            end = end.min(k + 2);
        }
        k += 1;
    }
    report.pulses = stats.pulses;
    BtcsSolution { pair, report }
}
