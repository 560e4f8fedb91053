//! Depth-first pulse search with infeasibility and optimality pruning.
//!
//! One engine, several terminal actions: keep the cheapest feasible path
//! (optimal), collect every feasible path inside a cost corridor, stop at
//! the first feasible path, or count paths into cost bins.
//!
//! The search is iterative (explicit frame stack) so depth is bounded only
//! by the node count. Egress edges are tried in the order stored in
//! [`ReverseTrees`]: ascending `cost(e) + min_cost_to_target(head)`, ties by
//! edge id, which makes every run deterministic.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::AddAssign;

use crate::graph::{DrcrTask, EdgeId, Network, NetworkView, NodeId, Path};
use crate::interrupt::{Interrupt, Never};
use crate::preprocess::ReverseTrees;
use crate::INFINITY;

/// Pulses between two interrupt polls.
const POLL_INTERVAL: u64 = 1024;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PulseStats {
    /// Nodes entered, the source included.
    pub pulses: u64,
    pub infeasibility_prunes: u64,
    pub cost_prunes: u64,
}

impl AddAssign for PulseStats {
    fn add_assign(&mut self, rhs: Self) {
        self.pulses += rhs.pulses;
        self.infeasibility_prunes += rhs.infeasibility_prunes;
        self.cost_prunes += rhs.cost_prunes;
    }
}

/// Which prunings run. Switching one off never changes results, only work.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pruning {
    pub infeasibility: bool,
    pub optimality: bool,
}

impl Pruning {
    pub const ALL: Self = Self { infeasibility: true, optimality: true };
    pub const NONE: Self = Self { infeasibility: false, optimality: false };
}

impl Default for Pruning {
    fn default() -> Self {
        Self::ALL
    }
}

/// Half-open cost interval `[c_low, c_up)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostCorridor {
    c_low: u64,
    c_up: u64,
}

impl CostCorridor {
    /// `None` unless `c_low < c_up`.
    pub fn new(c_low: u64, c_up: u64) -> Option<Self> {
        (c_low < c_up).then_some(Self { c_low, c_up })
    }

    pub fn c_low(&self) -> u64 {
        self.c_low
    }

    pub fn c_up(&self) -> u64 {
        self.c_up
    }

    #[inline]
    pub fn contains(&self, cost: u64) -> bool {
        self.c_low <= cost && cost < self.c_up
    }
}

/// Result of one pulse run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PulseRun<T> {
    pub found: T,
    pub stats: PulseStats,
    /// The interrupt fired; `found` holds whatever was gathered so far.
    pub interrupted: bool,
}

/// Binning for [`count_paths_capped`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinSpec {
    pub width: u64,
    /// Lower edge of bin 0; cheaper paths are ignored.
    pub origin: u64,
    /// Paths costing this much or more are pruned away.
    pub ceiling: u64,
}

impl BinSpec {
    pub fn new(width: u64) -> Self {
        assert!(width > 0, "bin width must be positive");
        Self { width, origin: 0, ceiling: INFINITY }
    }

    pub fn bin_of(&self, cost: u64) -> Option<usize> {
        (cost >= self.origin && cost < self.ceiling).then(|| ((cost - self.origin) / self.width) as usize)
    }
}

/// Per-bin path counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostCounts {
    pub spec: BinSpec,
    /// `bins[i]` counts costs in `[origin + i*width, origin + (i+1)*width)`.
    pub bins: Vec<u64>,
    pub counted: u64,
    /// The cap stopped the count while paths remained.
    pub truncated: bool,
}

impl CostCounts {
    fn new(spec: BinSpec) -> Self {
        Self { spec, bins: Vec::new(), counted: 0, truncated: false }
    }

    pub(crate) fn add(&mut self, cost: u64) {
        if let Some(i) = self.spec.bin_of(cost) {
            if self.bins.len() <= i {
                self.bins.resize(i + 1, 0);
            }
            self.bins[i] += 1;
        }
        self.counted += 1;
    }
}

enum Flow {
    Continue,
    Stop,
}

/// What happens when a pulse reaches the target inside the delay window.
trait Terminal {
    /// Branches whose cost lower bound reaches this value are cut.
    fn cost_cut(&self) -> u64;
    fn arrive(&mut self, path: &[EdgeId], cost: u64, delay: u64) -> Flow;
}

struct Optimal {
    bound: u64,
    best: Option<Path>,
}

impl Terminal for Optimal {
    fn cost_cut(&self) -> u64 {
        self.bound
    }

    fn arrive(&mut self, path: &[EdgeId], cost: u64, delay: u64) -> Flow {
        if cost < self.bound {
            self.bound = cost;
            self.best = Some(Path::from_parts(path.to_vec(), cost, delay));
        }
        Flow::Continue
    }
}

struct Corridor {
    corridor: CostCorridor,
    paths: Vec<Path>,
    cap: usize,
    truncated: bool,
}

impl Terminal for Corridor {
    fn cost_cut(&self) -> u64 {
        // prune only when the lower bound exceeds c_up
        self.corridor.c_up.saturating_add(1)
    }

    fn arrive(&mut self, path: &[EdgeId], cost: u64, delay: u64) -> Flow {
        if !self.corridor.contains(cost) {
            return Flow::Continue;
        }
        if self.paths.len() == self.cap {
            self.truncated = true;
            return Flow::Stop;
        }
        self.paths.push(Path::from_parts(path.to_vec(), cost, delay));
        Flow::Continue
    }
}

struct FirstFeasible {
    found: Option<Path>,
}

impl Terminal for FirstFeasible {
    fn cost_cut(&self) -> u64 {
        INFINITY
    }

    fn arrive(&mut self, path: &[EdgeId], cost: u64, delay: u64) -> Flow {
        self.found = Some(Path::from_parts(path.to_vec(), cost, delay));
        Flow::Stop
    }
}

struct Counter {
    counts: CostCounts,
    cap: u64,
}

impl Terminal for Counter {
    fn cost_cut(&self) -> u64 {
        self.counts.spec.ceiling
    }

    fn arrive(&mut self, _path: &[EdgeId], cost: u64, _delay: u64) -> Flow {
        if cost >= self.counts.spec.ceiling || cost < self.counts.spec.origin {
            return Flow::Continue;
        }
        if self.counts.counted == self.cap {
            self.counts.truncated = true;
            return Flow::Stop;
        }
        self.counts.add(cost);
        Flow::Continue
    }
}

struct Frame {
    node: NodeId,
    next: usize,
    end: usize,
}

/// A configured pulse search over one view, task and set of trees.
#[derive(Clone, Copy)]
pub struct PulseSearch<'a> {
    view: NetworkView<'a>,
    trees: &'a ReverseTrees,
    task: &'a DrcrTask,
    pruning: Pruning,
    interrupt: &'a dyn Interrupt,
}

impl<'a> PulseSearch<'a> {
    /// `trees` must be built for `task.target` on the network underlying
    /// `view` (a superset of the view's edges keeps the bounds sound).
    pub fn new(view: NetworkView<'a>, trees: &'a ReverseTrees, task: &'a DrcrTask) -> Self {
        debug_assert_eq!(trees.target(), task.target);
        Self { view, trees, task, pruning: Pruning::ALL, interrupt: &Never }
    }

    pub fn with_pruning(mut self, pruning: Pruning) -> Self {
        self.pruning = pruning;
        self
    }

    pub fn with_interrupt(mut self, interrupt: &'a dyn Interrupt) -> Self {
        self.interrupt = interrupt;
        self
    }

    /// Cheapest feasible path with cost strictly below `initial_bound`.
    pub fn optimal(&self, initial_bound: u64) -> PulseRun<Option<Path>> {
        let mut t = Optimal { bound: initial_bound, best: None };
        let (stats, interrupted) = self.run(&mut t);
        PulseRun { found: t.best, stats, interrupted }
    }

    /// Every feasible path with cost in the corridor, in discovery order.
    pub fn all_in_corridor(&self, corridor: CostCorridor) -> PulseRun<Vec<Path>> {
        self.all_in_corridor_capped(corridor, usize::MAX).0
    }

    /// As [`Self::all_in_corridor`] but stops after `cap` paths; the flag
    /// reports whether more existed.
    pub fn all_in_corridor_capped(&self, corridor: CostCorridor, cap: usize) -> (PulseRun<Vec<Path>>, bool) {
        let mut t = Corridor { corridor, paths: Vec::new(), cap, truncated: false };
        let (stats, interrupted) = self.run(&mut t);
        (PulseRun { found: t.paths, stats, interrupted }, t.truncated)
    }

    /// Any feasible path; the search ends at the first one found.
    pub fn first_feasible(&self) -> PulseRun<Option<Path>> {
        let mut t = FirstFeasible { found: None };
        let (stats, interrupted) = self.run(&mut t);
        PulseRun { found: t.found, stats, interrupted }
    }

    /// Counts feasible paths into cost bins, stopping after `cap` paths.
    pub fn count(&self, spec: BinSpec, cap: u64) -> PulseRun<CostCounts> {
        let mut t = Counter { counts: CostCounts::new(spec), cap };
        let (stats, interrupted) = self.run(&mut t);
        PulseRun { found: t.counts, stats, interrupted }
    }

    fn run<T: Terminal>(&self, terminal: &mut T) -> (PulseStats, bool) {
        let net: &Network = self.view.network();
        let trees = self.trees;
        let task = self.task;
        let order = trees.ordered_all();
        let mut stats = PulseStats::default();
        if trees.min_delay(task.source) == INFINITY {
            return (stats, false);
        }

        let mut visited = vec![false; net.node_count()];
        visited[task.source as usize] = true;
        let range = net.egress_range(task.source);
        let mut frames = vec![Frame { node: task.source, next: range.start, end: range.end }];
        let mut path: Vec<EdgeId> = Vec::new();
        let (mut cost, mut delay) = (0u64, 0u64);
        stats.pulses = 1;

        while let Some(frame) = frames.last_mut() {
            if frame.next == frame.end {
                visited[frame.node as usize] = false;
                frames.pop();
                if let Some(e) = path.pop() {
                    let edge = net.edge(e);
                    cost -= edge.cost;
                    delay -= edge.delay;
                }
                continue;
            }
            let e = order[frame.next];
            frame.next += 1;

            if !self.view.allows(e) {
                continue;
            }
            let edge = net.edge(e);
            let head = edge.to;
            if visited[head as usize] {
                continue;
            }
            let to_go_delay = trees.min_delay(head);
            if to_go_delay == INFINITY {
                continue;
            }
            let next_delay = delay + edge.delay;
            if self.pruning.infeasibility && next_delay.saturating_add(to_go_delay) > task.d_up {
                stats.infeasibility_prunes += 1;
                continue;
            }
            let next_cost = cost + edge.cost;
            if self.pruning.optimality
                && next_cost.saturating_add(trees.min_cost(head)) >= terminal.cost_cut()
            {
                stats.cost_prunes += 1;
                continue;
            }

            stats.pulses += 1;
            if stats.pulses % POLL_INTERVAL == 0 && self.interrupt.interrupted() {
                return (stats, true);
            }

            if head == task.target {
                // nothing elementary continues past the target
                if task.admits_delay(next_delay) {
                    path.push(e);
                    let flow = terminal.arrive(&path, next_cost, next_delay);
                    path.pop();
                    if let Flow::Stop = flow {
                        break;
                    }
                }
                continue;
            }

            path.push(e);
            cost = next_cost;
            delay = next_delay;
            visited[head as usize] = true;
            let range = net.egress_range(head);
            frames.push(Frame { node: head, next: range.start, end: range.end });
        }
        (stats, false)
    }
}

pub fn pulse_optimal(
    view: NetworkView<'_>,
    trees: &ReverseTrees,
    task: &DrcrTask,
    initial_bound: u64,
) -> PulseRun<Option<Path>> {
    PulseSearch::new(view, trees, task).optimal(initial_bound)
}

pub fn pulse_all_in_corridor(
    view: NetworkView<'_>,
    trees: &ReverseTrees,
    task: &DrcrTask,
    corridor: CostCorridor,
) -> PulseRun<Vec<Path>> {
    PulseSearch::new(view, trees, task).all_in_corridor(corridor)
}

pub fn pulse_first_feasible(
    view: NetworkView<'_>,
    trees: &ReverseTrees,
    task: &DrcrTask,
) -> PulseRun<Option<Path>> {
    PulseSearch::new(view, trees, task).first_feasible()
}

/// Path counts per cost bin over the full network. Pass `task.relaxed()`
/// to count every path regardless of delay.
pub fn count_paths_capped(
    net: &Network,
    trees: &ReverseTrees,
    task: &DrcrTask,
    spec: BinSpec,
    cap: u64,
) -> PulseRun<CostCounts> {
    PulseSearch::new(NetworkView::full(net), trees, task).count(spec, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ExclusionMask;
    use crate::oracle::enumerate_paths;
    use crate::preprocess::build_reverse_trees;
    use crate::testutil::{diamond, edge, random_network};
    use alloc::collections::BTreeSet;
    use proptest::prelude::*;

    fn task(s: NodeId, t: NodeId, lo: u64, hi: u64) -> DrcrTask {
        DrcrTask::new(s, t, lo, hi).unwrap()
    }

    #[test]
    fn single_edge_optimal() {
        let net = Network::new(2, vec![edge(0, 1, 5, 7)]).unwrap();
        let trees = build_reverse_trees(&net, 1);
        let run = pulse_optimal(NetworkView::full(&net), &trees, &task(0, 1, 0, 10), INFINITY);
        assert_eq!(run.found.unwrap().cost(), 5);
    }

    #[test]
    fn diamond_optimal_skips_slow_cheap_route() {
        let net = diamond();
        let trees = build_reverse_trees(&net, 3);
        let t = task(0, 3, 0, 15);
        let run = pulse_optimal(NetworkView::full(&net), &trees, &t, INFINITY);
        let p = run.found.unwrap();
        assert_eq!(p.cost(), 10);
        assert_eq!(p.edges(), &[2, 3]);
        // bound equal to the optimum is not strictly above it
        assert!(pulse_optimal(NetworkView::full(&net), &trees, &t, 10).found.is_none());
        assert_eq!(pulse_optimal(NetworkView::full(&net), &trees, &t, 11).found.unwrap().cost(), 10);
    }

    #[test]
    fn corridor_enumeration_on_diamond() {
        let net = diamond();
        let trees = build_reverse_trees(&net, 3);
        let t = task(0, 3, 0, 100);
        let view = NetworkView::full(&net);
        let costs = |c: CostCorridor| {
            let mut v: Vec<u64> = pulse_all_in_corridor(view, &trees, &t, c).found.iter().map(Path::cost).collect();
            v.sort();
            v
        };
        assert_eq!(costs(CostCorridor::new(0, 100).unwrap()), vec![2, 10]);
        assert!(costs(CostCorridor::new(3, 10).unwrap()).is_empty());
        assert_eq!(costs(CostCorridor::new(10, 11).unwrap()), vec![10]);
        assert!(CostCorridor::new(5, 5).is_none());
    }

    #[test]
    fn first_feasible_returns_the_feasible_branch() {
        let net = diamond();
        let trees = build_reverse_trees(&net, 3);
        // the cheap branch (delay 20) is out of window; only via b (delay 2)
        let p = pulse_first_feasible(NetworkView::full(&net), &trees, &task(0, 3, 0, 15)).found.unwrap();
        assert_eq!(p.edges(), &[2, 3]);
        assert!(task(0, 3, 0, 15).admits_delay(p.recompute(&net).1));

        let single = Network::new(2, vec![edge(0, 1, 5, 7)]).unwrap();
        let trees = build_reverse_trees(&single, 1);
        let p = pulse_first_feasible(NetworkView::full(&single), &trees, &task(0, 1, 0, 10)).found.unwrap();
        assert_eq!(p.edges(), &[0]);
        // window above every achievable delay
        assert!(pulse_first_feasible(NetworkView::full(&single), &trees, &task(0, 1, 8, 100)).found.is_none());
    }

    #[test]
    fn respects_exclusion_mask() {
        let net = diamond();
        let trees = build_reverse_trees(&net, 3);
        let mut mask = ExclusionMask::new(net.edge_count());
        mask.exclude(3);
        let t = task(0, 3, 0, 100);
        let p = pulse_optimal(NetworkView::masked(&net, &mask), &trees, &t, INFINITY).found.unwrap();
        assert_eq!(p.edges(), &[0, 1]);
        mask.exclude(0);
        assert!(pulse_optimal(NetworkView::masked(&net, &mask), &trees, &t, INFINITY).found.is_none());
    }

    #[test]
    fn counting_bins_and_cap() {
        let net = diamond();
        let trees = build_reverse_trees(&net, 3);
        let t = task(0, 3, 0, 15).relaxed();
        let run = count_paths_capped(&net, &trees, &t, BinSpec::new(10), 100_000_000);
        assert_eq!(run.found.bins, vec![1, 1]);
        assert!(!run.found.truncated);

        let run = count_paths_capped(&net, &trees, &t, BinSpec::new(10), 1);
        assert_eq!(run.found.counted, 1);
        assert!(run.found.truncated);

        let split = Network::new(4, vec![edge(0, 1, 1, 1), edge(2, 3, 1, 1)]).unwrap();
        let trees = build_reverse_trees(&split, 3);
        let run = count_paths_capped(&split, &trees, &task(0, 3, 0, 10).relaxed(), BinSpec::new(10), 10);
        assert!(run.found.bins.iter().all(|&c| c == 0));
        assert_eq!(run.found.counted, 0);
    }

    #[test]
    fn interrupt_stops_the_search() {
        // complete digraph on 9 nodes has far more than POLL_INTERVAL pulses
        let mut edges = Vec::new();
        for u in 0..9 {
            for v in 0..9 {
                if u != v {
                    edges.push(edge(u, v, 1 + (u + v) as u64 % 7, 1 + (u * v) as u64 % 5));
                }
            }
        }
        let net = Network::new(9, edges).unwrap();
        let trees = build_reverse_trees(&net, 8);
        let t = task(0, 8, 0, INFINITY);
        let stop = || true;
        let run = PulseSearch::new(NetworkView::full(&net), &trees, &t)
            .with_pruning(Pruning::NONE)
            .with_interrupt(&stop)
            .all_in_corridor(CostCorridor::new(0, INFINITY).unwrap());
        assert!(run.interrupted);
        assert_eq!(run.stats.pulses, POLL_INTERVAL);
    }

    fn brute_optimum(net: &Network, t: &DrcrTask) -> Option<u64> {
        enumerate_paths(net, t.source, t.target, 1 << 20)
            .unwrap()
            .iter()
            .filter(|p| t.admits_delay(p.delay()))
            .map(Path::cost)
            .min()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn optimal_matches_enumeration(seed in any::<u64>(), nodes in 2usize..=10, lo in 0u64..30, width in 0u64..40) {
            let net = random_network(seed, nodes, 25);
            let t = task(0, (nodes - 1) as NodeId, lo, lo + width);
            let trees = build_reverse_trees(&net, t.target);
            let run = pulse_optimal(NetworkView::full(&net), &trees, &t, INFINITY);
            prop_assert_eq!(run.found.as_ref().map(Path::cost), brute_optimum(&net, &t));
            if let Some(p) = &run.found {
                p.verify(&net).unwrap();
                prop_assert_eq!(p.recompute(&net), (p.cost(), p.delay()));
                prop_assert!(t.admits_delay(p.recompute(&net).1));
                prop_assert_eq!(p.source(&net), t.source);
                prop_assert_eq!(p.target(&net), t.target);
            }
            // pruning neutrality
            let plain = PulseSearch::new(NetworkView::full(&net), &trees, &t).with_pruning(Pruning::NONE).optimal(INFINITY);
            prop_assert_eq!(plain.found.as_ref().map(Path::cost), run.found.as_ref().map(Path::cost));
            prop_assert!(plain.stats.pulses >= run.stats.pulses);
        }

        #[test]
        fn raising_bound_keeps_optimum(seed in any::<u64>(), nodes in 2usize..=9, bound in 1u64..80) {
            let net = random_network(seed, nodes, 20);
            let t = task(0, (nodes - 1) as NodeId, 0, 40);
            let trees = build_reverse_trees(&net, t.target);
            let view = NetworkView::full(&net);
            let free = pulse_optimal(view, &trees, &t, INFINITY).found.map(|p| p.cost());
            let bounded = pulse_optimal(view, &trees, &t, bound).found.map(|p| p.cost());
            match free {
                Some(c) if c < bound => prop_assert_eq!(bounded, Some(c)),
                _ => prop_assert_eq!(bounded, None),
            }
        }

        #[test]
        fn corridor_matches_enumeration(seed in any::<u64>(), nodes in 2usize..=9, lo in 0u64..40, w in 1u64..30) {
            let net = random_network(seed, nodes, 22);
            let t = task(0, (nodes - 1) as NodeId, 0, 45);
            let trees = build_reverse_trees(&net, t.target);
            let corridor = CostCorridor::new(lo, lo + w).unwrap();
            let got: BTreeSet<Vec<EdgeId>> = pulse_all_in_corridor(NetworkView::full(&net), &trees, &t, corridor)
                .found.into_iter().map(Path::into_edges).collect();
            let want: BTreeSet<Vec<EdgeId>> = enumerate_paths(&net, t.source, t.target, 1 << 20).unwrap()
                .into_iter()
                .filter(|p| t.admits_delay(p.delay()) && corridor.contains(p.cost()))
                .map(Path::into_edges)
                .collect();
            prop_assert_eq!(got, want);
        }

        #[test]
        fn first_feasible_is_sound(seed in any::<u64>(), nodes in 2usize..=10, lo in 0u64..30) {
            let net = random_network(seed, nodes, 25);
            let t = task(0, (nodes - 1) as NodeId, lo, lo + 15);
            let trees = build_reverse_trees(&net, t.target);
            let found = pulse_first_feasible(NetworkView::full(&net), &trees, &t).found;
            prop_assert_eq!(found.is_some(), brute_optimum(&net, &t).is_some());
            if let Some(p) = found {
                p.verify(&net).unwrap();
                prop_assert!(t.admits_delay(p.recompute(&net).1));
            }
        }
    }
}
