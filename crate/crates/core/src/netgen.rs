//! Benchmark generators: random graphs, SRLG assignments, routing tasks and
//! the feasibility / trap filter applied to task sets.
//!
//! Every generator is a pure function of its inputs and a 64-bit seed
//! (ChaCha8 stream), so the same call always yields the same output.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::distributions::{Bernoulli, Distribution};
use rand::seq::{index, SliceRandom};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::btcs::{first_stage, scan_corridor, solve_btcs, BtcsConfig, CorridorPlan, Protector, StageOne};
use crate::graph::{DrcrTask, Edge, EdgeId, Network, NetworkView, NodeId, SrlgTask, Task};
use crate::interrupt::{Interrupt, Never};
use crate::preprocess::{ReverseTrees, TreeCache};
use crate::pulse::{PulseSearch, PulseStats};
use crate::report::Outcome;
use crate::INFINITY;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenError {
    TooFewNodes(usize),
    /// Scale-free attachment needs `1 <= m < nodes`.
    BadAttachment { m: usize, nodes: usize },
    BadRange { lo: u64, hi: u64 },
    NoEdges,
    /// Could not draw enough distinct reachable pairs.
    Sampling { wanted: usize, got: usize },
}

impl fmt::Display for GenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TooFewNodes(n) => write!(f, "need at least 2 nodes, got {n}"),
            Self::BadAttachment { m, nodes } => write!(f, "attachment m={m} invalid for {nodes} nodes"),
            Self::BadRange { lo, hi } => write!(f, "invalid weight range [{lo}, {hi}]"),
            Self::NoEdges => f.write_str("network has no edges"),
            Self::Sampling { wanted, got } => write!(f, "only {got} of {wanted} tasks could be sampled"),
        }
    }
}

impl core::error::Error for GenError {}

/// ER density classes. Link targets follow the published dataset averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DensityClass {
    K1,
    K2,
    K3,
}

const TABLE_NODES: [u64; 6] = [1000, 2000, 4000, 6000, 8000, 10000];
const TABLE_LINKS: [[u64; 6]; 3] = [
    [6929, 15293, 33234, 52470, 72063, 92110],
    [13833, 29953, 66240, 104135, 143249, 184279],
    [20828, 45625, 99050, 156321, 215934, 275652],
];

impl DensityClass {
    pub const ALL: [Self; 3] = [Self::K1, Self::K2, Self::K3];

    /// Expected directed link count for an `nodes`-node graph: mean degree
    /// interpolated linearly between table rows, held flat outside them.
    pub fn target_links(self, nodes: usize) -> u64 {
        let row = &TABLE_LINKS[self as usize];
        let degree = |i: usize| row[i] as f64 / TABLE_NODES[i] as f64;
        let n = nodes as f64;
        let deg = if nodes as u64 <= TABLE_NODES[0] {
            degree(0)
        } else if nodes as u64 >= TABLE_NODES[5] {
            degree(5)
        } else {
            let i = TABLE_NODES.iter().position(|&t| t >= nodes as u64).unwrap();
            let (n0, n1) = (TABLE_NODES[i - 1] as f64, TABLE_NODES[i] as f64);
            let t = (n - n0) / (n1 - n0);
            degree(i - 1) + t * (degree(i) - degree(i - 1))
        };
        (deg * n + 0.5) as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    /// Directed G(n, p) with p set so the expected link count is `links`.
    ErdosRenyi { links: u64 },
    /// Preferential attachment with `m` links per new node, both directions.
    ScaleFree { m: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GenSpec {
    pub topology: Topology,
    pub nodes: usize,
    pub cost_range: (u64, u64),
    pub delay_range: (u64, u64),
    pub seed: u64,
}

impl GenSpec {
    pub const DEFAULT_RANGE: (u64, u64) = (1, 100);

    pub fn erdos_renyi(nodes: usize, class: DensityClass, seed: u64) -> Self {
        let links = class.target_links(nodes);
        Self::with_topology(Topology::ErdosRenyi { links }, nodes, seed)
    }

    pub fn scale_free(nodes: usize, m: usize, seed: u64) -> Self {
        Self::with_topology(Topology::ScaleFree { m }, nodes, seed)
    }

    fn with_topology(topology: Topology, nodes: usize, seed: u64) -> Self {
        Self { topology, nodes, cost_range: Self::DEFAULT_RANGE, delay_range: Self::DEFAULT_RANGE, seed }
    }
}

pub fn gen_graph(spec: &GenSpec) -> Result<Network, GenError> {
    let n = spec.nodes;
    if n < 2 {
        return Err(GenError::TooFewNodes(n));
    }
    for (lo, hi) in [spec.cost_range, spec.delay_range] {
        if lo == 0 || lo > hi {
            return Err(GenError::BadRange { lo, hi });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let arcs = match spec.topology {
        Topology::ErdosRenyi { links } => erdos_renyi_arcs(&mut rng, n, links),
        Topology::ScaleFree { m } => {
            if m == 0 || m >= n {
                return Err(GenError::BadAttachment { m, nodes: n });
            }
            barabasi_albert_edges(&mut rng, n, m)
                .into_iter()
                .flat_map(|(u, v)| [(u, v), (v, u)])
                .collect()
        }
    };
    let (c, d) = (spec.cost_range, spec.delay_range);
    let edges = arcs
        .into_iter()
        .map(|(from, to)| {
            let cost = rng.gen_range(c.0..=c.1);
            let delay = rng.gen_range(d.0..=d.1);
            Edge { from, to, cost, delay }
        })
        .collect();
    Ok(Network::new(n, edges).expect("generated edges are valid"))
}

fn erdos_renyi_arcs(rng: &mut ChaCha8Rng, n: usize, links: u64) -> Vec<(NodeId, NodeId)> {
    let pairs = (n * (n - 1)) as f64;
    let p = (links as f64 / pairs).min(1.0);
    let coin = Bernoulli::new(p).expect("probability in [0, 1]");
    let mut arcs = Vec::with_capacity(links as usize + links as usize / 8);
    for u in 0..n as NodeId {
        for v in 0..n as NodeId {
            if u != v && coin.sample(rng) {
                arcs.push((u, v));
            }
        }
    }
    arcs
}

/// Undirected edges of a Barabási–Albert graph built the networkx way: a
/// star on nodes `0..=m`, then each new node links to `m` distinct targets
/// drawn from the degree-weighted node list.
fn barabasi_albert_edges(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<(NodeId, NodeId)> {
    let mut edges: Vec<(NodeId, NodeId)> = (1..=m as NodeId).map(|v| (0, v)).collect();
    let mut repeated: Vec<NodeId> = Vec::with_capacity(2 * m * n);
    repeated.extend(core::iter::repeat_n(0, m));
    repeated.extend(1..=m as NodeId);
    let mut targets: Vec<NodeId> = Vec::with_capacity(m);
    for source in (m + 1) as NodeId..n as NodeId {
        targets.clear();
        while targets.len() < m {
            let x = *repeated.choose(rng).expect("non-empty");
            if !targets.contains(&x) {
                targets.push(x);
            }
        }
        edges.extend(targets.iter().map(|&t| (source, t)));
        repeated.extend_from_slice(&targets);
        repeated.extend(core::iter::repeat_n(source, m));
    }
    edges
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SrlgPattern {
    /// Groups of uniformly chosen links from anywhere in the graph.
    Random,
    /// Groups of egress links of a single node.
    Star,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SrlgSpec {
    pub pattern: SrlgPattern,
    pub seed: u64,
    /// Group size range for the random pattern.
    pub random_size: (usize, usize),
}

impl SrlgSpec {
    pub fn new(pattern: SrlgPattern, seed: u64) -> Self {
        Self { pattern, seed, random_size: (1, 40) }
    }
}

/// Draws groups until every edge belongs to at least one.
pub fn gen_srlg(net: &Network, spec: &SrlgSpec) -> Result<Vec<Vec<EdgeId>>, GenError> {
    let m = net.edge_count();
    if m == 0 {
        return Err(GenError::NoEdges);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let groups = match spec.pattern {
        SrlgPattern::Random => {
            let (lo, hi) = spec.random_size;
            if lo == 0 || lo > hi {
                return Err(GenError::BadRange { lo: lo as u64, hi: hi as u64 });
            }
            random_groups(&mut rng, m, lo, hi)
        }
        SrlgPattern::Star => star_groups(&mut rng, net),
    };
    Ok(groups)
}

fn random_groups(rng: &mut ChaCha8Rng, m: usize, lo: usize, hi: usize) -> Vec<Vec<EdgeId>> {
    let mut covered = vec![false; m];
    let mut left = m;
    let mut groups = Vec::new();
    while left > 0 {
        let k = rng.gen_range(lo..=hi).min(m);
        let mut group: Vec<EdgeId> = index::sample(rng, m, k).into_iter().map(|e| e as EdgeId).collect();
        group.sort_unstable();
        for &e in &group {
            if !core::mem::replace(&mut covered[e as usize], true) {
                left -= 1;
            }
        }
        groups.push(group);
    }
    groups
}

fn star_groups(rng: &mut ChaCha8Rng, net: &Network) -> Vec<Vec<EdgeId>> {
    let n = net.node_count();
    let m = net.edge_count();
    let max_size = m.div_ceil(n).max(1);
    let mut covered = vec![false; m];
    let mut open: Vec<NodeId> = (0..n as NodeId).filter(|&v| net.out_degree(v) > 0).collect();
    let mut groups = Vec::new();
    while !open.is_empty() {
        let slot = rng.gen_range(0..open.len());
        let node = open[slot];
        let egress = net.egress(node);
        let uncovered: Vec<EdgeId> = egress.iter().copied().filter(|&e| !covered[e as usize]).collect();
        let anchor = *uncovered.choose(rng).expect("open nodes have uncovered egress");
        let size = rng.gen_range(1..=max_size).min(egress.len());
        let others: Vec<EdgeId> = egress.iter().copied().filter(|&e| e != anchor).collect();
        let mut group = vec![anchor];
        group.extend(index::sample(rng, others.len(), size - 1).into_iter().map(|i| others[i]));
        group.sort_unstable();
        for &e in &group {
            covered[e as usize] = true;
        }
        if egress.iter().all(|&e| covered[e as usize]) {
            open.swap_remove(slot);
        }
        groups.push(group);
    }
    groups
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TaskKind {
    /// Delay-range window `[ceil(gamma*D), ceil(beta*D)]`.
    Drcr,
    /// Window `[0, ceil(beta*D)]` plus a delay-difference limit.
    Srlg,
}

/// Draw attempts allowed per requested task.
const ATTEMPTS_PER_TASK: usize = 200;

/// `count` tasks on distinct (source, target) pairs with a finite minimum
/// delay `D`. `beta` is drawn from [1.2, 2.0], `gamma` from [0.3, 0.8] and
/// `d_diff` from `[d_up/10, d_up/2]` (rounded inwards).
pub fn gen_tasks(net: &Network, count: usize, kind: TaskKind, seed: u64) -> Result<Vec<Task>, GenError> {
    let n = net.node_count();
    if n < 2 {
        return Err(GenError::TooFewNodes(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cache = TreeCache::new();
    let mut seen = alloc::collections::BTreeSet::new();
    let mut tasks = Vec::with_capacity(count);
    let budget = count.saturating_mul(ATTEMPTS_PER_TASK).max(1000);
    for _ in 0..budget {
        if tasks.len() == count {
            break;
        }
        let s = rng.gen_range(0..n) as NodeId;
        let t = rng.gen_range(0..n) as NodeId;
        if s == t || seen.contains(&(s, t)) {
            continue;
        }
        let d = cache.get(net, t).min_delay(s);
        if d == INFINITY {
            continue;
        }
        seen.insert((s, t));
        let beta: u64 = rng.gen_range(1200..=2000);
        let d_up = (beta * d).div_ceil(1000);
        let task = match kind {
            TaskKind::Drcr => {
                let gamma: u64 = rng.gen_range(300..=800);
                let d_low = (gamma * d).div_ceil(1000);
                Task::Drcr(DrcrTask::new(s, t, d_low, d_up).expect("gamma < beta"))
            }
            TaskKind::Srlg => {
                let d_diff = rng.gen_range(d_up.div_ceil(10)..=d_up / 2);
                Task::Srlg(SrlgTask::new(DrcrTask::new(s, t, 0, d_up).expect("d_up > 0"), d_diff))
            }
        };
        tasks.push(task);
    }
    if tasks.len() < count {
        return Err(GenError::Sampling { wanted: count, got: tasks.len() });
    }
    Ok(tasks)
}

/// Verdict of the task filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TaskLabel {
    /// DRCR task with a feasible path.
    Feasible,
    /// No feasible (active) path.
    Infeasible,
    /// An optimal-cost active path has a protection path.
    NonTrap,
    /// Trap for which the corridor search finds a pair.
    AvoidableTrap,
    /// Trap with no protected active path at any cost.
    UnavoidableTrap,
    /// Trap whose avoidability was not settled within the budget.
    Undetermined,
}

impl TaskLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Feasible => "feasible",
            Self::Infeasible => "infeasible",
            Self::NonTrap => "non_trap",
            Self::AvoidableTrap => "avoidable",
            Self::UnavoidableTrap => "unavoidable",
            Self::Undetermined => "undetermined",
        }
    }

    /// Whether the filter keeps the task.
    pub fn kept(self) -> bool {
        matches!(self, Self::Feasible | Self::AvoidableTrap | Self::UnavoidableTrap | Self::Undetermined)
    }

    pub fn is_trap(self) -> bool {
        matches!(self, Self::AvoidableTrap | Self::UnavoidableTrap | Self::Undetermined)
    }
}

/// Labels one task. For SRLG tasks a trap means no active path of the
/// optimal cost can be protected; avoidability is then settled by the
/// corridor search under `btcs` (its corridor cap acts as the budget).
pub fn classify_task(
    net: &Network,
    trees: &ReverseTrees,
    task: &Task,
    btcs: &BtcsConfig,
    interrupt: &dyn Interrupt,
) -> TaskLabel {
    match task {
        Task::Drcr(t) => {
            let run = PulseSearch::new(NetworkView::full(net), trees, t).with_interrupt(interrupt).optimal(INFINITY);
            match (run.found, run.interrupted) {
                (Some(_), _) => TaskLabel::Feasible,
                (None, true) => TaskLabel::Undetermined,
                (None, false) => TaskLabel::Infeasible,
            }
        }
        Task::Srlg(t) => classify_srlg(net, trees, t, btcs, interrupt),
    }
}

fn classify_srlg(
    net: &Network,
    trees: &ReverseTrees,
    task: &SrlgTask,
    btcs: &BtcsConfig,
    interrupt: &dyn Interrupt,
) -> TaskLabel {
    let mut protector = Protector::new(net, trees, task);
    let mut stats = PulseStats::default();
    let plan = match first_stage(net, trees, task, 1, &mut protector, interrupt, &mut stats) {
        StageOne::NoCandidate => return TaskLabel::Infeasible,
        StageOne::Protected(_) => return TaskLabel::NonTrap,
        StageOne::Interrupted => return TaskLabel::Undetermined,
        StageOne::Trapped(plan) => plan,
    };
    // other active paths tied at the optimal cost
    let ties = CorridorPlan { corridor_count: 1, ..plan };
    let scan = scan_corridor(net, trees, task, &ties, 0, &mut protector, interrupt);
    if scan.interrupted {
        return TaskLabel::Undetermined;
    }
    if scan.pair.is_some() {
        return TaskLabel::NonTrap;
    }
    match solve_btcs(net, trees, task, btcs, interrupt).report.outcome {
        Outcome::Pair | Outcome::Optimal => TaskLabel::AvoidableTrap,
        Outcome::Infeasible => TaskLabel::UnavoidableTrap,
        Outcome::Timeout => TaskLabel::Undetermined,
    }
}

/// Labels every task and keeps feasible DRCR tasks and SRLG traps.
pub fn filter_tasks(net: &Network, tasks: &[Task], btcs: &BtcsConfig) -> Vec<(Task, TaskLabel)> {
    let mut cache = TreeCache::new();
    tasks
        .iter()
        .filter_map(|task| {
            let trees = cache.get(net, task.base().target);
            let label = classify_task(net, &trees, task, btcs, &Never);
            label.kept().then_some((*task, label))
        })
        .collect()
}
