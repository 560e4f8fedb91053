//! Brute-force ground truth and path-cost histograms.
//!
//! The enumeration here shares no code with the pulse engine: plain
//! recursive DFS in edge-id order, no bounds, no ordering heuristics. It
//! refuses instances that exceed the caller's path limit instead of
//! truncating, so results are always complete.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::btcs::{DisjointPair, Protector};
use crate::graph::{DrcrTask, EdgeId, Network, NetworkView, NodeId, Path, SrlgId, SrlgTask};
use crate::interrupt::Never;
use crate::preprocess::ReverseTrees;
use crate::pulse::{BinSpec, CostCorridor, CostCounts, PulseSearch};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    /// More than `limit` elementary paths; shrink the instance.
    TooLarge { limit: usize },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TooLarge { limit } => write!(f, "instance has more than {limit} paths"),
        }
    }
}

impl core::error::Error for OracleError {}

struct Walk<'a> {
    net: &'a Network,
    target: NodeId,
    limit: usize,
    visited: Vec<bool>,
    stack: Vec<EdgeId>,
    out: Vec<Path>,
}

impl Walk<'_> {
    fn visit(&mut self, at: NodeId) -> Result<(), OracleError> {
        if at == self.target {
            if self.out.len() == self.limit {
                return Err(OracleError::TooLarge { limit: self.limit });
            }
            let path = Path::from_edges(self.net, self.stack.clone()).expect("walk keeps paths elementary");
            self.out.push(path);
            return Ok(());
        }
        for &e in self.net.egress(at) {
            let next = self.net.edge(e).to;
            if self.visited[next as usize] {
                continue;
            }
            self.visited[next as usize] = true;
            self.stack.push(e);
            self.visit(next)?;
            self.stack.pop();
            self.visited[next as usize] = false;
        }
        Ok(())
    }
}

/// Every elementary path from `s` to `t`.
pub fn enumerate_paths(net: &Network, s: NodeId, t: NodeId, limit: usize) -> Result<Vec<Path>, OracleError> {
    if s == t {
        return Ok(Vec::new());
    }
    let mut walk = Walk {
        net,
        target: t,
        limit,
        visited: vec![false; net.node_count()],
        stack: Vec::new(),
        out: Vec::new(),
    };
    walk.visited[s as usize] = true;
    walk.visit(s)?;
    Ok(walk.out)
}

fn by_cost_then_edges(a: &Path, b: &Path) -> core::cmp::Ordering {
    a.cost().cmp(&b.cost()).then_with(|| a.edges().cmp(b.edges()))
}

/// Cheapest path with delay in the task window.
pub fn oracle_drcr(net: &Network, task: &DrcrTask, limit: usize) -> Result<Option<Path>, OracleError> {
    let paths = enumerate_paths(net, task.source, task.target, limit)?;
    Ok(paths
        .into_iter()
        .filter(|p| task.admits_delay(p.delay()))
        .min_by(by_cost_then_edges))
}

/// Edges of `path` and the SRLGs they belong to.
fn risk_footprint(net: &Network, path: &Path) -> (BTreeSet<EdgeId>, BTreeSet<SrlgId>) {
    let edges: BTreeSet<EdgeId> = path.edges().iter().copied().collect();
    let groups = path.edges().iter().flat_map(|&e| net.srlgs_of(e).iter().copied()).collect();
    (edges, groups)
}

fn disjoint(a: &(BTreeSet<EdgeId>, BTreeSet<SrlgId>), b: &(BTreeSet<EdgeId>, BTreeSet<SrlgId>)) -> bool {
    a.0.is_disjoint(&b.0) && a.1.is_disjoint(&b.1)
}

/// Exhaustive protection check of `ap` against a precomputed path list.
fn has_protection(net: &Network, task: &SrlgTask, ap: &Path, all: &[Path]) -> Option<Path> {
    let ap_risk = risk_footprint(net, ap);
    all.iter()
        .find(|pp| {
            task.base.admits_delay(pp.delay())
                && ap.delay().abs_diff(pp.delay()) <= task.d_diff
                && disjoint(&ap_risk, &risk_footprint(net, pp))
        })
        .cloned()
}

/// Cheapest feasible active path that has any valid protection path.
pub fn oracle_minmin(net: &Network, task: &SrlgTask, limit: usize) -> Result<Option<DisjointPair>, OracleError> {
    let base = &task.base;
    let all = enumerate_paths(net, base.source, base.target, limit)?;
    let mut feasible: Vec<&Path> = all.iter().filter(|p| base.admits_delay(p.delay())).collect();
    feasible.sort_by(|a, b| by_cost_then_edges(a, b));
    for ap in feasible {
        if let Some(pp) = has_protection(net, task, ap, &all) {
            return Ok(Some(DisjointPair { ap: ap.clone(), pp }));
        }
    }
    Ok(None)
}

/// How the protected series decides membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtectionCheck {
    /// Same check the corridor search uses.
    Solver,
    /// Pairwise check against the full path enumeration.
    Exhaustive { limit: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HistogramRequest {
    pub bins: BinSpec,
    /// Per-series path cap.
    pub cap: u64,
    /// Present for SRLG tasks; enables the protected series.
    pub d_diff: Option<u64>,
    pub protection: ProtectionCheck,
}

/// Path counts per cost bin. All present series share the binning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    pub bin_width: u64,
    pub origin: u64,
    pub all: Option<Vec<u64>>,
    pub feasible: Option<Vec<u64>>,
    pub protected: Option<Vec<u64>>,
    pub truncated: bool,
}

impl Histogram {
    pub fn bin_count(&self) -> usize {
        self.series().map(|(_, s)| s.len()).max().unwrap_or(0)
    }

    pub fn bin_low(&self, bin: usize) -> u64 {
        self.origin + bin as u64 * self.bin_width
    }

    /// Present series in column order.
    pub fn series(&self) -> impl Iterator<Item = (&'static str, &Vec<u64>)> {
        [("all", &self.all), ("feasible", &self.feasible), ("protected", &self.protected)]
            .into_iter()
            .filter_map(|(name, s)| s.as_ref().map(|s| (name, s)))
    }

    fn pad(&mut self) {
        let n = self.bin_count();
        for s in [&mut self.all, &mut self.feasible, &mut self.protected].into_iter().flatten() {
            s.resize(n, 0);
        }
    }
}

/// Per-bin counts of the paths `search` accepts. One capped pass is exact
/// when the cap is not reached. Otherwise the bins are recounted one at a
/// time from the cheapest up, so the cap drops the expensive tail instead
/// of whatever the depth-first order reached last.
fn ascending_counts(search: &PulseSearch<'_>, spec: BinSpec, cap: u64, limit: u64) -> CostCounts {
    let single = search.count(spec, cap).found;
    if !single.truncated {
        return single;
    }
    let mut out = CostCounts { spec, bins: Vec::new(), counted: 0, truncated: false };
    let mut lo = spec.origin;
    while lo < spec.ceiling.min(limit) {
        let hi = lo.saturating_add(spec.width).min(spec.ceiling);
        let bin = search.count(BinSpec { width: spec.width, origin: lo, ceiling: hi }, cap - out.counted).found;
        out.bins.push(bin.counted);
        out.counted += bin.counted;
        if bin.truncated {
            out.truncated = true;
            break;
        }
        lo = hi;
    }
    trim_zeros(&mut out.bins);
    out
}

/// Paths in `[spec.origin, spec.ceiling)`, truncated the same way as
/// [`ascending_counts`].
fn ascending_paths(search: &PulseSearch<'_>, spec: BinSpec, cap: usize, limit: u64) -> (Vec<Path>, bool) {
    let Some(corridor) = CostCorridor::new(spec.origin, spec.ceiling) else {
        return (Vec::new(), false);
    };
    let (run, truncated) = search.all_in_corridor_capped(corridor, cap);
    if !truncated {
        return (run.found, false);
    }
    let mut paths = Vec::new();
    let mut lo = spec.origin;
    while lo < spec.ceiling.min(limit) {
        let hi = lo.saturating_add(spec.width).min(spec.ceiling);
        let corridor = CostCorridor::new(lo, hi).expect("non-empty bin");
        let (run, truncated) = search.all_in_corridor_capped(corridor, cap - paths.len());
        paths.extend(run.found);
        if truncated {
            return (paths, true);
        }
        lo = hi;
    }
    (paths, false)
}

fn trim_zeros(bins: &mut Vec<u64>) {
    while bins.last() == Some(&0) {
        bins.pop();
    }
}

/// Builds the all / feasible (/ protected) series for one task.
///
/// `all` counts every path regardless of delay, `feasible` those in the
/// delay window, `protected` the feasible ones that have a protection
/// path. Only costs in `[origin, ceiling)` are binned. When a series hits
/// the cap it holds the cheapest paths up to the cap.
pub fn build_histogram(
    net: &Network,
    trees: &ReverseTrees,
    task: &DrcrTask,
    req: &HistogramRequest,
) -> Result<Histogram, OracleError> {
    let spec = req.bins;
    let limit = net.path_cost_ceiling().saturating_add(1);
    let relaxed = task.relaxed();
    let view = NetworkView::full(net);
    let all = ascending_counts(&PulseSearch::new(view, trees, &relaxed), spec, req.cap, limit);
    let mut hist = Histogram {
        bin_width: spec.width,
        origin: spec.origin,
        all: Some(all.bins),
        feasible: None,
        protected: None,
        truncated: all.truncated,
    };

    let search = PulseSearch::new(view, trees, task);
    match req.d_diff {
        None => {
            let feasible = ascending_counts(&search, spec, req.cap, limit);
            hist.truncated |= feasible.truncated;
            hist.feasible = Some(feasible.bins);
        }
        Some(d_diff) => {
            let cap = usize::try_from(req.cap).unwrap_or(usize::MAX);
            let (candidates, truncated) = ascending_paths(&search, spec, cap, limit);
            hist.truncated |= truncated;
            let srlg_task = SrlgTask::new(*task, d_diff);
            let mut feasible = CostCounts { spec, bins: Vec::new(), counted: 0, truncated };
            let mut protected = CostCounts { spec, bins: Vec::new(), counted: 0, truncated };
            let everything = match req.protection {
                ProtectionCheck::Exhaustive { limit } => Some(enumerate_paths(net, task.source, task.target, limit)?),
                ProtectionCheck::Solver => None,
            };
            let mut protector = Protector::new(net, trees, &srlg_task);
            for ap in &candidates {
                feasible.add(ap.cost());
                let ok = match &everything {
                    Some(all) => has_protection(net, &srlg_task, ap, all).is_some(),
                    None => protector.attempt(ap, &Never).pp.is_some(),
                };
                if ok {
                    protected.add(ap.cost());
                }
            }
            hist.feasible = Some(feasible.bins);
            hist.protected = Some(protected.bins);
        }
    }
    hist.pad();
    Ok(hist)
}
