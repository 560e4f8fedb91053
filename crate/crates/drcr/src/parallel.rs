//! Corridor search with several worker threads.
//!
//! Workers claim corridor indices from a shared counter in increasing
//! order. A worker that finds a pair in corridor `k` lowers the shared
//! winner index to `k`, which cancels every corridor above it. Corridors
//! below `k` always run to completion, and the coordinator takes the pair
//! of the lowest corridor that has one, so the answer matches the
//! sequential search exactly.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use drcr_core::btcs::{first_stage, scan_corridor, solve_btcs, BtcsConfig, BtcsSolution, CorridorScan, Protector, StageOne};
use drcr_core::graph::{Network, SrlgTask};
use drcr_core::pulse::PulseStats;
use drcr_core::{Interrupt, Outcome, ReverseTrees, SolveReport};

/// Same contract as [`solve_btcs`]; `cfg.workers` threads scan corridors.
///
/// `corridors_explored` and `ap_candidates_checked` are reported as the
/// sequential search would report them. `pulses` counts all work done,
/// including corridors that were cancelled.
pub fn solve_btcs_parallel(
    net: &Network,
    trees: &ReverseTrees,
    task: &SrlgTask,
    cfg: &BtcsConfig,
    interrupt: &(dyn Interrupt + Sync),
) -> BtcsSolution {
    if cfg.workers <= 1 {
        return solve_btcs(net, trees, task, cfg, interrupt);
    }
    let width = cfg.corridor_width(net);
    let mut protector = Protector::new(net, trees, task);
    let mut stats = PulseStats::default();
    let mut report = SolveReport::new(Outcome::Infeasible);
    report.iterations = 1;
    let plan = match first_stage(net, trees, task, width, &mut protector, interrupt, &mut stats) {
        StageOne::Trapped(plan) => plan,
        other => {
            report.pulses = stats.pulses;
            let pair = match other {
                StageOne::Protected(pair) => {
                    report.outcome = Outcome::Pair;
                    report.ap_candidates_checked = 1;
                    Some(pair)
                }
                StageOne::Interrupted => {
                    report.outcome = Outcome::Timeout;
                    None
                }
                _ => None,
            };
            return BtcsSolution { pair, report };
        }
    };
    report.ap_candidates_checked = 1;

    let limit = cfg.max_corridors.map_or(plan.corridor_count, |m| m.min(plan.corridor_count));
    let next = AtomicU64::new(0);
    let winner = AtomicU64::new(u64::MAX);
    let end = AtomicU64::new(limit);
    let scans: Mutex<BTreeMap<u64, CorridorScan>> = Mutex::new(BTreeMap::new());

    std::thread::scope(|scope| {
        for _ in 0..cfg.workers {
            scope.spawn(|| {
                let mut protector = Protector::new(net, trees, task);
                loop {
                    let k = next.fetch_add(1, Ordering::SeqCst);
                    if k >= end.load(Ordering::SeqCst) || k > winner.load(Ordering::SeqCst) {
                        break;
                    }
                    let cancel = || interrupt.interrupted() || winner.load(Ordering::SeqCst) < k;
                    let scan = scan_corridor(net, trees, task, &plan, k, &mut protector, &cancel);
                    if scan.pair.is_some() {
                        winner.fetch_min(k, Ordering::SeqCst);
                    } else if scan.tail_empty {
                        end.fetch_min(k + 2, Ordering::SeqCst);
                    }
                    let stop = scan.interrupted;
                    scans.lock().expect("worker panicked").insert(k, scan);
                    if stop {
                        break;
                    }
                }
            });
        }
    });

    let scans = scans.into_inner().expect("worker panicked");
    for scan in scans.values() {
        stats += scan.stats;
    }
    report.pulses = stats.pulses;

    // replay the sequential loop over the finished scans
    let mut pair = None;
    let mut end = plan.corridor_count;
    let mut k = 0;
    while k < end {
        if cfg.max_corridors.is_some_and(|m| k >= m) {
            report.outcome = Outcome::Timeout;
            break;
        }
        let Some(scan) = scans.get(&k) else {
            // only an outer interrupt leaves a gap below the winner
            report.outcome = Outcome::Timeout;
            break;
        };
        report.iterations += 1;
        report.corridors_explored = k + 1;
        report.ap_candidates_checked += scan.checked;
        if scan.interrupted {
            report.outcome = Outcome::Timeout;
            break;
        }
        if let Some(found) = &scan.pair {
            report.outcome = Outcome::Pair;
            pair = Some(found.clone());
            break;
        }
        if scan.tail_empty {
            end = end.min(k + 2);
        }
        k += 1;
    }
    BtcsSolution { pair, report }
}

#[cfg(test)]
mod tests {
    use super::*;
    use drcr_core::graph::{DrcrTask, Edge};
    use drcr_core::{build_reverse_trees, Never};

    fn e(from: u32, to: u32, cost: u64) -> Edge {
        Edge { from, to, cost, delay: 1 }
    }

    /// Two-hop routes 0 -> i -> 9 with cost 6i. Routes 1..=6 all conflict
    /// with each other and with routes 7 and 8, which are disjoint from each
    /// other: the cheapest protected active path is route 7.
    fn ladder() -> Network {
        let mut edges = Vec::new();
        for i in 1..9 {
            edges.push(e(0, i, i as u64 * 3));
            edges.push(e(i, 9, i as u64 * 3));
        }
        let first = |route: u32| 2 * (route - 1);
        let mut groups = vec![(1..=6).map(first).collect::<Vec<_>>()];
        for i in 1..=6 {
            groups.push(vec![first(i), first(7)]);
            groups.push(vec![first(i), first(8)]);
        }
        Network::new(10, edges).unwrap().with_srlgs(groups).unwrap()
    }

    #[test]
    fn workers_agree_with_sequential() {
        let net = ladder();
        let trees = build_reverse_trees(&net, 9);
        let task = SrlgTask::new(DrcrTask::new(0, 9, 0, 100).unwrap(), 100);
        let base = BtcsConfig { alpha: 1.0, ..BtcsConfig::default() };
        let seq = solve_btcs(&net, &trees, &task, &base, &Never);
        assert_eq!(seq.report.outcome, Outcome::Pair);
        assert_eq!(seq.pair.as_ref().unwrap().ap.cost(), 42);
        assert_eq!(seq.report.corridors_explored, 13);
        for workers in [2, 3, 4, 8] {
            let cfg = BtcsConfig { workers, ..base };
            let par = solve_btcs_parallel(&net, &trees, &task, &cfg, &Never);
            assert_eq!(par.pair, seq.pair);
            assert_eq!(par.report.corridors_explored, seq.report.corridors_explored);
            assert_eq!(par.report.ap_candidates_checked, seq.report.ap_candidates_checked);
        }
    }

    #[test]
    fn corridor_cap_times_out() {
        let net = ladder();
        let trees = build_reverse_trees(&net, 9);
        let task = SrlgTask::new(DrcrTask::new(0, 9, 0, 100).unwrap(), 100);
        let cfg = BtcsConfig { alpha: 1.0, workers: 4, max_corridors: Some(2) };
        let sol = solve_btcs_parallel(&net, &trees, &task, &cfg, &Never);
        assert_eq!(sol.report.outcome, Outcome::Timeout);
        assert!(sol.pair.is_none());
    }
}
