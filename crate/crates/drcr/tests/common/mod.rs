//! Seeded instance builders shared by the integration tests.
#![allow(dead_code)]

use drcr_core::graph::{DrcrTask, Edge, EdgeId, Network, NodeId, SrlgTask};
use drcr_core::netgen::{filter_tasks, gen_graph, gen_srlg, gen_tasks, DensityClass, GenSpec, SrlgPattern, SrlgSpec, TaskKind, TaskLabel};
use drcr_core::{btcs::BtcsConfig, Task};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Digraph on `nodes` nodes with at most `max_edges` distinct arcs and
/// weights in 1..=10.
pub fn small_network(rng: &mut ChaCha8Rng, nodes: usize, max_edges: usize) -> Network {
    let mut edges: Vec<Edge> = Vec::new();
    for _ in 0..max_edges {
        let from = rng.gen_range(0..nodes) as NodeId;
        let to = rng.gen_range(0..nodes) as NodeId;
        if from == to || edges.iter().any(|e| e.from == from && e.to == to) {
            continue;
        }
        edges.push(Edge { from, to, cost: rng.gen_range(1..=10), delay: rng.gen_range(1..=10) });
    }
    Network::new(nodes, edges).expect("arcs stay inside the node range")
}

/// Up to `max_groups` groups of one to three edges.
pub fn small_groups(rng: &mut ChaCha8Rng, net: &Network, max_groups: usize) -> Vec<Vec<EdgeId>> {
    let m = net.edge_count();
    if m == 0 {
        return Vec::new();
    }
    let count = rng.gen_range(0..=max_groups);
    (0..count)
        .map(|_| {
            let size = rng.gen_range(1..=3.min(m));
            (0..size).map(|_| rng.gen_range(0..m) as EdgeId).collect()
        })
        .collect()
}

pub fn endpoints(rng: &mut ChaCha8Rng, nodes: usize) -> (NodeId, NodeId) {
    let s = rng.gen_range(0..nodes) as NodeId;
    let mut t = rng.gen_range(0..nodes - 1) as NodeId;
    if t >= s {
        t += 1;
    }
    (s, t)
}

pub fn drcr_task(rng: &mut ChaCha8Rng, nodes: usize) -> DrcrTask {
    let (s, t) = endpoints(rng, nodes);
    let d_low = if rng.gen_bool(0.5) { 0 } else { rng.gen_range(0..=30) };
    let d_up = d_low + rng.gen_range(0..=40);
    DrcrTask::new(s, t, d_low, d_up).expect("d_low <= d_up")
}

pub fn srlg_task(rng: &mut ChaCha8Rng, nodes: usize) -> SrlgTask {
    let (s, t) = endpoints(rng, nodes);
    let d_low = if rng.gen_bool(0.7) { 0 } else { rng.gen_range(0..=15) };
    let d_up = d_low + rng.gen_range(5..=50);
    let d_diff = if rng.gen_bool(0.3) { d_up } else { rng.gen_range(0..=d_up) };
    SrlgTask::new(DrcrTask::new(s, t, d_low, d_up).expect("d_low <= d_up"), d_diff)
}

pub struct TrapInstance {
    pub graph_seed: u64,
    pub net: Network,
    pub task: SrlgTask,
    pub label: TaskLabel,
}

/// Trap tasks on 200-node sparse ER graphs with random SRLG groups.
pub fn trap_suite(seeds: impl IntoIterator<Item = u64>, tasks_per_graph: usize) -> Vec<TrapInstance> {
    let mut out = Vec::new();
    for seed in seeds {
        let net = gen_graph(&GenSpec::erdos_renyi(200, DensityClass::K1, seed)).expect("valid spec");
        let groups = gen_srlg(&net, &SrlgSpec::new(SrlgPattern::Random, seed)).expect("graph has edges");
        let net = net.with_srlgs(groups).expect("generated groups are valid");
        let tasks = gen_tasks(&net, tasks_per_graph, TaskKind::Srlg, seed).expect("enough reachable pairs");
        for (task, label) in filter_tasks(&net, &tasks, &BtcsConfig::default()) {
            let Task::Srlg(task) = task else { unreachable!("srlg kind") };
            out.push(TrapInstance { graph_seed: seed, net: net.clone(), task, label });
        }
    }
    out
}
