use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Edge, EdgeId, Network, NodeId};

pub fn edge(from: NodeId, to: NodeId, cost: u64, delay: u64) -> Edge {
    Edge { from, to, cost, delay }
}

/// s=0, a=1, b=2, t=3. Cheap route via a is slow, dear route via b fast.
pub fn diamond() -> Network {
    Network::new(
        4,
        vec![edge(0, 1, 1, 10), edge(1, 3, 1, 10), edge(0, 2, 5, 1), edge(2, 3, 5, 1)],
    )
    .unwrap()
}

/// Random digraph with at most `max_edges` distinct arcs, weights in 1..=10.
pub fn random_network(seed: u64, nodes: usize, max_edges: usize) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for _ in 0..max_edges {
        let u = rng.gen_range(0..nodes) as NodeId;
        let v = rng.gen_range(0..nodes) as NodeId;
        if u == v || edges.iter().any(|e: &Edge| e.from == u && e.to == v) {
            continue;
        }
        edges.push(edge(u, v, rng.gen_range(1..=10), rng.gen_range(1..=10)));
    }
    Network::new(nodes, edges).unwrap()
}

pub fn random_groups(seed: u64, net: &Network, groups: usize) -> Vec<Vec<EdgeId>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5151);
    let m = net.edge_count();
    (0..groups)
        .map(|_| {
            let k = rng.gen_range(1..=3.min(m));
            (0..k).map(|_| rng.gen_range(0..m) as EdgeId).collect()
        })
        .collect()
}
