//! Reverse shortest-path trees: per-node minimum cost and minimum delay to
//! a fixed target. They are the lower bounds behind both pulse prunings.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::graph::{EdgeId, Network, NodeId};
use crate::INFINITY;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReverseTrees {
    target: NodeId,
    min_cost: Vec<u64>,
    min_delay: Vec<u64>,
    cost_next: Vec<Option<EdgeId>>,
    delay_next: Vec<Option<EdgeId>>,
    /// Egress edges of every node, laid out like the network adjacency but
    /// sorted by `cost(e) + min_cost[head(e)]`, ties by edge id.
    ordered_egress: Vec<EdgeId>,
}

/// Label-setting search from `target` over reversed edges, weighted by
/// `weight`. Returns distances and the first edge of a shortest route.
fn reverse_dijkstra(
    net: &Network,
    target: NodeId,
    weight: impl Fn(EdgeId) -> u64,
) -> (Vec<u64>, Vec<Option<EdgeId>>) {
    let n = net.node_count();
    let mut dist = vec![INFINITY; n];
    let mut next = vec![None; n];
    let mut heap = BinaryHeap::new();
    dist[target as usize] = 0;
    heap.push(Reverse((0u64, target)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > dist[v as usize] {
            continue;
        }
        for &e in net.ingress(v) {
            let u = net.edge(e).from;
            let candidate = d + weight(e);
            if candidate < dist[u as usize] {
                dist[u as usize] = candidate;
                next[u as usize] = Some(e);
                heap.push(Reverse((candidate, u)));
            }
        }
    }
    (dist, next)
}

/// Builds both trees towards `target` plus the cost-guided egress order.
pub fn build_reverse_trees(net: &Network, target: NodeId) -> ReverseTrees {
    assert!(net.contains_node(target), "target {target} not in network");
    let (min_cost, cost_next) = reverse_dijkstra(net, target, |e| net.edge(e).cost);
    let (min_delay, delay_next) = reverse_dijkstra(net, target, |e| net.edge(e).delay);

    let mut ordered_egress = Vec::with_capacity(net.edge_count());
    for node in 0..net.node_count() as NodeId {
        let start = ordered_egress.len();
        ordered_egress.extend_from_slice(net.egress(node));
        ordered_egress[start..].sort_unstable_by_key(|&e| {
            let edge = net.edge(e);
            (edge.cost.saturating_add(min_cost[edge.to as usize]), e)
        });
    }
    ReverseTrees { target, min_cost, min_delay, cost_next, delay_next, ordered_egress }
}

impl ReverseTrees {
    pub fn target(&self) -> NodeId {
        self.target
    }

    /// Minimum cost from `node` to the target, [`INFINITY`] if unreachable.
    #[inline]
    pub fn min_cost(&self, node: NodeId) -> u64 {
        self.min_cost[node as usize]
    }

    #[inline]
    pub fn min_delay(&self, node: NodeId) -> u64 {
        self.min_delay[node as usize]
    }

    pub fn min_costs(&self) -> &[u64] {
        &self.min_cost
    }

    pub fn min_delays(&self) -> &[u64] {
        &self.min_delay
    }

    /// First edge of a minimum-cost route from `node`.
    pub fn cost_successor(&self, node: NodeId) -> Option<EdgeId> {
        self.cost_next[node as usize]
    }

    pub fn delay_successor(&self, node: NodeId) -> Option<EdgeId> {
        self.delay_next[node as usize]
    }

    /// Follows the min-cost (`by_delay = false`) or min-delay tree from
    /// `node` to the target.
    pub fn tree_route(&self, net: &Network, node: NodeId, by_delay: bool) -> Option<Vec<EdgeId>> {
        let next = if by_delay { &self.delay_next } else { &self.cost_next };
        let mut route = Vec::new();
        let mut at = node;
        while at != self.target {
            let e = next[at as usize]?;
            route.push(e);
            at = net.edge(e).to;
        }
        Some(route)
    }

    /// The whole exploration-order array, indexed like the adjacency.
    pub(crate) fn ordered_all(&self) -> &[EdgeId] {
        &self.ordered_egress
    }

    /// Egress edges of `node` in exploration order.
    #[inline]
    pub fn ordered_egress<'a>(&'a self, net: &Network, node: NodeId) -> &'a [EdgeId] {
        &self.ordered_egress[net.egress_range(node)]
    }
}

/// Trees keyed by target, shared between tasks on one network.
#[derive(Debug, Default, Clone)]
pub struct TreeCache {
    trees: BTreeMap<NodeId, Arc<ReverseTrees>>,
}

impl TreeCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, net: &Network, target: NodeId) -> Arc<ReverseTrees> {
        self.trees
            .entry(target)
            .or_insert_with(|| Arc::new(build_reverse_trees(net, target)))
            .clone()
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }
}
