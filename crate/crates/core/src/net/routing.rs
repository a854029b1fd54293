use std::collections::{BTreeMap, VecDeque};

use super::frame::NodeId;

/// Destination node to local egress port index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RoutingTable {
    routes: BTreeMap<NodeId, usize>,
}

impl RoutingTable {
    pub fn insert(&mut self, dst: NodeId, port: usize) {
        self.routes.insert(dst, port);
    }

    pub fn route(&self, dst: NodeId) -> Option<usize> {
        self.routes.get(&dst).copied()
    }

    pub fn len(&self) -> usize {
        self.routes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.routes.is_empty()
    }
}

/// Builds shortest-path routing tables for every node.
///
/// `adjacency[n]` lists `(neighbour, local_port)` pairs in port order.
/// Ties between equal-length paths go to the lowest port index, so tables
/// are deterministic.
pub fn shortest_path_tables(adjacency: &[Vec<(NodeId, usize)>]) -> Vec<RoutingTable> {
    let n = adjacency.len();
    let mut tables = vec![RoutingTable::default(); n];
    for (src, table) in tables.iter_mut().enumerate() {
        // first_port[v] = egress port at `src` on a shortest path to v
        let mut first_port: Vec<Option<usize>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[src] = true;
        let mut frontier = VecDeque::new();
        for &(nb, port) in &adjacency[src] {
            if !seen[nb.index()] {
                seen[nb.index()] = true;
                first_port[nb.index()] = Some(port);
                frontier.push_back(nb.index());
            }
        }
        while let Some(v) = frontier.pop_front() {
            for &(nb, _) in &adjacency[v] {
                if !seen[nb.index()] {
                    seen[nb.index()] = true;
                    first_port[nb.index()] = first_port[v];
                    frontier.push_back(nb.index());
                }
            }
        }
        for (dst, port) in first_port.into_iter().enumerate() {
            if let Some(p) = port {
                table.insert(NodeId(dst as u32), p);
            }
        }
    }
    tables
}
