//! Historical markings shared by a whole population.

use std::collections::HashMap;

use crate::genome::{Genome, Innovation, NodeId};

/// Ids handed out when a connection is split by a new node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitIds {
    pub node: NodeId,
    pub incoming: Innovation,
    pub outgoing: Innovation,
}

/// Allocates innovation numbers and node ids.
///
/// The same `(from, to)` connection always maps to the same innovation for
/// the life of the registry. Splitting the same connection twice within one
/// generation yields the same node id and innovations; the split table is
/// cleared by [`InnovationRegistry::next_generation`]. All structural
/// mutations must go through one registry in a fixed order so runs stay
/// reproducible.
#[derive(Debug, Clone, Default)]
pub struct InnovationRegistry {
    next_innovation: u64,
    next_node: u32,
    connections: HashMap<(NodeId, NodeId), Innovation>,
    splits: HashMap<Innovation, SplitIds>,
}

impl InnovationRegistry {
    /// Seeds the registry with the markings already present in `template`.
    pub fn from_genome(template: &Genome) -> Self {
        let mut reg = InnovationRegistry::default();
        for c in &template.connections {
            reg.connections.insert((c.from, c.to), c.innovation);
            reg.next_innovation = reg.next_innovation.max(c.innovation.0 + 1);
        }
        reg.next_node = template.nodes.iter().map(|n| n.id.0 + 1).max().unwrap_or(0);
        reg
    }

    pub fn connection(&mut self, from: NodeId, to: NodeId) -> Innovation {
        if let Some(&inn) = self.connections.get(&(from, to)) {
            return inn;
        }
        let inn = self.fresh_innovation();
        self.connections.insert((from, to), inn);
        inn
    }

    /// Ids for splitting connection `split` (which runs `from -> to`).
    ///
    /// When `genome` already holds the node this generation's split would
    /// reuse, fresh ids are allocated instead.
    pub fn split(&mut self, genome: &Genome, split: Innovation, from: NodeId, to: NodeId) -> SplitIds {
        if let Some(ids) = self.splits.get(&split).copied() {
            if genome.node(ids.node).is_none() {
                return ids;
            }
        }
        let node = NodeId(self.next_node);
        self.next_node += 1;
        let ids = SplitIds {
            node,
            incoming: self.connection(from, node),
            outgoing: self.connection(node, to),
        };
        self.splits.entry(split).or_insert(ids);
        ids
    }

    pub fn next_generation(&mut self) {
        self.splits.clear();
    }

    fn fresh_innovation(&mut self) -> Innovation {
        let inn = Innovation(self.next_innovation);
        self.next_innovation += 1;
        inn
    }
}
