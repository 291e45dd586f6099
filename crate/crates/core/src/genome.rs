//! Direct genome encoding: node genes with biases and connection genes
//! carrying weights, enabled flags and historical markings.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Stable identifier of a node gene.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// Historical marking of a connection gene.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Innovation(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeRole {
    Input,
    Hidden,
    Output,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeGene {
    pub id: NodeId,
    pub role: NodeRole,
    pub bias: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionGene {
    pub innovation: Innovation,
    pub from: NodeId,
    pub to: NodeId,
    pub weight: f64,
    pub enabled: bool,
}

/// Ways a genome can break the feed-forward encoding contract.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenomeError {
    #[error("duplicate node id {0}")]
    DuplicateNode(NodeId),
    #[error("duplicate innovation {0:?}")]
    DuplicateInnovation(Innovation),
    #[error("connection {0:?} references unknown node {1}")]
    DanglingConnection(Innovation, NodeId),
    #[error("connection {0:?} feeds into input node {1}")]
    IntoInput(Innovation, NodeId),
    #[error("connection {0:?} leaves output node {1}")]
    FromOutput(Innovation, NodeId),
    #[error("connection {0:?} is a self-loop on {1}")]
    SelfLoop(Innovation, NodeId),
    #[error("duplicate enabled connection {0} -> {1}")]
    DuplicateEdge(NodeId, NodeId),
    #[error("enabled connections contain a cycle")]
    Cycle,
}

/// An evolvable feed-forward network description.
///
/// Nodes are kept in creation order: inputs, outputs, then hidden nodes in
/// the order they were introduced. Disabled connection genes stay in the
/// genome so crossover can align them, but are invisible to the phenotype
/// and to every graph metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Genome {
    pub nodes: Vec<NodeGene>,
    pub connections: Vec<ConnectionGene>,
}

impl Genome {
    /// Fully layered starting network: every input feeds every hidden node,
    /// every hidden node feeds every output. With `hidden == 0` inputs wire
    /// straight to outputs. Weights are uniform in [-1, 1], biases 0.
    ///
    /// Ids: inputs `0..n_in`, outputs `n_in..n_in+n_out`, hidden after that.
    /// Innovations are numbered in connection order starting at 0.
    pub fn initial<R: Rng + ?Sized>(n_in: usize, n_out: usize, hidden: usize, rng: &mut R) -> Self {
        assert!(n_in >= 1 && n_out >= 1, "a task needs at least one input and one output");
        let mut nodes = Vec::with_capacity(n_in + n_out + hidden);
        let input_ids: Vec<NodeId> = (0..n_in).map(|i| NodeId(i as u32)).collect();
        let output_ids: Vec<NodeId> = (0..n_out).map(|i| NodeId((n_in + i) as u32)).collect();
        let hidden_ids: Vec<NodeId> = (0..hidden)
            .map(|i| NodeId((n_in + n_out + i) as u32))
            .collect();
        for &id in &input_ids {
            nodes.push(NodeGene { id, role: NodeRole::Input, bias: 0.0 });
        }
        for &id in &output_ids {
            nodes.push(NodeGene { id, role: NodeRole::Output, bias: 0.0 });
        }
        for &id in &hidden_ids {
            nodes.push(NodeGene { id, role: NodeRole::Hidden, bias: 0.0 });
        }

        let pairs: Vec<(NodeId, NodeId)> = if hidden == 0 {
            input_ids
                .iter()
                .flat_map(|&i| output_ids.iter().map(move |&o| (i, o)))
                .collect()
        } else {
            let first = input_ids
                .iter()
                .flat_map(|&i| hidden_ids.iter().map(move |&h| (i, h)));
            let second = hidden_ids
                .iter()
                .flat_map(|&h| output_ids.iter().map(move |&o| (h, o)));
            first.chain(second).collect()
        };
        let connections = pairs
            .into_iter()
            .enumerate()
            .map(|(k, (from, to))| ConnectionGene {
                innovation: Innovation(k as u64),
                from,
                to,
                weight: rng.gen_range(-1.0..=1.0),
                enabled: true,
            })
            .collect();
        Genome { nodes, connections }
    }

    pub fn node(&self, id: NodeId) -> Option<&NodeGene> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn node_mut(&mut self, id: NodeId) -> Option<&mut NodeGene> {
        self.nodes.iter_mut().find(|n| n.id == id)
    }

    pub fn role_of(&self, id: NodeId) -> Option<NodeRole> {
        self.node(id).map(|n| n.role)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn enabled_connections(&self) -> impl Iterator<Item = &ConnectionGene> {
        self.connections.iter().filter(|c| c.enabled)
    }

    pub fn enabled_count(&self) -> usize {
        self.enabled_connections().count()
    }

    pub fn ids_with_role(&self, role: NodeRole) -> Vec<NodeId> {
        self.nodes.iter().filter(|n| n.role == role).map(|n| n.id).collect()
    }

    pub fn input_ids(&self) -> Vec<NodeId> {
        self.ids_with_role(NodeRole::Input)
    }

    pub fn output_ids(&self) -> Vec<NodeId> {
        self.ids_with_role(NodeRole::Output)
    }

    pub fn hidden_ids(&self) -> Vec<NodeId> {
        self.ids_with_role(NodeRole::Hidden)
    }

    pub fn has_enabled_edge(&self, from: NodeId, to: NodeId) -> bool {
        self.connections
            .iter()
            .any(|c| c.enabled && c.from == from && c.to == to)
    }

    /// True if `target` is reachable from `start` along enabled connections.
    pub fn reaches(&self, start: NodeId, target: NodeId) -> bool {
        if start == target {
            return true;
        }
        let succ = self.successors();
        let mut seen = HashSet::new();
        let mut stack = vec![start];
        while let Some(n) = stack.pop() {
            if n == target {
                return true;
            }
            if seen.insert(n) {
                if let Some(next) = succ.get(&n) {
                    stack.extend(next.iter().copied());
                }
            }
        }
        false
    }

    pub(crate) fn successors(&self) -> HashMap<NodeId, Vec<NodeId>> {
        let mut succ: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
        for c in self.enabled_connections() {
            succ.entry(c.from).or_default().push(c.to);
        }
        succ
    }

    /// Checks every structural invariant of the encoding.
    pub fn validate(&self) -> Result<(), GenomeError> {
        let mut roles = HashMap::with_capacity(self.nodes.len());
        for n in &self.nodes {
            if roles.insert(n.id, n.role).is_some() {
                return Err(GenomeError::DuplicateNode(n.id));
            }
        }
        let mut innovations = HashSet::with_capacity(self.connections.len());
        let mut edges = HashSet::new();
        for c in &self.connections {
            if !innovations.insert(c.innovation) {
                return Err(GenomeError::DuplicateInnovation(c.innovation));
            }
            let from_role = *roles
                .get(&c.from)
                .ok_or(GenomeError::DanglingConnection(c.innovation, c.from))?;
            let to_role = *roles
                .get(&c.to)
                .ok_or(GenomeError::DanglingConnection(c.innovation, c.to))?;
            if c.from == c.to {
                return Err(GenomeError::SelfLoop(c.innovation, c.from));
            }
            if to_role == NodeRole::Input {
                return Err(GenomeError::IntoInput(c.innovation, c.to));
            }
            if from_role == NodeRole::Output {
                return Err(GenomeError::FromOutput(c.innovation, c.from));
            }
            if c.enabled && !edges.insert((c.from, c.to)) {
                return Err(GenomeError::DuplicateEdge(c.from, c.to));
            }
        }
        if topological_order(self).is_none() {
            return Err(GenomeError::Cycle);
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("genome serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Kahn's algorithm over enabled connections, ties broken by ascending id.
/// Returns `None` if the enabled connections contain a cycle.
pub(crate) fn topological_order(g: &Genome) -> Option<Vec<NodeId>> {
    let mut indegree: BTreeMap<NodeId, usize> = g.nodes.iter().map(|n| (n.id, 0)).collect();
    let succ = g.successors();
    for c in g.enabled_connections() {
        *indegree.get_mut(&c.to)? += 1;
    }
    let mut ready: std::collections::BTreeSet<NodeId> = indegree
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&id, _)| id)
        .collect();
    let mut order = Vec::with_capacity(indegree.len());
    while let Some(id) = ready.pop_first() {
        order.push(id);
        if let Some(next) = succ.get(&id) {
            for to in next {
                let d = indegree.get_mut(to)?;
                *d -= 1;
                if *d == 0 {
                    ready.insert(*to);
                }
            }
        }
    }
    (order.len() == indegree.len()).then_some(order)
}
