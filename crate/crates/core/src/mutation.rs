//! The six mutation operators: add/delete connection, add/delete node, and
//! per-gene bias and weight perturbation.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::genome::{ConnectionGene, Genome, NodeGene, NodeId, NodeRole};
use crate::innovation::InnovationRegistry;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutationConfig {
    pub p_add_conn: f64,
    pub p_del_conn: f64,
    pub p_add_node: f64,
    pub p_del_node: f64,
    /// Per-connection probability of a weight step.
    pub p_weight: f64,
    /// Per-node probability of a bias step.
    pub p_bias: f64,
    pub step: f64,
    pub weight_bounds: (f64, f64),
}

impl Default for MutationConfig {
    fn default() -> Self {
        MutationConfig {
            p_add_conn: 0.2,
            p_del_conn: 0.2,
            p_add_node: 0.2,
            p_del_node: 0.2,
            p_weight: 0.7,
            p_bias: 0.7,
            step: 0.5,
            weight_bounds: (-30.0, 30.0),
        }
    }
}

impl MutationConfig {
    pub fn check(&self) -> Result<(), String> {
        let probs = [
            ("p_add_conn", self.p_add_conn),
            ("p_del_conn", self.p_del_conn),
            ("p_add_node", self.p_add_node),
            ("p_del_node", self.p_del_node),
            ("p_weight", self.p_weight),
            ("p_bias", self.p_bias),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        if !(self.step > 0.0) {
            return Err(format!("step must be positive, got {}", self.step));
        }
        let (lo, hi) = self.weight_bounds;
        if !(lo < hi) {
            return Err(format!("weight bounds must satisfy lo < hi, got ({lo}, {hi})"));
        }
        Ok(())
    }
}

/// Which structural operators fired during one [`mutate`] call.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MutationLog {
    pub added_connection: bool,
    pub deleted_connection: bool,
    pub added_node: bool,
    /// Enabled connections removed together with a deleted node.
    pub deleted_node: Option<usize>,
}

/// Applies every operator independently with its configured probability,
/// in a fixed order.
pub fn mutate<R: Rng + ?Sized>(
    g: &mut Genome,
    cfg: &MutationConfig,
    rng: &mut R,
    registry: &mut InnovationRegistry,
) -> MutationLog {
    let mut log = MutationLog::default();
    if rng.gen_bool(cfg.p_add_conn) {
        log.added_connection = add_connection(g, cfg, rng, registry);
    }
    if rng.gen_bool(cfg.p_del_conn) {
        log.deleted_connection = delete_connection(g, rng);
    }
    if rng.gen_bool(cfg.p_add_node) {
        log.added_node = add_node(g, rng, registry);
    }
    if rng.gen_bool(cfg.p_del_node) {
        log.deleted_node = delete_node(g, rng);
    }
    perturb_biases(g, cfg, rng);
    perturb_weights(g, cfg, rng);
    log
}

/// Connects a random ordered pair that has no enabled connection yet and
/// whose new edge keeps the network acyclic. A pair with a disabled gene
/// reuses that gene. Returns false when no such pair exists.
pub fn add_connection<R: Rng + ?Sized>(
    g: &mut Genome,
    cfg: &MutationConfig,
    rng: &mut R,
    registry: &mut InnovationRegistry,
) -> bool {
    let candidates = open_pairs(g);
    let Some(&(from, to)) = candidates.choose(rng) else {
        return false;
    };
    let (lo, hi) = cfg.weight_bounds;
    let weight = rng.gen_range(-1.0f64..=1.0).clamp(lo, hi);
    if let Some(existing) = g
        .connections
        .iter_mut()
        .find(|c| c.from == from && c.to == to)
    {
        existing.enabled = true;
        existing.weight = weight;
        return true;
    }
    let innovation = registry.connection(from, to);
    g.connections.push(ConnectionGene { innovation, from, to, weight, enabled: true });
    true
}

/// Every (from, to) an added connection could use, in a deterministic order.
fn open_pairs(g: &Genome) -> Vec<(NodeId, NodeId)> {
    let existing: HashSet<(NodeId, NodeId)> = g
        .enabled_connections()
        .map(|c| (c.from, c.to))
        .collect();
    // reach[i] holds every node reachable from node i.
    let reach: Vec<HashSet<NodeId>> = g.nodes.iter().map(|n| reachable_from(g, n.id)).collect();
    let mut pairs = Vec::new();
    for src in &g.nodes {
        if src.role == NodeRole::Output {
            continue;
        }
        for (j, dst) in g.nodes.iter().enumerate() {
            if dst.role == NodeRole::Input || dst.id == src.id {
                continue;
            }
            if existing.contains(&(src.id, dst.id)) {
                continue;
            }
            // from -> to closes a cycle iff `to` already reaches `from`.
            if reach[j].contains(&src.id) {
                continue;
            }
            pairs.push((src.id, dst.id));
        }
    }
    pairs
}

fn reachable_from(g: &Genome, start: NodeId) -> HashSet<NodeId> {
    let succ = g.successors();
    let mut seen = HashSet::new();
    let mut stack = vec![start];
    while let Some(n) = stack.pop() {
        if seen.insert(n) {
            if let Some(next) = succ.get(&n) {
                stack.extend(next.iter().copied());
            }
        }
    }
    seen
}

/// Removes one random enabled connection gene.
pub fn delete_connection<R: Rng + ?Sized>(g: &mut Genome, rng: &mut R) -> bool {
    let enabled: Vec<usize> = (0..g.connections.len())
        .filter(|&i| g.connections[i].enabled)
        .collect();
    match enabled.choose(rng) {
        Some(&i) => {
            g.connections.remove(i);
            true
        }
        None => false,
    }
}

/// Splits a random enabled connection `a -> b` into `a -> h -> b`.
///
/// The incoming half gets weight 1.0, the outgoing half inherits the old
/// weight, and the original gene is disabled.
pub fn add_node<R: Rng + ?Sized>(g: &mut Genome, rng: &mut R, registry: &mut InnovationRegistry) -> bool {
    let enabled: Vec<usize> = (0..g.connections.len())
        .filter(|&i| g.connections[i].enabled)
        .collect();
    let Some(&i) = enabled.choose(rng) else {
        return false;
    };
    split_connection(g, i, registry);
    true
}

/// Deterministic core of [`add_node`]: splits connection gene `index`.
pub fn split_connection(g: &mut Genome, index: usize, registry: &mut InnovationRegistry) -> NodeId {
    let old = g.connections[index].clone();
    let ids = registry.split(g, old.innovation, old.from, old.to);
    g.connections[index].enabled = false;
    g.nodes.push(NodeGene { id: ids.node, role: NodeRole::Hidden, bias: 0.0 });
    g.connections.push(ConnectionGene {
        innovation: ids.incoming,
        from: old.from,
        to: ids.node,
        weight: 1.0,
        enabled: true,
    });
    g.connections.push(ConnectionGene {
        innovation: ids.outgoing,
        from: ids.node,
        to: old.to,
        weight: old.weight,
        enabled: true,
    });
    ids.node
}

/// Removes a random hidden node and every connection gene touching it.
/// Returns the number of enabled connections removed, or `None` when the
/// genome has no hidden nodes.
pub fn delete_node<R: Rng + ?Sized>(g: &mut Genome, rng: &mut R) -> Option<usize> {
    let hidden = g.hidden_ids();
    let &victim = hidden.choose(rng)?;
    let removed_enabled = g
        .connections
        .iter()
        .filter(|c| c.enabled && (c.from == victim || c.to == victim))
        .count();
    g.connections.retain(|c| c.from != victim && c.to != victim);
    g.nodes.retain(|n| n.id != victim);
    Some(removed_enabled)
}

/// Each non-input node steps its bias up or down by `step` with
/// probability `p_bias`; both directions equally likely.
pub fn perturb_biases<R: Rng + ?Sized>(g: &mut Genome, cfg: &MutationConfig, rng: &mut R) {
    let (lo, hi) = cfg.weight_bounds;
    for n in g.nodes.iter_mut().filter(|n| n.role != NodeRole::Input) {
        if rng.gen_bool(cfg.p_bias) {
            let delta = if rng.gen_bool(0.5) { cfg.step } else { -cfg.step };
            n.bias = (n.bias + delta).clamp(lo, hi);
        }
    }
}

/// Each connection gene steps its weight up or down by `step` with
/// probability `p_weight`; both directions equally likely.
pub fn perturb_weights<R: Rng + ?Sized>(g: &mut Genome, cfg: &MutationConfig, rng: &mut R) {
    let (lo, hi) = cfg.weight_bounds;
    for c in g.connections.iter_mut() {
        if rng.gen_bool(cfg.p_weight) {
            let delta = if rng.gen_bool(0.5) { cfg.step } else { -cfg.step };
            c.weight = (c.weight + delta).clamp(lo, hi);
        }
    }
}
