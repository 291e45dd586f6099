//! Crossover, compatibility distance, speciation and generational
//! reproduction.

use std::collections::{HashMap, HashSet};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::genome::{ConnectionGene, Genome, Innovation, NodeGene, NodeId, NodeRole};
use crate::innovation::InnovationRegistry;
use crate::mutation::{mutate, MutationConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciationConfig {
    /// Weight of excess plus disjoint genes.
    pub c_excess_disjoint: f64,
    /// Weight of the mean absolute weight difference of matching genes.
    pub c_weight: f64,
    pub threshold: f64,
}

impl Default for SpeciationConfig {
    fn default() -> Self {
        SpeciationConfig { c_excess_disjoint: 1.0, c_weight: 0.5, threshold: 3.0 }
    }
}

impl SpeciationConfig {
    pub fn check(&self) -> Result<(), String> {
        if self.c_excess_disjoint < 0.0 || self.c_weight < 0.0 {
            return Err("speciation coefficients must be non-negative".into());
        }
        if !(self.threshold > 0.0) {
            return Err(format!("speciation threshold must be positive, got {}", self.threshold));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproductionConfig {
    /// Fraction of each species (best first) allowed to parent offspring.
    pub survival_fraction: f64,
    /// Best members per species copied unchanged.
    pub elite_count: usize,
}

impl Default for ReproductionConfig {
    fn default() -> Self {
        ReproductionConfig { survival_fraction: 0.2, elite_count: 2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Species {
    pub representative: Genome,
    /// Indices into the population this species was built from.
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReproductionError {
    #[error("no species has any members")]
    EmptyPopulation,
    #[error("ranking for species {0} is not a permutation of its members")]
    BadRanking(usize),
}

/// Recombines two parents aligned by innovation number.
///
/// Matching genes take their attributes from a randomly chosen parent.
/// Disjoint and excess genes come from the fitter parent; on equal fitness
/// each one is inherited with probability one half. Genes that would break
/// the feed-forward contract in the child are dropped.
pub fn crossover<R: Rng + ?Sized>(
    a: &Genome,
    fitness_a: f64,
    b: &Genome,
    fitness_b: f64,
    rng: &mut R,
) -> Genome {
    let tie = fitness_a == fitness_b;
    let (fit, other) = if fitness_b > fitness_a { (b, a) } else { (a, b) };

    let other_by_inn: HashMap<Innovation, &ConnectionGene> =
        other.connections.iter().map(|c| (c.innovation, c)).collect();
    let fit_inns: HashSet<Innovation> = fit.connections.iter().map(|c| c.innovation).collect();

    let mut genes: Vec<ConnectionGene> = Vec::new();
    for c in &fit.connections {
        match other_by_inn.get(&c.innovation) {
            Some(o) => genes.push(if rng.gen_bool(0.5) { c.clone() } else { (*o).clone() }),
            None => {
                if !tie || rng.gen_bool(0.5) {
                    genes.push(c.clone());
                }
            }
        }
    }
    if tie {
        for c in &other.connections {
            if !fit_inns.contains(&c.innovation) && rng.gen_bool(0.5) {
                genes.push(c.clone());
            }
        }
    }

    // Node set: every node of the fitter parent (both parents on a tie),
    // plus any endpoint the inherited genes need.
    let fit_nodes: HashMap<NodeId, &NodeGene> = fit.nodes.iter().map(|n| (n.id, n)).collect();
    let other_nodes: HashMap<NodeId, &NodeGene> = other.nodes.iter().map(|n| (n.id, n)).collect();
    let mut wanted: Vec<NodeId> = fit.nodes.iter().map(|n| n.id).collect();
    if tie {
        wanted.extend(other.nodes.iter().map(|n| n.id));
    }
    for c in &genes {
        wanted.push(c.from);
        wanted.push(c.to);
    }
    let mut seen = HashSet::new();
    let mut nodes = Vec::new();
    for id in wanted {
        if !seen.insert(id) {
            continue;
        }
        let gene = match (fit_nodes.get(&id), other_nodes.get(&id)) {
            (Some(x), Some(y)) => {
                if rng.gen_bool(0.5) {
                    (*x).clone()
                } else {
                    (*y).clone()
                }
            }
            (Some(x), None) => (*x).clone(),
            (None, Some(y)) => (*y).clone(),
            (None, None) => unreachable!("gene endpoint missing from both parents"),
        };
        nodes.push(gene);
    }
    // inputs, outputs, hidden; hidden in id order
    nodes.sort_by_key(|n| (role_rank(n.role), n.id));

    let mut child = Genome { nodes, connections: Vec::with_capacity(genes.len()) };
    genes.sort_by_key(|c| c.innovation);
    repair_into(&mut child, genes);
    child
}

fn role_rank(role: NodeRole) -> u8 {
    match role {
        NodeRole::Input => 0,
        NodeRole::Output => 1,
        NodeRole::Hidden => 2,
    }
}

/// Adds `genes` to `child` in order, dropping any gene that would violate
/// an invariant given the genes already accepted.
fn repair_into(child: &mut Genome, genes: Vec<ConnectionGene>) {
    let mut pairs: HashSet<(NodeId, NodeId)> = HashSet::new();
    let mut inns: HashSet<Innovation> = HashSet::new();
    for c in genes {
        let (Some(fr), Some(tr)) = (child.role_of(c.from), child.role_of(c.to)) else {
            continue;
        };
        if fr == NodeRole::Output || tr == NodeRole::Input || c.from == c.to {
            continue;
        }
        if !inns.insert(c.innovation) {
            continue;
        }
        if c.enabled && (pairs.contains(&(c.from, c.to)) || child.reaches(c.to, c.from)) {
            inns.remove(&c.innovation);
            continue;
        }
        if c.enabled {
            pairs.insert((c.from, c.to));
        }
        child.connections.push(c);
    }
}

/// `c1 * (excess + disjoint) / max(1, larger gene count) + c3 * mean |Δw|`
/// over matching genes. Symmetric, and zero for identical genomes.
pub fn compatibility_distance(a: &Genome, b: &Genome, cfg: &SpeciationConfig) -> f64 {
    let b_by_inn: HashMap<Innovation, f64> =
        b.connections.iter().map(|c| (c.innovation, c.weight)).collect();
    // Summed in innovation order so d(a, b) and d(b, a) agree bit for bit.
    let mut diffs: Vec<(Innovation, f64)> = a
        .connections
        .iter()
        .filter_map(|c| b_by_inn.get(&c.innovation).map(|w| (c.innovation, (c.weight - w).abs())))
        .collect();
    diffs.sort_unstable_by_key(|d| d.0);
    let matching = diffs.len();
    let weight_diff: f64 = diffs.iter().map(|d| d.1).sum();
    let non_matching = a.connections.len() + b.connections.len() - 2 * matching;
    let larger = a.connections.len().max(b.connections.len()).max(1);
    let structural = cfg.c_excess_disjoint * non_matching as f64 / larger as f64;
    let weights = if matching > 0 {
        cfg.c_weight * weight_diff / matching as f64
    } else {
        0.0
    };
    structural + weights
}

/// Partitions `population` into species.
///
/// Each genome joins the first species (previous generation's first, then
/// those founded so far in this call) whose representative lies within the
/// threshold; otherwise it founds a new species. Empty species are dropped
/// and each surviving species is represented by its first member.
pub fn speciate(population: &[Genome], cfg: &SpeciationConfig, previous: &[Species]) -> Vec<Species> {
    let mut reps: Vec<&Genome> = previous.iter().map(|s| &s.representative).collect();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); reps.len()];
    for (i, g) in population.iter().enumerate() {
        match reps
            .iter()
            .position(|r| compatibility_distance(r, g, cfg) < cfg.threshold)
        {
            Some(s) => members[s].push(i),
            None => {
                reps.push(g);
                members.push(vec![i]);
            }
        }
    }
    members
        .into_iter()
        .filter(|m| !m.is_empty())
        .map(|m| Species { representative: population[m[0]].clone(), members: m })
        .collect()
}

/// Builds the next generation.
///
/// `rankings[s]` lists the population indices of species `s`, best first.
/// `performance[i]` is the training performance of genome `i` and sets the
/// offspring quota of each species (proportional to mean performance,
/// largest-remainder rounding). The species holding the overall best genome
/// always receives at least one slot so elitism carries it forward.
#[allow(clippy::too_many_arguments)]
pub fn reproduce<R: Rng + ?Sized>(
    population: &[Genome],
    performance: &[f64],
    species: &[Species],
    rankings: &[Vec<usize>],
    pop_size: usize,
    mutation: &MutationConfig,
    repro: &ReproductionConfig,
    rng: &mut R,
    registry: &mut InnovationRegistry,
) -> Result<Vec<Genome>, ReproductionError> {
    if species.iter().all(|s| s.members.is_empty()) {
        return Err(ReproductionError::EmptyPopulation);
    }
    for (s, (sp, ranking)) in species.iter().zip(rankings).enumerate() {
        let mut a = sp.members.clone();
        let mut b = ranking.clone();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return Err(ReproductionError::BadRanking(s));
        }
    }

    let quotas = offspring_quotas(performance, species, pop_size);
    let mut next = Vec::with_capacity(pop_size);
    for ((sp, ranking), &quota) in species.iter().zip(rankings).zip(&quotas) {
        if quota == 0 || sp.members.is_empty() {
            continue;
        }
        let elites = repro.elite_count.min(ranking.len()).min(quota);
        for &i in &ranking[..elites] {
            next.push(population[i].clone());
        }
        let eligible = ((repro.survival_fraction * ranking.len() as f64).ceil() as usize)
            .clamp(1, ranking.len());
        let parents = &ranking[..eligible];
        for _ in elites..quota {
            let mut child = if parents.len() == 1 {
                population[parents[0]].clone()
            } else {
                let pa = rng.gen_range(0..parents.len());
                let pb = rng.gen_range(0..parents.len());
                // Rank position stands in for fitness: earlier is fitter.
                crossover(
                    &population[parents[pa]],
                    -(pa as f64),
                    &population[parents[pb]],
                    -(pb as f64),
                    rng,
                )
            };
            mutate(&mut child, mutation, rng, registry);
            next.push(child);
        }
    }
    debug_assert_eq!(next.len(), pop_size);
    Ok(next)
}

fn offspring_quotas(performance: &[f64], species: &[Species], pop_size: usize) -> Vec<usize> {
    let means: Vec<f64> = species
        .iter()
        .map(|s| {
            if s.members.is_empty() {
                0.0
            } else {
                s.members.iter().map(|&i| performance[i].max(0.0)).sum::<f64>() / s.members.len() as f64
            }
        })
        .collect();
    let live = species.iter().filter(|s| !s.members.is_empty()).count();
    let total: f64 = means.iter().sum();
    let shares: Vec<f64> = species
        .iter()
        .zip(&means)
        .map(|(s, &m)| {
            if s.members.is_empty() {
                0.0
            } else if total > 0.0 {
                pop_size as f64 * m / total
            } else {
                pop_size as f64 / live as f64
            }
        })
        .collect();
    let mut quotas: Vec<usize> = shares.iter().map(|s| s.floor() as usize).collect();
    let mut remaining = pop_size - quotas.iter().sum::<usize>();
    // Largest remainder first; ties go to the earlier species.
    let mut order: Vec<usize> = (0..species.len()).filter(|&s| !species[s].members.is_empty()).collect();
    order.sort_by(|&x, &y| {
        let rx = shares[x] - shares[x].floor();
        let ry = shares[y] - shares[y].floor();
        ry.total_cmp(&rx).then(x.cmp(&y))
    });
    for &s in order.iter().cycle() {
        if remaining == 0 {
            break;
        }
        quotas[s] += 1;
        remaining -= 1;
    }

    // Guarantee the champion's species a slot.
    let champion = (0..performance.len())
        .filter(|i| species.iter().any(|s| s.members.contains(i)))
        .fold(None::<usize>, |best, i| match best {
            Some(b) if performance[b] >= performance[i] => Some(b),
            _ => Some(i),
        });
    if let Some(c) = champion {
        let home = species.iter().position(|s| s.members.contains(&c)).unwrap();
        if quotas[home] == 0 {
            let donor = (0..quotas.len()).max_by_key(|&s| (quotas[s], std::cmp::Reverse(s))).unwrap();
            quotas[donor] -= 1;
            quotas[home] += 1;
        }
    }
    quotas
}
