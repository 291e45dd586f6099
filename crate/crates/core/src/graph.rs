//! Network-science measures on the undirected view of a genome.
//!
//! Every measure here treats the enabled connections of a genome as an
//! undirected simple graph: direction is ignored, parallel or antiparallel
//! connections collapse to one edge, and disabled genes are invisible.
//!
//! | measure | definition |
//! |---------|------------|
//! | global efficiency | `1/(N(N-1)) Σ_{i≠j} 1/d_ij`, unreachable pairs add 0 |
//! | local efficiency | mean over nodes of the global efficiency of the subgraph induced on the node's neighbours |
//! | degree centrality | `deg(i)/(N-1)`, aggregated by the mean |
//! | eigenvector centrality | dominant unit eigenvector of the adjacency matrix, aggregated by the mean |
//! | degree entropy | `-Σ p_k ln p_k` over degree classes, `p_k` = share of nodes with degree `k` |
//! | connections cost | number of enabled connections |

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::genome::{Genome, NodeId};

/// Undirected simple graph over a genome's nodes. Node positions follow
/// the genome's node order; neighbour lists are sorted and duplicate free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetGraph {
    node_ids: Vec<NodeId>,
    neighbors: Vec<Vec<usize>>,
}

impl NetGraph {
    /// Builds a graph from `n` nodes labelled `0..n` and an edge list over
    /// positions. Self-loops are ignored and duplicate edges collapse.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let ids = (0..n).map(|i| NodeId(i as u32)).collect();
        Self::with_ids(ids, edges)
    }

    pub fn with_ids(node_ids: Vec<NodeId>, edges: &[(usize, usize)]) -> Self {
        let n = node_ids.len();
        let mut neighbors = vec![Vec::new(); n];
        for &(a, b) in edges {
            assert!(a < n && b < n, "edge ({a}, {b}) out of range for {n} nodes");
            if a == b {
                continue;
            }
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        NetGraph { node_ids, neighbors }
    }

    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn node_ids(&self) -> &[NodeId] {
        &self.node_ids
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors[a].binary_search(&b).is_ok()
    }

    /// Subgraph induced on `keep` (positions into this graph), relabelled
    /// `0..keep.len()` in the given order.
    pub fn induced(&self, keep: &[usize]) -> NetGraph {
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        let mut edges = Vec::new();
        for (k, &v) in keep.iter().enumerate() {
            for u in &self.neighbors[v] {
                if let Some(&j) = pos.get(u) {
                    if k < j {
                        edges.push((k, j));
                    }
                }
            }
        }
        NetGraph::with_ids(keep.iter().map(|&v| self.node_ids[v]).collect(), &edges)
    }
}

/// One graph node per genome node, one undirected edge per enabled
/// connection.
pub fn build_graph(genome: &Genome) -> NetGraph {
    let pos: HashMap<NodeId, usize> = genome
        .nodes
        .iter()
        .enumerate()
        .map(|(k, n)| (n.id, k))
        .collect();
    let edges: Vec<(usize, usize)> = genome
        .enabled_connections()
        .filter_map(|c| Some((*pos.get(&c.from)?, *pos.get(&c.to)?)))
        .collect();
    NetGraph::with_ids(genome.nodes.iter().map(|n| n.id).collect(), &edges)
}

/// Hop-count distances between every ordered pair; `None` when unreachable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    dist: Vec<Option<u32>>,
}

impl DistanceMatrix {
    pub fn get(&self, i: usize, j: usize) -> Option<u32> {
        self.dist[i * self.n + j]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

/// Breadth-first search from every node.
pub fn shortest_paths(g: &NetGraph) -> DistanceMatrix {
    let n = g.node_count();
    let mut dist = vec![None; n * n];
    let mut queue = std::collections::VecDeque::with_capacity(n);
    for s in 0..n {
        let row = &mut dist[s * n..(s + 1) * n];
        row[s] = Some(0);
        queue.clear();
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            let d = row[v].unwrap();
            for &u in g.neighbors(v) {
                if row[u].is_none() {
                    row[u] = Some(d + 1);
                    queue.push_back(u);
                }
            }
        }
    }
    DistanceMatrix { n, dist }
}

/// Mean inverse shortest-path length over ordered pairs. Zero for N < 2.
pub fn global_efficiency(g: &NetGraph) -> f64 {
    let n = g.node_count();
    if n < 2 {
        return 0.0;
    }
    let d = shortest_paths(g);
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                if let Some(h) = d.get(i, j) {
                    total += 1.0 / h as f64;
                }
            }
        }
    }
    total / (n * (n - 1)) as f64
}

/// Mean over nodes of the efficiency of each neighbourhood subgraph.
/// Nodes with fewer than two neighbours contribute 0.
pub fn local_efficiency(g: &NetGraph) -> f64 {
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    let total: f64 = (0..n)
        .filter(|&i| g.degree(i) >= 2)
        .map(|i| global_efficiency(&g.induced(g.neighbors(i))))
        .sum();
    total / n as f64
}

/// Per-node scores plus their network-level mean.
#[derive(Debug, Clone, PartialEq)]
pub struct Centrality {
    pub per_node: BTreeMap<NodeId, f64>,
    pub aggregate: f64,
}

/// `deg(i)/(N-1)` per node (0 when N < 2), aggregated by the mean.
pub fn degree_centrality(g: &NetGraph) -> Centrality {
    let n = g.node_count();
    let scale = if n >= 2 { 1.0 / (n - 1) as f64 } else { 0.0 };
    let per_node: BTreeMap<NodeId, f64> = (0..n)
        .map(|i| (g.node_ids()[i], g.degree(i) as f64 * scale))
        .collect();
    let aggregate = mean(per_node.values().copied(), n);
    Centrality { per_node, aggregate }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for EigenConfig {
    fn default() -> Self {
        EigenConfig { tol: 1e-6, max_iter: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenCentrality {
    pub centrality: Centrality,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph has no nodes")]
    EmptyGraph,
}

/// Eigenvector centrality by power iteration.
///
/// Iterates `x <- (A + I) x / ‖(A + I) x‖₂` from the uniform unit vector.
/// The shift leaves the eigenvectors of `A` unchanged but moves the
/// spectrum away from `-λ_max`, so bipartite graphs (every layered network)
/// converge instead of oscillating. Stops once successive vectors differ by
/// less than `tol` in L1.
///
/// A graph without edges has no dominant direction; every node scores 0.
/// If the iteration does not converge within `max_iter` steps the aggregate
/// is 0 and `converged` is false.
pub fn eigenvector_centrality(g: &NetGraph, cfg: EigenConfig) -> Result<EigenCentrality, GraphError> {
    let n = g.node_count();
    if n == 0 {
        return Err(GraphError::EmptyGraph);
    }
    let zeros = || Centrality {
        per_node: g.node_ids().iter().map(|&id| (id, 0.0)).collect(),
        aggregate: 0.0,
    };
    if g.edge_count() == 0 {
        return Ok(EigenCentrality { centrality: zeros(), converged: true, iterations: 0 });
    }

    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut next = vec![0.0; n];
    for iter in 1..=cfg.max_iter {
        for i in 0..n {
            next[i] = x[i] + g.neighbors(i).iter().map(|&j| x[j]).sum::<f64>();
        }
        let norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in next.iter_mut() {
            *v /= norm;
        }
        let delta: f64 = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        if delta < cfg.tol {
            let per_node: BTreeMap<NodeId, f64> =
                g.node_ids().iter().copied().zip(x.iter().copied()).collect();
            let aggregate = mean(x.iter().copied(), n);
            return Ok(EigenCentrality {
                centrality: Centrality { per_node, aggregate },
                converged: true,
                iterations: iter,
            });
        }
    }
    let per_node = g.node_ids().iter().copied().zip(x.iter().copied()).collect();
    Ok(EigenCentrality {
        centrality: Centrality { per_node, aggregate: 0.0 },
        converged: false,
        iterations: cfg.max_iter,
    })
}

/// Degree classes with the number of nodes in each, ascending by degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeHistogram {
    pub classes: Vec<(usize, usize)>,
}

impl DegreeHistogram {
    pub fn total(&self) -> usize {
        self.classes.iter().map(|c| c.1).sum()
    }
}

pub fn degree_histogram(g: &NetGraph) -> DegreeHistogram {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..g.node_count() {
        *counts.entry(g.degree(i)).or_default() += 1;
    }
    DegreeHistogram { classes: counts.into_iter().collect() }
}

/// Shannon entropy (nats) of the degree distribution.
pub fn degree_entropy(g: &NetGraph) -> f64 {
    histogram_entropy(&degree_histogram(g))
}

pub fn histogram_entropy(h: &DegreeHistogram) -> f64 {
    let total = h.total();
    if h.classes.len() < 2 {
        return 0.0;
    }
    h.classes
        .iter()
        .map(|&(_, count)| {
            let p = count as f64 / total as f64;
            -p * p.ln()
        })
        .sum()
}

/// Number of enabled connections.
pub fn connections_cost(genome: &Genome) -> usize {
    genome.enabled_count()
}

/// All network measures of one genome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub global_efficiency: f64,
    pub local_efficiency: f64,
    pub degree_centrality: f64,
    pub eigenvector_centrality: f64,
    pub eigenvector_converged: bool,
    pub entropy: f64,
    pub connections_cost: usize,
    pub node_count: usize,
}

pub fn compute_metrics(genome: &Genome, cfg: EigenConfig) -> MetricsReport {
    let g = build_graph(genome);
    let (ec, converged) = match eigenvector_centrality(&g, cfg) {
        Ok(e) => (e.centrality.aggregate, e.converged),
        Err(GraphError::EmptyGraph) => (0.0, true),
    };
    MetricsReport {
        global_efficiency: global_efficiency(&g),
        local_efficiency: local_efficiency(&g),
        degree_centrality: degree_centrality(&g).aggregate,
        eigenvector_centrality: ec,
        eigenvector_converged: converged,
        entropy: degree_entropy(&g),
        connections_cost: connections_cost(genome),
        node_count: genome.node_count(),
    }
}

fn mean(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        values.sum::<f64>() / n as f64
    }
}
