//! Brute-force oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

use nalgebra::{DMatrix, SymmetricEigen};
use neatflow::genome::{ConnectionGene, Genome, Innovation, NodeGene, NodeId, NodeRole};
use neatflow::graph::NetGraph;
use neatflow::phenotype::sigmoid;
use rand::Rng;

pub fn data_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

/// Erdős–Rényi graph on `n` nodes as (node count, edge list).
pub fn random_edges<R: Rng>(rng: &mut R, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    edges
}

pub fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut a = vec![vec![false; n]; n];
    for &(i, j) in edges {
        if i != j {
            a[i][j] = true;
            a[j][i] = true;
        }
    }
    a
}

/// All-pairs hop counts by Floyd–Warshall; `None` when unreachable.
pub fn floyd_warshall(a: &[Vec<bool>]) -> Vec<Vec<Option<u32>>> {
    let n = a.len();
    let mut d: Vec<Vec<Option<u32>>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Some(0) } else if a[i][j] { Some(1) } else { None }).collect())
        .collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(x), Some(y)) = (d[i][k], d[k][j]) {
                    if d[i][j].map_or(true, |cur| x + y < cur) {
                        d[i][j] = Some(x + y);
                    }
                }
            }
        }
    }
    d
}

pub fn oracle_global_efficiency(a: &[Vec<bool>]) -> f64 {
    let n = a.len();
    if n < 2 {
        return 0.0;
    }
    let d = floyd_warshall(a);
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                if let Some(h) = d[i][j] {
                    total += 1.0 / h as f64;
                }
            }
        }
    }
    total / (n * (n - 1)) as f64
}

pub fn oracle_local_efficiency(a: &[Vec<bool>]) -> f64 {
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let mut total = 0.0;
    for i in 0..n {
        let nb: Vec<usize> = (0..n).filter(|&j| a[i][j]).collect();
        if nb.len() < 2 {
            continue;
        }
        let sub: Vec<Vec<bool>> = nb.iter().map(|&u| nb.iter().map(|&v| a[u][v]).collect()).collect();
        total += oracle_global_efficiency(&sub);
    }
    total / n as f64
}

/// Dominant eigenvector of the adjacency matrix from a dense symmetric
/// solver, sign-fixed to be non-negative and scaled to unit length.
pub fn oracle_eigenvector(a: &[Vec<bool>]) -> Vec<f64> {
    let n = a.len();
    let m = DMatrix::from_fn(n, n, |i, j| if a[i][j] { 1.0 } else { 0.0 });
    let eig = SymmetricEigen::new(m);
    let top = eig.eigenvalues.imax();
    let v = eig.eigenvectors.column(top);
    let sign = if v.sum() < 0.0 { -1.0 } else { 1.0 };
    let norm = v.norm();
    v.iter().map(|x| sign * x / norm).collect()
}

pub fn is_connected(a: &[Vec<bool>]) -> bool {
    let d = floyd_warshall(a);
    d.iter().all(|row| row.iter().all(Option::is_some))
}

pub fn graph(n: usize, edges: &[(usize, usize)]) -> NetGraph {
    NetGraph::from_edges(n, edges)
}

/// Output activations by direct recursion over the enabled connections,
/// memoised per node. Inputs are matched to ascending input ids.
pub fn naive_activate(g: &Genome, inputs: &[f64]) -> Vec<f64> {
    let mut in_ids = g.input_ids();
    in_ids.sort_unstable();
    let mut memo: HashMap<NodeId, f64> = in_ids.iter().copied().zip(inputs.iter().copied()).collect();
    let mut out_ids = g.output_ids();
    out_ids.sort_unstable();
    out_ids.iter().map(|&o| value_of(g, o, &mut memo)).collect()
}

fn value_of(g: &Genome, id: NodeId, memo: &mut HashMap<NodeId, f64>) -> f64 {
    if let Some(&v) = memo.get(&id) {
        return v;
    }
    let bias = g.node(id).expect("node exists").bias;
    let mut sum = bias;
    for c in g.connections.iter().filter(|c| c.enabled && c.to == id) {
        sum += c.weight * value_of(g, c.from, memo);
    }
    let v = sigmoid(sum);
    memo.insert(id, v);
    v
}

/// A random valid feed-forward genome: nodes are put in a random order
/// and every enabled edge points forward in it. Some genes are disabled.
pub fn random_genome<R: Rng>(rng: &mut R, n_in: usize, n_out: usize, max_hidden: usize) -> Genome {
    let n_hidden = rng.gen_range(0..=max_hidden);
    let mut nodes: Vec<NodeGene> = Vec::new();
    let mut id = 0u32;
    for (role, count) in [(NodeRole::Input, n_in), (NodeRole::Output, n_out), (NodeRole::Hidden, n_hidden)] {
        for _ in 0..count {
            let bias = if role == NodeRole::Input { 0.0 } else { rng.gen_range(-3.0..3.0) };
            nodes.push(NodeGene { id: NodeId(id), role, bias });
            id += 1;
        }
    }
    // Inputs first, outputs last, hidden shuffled in between.
    let mut order: Vec<NodeId> = nodes.iter().filter(|n| n.role == NodeRole::Input).map(|n| n.id).collect();
    let mut hidden: Vec<NodeId> = nodes.iter().filter(|n| n.role == NodeRole::Hidden).map(|n| n.id).collect();
    for i in (1..hidden.len()).rev() {
        hidden.swap(i, rng.gen_range(0..=i));
    }
    order.extend(hidden);
    order.extend(nodes.iter().filter(|n| n.role == NodeRole::Output).map(|n| n.id));
    let n_first_out = order.len() - n_out;
    let mut connections = Vec::new();
    let mut inn = 0u64;
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            if i >= n_first_out || (i < n_in && j < n_in) {
                continue;
            }
            if rng.gen_bool(0.35) {
                connections.push(ConnectionGene {
                    innovation: Innovation(inn),
                    from: order[i],
                    to: order[j],
                    weight: rng.gen_range(-4.0..4.0),
                    enabled: rng.gen_bool(0.85),
                });
                inn += 1;
            }
        }
    }
    // Shuffle gene order so evaluation cannot lean on it.
    for i in (1..connections.len()).rev() {
        connections.swap(i, rng.gen_range(0..=i));
    }
    Genome { nodes, connections }
}

/// Runs `steps` chained [`mutate`] calls from a task's initial genome and
/// checks the DAG contract, I/O node preservation and count bookkeeping
/// after every call.
pub fn mutation_chain(n_in: usize, n_out: usize, steps: usize, seed: u64) -> Result<(), String> {
    use neatflow::mutation::{mutate, MutationConfig};
    use neatflow::InnovationRegistry;
    use rand::SeedableRng;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut g = Genome::initial(n_in, n_out, 12, &mut rng);
    let mut registry = InnovationRegistry::from_genome(&g);
    let cfg = MutationConfig::default();
    let inputs = g.input_ids();
    let outputs = g.output_ids();
    for step in 0..steps {
        let nodes = g.node_count() as i64;
        let enabled = g.enabled_count() as i64;
        let log = mutate(&mut g, &cfg, &mut rng, &mut registry);
        g.validate().map_err(|e| format!("step {step}: {e}"))?;
        if g.input_ids() != inputs || g.output_ids() != outputs {
            return Err(format!("step {step}: input or output nodes changed"));
        }
        let node_delta = i64::from(log.added_node) - i64::from(log.deleted_node.is_some());
        if g.node_count() as i64 != nodes + node_delta {
            return Err(format!("step {step}: node count {} != {}", g.node_count(), nodes + node_delta));
        }
        let conn_delta = i64::from(log.added_connection) - i64::from(log.deleted_connection)
            + i64::from(log.added_node)
            - log.deleted_node.unwrap_or(0) as i64;
        if g.enabled_count() as i64 != enabled + conn_delta {
            return Err(format!("step {step}: enabled count {} != {}", g.enabled_count(), enabled + conn_delta));
        }
        if step % 10 == 9 {
            registry.next_generation();
        }
    }
    Ok(())
}

/// A random population of objective vectors sharing one shape. Values
/// come from a coarse grid so exact ties are common.
pub fn random_objectives<R: Rng>(rng: &mut R) -> Vec<neatflow::ObjectiveVector> {
    use neatflow::selection::Objective;
    let n = rng.gen_range(1..=30);
    let shape = rng.gen_range(0..3);
    (0..n)
        .map(|_| {
            let mut slots = vec![Objective::max(rng.gen_range(0..8) as f64 / 8.0)];
            if shape >= 1 {
                slots.push(Objective::max(rng.gen_range(0..6) as f64 / 5.0));
            }
            if shape == 2 {
                slots.push(Objective::min(rng.gen_range(0..10) as f64));
            }
            neatflow::ObjectiveVector::new(slots)
        })
        .collect()
}

fn oriented(o: &neatflow::selection::Objective) -> f64 {
    match o.direction {
        neatflow::selection::Direction::Maximize => o.value,
        neatflow::selection::Direction::Minimize => -o.value,
    }
}

/// Stable sort of indices, best first, over the first `depth` slots.
pub fn reference_order(objs: &[neatflow::ObjectiveVector], depth: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..objs.len()).collect();
    idx.sort_by(|&a, &b| {
        for k in 0..depth {
            let o = oriented(&objs[b].slots[k]).total_cmp(&oriented(&objs[a].slots[k]));
            if o != std::cmp::Ordering::Equal {
                return o;
            }
        }
        std::cmp::Ordering::Equal
    });
    idx
}

/// Checks the four ranking laws on `cases` random populations.
pub fn selection_laws(cases: usize, seed: u64) -> Result<(), String> {
    use neatflow::selection::{dominates, rank_population, Objective, RankBranch};
    use neatflow::SelectionConfig;
    use rand::SeedableRng;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let eps = SelectionConfig::default().tie_epsilon;
    for case in 0..cases {
        let objs = random_objectives(&mut rng);
        let depth = objs[0].len();

        let p0 = SelectionConfig { p: 0.0, tie_epsilon: eps };
        let (order, branch) = rank_population(&objs, &p0, &mut rng).map_err(|e| e.to_string())?;
        if branch != RankBranch::PerformanceOnly || order != reference_order(&objs, 1) {
            return Err(format!("case {case}: p=0 is not the performance-only stable sort"));
        }

        let p1 = SelectionConfig { p: 1.0, tie_epsilon: eps };
        let (order, branch) = rank_population(&objs, &p1, &mut rng).map_err(|e| e.to_string())?;
        if branch != RankBranch::AllObjectives || order != reference_order(&objs, depth) {
            return Err(format!("case {case}: p=1 is not the full lexicographic sort"));
        }

        let mut position = vec![0; objs.len()];
        for (k, &i) in order.iter().enumerate() {
            position[i] = k;
        }
        for a in 0..objs.len() {
            for b in 0..objs.len() {
                if dominates(&objs[a], &objs[b], eps).map_err(|e| e.to_string())? && position[a] > position[b] {
                    return Err(format!("case {case}: {a} dominates {b} but ranks after it"));
                }
            }
        }

        // Strictly increasing map of performance leaves both branches unchanged.
        let warped: Vec<_> = objs
            .iter()
            .map(|o| {
                let mut o = o.clone();
                let v = o.slots[0].value;
                o.slots[0] = Objective::max(3.0 * v.exp() + v * v * v - 7.0);
                o
            })
            .collect();
        for p in [0.0, 0.5, 1.0] {
            let cfg = SelectionConfig { p, tie_epsilon: eps };
            let state = rng.gen::<u64>();
            let mut r1 = rand_chacha::ChaCha8Rng::seed_from_u64(state);
            let mut r2 = rand_chacha::ChaCha8Rng::seed_from_u64(state);
            let a = rank_population(&objs, &cfg, &mut r1).map_err(|e| e.to_string())?;
            let b = rank_population(&warped, &cfg, &mut r2).map_err(|e| e.to_string())?;
            if a != b {
                return Err(format!("case {case}: monotone transform of slot 0 changed the ranking at p={p}"));
            }
        }
    }
    Ok(())
}

pub fn state_bits(s: &neatflow::env::CartPoleState) -> [u64; 4] {
    [s.x.to_bits(), s.x_dot.to_bits(), s.theta.to_bits(), s.theta_dot.to_bits()]
}

/// Pushes toward the side the pole is falling to.
pub fn lean_policy(s: &neatflow::env::CartPoleState) -> neatflow::env::Action {
    if s.theta + 0.5 * s.theta_dot > 0.0 {
        neatflow::env::Action::Right
    } else {
        neatflow::env::Action::Left
    }
}

/// Replays 200 steps of [`lean_policy`] from seed 0 and compares the state
/// bits at fixed checkpoints, then the full episode length.
pub fn golden_trajectory() -> Result<(), String> {
    use neatflow::env::cartpole::{cartpole_step, initial_state, run_episode};
    let p = neatflow::env::CartPoleParams::default();
    let golden: [(usize, [u64; 4]); 4] = [
        (49, [4595128292118343811, 13804183724554943856, 4564304265727348004, 4598616005270829866]),
        (99, [4599898842976026382, 4600359198040483032, 13792447629940860379, 13822198146548446388]),
        (149, [4602843085740575420, 13804352741499125152, 4565865647684216460, 4598848404741537133]),
        (199, [4604466440866249763, 4600353456223288003, 13790604431173940761, 13822071821337872775]),
    ];
    let mut s = initial_state(0);
    if state_bits(&s) != [4581683409971671272, 13793376375223542752, 4581397134582844896, 13809871459409151821] {
        return Err("start state differs".into());
    }
    let mut k = 0;
    for (at, want) in golden {
        while k <= at {
            let (n, done) = cartpole_step(&s, lean_policy(&s), &p);
            if done {
                return Err(format!("episode ended early at step {k}"));
            }
            s = n;
            k += 1;
        }
        if state_bits(&s) != want {
            return Err(format!("state differs at step {at}"));
        }
    }
    let steps = run_episode(initial_state(0), &p, lean_policy);
    if steps != 683 {
        return Err(format!("episode length {steps}, expected 683"));
    }
    Ok(())
}

/// Largest relative gap between the simulated pole angle and the
/// linearised solution over 0.5 s, for a massless pole and no force.
pub fn small_angle_gap(dt: f64) -> f64 {
    use neatflow::env::cartpole::step_with_force;
    let p = neatflow::env::CartPoleParams { pole_mass: 1e-9, dt, ..Default::default() };
    let w = (p.gravity / (4.0 * p.half_pole_length / 3.0)).sqrt();
    let theta0 = 0.01;
    let mut s = neatflow::env::CartPoleState { x: 0.0, x_dot: 0.0, theta: theta0, theta_dot: 0.0 };
    let steps = (0.5 / dt).round() as usize;
    let mut worst: f64 = 0.0;
    for k in 1..=steps {
        s = step_with_force(&s, 0.0, &p).0;
        let exact = theta0 * (w * k as f64 * dt).cosh();
        worst = worst.max((s.theta / exact - 1.0).abs());
    }
    worst
}
