//! Generation loop, batches of independent runs, pressure sweeps and the
//! files they produce.
//!
//! All randomness of a run flows from one ChaCha stream seeded with
//! `base_seed + run_index` and is consumed on the control thread in
//! population order. Only genome evaluation fans out to the rayon pool, and
//! its results are collected by index, so the thread count never changes
//! any output.

mod config;
mod output;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{CartPoleSetup, ExperimentConfig, SplitSetup, Task};
pub use output::{batch_dir_name, concat_traces, report, write_outputs, TRACE_HEADER};

use crate::data::{self, DataError, SplitSpec};
use crate::env::{evaluate, evaluate_test, EnvError, EvalResult, TaskContext};
use crate::genome::Genome;
use crate::innovation::InnovationRegistry;
use crate::mutation::perturb_weights;
use crate::reproduction::{reproduce, speciate, ReproductionError, Species};
use crate::selection::{objective_vector, rank_population, MeasureVariant};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Reproduction(#[from] ReproductionError),
}

impl HarnessError {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.display().to_string(), source }
    }

    /// True for failures reading or writing files, including data files.
    pub fn is_io(&self) -> bool {
        matches!(self, HarnessError::Io { .. } | HarnessError::Data(_))
    }
}

/// Metrics of the best-by-training-performance genome of one generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub generation: usize,
    pub best_train: f64,
    pub global_efficiency: f64,
    pub local_efficiency: f64,
    pub eigenvector_centrality: f64,
    pub entropy: f64,
    pub connections: usize,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub run_index: usize,
    pub best: Genome,
    pub train: f64,
    pub test: f64,
    pub connections: usize,
    pub nodes: usize,
    pub trace: Vec<TraceRow>,
}

/// One row of the summary table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub measure: MeasureVariant,
    pub pressure: f64,
    pub mean_train: f64,
    pub mean_test: f64,
    pub mean_connections: f64,
    pub mean_nodes: f64,
    pub runs: usize,
}

impl BatchSummary {
    /// Means in run-index order.
    pub fn from_values(measure: MeasureVariant, pressure: f64, values: &[(f64, f64, usize, usize)]) -> Self {
        let n = values.len().max(1) as f64;
        let mean = |f: &dyn Fn(&(f64, f64, usize, usize)) -> f64| values.iter().map(f).sum::<f64>() / n;
        BatchSummary {
            measure,
            pressure,
            mean_train: mean(&|v| v.0),
            mean_test: mean(&|v| v.1),
            mean_connections: mean(&|v| v.2 as f64),
            mean_nodes: mean(&|v| v.3 as f64),
            runs: values.len(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BatchResult {
    pub config: ExperimentConfig,
    pub runs: Vec<RunResult>,
    pub summary: BatchSummary,
}

/// Loads data and splits it for one run. The split seed is the run seed,
/// so batches that share `base_seed` share their splits.
pub fn task_context(cfg: &ExperimentConfig, run_index: usize) -> Result<TaskContext, HarnessError> {
    match cfg.task {
        Task::CartPole => Ok(TaskContext::CartPole {
            params: cfg.cartpole.params.clone(),
            train_seeds: cfg.cartpole.train_seeds.clone(),
            test_seeds: cfg.cartpole.test_seeds.clone(),
        }),
        Task::Iris | Task::Wdbc => {
            let path = cfg
                .data_path()
                .ok_or_else(|| HarnessError::Config("dataset path required".into()))?;
            let full = match cfg.task {
                Task::Iris => data::load_iris(&path)?,
                _ => data::load_wdbc(&path)?,
            };
            let spec = SplitSpec {
                train_fraction: cfg.split.train_fraction,
                seed: run_seed(cfg, run_index),
                stratified: cfg.split.stratified,
            };
            let (train, test) = data::split(&full, &spec)?;
            Ok(TaskContext::Classification { train, test })
        }
    }
}

fn run_seed(cfg: &ExperimentConfig, run_index: usize) -> u64 {
    cfg.base_seed.wrapping_add(run_index as u64)
}

fn evaluate_population(
    pop: &[Genome],
    task: &TaskContext,
    cfg: &ExperimentConfig,
) -> Result<Vec<EvalResult>, EnvError> {
    pop.par_iter().map(|g| evaluate(g, task, cfg.eigen)).collect()
}

/// Index of the highest performance; earliest index wins ties.
fn best_index(evals: &[EvalResult]) -> usize {
    let mut best = 0;
    for (i, e) in evals.iter().enumerate() {
        if e.performance > evals[best].performance {
            best = i;
        }
    }
    best
}

/// One full evolutionary run.
pub fn run_experiment(cfg: &ExperimentConfig, run_index: usize) -> Result<RunResult, HarnessError> {
    cfg.validate()?;
    let task = task_context(cfg, run_index)?;
    run_with_task(cfg, run_index, &task)
}

pub fn run_with_task(cfg: &ExperimentConfig, run_index: usize, task: &TaskContext) -> Result<RunResult, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(run_seed(cfg, run_index));
    let (n_in, n_out) = task.io();
    let template = Genome::initial(n_in, n_out, cfg.hidden_nodes, &mut rng);
    let mut registry = InnovationRegistry::from_genome(&template);
    let mut population: Vec<Genome> = (0..cfg.population_size)
        .map(|_| {
            let mut g = template.clone();
            perturb_weights(&mut g, &cfg.mutation, &mut rng);
            g
        })
        .collect();

    let selection = cfg.selection();
    let mut species: Vec<Species> = Vec::new();
    let mut trace = Vec::with_capacity(cfg.generations);
    let mut champion: Option<(Genome, EvalResult)> = None;

    for generation in 0..cfg.generations {
        let evals = evaluate_population(&population, task, cfg)?;
        let b = best_index(&evals);
        let e = &evals[b];
        trace.push(TraceRow {
            generation,
            best_train: e.performance,
            global_efficiency: e.metrics.global_efficiency,
            local_efficiency: e.metrics.local_efficiency,
            eigenvector_centrality: e.metrics.eigenvector_centrality,
            entropy: e.metrics.entropy,
            connections: e.connection_count,
            nodes: e.node_count,
        });
        if champion.as_ref().map_or(true, |(_, c)| e.performance > c.performance) {
            champion = Some((population[b].clone(), e.clone()));
        }
        if generation + 1 == cfg.generations {
            break;
        }

        species = speciate(&population, &cfg.speciation, &species);
        let performance: Vec<f64> = evals.iter().map(|e| e.performance).collect();
        let mut rankings = Vec::with_capacity(species.len());
        for sp in &species {
            let objs: Vec<_> = sp
                .members
                .iter()
                .map(|&i| objective_vector(evals[i].performance, &evals[i].metrics, cfg.measure))
                .collect();
            let (order, _) = rank_population(&objs, &selection, &mut rng)
                .expect("one variant yields one objective shape");
            rankings.push(order.into_iter().map(|k| sp.members[k]).collect::<Vec<_>>());
        }
        population = reproduce(
            &population,
            &performance,
            &species,
            &rankings,
            cfg.population_size,
            &cfg.mutation,
            &cfg.reproduction,
            &mut rng,
            &mut registry,
        )?;
        registry.next_generation();
    }

    let (best, best_eval) = champion.expect("at least one generation ran");
    let test = evaluate_test(&best, task)?;
    Ok(RunResult {
        run_index,
        train: best_eval.performance,
        test,
        connections: best_eval.connection_count,
        nodes: best_eval.node_count,
        best,
        trace,
    })
}

/// Runs `0..cfg.runs` and averages them. Runs execute in parallel;
/// results are ordered by run index.
pub fn run_batch(cfg: &ExperimentConfig) -> Result<BatchResult, HarnessError> {
    cfg.validate()?;
    let runs: Vec<RunResult> = (0..cfg.runs)
        .into_par_iter()
        .map(|k| run_experiment(cfg, k))
        .collect::<Result<_, _>>()?;
    let values: Vec<_> = runs.iter().map(|r| (r.train, r.test, r.connections, r.nodes)).collect();
    let summary = BatchSummary::from_values(cfg.measure, cfg.pressure, &values);
    Ok(BatchResult { config: cfg.clone(), runs, summary })
}

/// One batch per pressure value, all sharing `cfg`'s seeds.
pub fn pressure_sweep(cfg: &ExperimentConfig, p_values: &[f64]) -> Result<Vec<BatchResult>, HarnessError> {
    if p_values.is_empty() {
        return Err(HarnessError::Config("pressure sweep needs at least one p value".into()));
    }
    p_values
        .iter()
        .map(|&p| run_batch(&ExperimentConfig { pressure: p, ..cfg.clone() }))
        .collect()
}

/// Runs every (measure, pressure) combination in order: measures outer,
/// pressures inner.
pub fn run_grid(
    cfg: &ExperimentConfig,
    measures: &[MeasureVariant],
    p_values: &[f64],
) -> Result<Vec<BatchResult>, HarnessError> {
    if measures.is_empty() {
        return Err(HarnessError::Config("at least one measure is required".into()));
    }
    let mut out = Vec::new();
    for &m in measures {
        out.extend(pressure_sweep(&ExperimentConfig { measure: m, ..cfg.clone() }, p_values)?);
    }
    Ok(out)
}

/// Runs `f` on a dedicated pool of `threads` workers (rayon's default when
/// `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, HarnessError> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| HarnessError::Config(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
