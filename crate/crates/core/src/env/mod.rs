//! Evaluation tasks and the per-genome evaluation entry point.

pub mod cartpole;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::Dataset;
use crate::genome::Genome;
use crate::graph::{compute_metrics, EigenConfig, MetricsReport};
use crate::phenotype::{Phenotype, PhenotypeError};

pub use cartpole::{cartpole_fitness, cartpole_step, Action, CartPoleParams, CartPoleState};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvError {
    #[error("network has {got:?} (inputs, outputs), task needs {expected:?}")]
    ArityMismatch { expected: (usize, usize), got: (usize, usize) },
    #[error(transparent)]
    Phenotype(#[from] PhenotypeError),
}

/// Fraction of samples classified correctly.
///
/// With one output the prediction is class 1 iff the activation is at
/// least 0.5; with several outputs it is the argmax, ties going to the
/// lowest class.
pub fn classify_fitness(net: &Phenotype, split: &Dataset) -> Result<f64, EnvError> {
    let out = net.output_count();
    let expected_out = if split.n_classes == 2 && out == 1 { 1 } else { split.n_classes };
    if net.input_count() != split.n_features() || out != expected_out {
        return Err(EnvError::ArityMismatch {
            expected: (split.n_features(), expected_out),
            got: (net.input_count(), out),
        });
    }
    if split.is_empty() {
        return Ok(0.0);
    }
    let mut scratch = Vec::new();
    let mut correct = 0usize;
    for (x, &label) in split.features.iter().zip(&split.labels) {
        net.activate_into(x, &mut scratch)?;
        let predicted = if out == 1 {
            usize::from(net.output(&scratch, 0) >= 0.5)
        } else {
            let mut best = 0;
            for k in 1..out {
                if net.output(&scratch, k) > net.output(&scratch, best) {
                    best = k;
                }
            }
            best
        };
        if predicted == label {
            correct += 1;
        }
    }
    Ok(correct as f64 / split.len() as f64)
}

/// Everything needed to score genomes on one task.
#[derive(Debug, Clone)]
pub enum TaskContext {
    CartPole { params: CartPoleParams, train_seeds: Vec<u64>, test_seeds: Vec<u64> },
    Classification { train: Dataset, test: Dataset },
}

impl TaskContext {
    /// (inputs, outputs) the task's networks must expose.
    pub fn io(&self) -> (usize, usize) {
        match self {
            TaskContext::CartPole { .. } => (4, 1),
            TaskContext::Classification { train, .. } => {
                let outputs = if train.n_classes == 2 { 1 } else { train.n_classes };
                (train.n_features(), outputs)
            }
        }
    }

    pub fn train_performance(&self, net: &Phenotype) -> Result<f64, EnvError> {
        match self {
            TaskContext::CartPole { params, train_seeds, .. } => cartpole_fitness(net, params, train_seeds),
            TaskContext::Classification { train, .. } => classify_fitness(net, train),
        }
    }

    pub fn test_performance(&self, net: &Phenotype) -> Result<f64, EnvError> {
        match self {
            TaskContext::CartPole { params, test_seeds, .. } => cartpole_fitness(net, params, test_seeds),
            TaskContext::Classification { test, .. } => classify_fitness(net, test),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub performance: f64,
    pub metrics: MetricsReport,
    pub node_count: usize,
    pub connection_count: usize,
}

/// Compiles `genome`, scores it on the training side of `task`, and
/// computes its network measures.
pub fn evaluate(genome: &Genome, task: &TaskContext, eigen: EigenConfig) -> Result<EvalResult, EnvError> {
    let net = Phenotype::compile(genome)?;
    let performance = task.train_performance(&net)?;
    let metrics = compute_metrics(genome, eigen);
    Ok(EvalResult {
        performance,
        node_count: metrics.node_count,
        connection_count: metrics.connections_cost,
        metrics,
    })
}

pub fn evaluate_test(genome: &Genome, task: &TaskContext) -> Result<f64, EnvError> {
    let net = Phenotype::compile(genome)?;
    task.test_performance(&net)
}
