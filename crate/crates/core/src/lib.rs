//! Neuroevolution of small feed-forward networks under a stochastic
//! multi-objective rule that trades task performance against information
//! flow and wiring cost.
//!
//! The pieces, bottom up:
//!
//! * [`genome`], [`innovation`], [`mutation`], [`reproduction`]: NEAT-style
//!   encoding, the six mutation operators, crossover and speciation.
//! * [`phenotype`]: compiles a genome into a sigmoid network.
//! * [`graph`]: efficiency, centrality, degree entropy and connection cost
//!   on the undirected view of a genome.
//! * [`selection`]: objective vectors for the eleven measure variants and
//!   the pressure-`p` lexicographic ranking.
//! * [`env`], [`data`]: cart-pole and tabular classification tasks.
//! * [`harness`]: generation loop, batches, sweeps and output files.

pub mod data;
pub mod env;
pub mod genome;
pub mod graph;
pub mod harness;
pub mod innovation;
pub mod mutation;
pub mod phenotype;
pub mod reproduction;
pub mod selection;

pub use env::{evaluate, EvalResult, TaskContext};
pub use genome::{ConnectionGene, Genome, GenomeError, Innovation, NodeGene, NodeId, NodeRole};
pub use graph::{compute_metrics, EigenConfig, MetricsReport, NetGraph};
pub use harness::{
    pressure_sweep, run_batch, run_experiment, BatchResult, BatchSummary, ExperimentConfig, HarnessError,
    RunResult, Task, TraceRow,
};
pub use innovation::InnovationRegistry;
pub use mutation::{mutate, MutationConfig};
pub use phenotype::Phenotype;
pub use reproduction::{ReproductionConfig, SpeciationConfig, Species};
pub use selection::{FlowMetric, MeasureVariant, ObjectiveVector, SelectionConfig};
