use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::env::CartPoleParams;
use crate::graph::EigenConfig;
use crate::mutation::MutationConfig;
use crate::reproduction::{ReproductionConfig, SpeciationConfig};
use crate::selection::{MeasureVariant, SelectionConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    CartPole,
    Iris,
    Wdbc,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::CartPole => "cartpole",
            Task::Iris => "iris",
            Task::Wdbc => "wdbc",
        }
    }

    pub fn default_data_path(self) -> Option<PathBuf> {
        match self {
            Task::CartPole => None,
            Task::Iris => Some(PathBuf::from("data/iris.data")),
            Task::Wdbc => Some(PathBuf::from("data/breast-cancer-wisconsin.data")),
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cartpole" => Ok(Task::CartPole),
            "iris" => Ok(Task::Iris),
            "wdbc" => Ok(Task::Wdbc),
            other => Err(format!("unknown task `{other}` (expected cartpole, iris or wdbc)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CartPoleSetup {
    pub params: CartPoleParams,
    pub train_seeds: Vec<u64>,
    pub test_seeds: Vec<u64>,
}

impl Default for CartPoleSetup {
    fn default() -> Self {
        CartPoleSetup {
            params: CartPoleParams::default(),
            train_seeds: (0..10).collect(),
            test_seeds: (1000..1020).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitSetup {
    pub train_fraction: f64,
    pub stratified: bool,
}

impl Default for SplitSetup {
    fn default() -> Self {
        SplitSetup { train_fraction: 0.75, stratified: true }
    }
}

/// Everything that determines a batch of runs.
///
/// `output_dir` is accepted from config files but never echoed back, so
/// the same experiment written to two places produces identical files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub task: Task,
    pub measure: MeasureVariant,
    pub pressure: f64,
    pub population_size: usize,
    pub generations: usize,
    pub runs: usize,
    pub base_seed: u64,
    pub hidden_nodes: usize,
    pub tie_epsilon: f64,
    pub mutation: MutationConfig,
    pub speciation: SpeciationConfig,
    pub reproduction: ReproductionConfig,
    pub eigen: EigenConfig,
    pub cartpole: CartPoleSetup,
    pub split: SplitSetup,
    pub data_path: Option<PathBuf>,
    #[serde(skip_serializing)]
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig::for_task(Task::Iris)
    }
}

impl ExperimentConfig {
    /// Desk-scale defaults: 50 x 500 for cart-pole, 10 x 1000 for the
    /// classification tasks.
    pub fn for_task(task: Task) -> Self {
        let (population_size, generations) = match task {
            Task::CartPole => (50, 500),
            Task::Iris | Task::Wdbc => (10, 1000),
        };
        ExperimentConfig {
            task,
            measure: MeasureVariant::PerfOnly,
            pressure: 0.15,
            population_size,
            generations,
            runs: 20,
            base_seed: 0,
            hidden_nodes: 12,
            tie_epsilon: 1e-9,
            mutation: MutationConfig::default(),
            speciation: SpeciationConfig::default(),
            reproduction: ReproductionConfig::default(),
            eigen: EigenConfig::default(),
            cartpole: CartPoleSetup::default(),
            split: SplitSetup::default(),
            data_path: None,
            output_dir: None,
        }
    }

    /// Population 150 and 5000 generations for cart-pole; classification
    /// settings are already at full scale.
    pub fn full_scale(mut self) -> Self {
        if self.task == Task::CartPole {
            self.population_size = 150;
            self.generations = 5000;
        }
        self
    }

    pub fn selection(&self) -> SelectionConfig {
        SelectionConfig { p: self.pressure, tie_epsilon: self.tie_epsilon }
    }

    pub fn data_path(&self) -> Option<PathBuf> {
        self.data_path.clone().or_else(|| self.task.default_data_path())
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.population_size < 2 {
            return bad(format!("population size must be at least 2, got {}", self.population_size));
        }
        if self.generations < 1 {
            return bad("generations must be at least 1".into());
        }
        if self.runs < 1 {
            return bad("runs must be at least 1".into());
        }
        if !(self.split.train_fraction > 0.0 && self.split.train_fraction < 1.0) {
            return bad(format!("train fraction must lie in (0, 1), got {}", self.split.train_fraction));
        }
        if !(self.eigen.tol > 0.0) || self.eigen.max_iter < 1 {
            return bad("eigenvector tolerance must be positive and max_iter at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.reproduction.survival_fraction) {
            return bad("survival fraction must lie in [0, 1]".into());
        }
        if self.task == Task::CartPole && self.cartpole.train_seeds.is_empty() {
            return bad("cart-pole needs at least one training seed".into());
        }
        self.selection().check().map_err(HarnessError::Config)?;
        self.mutation.check().map_err(HarnessError::Config)?;
        self.speciation.check().map_err(HarnessError::Config)?;
        self.cartpole.params.check().map_err(HarnessError::Config)?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }
}
