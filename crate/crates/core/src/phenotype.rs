//! Executable feed-forward network compiled from a genome.

use std::collections::HashMap;

use thiserror::Error;

use crate::genome::{topological_order, Genome, NodeRole};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhenotypeError {
    #[error("enabled connections contain a cycle")]
    CyclicGenome,
    #[error("expected {expected} inputs, got {got}")]
    InputArity { expected: usize, got: usize },
}

/// Nodes are stored by position in evaluation order.
#[derive(Debug, Clone, PartialEq)]
pub struct Phenotype {
    /// Node ids in evaluation order.
    pub topo_order: Vec<crate::genome::NodeId>,
    /// Per position: (source position, weight), in genome connection order.
    pub incoming: Vec<Vec<(usize, f64)>>,
    pub biases: Vec<f64>,
    /// Position of each input slot (inputs in ascending id order).
    pub inputs: Vec<usize>,
    /// Position of each output slot (outputs in ascending id order).
    pub outputs: Vec<usize>,
    is_input: Vec<bool>,
    slope: f64,
}

/// Logistic function `1 / (1 + e^(-x))`.
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl Phenotype {
    pub fn compile(g: &Genome) -> Result<Self, PhenotypeError> {
        Self::compile_with_slope(g, 1.0)
    }

    pub fn compile_with_slope(g: &Genome, slope: f64) -> Result<Self, PhenotypeError> {
        let order = topological_order(g).ok_or(PhenotypeError::CyclicGenome)?;
        let pos: HashMap<_, _> = order.iter().enumerate().map(|(k, &id)| (id, k)).collect();
        let mut incoming = vec![Vec::new(); order.len()];
        for c in g.enabled_connections() {
            incoming[pos[&c.to]].push((pos[&c.from], c.weight));
        }
        let mut biases = vec![0.0; order.len()];
        let mut is_input = vec![false; order.len()];
        for n in &g.nodes {
            biases[pos[&n.id]] = n.bias;
            is_input[pos[&n.id]] = n.role == NodeRole::Input;
        }
        let slot = |role| {
            let mut ids = g.ids_with_role(role);
            ids.sort_unstable();
            ids.into_iter().map(|id| pos[&id]).collect::<Vec<_>>()
        };
        Ok(Phenotype {
            inputs: slot(NodeRole::Input),
            outputs: slot(NodeRole::Output),
            topo_order: order,
            incoming,
            biases,
            is_input,
            slope,
        })
    }

    pub fn input_count(&self) -> usize {
        self.inputs.len()
    }

    pub fn output_count(&self) -> usize {
        self.outputs.len()
    }

    /// Feeds `inputs` through the network and returns the output
    /// activations. Input nodes pass their value through unsquashed.
    pub fn activate(&self, inputs: &[f64]) -> Result<Vec<f64>, PhenotypeError> {
        let mut values = vec![0.0; self.topo_order.len()];
        self.activate_into(inputs, &mut values)?;
        Ok(self.outputs.iter().map(|&o| values[o]).collect())
    }

    /// Like [`Phenotype::activate`] but reuses `scratch` for node values;
    /// outputs are then read with [`Phenotype::output`].
    pub fn activate_into(&self, inputs: &[f64], scratch: &mut Vec<f64>) -> Result<(), PhenotypeError> {
        if inputs.len() != self.inputs.len() {
            return Err(PhenotypeError::InputArity { expected: self.inputs.len(), got: inputs.len() });
        }
        scratch.clear();
        scratch.resize(self.topo_order.len(), 0.0);
        for (&p, &v) in self.inputs.iter().zip(inputs) {
            scratch[p] = v;
        }
        for k in 0..self.topo_order.len() {
            if self.is_input[k] {
                continue;
            }
            let sum: f64 = self.incoming[k].iter().map(|&(src, w)| w * scratch[src]).sum();
            scratch[k] = sigmoid(self.slope * (self.biases[k] + sum));
        }
        Ok(())
    }

    pub fn output(&self, scratch: &[f64], slot: usize) -> f64 {
        scratch[self.outputs[slot]]
    }
}
